// Copyright 2026 The sfgan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sfgan/audio.h"
#include "sfgan/cli.h"
#include "sfgan/feature_file.h"
#include "test_util.h"

using namespace sfgan;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

void write_clip(const std::string& path, size_t samples, uint64_t seed) {
  AudioBuffer a;
  a.samples = sfgan::testing::synthetic_utterance(double(samples) / 22050, 22050, seed);
  a.samples.resize(samples, 0.0f);
  write_wav(path, a);
}

// A toy checkpoint trained for two steps, shared by the cases below.
class Fixture {
 public:
  Fixture() {
    write_clip(dir.path("a.wav"), 8192, 1);
    write_clip(dir.path("b.wav"), 9000, 2);
    REQUIRE(run({"--seed", "4", "train", "--wav", dir.path("a.wav"), "--out", ckpt(), "--steps",
                 "2"}).code == 0);
  }
  std::string ckpt() const { return dir.path("toy.ckpt"); }
  sfgan::testing::TempDir dir;
};

}  // namespace

TEST_CASE("extract writes aligned features and rejects bad input") {
  sfgan::testing::TempDir dir;
  write_clip(dir.path("a.wav"), 9000, 3);
  auto r = run({"extract", "--wav", dir.path("a.wav"), "--out", dir.path("a.feat"), "--text",
                dir.path("a.txt")});
  REQUIRE(r.code == 0);
  Features f = load_features(dir.path("a.feat"));
  REQUIRE(f.f0.has_value());
  CHECK(f.mel.rows == 36);
  CHECK(static_cast<int64_t>(f.f0->size()) == f.mel.rows);
  CHECK(f.samples == 9000);
  MelSpectrogram t = load_mel_text(dir.path("a.txt"));
  CHECK(t.values == f.mel.values);

  REQUIRE(run({"extract", "--wav", dir.path("a.wav"), "--out", dir.path("b.feat")}).code == 0);
  CHECK(slurp(dir.path("a.feat")) == slurp(dir.path("b.feat")));

  std::ofstream(dir.path("bad.wav")) << "garbage";
  r = run({"extract", "--wav", dir.path("bad.wav"), "--out", dir.path("c.feat")});
  CHECK(r.code != 0);
  CHECK(r.err.find("bad.wav") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir.path("c.feat")));
  CHECK(run({"extract", "--wav", dir.path("a.wav")}).code != 0);
  CHECK(run({"no-such-command"}).code != 0);
}

TEST_CASE("command line workflow") {
  Fixture fx;
  auto& dir = fx.dir;

  SUBCASE("training is reproducible") {
    REQUIRE(run({"--seed", "4", "train", "--wav", dir.path("a.wav"), "--out", dir.path("again"),
                 "--steps", "2"}).code == 0);
    CHECK(slurp(fx.ckpt()) == slurp(dir.path("again")));
    REQUIRE(run({"train", "--wav", dir.path("a.wav"), "--wav", dir.path("b.wav"), "--out",
                 dir.path("j1"), "--steps", "2", "--jobs", "1"}).code == 0);
    REQUIRE(run({"train", "--wav", dir.path("a.wav"), "--wav", dir.path("b.wav"), "--out",
                 dir.path("j2"), "--steps", "2", "--jobs", "2"}).code == 0);
    CHECK(slurp(dir.path("j1")) == slurp(dir.path("j2")));
  }

  SUBCASE("resume continues a run") {
    REQUIRE(run({"--seed", "4", "train", "--wav", dir.path("a.wav"), "--out", dir.path("r3"),
                 "--steps", "3"}).code == 0);
    REQUIRE(run({"train", "--wav", dir.path("a.wav"), "--resume", fx.ckpt(), "--out",
                 dir.path("r3b"), "--steps", "3"}).code == 0);
    CHECK(slurp(dir.path("r3")) == slurp(dir.path("r3b")));
    auto r = run({"--seed", "5", "train", "--wav", dir.path("a.wav"), "--resume", fx.ckpt(),
                  "--out", dir.path("x"), "--steps", "3"});
    CHECK(r.code != 0);
  }

  SUBCASE("synthesis length and determinism") {
    REQUIRE(run({"extract", "--wav", dir.path("a.wav"), "--out", dir.path("a.feat")}).code == 0);
    auto r = run({"--seed", "9", "synthesize", "--features", dir.path("a.feat"), "--ckpt",
                  fx.ckpt(), "--out", dir.path("y1.wav")});
    REQUIRE(r.code == 0);
    CHECK(read_wav(dir.path("y1.wav")).size() == 8192);
    REQUIRE(run({"synthesize", "--features", dir.path("a.feat"), "--ckpt", fx.ckpt(), "--out",
                 dir.path("y2.wav"), "--seed", "9"}).code == 0);
    CHECK(slurp(dir.path("y1.wav")) == slurp(dir.path("y2.wav")));
    REQUIRE(run({"--seed", "10", "synthesize", "--features", dir.path("a.feat"), "--ckpt",
                 fx.ckpt(), "--out", dir.path("y3.wav")}).code == 0);
    CHECK(slurp(dir.path("y1.wav")) != slurp(dir.path("y3.wav")));

    // A configuration other than the embedded one is refused.
    std::ofstream(dir.path("v1.json")) << R"({"preset":"v1"})";
    std::ofstream(dir.path("toy.json")) << R"({"preset":"toy","seed":4})";
    r = run({"synthesize", "--features", dir.path("a.feat"), "--ckpt", fx.ckpt(), "--out",
             dir.path("z.wav"), "--config", dir.path("v1.json")});
    CHECK(r.code != 0);
    CHECK(r.err.find("does not match") != std::string::npos);
    CHECK(run({"synthesize", "--features", dir.path("a.feat"), "--ckpt", fx.ckpt(), "--out",
               dir.path("z.wav"), "--config", dir.path("toy.json")}).code == 0);
  }

  SUBCASE("mel-only input needs the F0 predictor") {
    REQUIRE(run({"extract", "--wav", dir.path("a.wav"), "--out", dir.path("m.feat"),
                 "--mel-only", "--text", dir.path("m.txt")}).code == 0);
    auto r = run({"synthesize", "--features", dir.path("m.feat"), "--ckpt", fx.ckpt(), "--out",
                  dir.path("m.wav")});
    CHECK(r.code != 0);
    CHECK(r.err.find("F0 predictor") != std::string::npos);

    r = run({"train-f0", "--ckpt", fx.ckpt(), "--wav", dir.path("a.wav"), "--steps", "60",
             "--out", dir.path("f0.ckpt")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("vuv_accuracy") != std::string::npos);
    REQUIRE(run({"train-f0", "--ckpt", fx.ckpt(), "--wav", dir.path("a.wav"), "--steps", "60",
                 "--out", dir.path("f0b.ckpt")}).code == 0);
    CHECK(slurp(dir.path("f0.ckpt")) == slurp(dir.path("f0b.ckpt")));

    REQUIRE(run({"synthesize", "--features", dir.path("m.feat"), "--ckpt", dir.path("f0.ckpt"),
                 "--out", dir.path("m.wav")}).code == 0);
    CHECK(read_wav(dir.path("m.wav")).size() == 8192);
    REQUIRE(run({"synthesize", "--external-mel", "--features", dir.path("m.txt"), "--ckpt",
                 dir.path("f0.ckpt"), "--out", dir.path("t.wav")}).code == 0);
    CHECK(slurp(dir.path("m.wav")) == slurp(dir.path("t.wav")));
  }

  SUBCASE("excitation export") {
    REQUIRE(run({"extract", "--wav", dir.path("b.wav"), "--out", dir.path("b.feat")}).code == 0);
    REQUIRE(run({"excitation", "--features", dir.path("b.feat"), "--out", dir.path("e1.wav")})
                .code == 0);
    REQUIRE(run({"excitation", "--features", dir.path("b.feat"), "--out", dir.path("e2.wav")})
                .code == 0);
    CHECK(slurp(dir.path("e1.wav")) == slurp(dir.path("e2.wav")));
    CHECK(read_wav(dir.path("e1.wav")).size() == 9000);
    REQUIRE(run({"excitation", "--features", dir.path("b.feat"), "--ckpt", fx.ckpt(), "--out",
                 dir.path("e3.wav")}).code == 0);
    CHECK(slurp(dir.path("e1.wav")) != slurp(dir.path("e3.wav")));
  }

  SUBCASE("evaluate pairs by name") {
    std::filesystem::create_directories(dir.path("ref"));
    std::filesystem::create_directories(dir.path("gen"));
    for (const char* n : {"a.wav", "b.wav"}) {
      std::filesystem::copy_file(dir.path(n), dir.path("ref") + "/" + n);
    }
    std::filesystem::copy_file(dir.path("a.wav"), dir.path("gen") + "/a.wav");
    write_clip(dir.path("gen") + "/extra.wav", 1000, 5);
    auto r = run({"evaluate", "--ref-dir", dir.path("ref"), "--gen-dir", dir.path("ref"),
                  "--tsv", "--jobs", "2"});
    REQUIRE(r.code == 0);
    std::istringstream table(r.out);
    std::string line;
    std::getline(table, line);
    int rows = 0;
    while (std::getline(table, line)) {
      ++rows;
      std::istringstream fields(line);
      std::string name;
      double snr, las, mcd, f0, vuv;
      fields >> name >> snr >> las >> mcd >> f0 >> vuv;
      CHECK(snr == 99.0);
      CHECK(las == 0.0);
      CHECK(mcd == 0.0);
      CHECK(f0 == 0.0);
      CHECK(vuv == 0.0);
    }
    CHECK(rows == 3);

    r = run({"evaluate", "--ref-dir", dir.path("ref"), "--gen-dir", dir.path("gen"), "--out",
             dir.path("report.txt")});
    REQUIRE(r.code == 0);
    CHECK(r.err.find("b.wav") != std::string::npos);
    CHECK(r.err.find("extra.wav") != std::string::npos);
    CHECK(slurp(dir.path("report.txt")).find("saturated") != std::string::npos);
    CHECK(run({"evaluate", "--ref-dir", dir.path("ref"), "--gen-dir", dir.path("nowhere")}).code
          != 0);
  }

  SUBCASE("mel difference map") {
    auto r = run({"mel-diff", "--a", dir.path("a.wav"), "--b", dir.path("a.wav"), "--pgm",
                  dir.path("d.pgm"), "--text", dir.path("d.txt")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mean_abs 0 ") != std::string::npos);
    CHECK(slurp(dir.path("d.pgm")).rfind("P5\n32 80\n255\n", 0) == 0);
    CHECK(run({"mel-diff", "--a", dir.path("a.wav"), "--b", dir.path("b.wav")}).code == 0);
  }
}
