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

#include "sfgan/cli.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "sfgan/audio.h"
#include "sfgan/feature_file.h"
#include "sfgan/metrics.h"
#include "sfgan/trainer.h"

namespace sfgan {

namespace {

namespace fs = std::filesystem;

constexpr uint64_t kPurposeSynth = 0x73796e;
constexpr uint64_t kPurposeExcitation = 0x657863;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. If any call throws, the
// exception of the lowest index is rethrown.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t threads = std::min<size_t>(std::max(jobs, 1), n);
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::string> wav_files_in(const std::string& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

AudioBuffer read_checked(const std::string& path, const AnalysisConfig& a) {
  AudioBuffer audio = read_wav(path);
  if (audio.sample_rate != a.sample_rate) {
    throw UsageError(path + ": sample rate " + std::to_string(audio.sample_rate) +
                     " Hz, expected " + std::to_string(a.sample_rate) + " Hz");
  }
  if (audio.samples.empty()) throw UsageError(path + ": no samples");
  return audio;
}

void write_output(const std::string& path, const std::vector<float>& samples, int sr) {
  AudioBuffer out{samples, sr};
  write_wav(path, out);
}

RunConfig config_or_preset(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty()) return RunConfig::load(config_path);
  return RunConfig::from_preset(preset);
}

void require_matching_config(const std::string& config_path, const RunConfig& embedded) {
  if (config_path.empty()) return;
  if (RunConfig::load(config_path).dump() != embedded.dump()) {
    throw UsageError("config " + config_path + " does not match the configuration stored in " +
                     "the checkpoint");
  }
}

std::string basename_of(const std::string& path) { return fs::path(path).filename().string(); }

struct Options {
  uint64_t seed = 1234;
  bool seed_given = false;
  int jobs = 1;
};

// Audio from a .wav file or the mel of a feature file.
MelSpectrogram mel_from(const std::string& path, const AnalysisConfig& a) {
  if (fs::path(path).extension() == ".wav") return mel_spectrogram(read_checked(path, a).samples, a);
  return load_features(path).mel;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Source-filter GAN vocoder toolkit", "sfgan"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--seed", opt.seed, "Seed for every random draw")->each([&](const std::string&) {
    opt.seed_given = true;
  });
  app.add_option("--jobs", opt.jobs, "Files processed concurrently")->check(CLI::PositiveNumber);

  // extract
  auto* extract = app.add_subcommand("extract", "Write mel and F0 features of a WAV file");
  std::string ex_wav, ex_out, ex_text, ex_config;
  bool ex_mel_only = false;
  extract->add_option("--wav", ex_wav)->required();
  extract->add_option("--out", ex_out)->required();
  extract->add_option("--text", ex_text, "Also write the mel matrix as plain text");
  extract->add_option("--config", ex_config);
  extract->add_flag("--mel-only", ex_mel_only, "Omit the F0 track");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Vocode a feature file with a checkpoint");
  std::string sy_features, sy_ckpt, sy_out, sy_config;
  bool sy_external = false;
  synth->add_option("--features", sy_features)->required();
  synth->add_option("--ckpt", sy_ckpt)->required();
  synth->add_option("--out", sy_out)->required();
  synth->add_option("--config", sy_config, "Must equal the checkpoint configuration");
  synth->add_flag("--external-mel", sy_external,
                  "Features are a plain-text mel matrix; F0 comes from the predictor");

  // excitation
  auto* excite = app.add_subcommand("excitation", "Write the source excitation of a feature file");
  std::string xc_features, xc_ckpt, xc_out;
  excite->add_option("--features", xc_features)->required();
  excite->add_option("--out", xc_out)->required();
  excite->add_option("--ckpt", xc_ckpt, "Use the checkpoint's noise network");

  // train
  auto* train = app.add_subcommand("train", "Adversarial vocoder training");
  std::string tr_config, tr_preset = "toy", tr_out, tr_resume, tr_dir;
  std::vector<std::string> tr_wavs;
  std::optional<int64_t> tr_steps;
  train->add_option("--config", tr_config);
  train->add_option("--preset", tr_preset)->check(CLI::IsMember({"v1", "v2", "toy"}));
  train->add_option("--wav", tr_wavs);
  train->add_option("--data-dir", tr_dir);
  train->add_option("--out", tr_out)->required();
  train->add_option("--resume", tr_resume);
  train->add_option("--steps", tr_steps, "Total steps (overrides the config)");

  // train-f0
  auto* train_f0 = app.add_subcommand("train-f0", "Train the F0 predictor into a checkpoint");
  std::string tf_ckpt, tf_out, tf_dir;
  std::vector<std::string> tf_wavs;
  std::optional<int> tf_steps;
  train_f0->add_option("--ckpt", tf_ckpt)->required();
  train_f0->add_option("--out", tf_out, "Defaults to --ckpt");
  train_f0->add_option("--wav", tf_wavs);
  train_f0->add_option("--data-dir", tf_dir);
  train_f0->add_option("--steps", tf_steps);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Objective metrics of generated against reference");
  std::string ev_ref, ev_gen, ev_out, ev_config;
  bool ev_tsv = false;
  evaluate->add_option("--ref-dir", ev_ref)->required();
  evaluate->add_option("--gen-dir", ev_gen)->required();
  evaluate->add_option("--out", ev_out, "Report file instead of standard output");
  evaluate->add_option("--config", ev_config);
  evaluate->add_flag("--tsv", ev_tsv, "Tab-separated table instead of text");

  // mel-diff
  auto* diff = app.add_subcommand("mel-diff", "Pixel-wise mel difference of two WAV or feature files");
  std::string md_a, md_b, md_text, md_pgm;
  diff->add_option("--a", md_a)->required();
  diff->add_option("--b", md_b)->required();
  diff->add_option("--text", md_text);
  diff->add_option("--pgm", md_pgm);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*extract) {
      const RunConfig cfg = config_or_preset(ex_config, "v1");
      const AudioBuffer audio = read_checked(ex_wav, cfg.analysis);
      const Features f = analyze(audio.samples, cfg.analysis, !ex_mel_only);
      save_features(ex_out, f);
      if (!ex_text.empty()) save_mel_text(ex_text, f.mel);
      out << "frames " << f.mel.rows << " bands " << f.mel.cols << '\n';
    } else if (*synth) {
      Trainer t = Trainer::from_checkpoint(sy_ckpt);
      const RunConfig& cfg = t.config();
      require_matching_config(sy_config, cfg);
      Features f;
      if (sy_external) {
        f.mel = load_mel_text(sy_features);
        f.sample_rate = cfg.analysis.sample_rate;
      } else {
        f = load_features(sy_features);
      }
      if (f.mel.cols != cfg.analysis.n_mels) {
        throw UsageError("features have " + std::to_string(f.mel.cols) + " mel bands, checkpoint " +
                         "expects " + std::to_string(cfg.analysis.n_mels));
      }
      if (f.sample_rate != cfg.analysis.sample_rate) {
        throw UsageError("features were analysed at " + std::to_string(f.sample_rate) + " Hz");
      }
      if (!f.f0) {
        if (!t.f0_predictor()) {
          throw UsageError("features carry no F0 and the checkpoint has no F0 predictor; run "
                           "train-f0 first");
        }
        f.f0 = t.f0_predictor()->predict(f.mel);
        err << "F0 predicted for " << f.mel.rows << " frames\n";
      }
      Rng rng = make_rng(opt.seed, kPurposeSynth);
      std::vector<float> y = t.generator().generate(f.mel, *f.f0, rng);
      if (f.samples && *f.samples <= static_cast<int64_t>(y.size())) y.resize(*f.samples);
      write_output(sy_out, y, cfg.analysis.sample_rate);
      out << "samples " << y.size() << '\n';
    } else if (*excite) {
      RunConfig cfg = RunConfig::from_preset("v1");
      std::optional<Trainer> t;
      if (!xc_ckpt.empty()) {
        t.emplace(Trainer::from_checkpoint(xc_ckpt));
        cfg = t->config();
      }
      const Features f = load_features(xc_features);
      if (!f.f0) throw UsageError(xc_features + " has no F0 track");
      Rng rng = make_rng(opt.seed, kPurposeExcitation);
      ExcitationSignal e;
      if (t) {
        e = t->generator().source().generate(t->generator().params(), *f.f0, rng);
      } else {
        SourceConfig sc = cfg.effective_source();
        sc.dnn_enabled = false;
        ParameterStore store;
        Rng init = make_rng(opt.seed);
        SourceModule source(store, sc, init);
        e = source.generate(store, *f.f0, rng);
      }
      if (f.samples && *f.samples <= static_cast<int64_t>(e.e.size())) e.e.resize(*f.samples);
      write_output(xc_out, e.e, cfg.analysis.sample_rate);
      out << "samples " << e.e.size() << '\n';
    } else if (*train) {
      std::optional<Trainer> t;
      if (!tr_resume.empty()) {
        t.emplace(Trainer::from_checkpoint(tr_resume));
        require_matching_config(tr_config, t->config());
        if (opt.seed_given && opt.seed != t->config().seed) {
          throw UsageError("--seed differs from the seed stored in " + tr_resume);
        }
      } else {
        RunConfig cfg = config_or_preset(tr_config, tr_preset);
        if (opt.seed_given) cfg.seed = opt.seed;
        t.emplace(cfg);
      }
      const RunConfig& cfg = t->config();
      std::vector<std::string> files = tr_wavs;
      if (!tr_dir.empty()) {
        for (auto& f : wav_files_in(tr_dir)) files.push_back(f);
      }
      if (files.empty()) throw UsageError("train: no input given (use --wav or --data-dir)");
      std::vector<Utterance> data(files.size());
      parallel_for(files.size(), opt.jobs, [&](size_t i) {
        data[i] = make_utterance(basename_of(files[i]), read_checked(files[i], cfg.analysis).samples,
                                 cfg.analysis, cfg.training.segment_frames);
      });
      const int64_t total = tr_steps.value_or(cfg.training.steps);
      while (t->step_count() < total) {
        const StepRecord r = t->step(data);
        const int64_t done = t->step_count();
        if (done == 1 || done % cfg.training.log_interval == 0 || done == total || r.skipped) {
          err << "step=" << done << std::setprecision(6) << " d_adv=" << r.d_adv
              << " g_adv=" << r.g_adv << " fm=" << r.fm << " mel=" << r.mel
              << " total=" << r.g_total << " lr=" << t->learning_rate(r.step, data.size())
              << " skipped=" << (r.skipped ? 1 : 0) << '\n';
        }
        if (cfg.training.checkpoint_interval > 0 && done % cfg.training.checkpoint_interval == 0) {
          t->save(tr_out);
        }
      }
      t->save(tr_out);
      out << "step " << t->step_count() << " checkpoint " << tr_out << '\n';
    } else if (*train_f0) {
      Trainer t = Trainer::from_checkpoint(tf_ckpt);
      const RunConfig& cfg = t.config();
      std::vector<std::string> files = tf_wavs;
      if (!tf_dir.empty()) {
        for (auto& f : wav_files_in(tf_dir)) files.push_back(f);
      }
      if (files.empty()) throw UsageError("train-f0: no input given (use --wav or --data-dir)");
      std::vector<F0Example> data(files.size());
      parallel_for(files.size(), opt.jobs, [&](size_t i) {
        const AudioBuffer a = read_checked(files[i], cfg.analysis);
        data[i] = {mel_spectrogram(a.samples, cfg.analysis), extract_f0(a.samples, cfg.analysis)};
      });
      F0TrainConfig fcfg = cfg.f0_training;
      if (tf_steps) fcfg.steps = *tf_steps;
      const uint64_t seed = opt.seed_given ? opt.seed : cfg.seed;
      t.f0_predictor().emplace(cfg.f0_predictor, seed);
      const auto report = train_f0_predictor(
          *t.f0_predictor(), data, {}, fcfg, seed, [&](int64_t step, double loss) {
            if ((step + 1) % fcfg.eval_interval == 0) {
              err << "f0 step=" << step + 1 << " loss=" << std::setprecision(6) << loss << '\n';
            }
          });
      double acc = 0.0;
      for (const auto& ex : data) acc += vuv_accuracy(t.f0_predictor()->predict(ex.mel), ex.f0);
      acc /= data.size();
      t.save(tf_out.empty() ? tf_ckpt : tf_out);
      out << "best_step " << report.best_step << " eval_loss " << std::setprecision(6)
          << report.best_eval_loss << " vuv_accuracy " << acc << '\n';
    } else if (*evaluate) {
      const RunConfig cfg = config_or_preset(ev_config, "v1");
      std::map<std::string, std::string> ref, gen;
      for (auto& f : wav_files_in(ev_ref)) ref[basename_of(f)] = f;
      for (auto& f : wav_files_in(ev_gen)) gen[basename_of(f)] = f;
      std::vector<std::string> names;
      for (const auto& [name, path] : ref) {
        if (gen.count(name)) {
          names.push_back(name);
        } else {
          err << "warning: " << name << " has no generated counterpart; skipped\n";
        }
      }
      for (const auto& [name, path] : gen) {
        if (!ref.count(name)) err << "warning: " << name << " has no reference; skipped\n";
      }
      if (names.empty()) throw UsageError("evaluate: no file pairs found");
      EvalReport report;
      report.utterances.resize(names.size());
      parallel_for(names.size(), opt.jobs, [&](size_t i) {
        const AudioBuffer a = read_checked(ref[names[i]], cfg.analysis);
        const AudioBuffer b = read_checked(gen[names[i]], cfg.analysis);
        report.utterances[i] = evaluate_pair(names[i], a.samples, b.samples, cfg.analysis);
      });
      std::ofstream file;
      if (!ev_out.empty()) {
        file.open(ev_out);
        if (!file) throw UsageError("cannot write " + ev_out);
      }
      std::ostream& dst = ev_out.empty() ? out : file;
      if (ev_tsv) {
        report.write_tsv(dst);
      } else {
        report.write_text(dst);
      }
      if (!dst) throw UsageError("failed writing the report");
    } else if (*diff) {
      const AnalysisConfig a;
      const FrameMatrix d = mel_diff_map(mel_from(md_a, a), mel_from(md_b, a));
      if (!md_text.empty()) {
        std::ofstream f(md_text);
        write_matrix_text(f, d);
        if (!f) throw UsageError("cannot write " + md_text);
      }
      if (!md_pgm.empty()) {
        std::ofstream f(md_pgm, std::ios::binary);
        write_pgm(f, d);
        if (!f) throw UsageError("cannot write " + md_pgm);
      }
      double sum = 0.0, peak = 0.0;
      for (float v : d.values) {
        sum += v;
        peak = std::max<double>(peak, v);
      }
      out << "frames " << d.rows << " mean_abs " << std::setprecision(6)
          << sum / static_cast<double>(d.values.size()) << " max_abs " << peak << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sfgan
