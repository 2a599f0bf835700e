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

#include "sfgan/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sfgan {

namespace {

using nlohmann::json;

// Reads fields from one JSON object and remembers which keys were seen so
// that leftovers can be reported.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void field(const char* key, T& out) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    seen_.insert(key);
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  void field(const char* key, float& out) {
    double v = out;
    field(key, v);
    out = static_cast<float>(v);
  }

  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    seen_.insert(key);
    Reader sub(*it, path_ + "." + key);
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_adamw(Reader& r, AdamWConfig& o) {
  r.field("lr", o.lr);
  r.field("beta1", o.beta1);
  r.field("beta2", o.beta2);
  r.field("eps", o.eps);
  r.field("weight_decay", o.weight_decay);
}

json write_adamw(const AdamWConfig& o) {
  return {{"lr", o.lr}, {"beta1", o.beta1}, {"beta2", o.beta2}, {"eps", o.eps},
          {"weight_decay", o.weight_decay}};
}

void apply(Reader& r, RunConfig& c) {
  r.field("seed", c.seed);
  r.object("analysis", [&](Reader& a) {
    a.field("sample_rate", c.analysis.sample_rate);
    a.field("n_fft", c.analysis.n_fft);
    a.field("win_length", c.analysis.win_length);
    a.field("hop", c.analysis.hop);
    a.field("n_mels", c.analysis.n_mels);
    a.field("fmin", c.analysis.fmin);
    a.field("fmax", c.analysis.fmax);
    a.field("log_floor", c.analysis.log_floor);
  });
  r.object("source", [&](Reader& s) {
    s.field("alpha", c.source.alpha);
    s.field("sigma", c.source.sigma);
    s.field("dnn_channels", c.source.dnn_channels);
    s.field("dnn_kernel", c.source.dnn_kernel);
  });
  r.object("generator", [&](Reader& g) {
    g.field("h_u", c.generator.h_u);
    g.field("k_u", c.generator.k_u);
    g.field("u_r", c.generator.u_r);
    g.field("k_r", c.generator.k_r);
    g.field("D_r", c.generator.d_r);
    g.field("k_m", c.generator.k_m);
    g.field("k_s", c.generator.k_s);
    g.field("d_s", c.generator.d_s);
    g.field("pre_kernel", c.generator.pre_kernel);
    g.field("post_kernel", c.generator.post_kernel);
    g.field("lrelu_slope", c.generator.lrelu_slope);
  });
  r.object("ablation", [&](Reader& a) {
    bool no_dnn = !c.source.dnn_enabled, no_sub = !c.generator.subblock_enabled,
         no_pc = !c.generator.pc_resblock_enabled;
    a.field("no_dnn", no_dnn);
    a.field("no_subblock", no_sub);
    a.field("no_pc_resblock", no_pc);
    c.source.dnn_enabled = !no_dnn;
    c.generator.subblock_enabled = !no_sub;
    c.generator.pc_resblock_enabled = !no_pc;
  });
  r.object("discriminator", [&](Reader& d) {
    d.field("periods", c.discriminator.periods);
    d.field("scales", c.discriminator.scales);
    d.field("mpd_channels", c.discriminator.mpd_channels);
    d.field("msd_channels", c.discriminator.msd_channels);
    d.field("msd_kernels", c.discriminator.msd_kernels);
    d.field("msd_strides", c.discriminator.msd_strides);
    d.field("msd_groups", c.discriminator.msd_groups);
    d.field("lrelu_slope", c.discriminator.lrelu_slope);
  });
  r.object("training", [&](Reader& t) {
    t.field("batch_size", c.training.batch_size);
    t.field("segment_frames", c.training.segment_frames);
    t.object("optimizer", [&](Reader& o) { read_adamw(o, c.training.optimizer); });
    t.field("lr_decay", c.training.lr_decay);
    t.field("lambda_fm", c.training.weights.fm);
    t.field("lambda_mel", c.training.weights.mel);
    t.field("steps", c.training.steps);
    t.field("checkpoint_interval", c.training.checkpoint_interval);
    t.field("log_interval", c.training.log_interval);
  });
  r.object("f0_predictor", [&](Reader& f) {
    f.field("input_dims", c.f0_predictor.input_dims);
    f.field("channels", c.f0_predictor.channels);
    f.field("kernels", c.f0_predictor.kernels);
    f.field("stack_depth", c.f0_predictor.stack_depth);
    f.field("steps", c.f0_training.steps);
    f.object("optimizer", [&](Reader& o) { read_adamw(o, c.f0_training.optimizer); });
    f.field("f0_loss_scale", c.f0_training.f0_loss_scale);
    f.field("max_frames", c.f0_training.max_frames);
    f.field("eval_interval", c.f0_training.eval_interval);
  });
}

}  // namespace

RunConfig RunConfig::from_preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  if (name == "v1") {
    c.generator = GeneratorConfig::v1();
  } else if (name == "v2") {
    c.generator = GeneratorConfig::v2();
  } else if (name == "toy") {
    c.generator = GeneratorConfig::toy();
    c.discriminator = DiscriminatorConfig::toy();
    c.training.batch_size = 1;
    c.training.steps = 500;
    c.training.checkpoint_interval = 100;
    c.training.log_interval = 10;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected v1, v2 or toy)");
  }
  return c;
}

RunConfig RunConfig::parse(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  std::string preset = "v1";
  if (auto it = doc.find("preset"); it != doc.end()) {
    if (!it->is_string()) throw ConfigError("config.preset must be a string");
    preset = it->get<std::string>();
  }
  RunConfig c = from_preset(preset);
  json rest = doc;
  rest.erase("preset");
  Reader r(rest, "config");
  apply(r, c);
  r.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::dump() const {
  json j;
  j["preset"] = preset;
  j["seed"] = seed;
  j["analysis"] = {{"sample_rate", analysis.sample_rate}, {"n_fft", analysis.n_fft},
                   {"win_length", analysis.win_length},   {"hop", analysis.hop},
                   {"n_mels", analysis.n_mels},           {"fmin", analysis.fmin},
                   {"fmax", analysis.fmax},               {"log_floor", analysis.log_floor}};
  j["source"] = {{"alpha", source.alpha},
                 {"sigma", source.sigma},
                 {"dnn_channels", source.dnn_channels},
                 {"dnn_kernel", source.dnn_kernel}};
  j["generator"] = {{"h_u", generator.h_u},         {"k_u", generator.k_u},
                    {"u_r", generator.u_r},         {"k_r", generator.k_r},
                    {"D_r", generator.d_r},         {"k_m", generator.k_m},
                    {"k_s", generator.k_s},         {"d_s", generator.d_s},
                    {"pre_kernel", generator.pre_kernel},
                    {"post_kernel", generator.post_kernel},
                    {"lrelu_slope", generator.lrelu_slope}};
  j["ablation"] = {{"no_dnn", no_dnn()},
                   {"no_subblock", no_subblock()},
                   {"no_pc_resblock", no_pc_resblock()}};
  j["discriminator"] = {{"periods", discriminator.periods},
                        {"scales", discriminator.scales},
                        {"mpd_channels", discriminator.mpd_channels},
                        {"msd_channels", discriminator.msd_channels},
                        {"msd_kernels", discriminator.msd_kernels},
                        {"msd_strides", discriminator.msd_strides},
                        {"msd_groups", discriminator.msd_groups},
                        {"lrelu_slope", discriminator.lrelu_slope}};
  j["training"] = {{"batch_size", training.batch_size},
                   {"segment_frames", training.segment_frames},
                   {"optimizer", write_adamw(training.optimizer)},
                   {"lr_decay", training.lr_decay},
                   {"lambda_fm", training.weights.fm},
                   {"lambda_mel", training.weights.mel},
                   {"steps", training.steps},
                   {"checkpoint_interval", training.checkpoint_interval},
                   {"log_interval", training.log_interval}};
  j["f0_predictor"] = {{"input_dims", f0_predictor.input_dims},
                       {"channels", f0_predictor.channels},
                       {"kernels", f0_predictor.kernels},
                       {"stack_depth", f0_predictor.stack_depth},
                       {"steps", f0_training.steps},
                       {"optimizer", write_adamw(f0_training.optimizer)},
                       {"f0_loss_scale", f0_training.f0_loss_scale},
                       {"max_frames", f0_training.max_frames},
                       {"eval_interval", f0_training.eval_interval}};
  return j.dump(2);
}

void RunConfig::validate() const {
  try {
    generator.validate();
    discriminator.validate();
    MelFilterbank probe(analysis);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (analysis.hop != generator.hop()) {
    throw ConfigError("analysis.hop must equal the product of generator.u_r");
  }
  if (analysis.n_mels != generator.n_mels) {
    throw ConfigError("analysis.n_mels must equal the generator input width");
  }
  if (f0_predictor.input_dims > analysis.n_mels) {
    throw ConfigError("f0_predictor.input_dims exceeds the number of mel bands");
  }
  if (!(source.alpha > 0.0) || !(source.sigma > 0.0)) {
    throw ConfigError("source.alpha and source.sigma must be positive");
  }
  if (training.batch_size < 1 || training.segment_frames < 1 || training.steps < 0 ||
      training.log_interval < 1 || training.checkpoint_interval < 0) {
    throw ConfigError("training sizes must be positive");
  }
  if (f0_training.steps < 0 || f0_training.max_frames < 1 || f0_training.eval_interval < 1) {
    throw ConfigError("f0_predictor training sizes must be positive");
  }
}

}  // namespace sfgan
