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

#include "sfgan/checkpoint.h"

namespace sfgan {

namespace {

std::string key(std::string_view prefix, const std::string& name) {
  return std::string(prefix) + name;
}

}  // namespace

void write_parameters(BlobFile& file, std::string_view prefix, const ParameterStore& store) {
  for (const auto& p : store) file.put_tensor(key(prefix, p->name), p->value);
}

void read_parameters(const BlobFile& file, std::string_view prefix, ParameterStore& store) {
  const auto names = file.names(prefix);
  if (names.size() != store.size()) {
    throw CheckpointError("checkpoint section '" + std::string(prefix) + "' holds " +
                          std::to_string(names.size()) + " tensors, model expects " +
                          std::to_string(store.size()));
  }
  for (auto& p : store) {
    const std::string k = key(prefix, p->name);
    if (!file.contains(k)) throw CheckpointError("checkpoint is missing " + k);
    Tensor t = file.get_tensor(k);
    if (t.shape() != p->value.shape()) {
      throw CheckpointError("checkpoint tensor " + k + " has shape " + t.shape().str() +
                            ", model expects " + p->value.shape().str());
    }
    p->value = std::move(t);
    p->grad = Tensor(p->value.shape());
  }
}

void write_optimizer(BlobFile& file, std::string_view prefix, const AdamW& opt) {
  file.put_i64(key(prefix, "steps"), opt.step_count());
  for (const auto& [name, m] : opt.moments()) {
    file.put_tensor(key(prefix, "m/" + name), m.m);
    file.put_tensor(key(prefix, "v/" + name), m.v);
  }
}

void read_optimizer(const BlobFile& file, std::string_view prefix, AdamW& opt) {
  std::map<std::string, AdamW::Moments> moments;
  const std::string m_prefix = key(prefix, "m/");
  for (const auto& k : file.names(m_prefix)) {
    const std::string name = k.substr(m_prefix.size());
    const std::string v_key = key(prefix, "v/" + name);
    if (!file.contains(v_key)) throw CheckpointError("checkpoint is missing " + v_key);
    moments[name] = {file.get_tensor(k), file.get_tensor(v_key)};
  }
  opt.restore(file.get_i64(key(prefix, "steps")), std::move(moments));
}

BlobFile open_checkpoint(const std::string& path, RunConfig* config) {
  BlobFile file;
  try {
    file = BlobFile::load(path);
  } catch (const std::exception& e) {
    throw CheckpointError("cannot read checkpoint " + path + ": " + e.what());
  }
  if (!file.contains("format") || file.get_string("format") != kCheckpointFormat ||
      !file.contains("config")) {
    throw CheckpointError(path + " is not a checkpoint");
  }
  if (config) *config = RunConfig::parse(file.get_string("config"));
  return file;
}

bool has_f0_predictor(const BlobFile& file) { return !file.names("f0pred/").empty(); }

}  // namespace sfgan
