// Copyright 2026 The RAL Authors. All Rights Reserved.
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

#include "ral/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ral/data/errors.hpp"

namespace ral::nn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "ral-checkpoint";

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& params = ckpt.model.params;
  json layers = json::array();
  for (int l = 0; l < static_cast<int>(params.layers().size()); ++l) {
    const auto& shape = params.layers()[l];
    const auto w = params.weight(l);
    const auto b = params.bias(l);
    layers.push_back({{"in_channels", shape.in_channels},
                      {"out_channels", shape.out_channels},
                      {"kernel", shape.kernel},
                      {"relu", shape.relu},
                      {"dropout_after", shape.dropout_after},
                      {"weights", as_vector({w.data(), static_cast<std::size_t>(w.size())})},
                      {"bias", as_vector({b.data(), static_cast<std::size_t>(b.size())})}});
  }
  const json doc = {{"format", kFormat},
                    {"version", kCheckpointVersion},
                    {"seed", ckpt.seed},
                    {"dropout", ckpt.dropout},
                    {"layers", layers},
                    {"optimizer",
                     {{"step", ckpt.model.optimizer.step},
                      {"m", ckpt.model.optimizer.m},
                      {"v", ckpt.model.optimizer.v}}}};
  return doc.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw LoadError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) throw LoadError("checkpoint: unknown format");
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw LoadError("checkpoint: unsupported version " + std::to_string(version));
    }
    std::vector<LayerShape> shapes;
    for (const auto& l : doc.at("layers")) {
      shapes.push_back({l.at("in_channels").get<int>(), l.at("out_channels").get<int>(), l.at("kernel").get<int>(),
                        l.at("relu").get<bool>(), l.at("dropout_after").get<bool>()});
    }
    Checkpoint ckpt;
    ckpt.model.params = NetworkParams(shapes);
    for (std::size_t l = 0; l < shapes.size(); ++l) {
      const auto& entry = doc.at("layers")[l];
      const auto w = entry.at("weights").get<std::vector<double>>();
      const auto b = entry.at("bias").get<std::vector<double>>();
      auto wm = ckpt.model.params.weight(static_cast<int>(l));
      auto bm = ckpt.model.params.bias(static_cast<int>(l));
      if (w.size() != static_cast<std::size_t>(wm.size()) || b.size() != static_cast<std::size_t>(bm.size())) {
        throw LoadError("checkpoint: layer " + std::to_string(l) + " has the wrong number of values");
      }
      std::copy(w.begin(), w.end(), wm.data());
      std::copy(b.begin(), b.end(), bm.data());
    }
    const auto& opt = doc.at("optimizer");
    ckpt.model.optimizer.step = opt.at("step").get<std::int64_t>();
    ckpt.model.optimizer.m = opt.at("m").get<std::vector<double>>();
    ckpt.model.optimizer.v = opt.at("v").get<std::vector<double>>();
    const std::size_t n = ckpt.model.params.values().size();
    const auto& m = ckpt.model.optimizer.m;
    const auto& v = ckpt.model.optimizer.v;
    if (!(m.empty() && v.empty()) && (m.size() != n || v.size() != n)) {
      throw LoadError("checkpoint: optimizer moments do not match parameters");
    }
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.dropout = doc.at("dropout").get<double>();
    return ckpt;
  } catch (const json::exception& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("checkpoint: cannot write " + tmp);
    out << checkpoint_to_json(ckpt);
    if (!out) throw LoadError("checkpoint: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("checkpoint: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace ral::nn
