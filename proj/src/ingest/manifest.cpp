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

#include "ral/ingest/manifest.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>

#include "ral/ingest/png_io.hpp"

namespace ral::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

const Sample& Dataset::find(const std::string& image_id) const {
  auto it = std::find_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.image.id == image_id; });
  if (it == samples.end()) throw InvalidArgument("unknown image id: " + image_id);
  return *it;
}

std::vector<ScanSlices> Dataset::scans() const {
  std::vector<ScanSlices> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<int, std::string>>> slices;
  for (const auto& s : samples) {
    auto [it, inserted] = index.emplace(s.image.scan_id, out.size());
    if (inserted) {
      out.push_back({s.image.scan_id, {}});
      slices.emplace_back();
    }
    slices[it->second].emplace_back(s.image.slice_index, s.image.id);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::stable_sort(slices[i].begin(), slices[i].end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [idx, id] : slices[i]) out[i].slice_ids.push_back(id);
  }
  return out;
}

namespace {

Preprocessing parse_preprocessing(const json& j) {
  Preprocessing p;
  const auto& window = j.at("hu_window");
  p.hu_low = window.at(0).get<double>();
  p.hu_high = window.at(1).get<double>();
  const auto& size = j.at("target_size");
  p.target_height = size.at(0).get<int>();
  p.target_width = size.at(1).get<int>();
  const auto& norm = j.at("normalization");
  p.mean = norm.at("mean").at(0).get<double>();
  p.std = norm.at("std").at(0).get<double>();
  p.validate();
  return p;
}

json preprocessing_json(const Preprocessing& p) {
  return {{"hu_window", {p.hu_low, p.hu_high}},
          {"target_size", {p.target_height, p.target_width}},
          {"normalization", {{"mean", {p.mean}}, {"std", {p.std}}}}};
}

std::string entry_label(std::size_t i, const ManifestEntry& e) {
  return "slice " + std::to_string(i) + " (" + e.image + ")";
}

}  // namespace

DatasetManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw LoadError("manifest not found: " + manifest_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw LoadError("manifest " + manifest_path.string() + " does not parse: " + e.what());
  }
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.preprocessing = parse_preprocessing(j.at("preprocessing"));
    for (const auto& s : j.at("slices")) {
      ManifestEntry e;
      e.image = s.at("image").get<std::string>();
      if (s.contains("mask") && !s.at("mask").is_null()) e.mask = s.at("mask").get<std::string>();
      e.scan_id = s.at("scan_id").get<std::string>();
      e.slice_index = s.at("slice_index").get<int>();
      m.slices.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw LoadError("manifest " + manifest_path.string() + " has an invalid schema: " + e.what());
  } catch (const InvalidArgument& e) {
    throw LoadError("manifest " + manifest_path.string() + ": " + e.what());
  }
  return m;
}

Dataset load_manifest(const fs::path& path) {
  const fs::path manifest_path = fs::is_directory(path) ? path / "manifest.json" : path;
  const fs::path root = manifest_path.parent_path();
  Dataset ds;
  ds.manifest = read_manifest(manifest_path);
  const auto& prep = ds.manifest.preprocessing;
  for (std::size_t i = 0; i < ds.manifest.slices.size(); ++i) {
    const auto& e = ds.manifest.slices[i];
    Sample sample;
    Array2D<std::uint8_t> raw;
    try {
      raw = read_png(root / e.image);
    } catch (const LoadError& err) {
      throw LoadError(entry_label(i, e) + ": " + err.what());
    }
    Array2D<double> real(raw.rows(), raw.cols());
    std::copy(raw.values().begin(), raw.values().end(), real.values().begin());
    sample.image.id = fs::path(e.image).stem().string();
    sample.image.scan_id = e.scan_id;
    sample.image.slice_index = e.slice_index;
    sample.image.pixels =
        normalize(resize_bilinear(real, prep.target_height, prep.target_width), prep.mean, prep.std);
    if (e.mask) {
      GroundTruthMask mask;
      try {
        mask.classes = read_png(root / *e.mask);
        validate_binary(mask.classes);
      } catch (const std::exception& err) {
        throw LoadError(entry_label(i, e) + ": mask " + *e.mask + ": " + err.what());
      }
      if (!mask.classes.same_shape(raw)) {
        throw LoadError(entry_label(i, e) + ": mask shape " + std::to_string(mask.classes.rows()) + "x" +
                        std::to_string(mask.classes.cols()) + " does not match image shape " +
                        std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
      }
      mask.image_id = sample.image.id;
      sample.mask = resize_mask(mask, prep.target_height, prep.target_width);
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

void write_dataset(const fs::path& dir, const std::string& name, const std::vector<Sample>& samples,
                   const Preprocessing& prep) {
  prep.validate();
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  json slices = json::array();
  for (const auto& s : samples) {
    const std::string image_rel = "images/" + s.image.id + ".png";
    write_png_gray(dir / image_rel, denormalize_to_u8(s.image.pixels, prep.mean, prep.std));
    json entry = {{"image", image_rel}, {"scan_id", s.image.scan_id}, {"slice_index", s.image.slice_index}};
    if (s.mask) {
      const std::string mask_rel = "masks/" + s.image.id + ".png";
      write_png_mask(dir / mask_rel, s.mask->classes);
      entry["mask"] = mask_rel;
    } else {
      entry["mask"] = nullptr;
    }
    slices.push_back(std::move(entry));
  }
  json manifest = {{"name", name}, {"preprocessing", preprocessing_json(prep)}, {"slices", std::move(slices)}};
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw LoadError("failed to write manifest in " + dir.string());
}

Dataset synthetic_dataset(const SyntheticConfig& config, const std::string& name) {
  Dataset ds;
  ds.manifest.name = name;
  ds.manifest.preprocessing.target_height = config.height;
  ds.manifest.preprocessing.target_width = config.width;
  ds.manifest.preprocessing.mean = config.mean;
  ds.manifest.preprocessing.std = config.std;
  for (auto& s : generate_synthetic(config)) {
    ds.manifest.slices.push_back({"images/" + s.image.id + ".png", "masks/" + s.image.id + ".png",
                                  s.image.scan_id, s.image.slice_index});
    ds.samples.push_back({std::move(s.image), std::move(s.mask)});
  }
  return ds;
}

}  // namespace ral::ingest
