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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ral/data/image.hpp"
#include "ral/data/split.hpp"
#include "ral/ingest/preprocess.hpp"
#include "ral/ingest/synthetic.hpp"

namespace ral::ingest {

struct ManifestEntry {
  std::string image;                 // relative to the dataset directory
  std::optional<std::string> mask;   // absent for unannotated slices
  std::string scan_id;
  int slice_index = 0;
};

struct DatasetManifest {
  std::string name;
  Preprocessing preprocessing;
  std::vector<ManifestEntry> slices;
};

struct Sample {
  ImageSlice image;
  std::optional<GroundTruthMask> mask;
};

/// A materialized dataset: manifest plus loaded, preprocessed slices in
/// manifest order.
struct Dataset {
  DatasetManifest manifest;
  std::vector<Sample> samples;

  const Sample& find(const std::string& image_id) const;
  std::vector<ScanSlices> scans() const;
};

/// Accepts a dataset directory or the manifest.json path itself.
Dataset load_manifest(const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& manifest_path);

/// Writes manifest.json, images/*.png, masks/*.png under `dir`.
void write_dataset(const std::filesystem::path& dir, const std::string& name, const std::vector<Sample>& samples,
                   const Preprocessing& prep);

/// In-memory dataset from the synthetic generator.
Dataset synthetic_dataset(const SyntheticConfig& config, const std::string& name = "synthetic");

}  // namespace ral::ingest
