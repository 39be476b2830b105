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

#include "ral/orchestrate/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ral/data/errors.hpp"

namespace ral::orchestrate {

using nlohmann::json;

std::string_view to_string(Supervision s) { return s == Supervision::PointLevel ? "point" : "pixel"; }

Supervision supervision_from_string(std::string_view s) {
  if (s == "point") return Supervision::PointLevel;
  if (s == "pixel") return Supervision::PerPixel;
  throw InvalidArgument("unknown supervision scheme '" + std::string(s) + "'");
}

void RunConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw InvalidArgument(std::string("config: ") + name + " must be >= 1");
  };
  positive(regions_per_image, "regions_per_image");
  positive(images_per_cycle, "images_per_cycle");
  positive(regions_per_selected_image, "regions_per_selected_image");
  positive(mc_samples, "mc_samples");
  if (cycles < 0) throw InvalidArgument("config: cycles must be >= 0");
  if (seed_images && *seed_images < 1) throw InvalidArgument("config: seed_images must be >= 1");
  if (cost.click_ms <= 0 || cost.expert_slice_ms <= 0) throw InvalidArgument("config: costs must be positive");
  if (model != "convnet" && model != "uniform") throw InvalidArgument("config: unknown model '" + model + "'");
  if (!dataset.manifest) dataset.synthetic.validate();
  train.validate();
}

std::string RunConfig::resolved_run_id() const {
  if (!run_id.empty()) return run_id;
  return std::string(acquisition::to_string(heuristic)) + "-" + std::string(acquisition::to_string(aggregation)) +
         "-" + std::string(to_string(supervision)) + "-k" + std::to_string(regions_per_image) + "-s" +
         std::to_string(seed);
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw InvalidArgument(std::string("config: ") + where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw InvalidArgument(std::string("config: unknown key '") + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::int64_t seconds_to_ms(double s) { return static_cast<std::int64_t>(std::llround(s * 1000.0)); }

ingest::SyntheticConfig synthetic_from_json(const json& j) {
  check_keys(j,
             {"n_images", "height", "width", "ellipse_density", "background_fraction", "radius_min", "radius_max",
              "base_intensity", "contrast", "noise", "distractors", "slices_per_scan", "seed", "mean", "std"},
             "dataset.synthetic");
  ingest::SyntheticConfig s;
  read(j, "n_images", s.n_images);
  read(j, "height", s.height);
  read(j, "width", s.width);
  read(j, "ellipse_density", s.ellipse_density);
  read(j, "background_fraction", s.background_fraction);
  read(j, "radius_min", s.radius_min);
  read(j, "radius_max", s.radius_max);
  read(j, "base_intensity", s.base_intensity);
  read(j, "contrast", s.contrast);
  read(j, "noise", s.noise);
  read(j, "distractors", s.distractors);
  read(j, "slices_per_scan", s.slices_per_scan);
  read(j, "seed", s.seed);
  read(j, "mean", s.mean);
  read(j, "std", s.std);
  return s;
}

json synthetic_to_json(const ingest::SyntheticConfig& s) {
  return {{"n_images", s.n_images},
          {"height", s.height},
          {"width", s.width},
          {"ellipse_density", s.ellipse_density},
          {"background_fraction", s.background_fraction},
          {"radius_min", s.radius_min},
          {"radius_max", s.radius_max},
          {"base_intensity", s.base_intensity},
          {"contrast", s.contrast},
          {"noise", s.noise},
          {"distractors", s.distractors},
          {"slices_per_scan", s.slices_per_scan},
          {"seed", s.seed},
          {"mean", s.mean},
          {"std", s.std}};
}

RunConfig from_json(const json& j) {
  check_keys(j,
             {"run_id", "dataset", "split", "regions_per_image", "heuristic", "aggregation", "supervision",
              "images_per_cycle", "regions_per_selected_image", "cycles", "seed_images", "seed", "train",
              "mc_samples", "model", "cost", "output_dir", "experiments"},
             "config");
  RunConfig c;
  read(j, "run_id", c.run_id);
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    check_keys(d, {"manifest", "synthetic"}, "dataset");
    if (d.contains("manifest") && d.contains("synthetic")) {
      throw InvalidArgument("config: dataset needs exactly one of 'manifest' or 'synthetic'");
    }
    if (d.contains("manifest")) c.dataset.manifest = d.at("manifest").get<std::string>();
    if (d.contains("synthetic")) c.dataset.synthetic = synthetic_from_json(d.at("synthetic"));
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, {"mode", "fractions", "counts"}, "split");
    if (s.contains("mode")) c.split.mode = split_mode_from_string(s.at("mode").get<std::string>());
    read(s, "fractions", c.split.fractions);
    read(s, "counts", c.split.counts);
  }
  read(j, "regions_per_image", c.regions_per_image);
  if (j.contains("heuristic")) c.heuristic = acquisition::heuristic_from_string(j.at("heuristic").get<std::string>());
  if (j.contains("aggregation")) {
    c.aggregation = acquisition::aggregation_from_string(j.at("aggregation").get<std::string>());
  }
  if (j.contains("supervision")) c.supervision = supervision_from_string(j.at("supervision").get<std::string>());
  read(j, "images_per_cycle", c.images_per_cycle);
  read(j, "regions_per_selected_image", c.regions_per_selected_image);
  read(j, "cycles", c.cycles);
  if (j.contains("seed_images") && !j.at("seed_images").is_null()) c.seed_images = j.at("seed_images").get<int>();
  read(j, "seed", c.seed);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_keys(t, {"learning_rate", "batch_size", "max_epochs", "dropout", "patience"}, "train");
    read(t, "learning_rate", c.train.learning_rate);
    read(t, "batch_size", c.train.batch_size);
    read(t, "max_epochs", c.train.max_epochs);
    read(t, "dropout", c.train.dropout);
    read(t, "patience", c.train.patience);
  }
  read(j, "mc_samples", c.mc_samples);
  read(j, "model", c.model);
  if (j.contains("cost")) {
    const auto& k = j.at("cost");
    check_keys(k, {"click_seconds", "polygon_tolerance", "full_label", "expert_slice_seconds"}, "cost");
    if (k.contains("click_seconds")) c.cost.click_ms = seconds_to_ms(k.at("click_seconds").get<double>());
    read(k, "polygon_tolerance", c.cost.polygon_tolerance);
    if (k.contains("full_label")) {
      const auto v = k.at("full_label").get<std::string>();
      if (v == "polygon") {
        c.cost.full_label = oracle::FullLabelCost::Polygon;
      } else if (v == "expert_slice") {
        c.cost.full_label = oracle::FullLabelCost::ExpertSlice;
      } else {
        throw InvalidArgument("config: unknown full_label cost '" + v + "'");
      }
    }
    if (k.contains("expert_slice_seconds")) {
      c.cost.expert_slice_ms = seconds_to_ms(k.at("expert_slice_seconds").get<double>());
    }
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("experiments")) {
    const auto& e = j.at("experiments");
    check_keys(e, {"region_sizes", "seed_budget_seconds"}, "experiments");
    read(e, "region_sizes", c.experiments.region_sizes);
    if (e.contains("seed_budget_seconds") && !e.at("seed_budget_seconds").is_null()) {
      c.experiments.seed_budget_seconds = e.at("seed_budget_seconds").get<double>();
    }
  }
  return c;
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  try {
    RunConfig c = from_json(j);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

std::string run_config_to_json(const RunConfig& c) {
  json dataset;
  if (c.dataset.manifest) {
    dataset["manifest"] = c.dataset.manifest->string();
  } else {
    dataset["synthetic"] = synthetic_to_json(c.dataset.synthetic);
  }
  json j = {
      {"run_id", c.resolved_run_id()},
      {"dataset", dataset},
      {"split", {{"mode", to_string(c.split.mode)}, {"fractions", c.split.fractions}, {"counts", c.split.counts}}},
      {"regions_per_image", c.regions_per_image},
      {"heuristic", acquisition::to_string(c.heuristic)},
      {"aggregation", acquisition::to_string(c.aggregation)},
      {"supervision", to_string(c.supervision)},
      {"images_per_cycle", c.images_per_cycle},
      {"regions_per_selected_image", c.regions_per_selected_image},
      {"cycles", c.cycles},
      {"seed_images", c.seed_image_count()},
      {"seed", c.seed},
      {"train",
       {{"learning_rate", c.train.learning_rate},
        {"batch_size", c.train.batch_size},
        {"max_epochs", c.train.max_epochs},
        {"dropout", c.train.dropout},
        {"patience", c.train.patience}}},
      {"mc_samples", c.mc_samples},
      {"model", c.model},
      {"cost",
       {{"click_seconds", static_cast<double>(c.cost.click_ms) / 1000.0},
        {"polygon_tolerance", c.cost.polygon_tolerance},
        {"full_label", c.cost.full_label == oracle::FullLabelCost::Polygon ? "polygon" : "expert_slice"},
        {"expert_slice_seconds", static_cast<double>(c.cost.expert_slice_ms) / 1000.0}}},
      {"output_dir", c.output_dir.string()},
      {"experiments",
       {{"region_sizes", c.experiments.region_sizes},
        {"seed_budget_seconds",
         c.experiments.seed_budget_seconds ? json(*c.experiments.seed_budget_seconds) : json(nullptr)}}}};
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("config not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_run_config(ss.str());
  if (c.dataset.manifest && c.dataset.manifest->is_relative()) {
    c.dataset.manifest = path.parent_path() / *c.dataset.manifest;
  }
  return c;
}

}  // namespace ral::orchestrate
