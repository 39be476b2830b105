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

#include "ral/acquisition/acquisition.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "ral/data/errors.hpp"
#include "ral/data/seed.hpp"

namespace ral::acquisition {

std::string_view to_string(Aggregation a) { return a == Aggregation::Max ? "max" : "mean"; }
std::string_view to_string(Heuristic h) { return h == Heuristic::Entropy ? "entropy" : "random"; }

Aggregation aggregation_from_string(std::string_view s) {
  if (s == "max") return Aggregation::Max;
  if (s == "mean") return Aggregation::Mean;
  throw InvalidArgument("unknown aggregation '" + std::string(s) + "'");
}

Heuristic heuristic_from_string(std::string_view s) {
  if (s == "entropy") return Heuristic::Entropy;
  if (s == "random") return Heuristic::Random;
  throw InvalidArgument("unknown heuristic '" + std::string(s) + "'");
}

std::vector<RegionScore> score_regions(const uncertainty::EntropyMap& entropy, const RegionGrid& grid,
                                       std::span<const RegionState> states, Aggregation aggregation) {
  if (entropy.values.rows() != grid.image_height() || entropy.values.cols() != grid.image_width()) {
    throw InvalidArgument("score_regions: entropy map does not match the grid");
  }
  if (states.size() != static_cast<std::size_t>(grid.count())) {
    throw InvalidArgument("score_regions: one state per region required");
  }
  std::vector<RegionScore> out;
  for (int i = 0; i < grid.count(); ++i) {
    if (states[i] != RegionState::Unlabeled) continue;
    const Rect b = grid.bounds(i);
    double acc = 0.0;
    for (int r = b.row; r < b.row + b.height; ++r) {
      for (int c = b.col; c < b.col + b.width; ++c) {
        const double v = entropy.values(r, c);
        acc = aggregation == Aggregation::Max ? std::max(acc, v) : acc + v;
      }
    }
    if (aggregation == Aggregation::Mean) acc /= b.area();
    out.push_back({{entropy.image_id, i, RegionState::Unlabeled}, acc, aggregation});
  }
  return out;
}

std::vector<ImageRank> rank_images(std::span<const std::vector<RegionScore>> per_image) {
  std::vector<ImageRank> out;
  for (const auto& scores : per_image) {
    if (scores.empty()) continue;
    double best = scores.front().score;
    for (const auto& s : scores) best = std::max(best, s.score);
    out.push_back({scores.front().region.image_id, best});
  }
  std::sort(out.begin(), out.end(), [](const ImageRank& a, const ImageRank& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
  });
  return out;
}

void SelectionRequest::validate() const {
  if (images_per_cycle < 1) throw InvalidArgument("selection: images_per_cycle must be >= 1");
  if (regions_per_image < 1) throw InvalidArgument("selection: regions_per_image must be >= 1");
}

std::uint64_t random_key(std::uint64_t seed, int cycle, std::string_view image_id, int region_index) {
  const std::string id(image_id);
  return derive_seed(seed, {0x52414eULL, static_cast<std::uint64_t>(cycle), hash_string(id.c_str()),
                            static_cast<std::uint64_t>(region_index)});
}

namespace {

void check_candidate(const Candidate& c, bool need_entropy) {
  if (c.grid == nullptr) throw InvalidArgument("selection: candidate " + c.image_id + " has no grid");
  if (c.states.size() != static_cast<std::size_t>(c.grid->count())) {
    throw InvalidArgument("selection: candidate " + c.image_id + " has the wrong number of region states");
  }
  if (need_entropy && c.entropy == nullptr) {
    throw InvalidArgument("selection: entropy heuristic needs an entropy map for " + c.image_id);
  }
}

struct Keyed {
  std::uint64_t key;
  Selection selection;
};

std::vector<Keyed> random_order(const SelectionRequest& req, std::span<const Candidate> candidates) {
  std::vector<Keyed> all;
  for (const auto& c : candidates) {
    check_candidate(c, false);
    for (int i = 0; i < c.grid->count(); ++i) {
      if (c.states[i] != RegionState::Unlabeled) continue;
      const auto key = random_key(req.seed, req.cycle, c.image_id, i);
      all.push_back({key, {{c.image_id, i, RegionState::Unlabeled}, 1.0 - to_unit(key)}});
    }
  }
  std::sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.selection.region.image_id != b.selection.region.image_id) {
      return a.selection.region.image_id < b.selection.region.image_id;
    }
    return a.selection.region.region_index < b.selection.region.region_index;
  });
  return all;
}

// Region scores per image, each list sorted by descending score then index.
std::vector<std::vector<RegionScore>> entropy_scores(const SelectionRequest& req,
                                                     std::span<const Candidate> candidates) {
  std::vector<std::vector<RegionScore>> per_image;
  for (const auto& c : candidates) {
    check_candidate(c, true);
    auto scores = score_regions(*c.entropy, *c.grid, c.states, req.aggregation);
    for (auto& s : scores) s.region.image_id = c.image_id;
    std::stable_sort(scores.begin(), scores.end(),
                     [](const RegionScore& a, const RegionScore& b) { return a.score > b.score; });
    per_image.push_back(std::move(scores));
  }
  return per_image;
}

}  // namespace

std::vector<Selection> select(const SelectionRequest& req, std::span<const Candidate> candidates) {
  req.validate();
  std::vector<Selection> out;
  if (req.heuristic == Heuristic::Random) {
    const auto order = random_order(req, candidates);
    const std::size_t n = static_cast<std::size_t>(req.images_per_cycle) * req.regions_per_image;
    for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back(order[i].selection);
    return out;
  }
  const auto per_image = entropy_scores(req, candidates);
  std::map<std::string, const std::vector<RegionScore>*> by_id;
  for (const auto& s : per_image) {
    if (!s.empty()) by_id[s.front().region.image_id] = &s;
  }
  const auto ranked = rank_images(per_image);
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(req.images_per_cycle); ++i) {
    const auto& scores = *by_id.at(ranked[i].image_id);
    for (std::size_t j = 0; j < scores.size() && j < static_cast<std::size_t>(req.regions_per_image); ++j) {
      out.push_back({scores[j].region, scores[j].score});
    }
  }
  return out;
}

std::vector<Selection> rank_all_regions(const SelectionRequest& req, std::span<const Candidate> candidates) {
  std::vector<Selection> out;
  if (req.heuristic == Heuristic::Random) {
    for (const auto& k : random_order(req, candidates)) out.push_back(k.selection);
    return out;
  }
  for (const auto& scores : entropy_scores(req, candidates)) {
    for (const auto& s : scores) out.push_back({s.region, s.score});
  }
  std::stable_sort(out.begin(), out.end(), [](const Selection& a, const Selection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.region.image_id != b.region.image_id) return a.region.image_id < b.region.image_id;
    return a.region.region_index < b.region.region_index;
  });
  return out;
}

std::string to_json_line(const SelectionLogEntry& e) {
  return nlohmann::json{{"cycle", e.cycle},         {"heuristic", e.heuristic},
                        {"image_id", e.image_id},   {"region_index", e.region_index},
                        {"score", e.score},         {"aggregation", e.aggregation},
                        {"seed", e.seed}}
      .dump();
}

SelectionLogEntry selection_entry_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    return {j.at("cycle").get<int>(),        j.at("heuristic").get<std::string>(),
            j.at("image_id").get<std::string>(), j.at("region_index").get<int>(),
            j.at("score").get<double>(),     j.at("aggregation").get<std::string>(),
            j.at("seed").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("selection log: bad line: ") + e.what());
  }
}

std::vector<SelectionLogEntry> read_selection_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("selection log not found: " + path.string());
  std::vector<SelectionLogEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(selection_entry_from_json(line));
  }
  return out;
}

}  // namespace ral::acquisition
