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

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "ral/data/errors.hpp"
#include "ral/oracle/ledger.hpp"
#include "ral/service/codec.hpp"
#include "ral/service/server.hpp"
#include "ral/service/session.hpp"
#include "temp_dir.hpp"

// After the Eigen users: <resolv.h> defines a `res` macro.
#include <httplib.h>

using namespace ral;
using namespace ral::service;
using nlohmann::json;

namespace {

const char* kSessionBody = R"({"config": {
  "dataset": {"synthetic": {"n_images": 40, "height": 32, "width": 32, "radius_min": 2, "radius_max": 4}},
  "regions_per_image": 16, "images_per_cycle": 2, "mc_samples": 2, "seed": 4,
  "train": {"max_epochs": 2, "learning_rate": 0.001}}})";

// Server on an ephemeral port, torn down with the fixture.
struct LiveServer {
  explicit LiveServer(const std::filesystem::path& dir) : store(dir), server(store) {
    port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60, 0);
    return c;
  }

  SessionStore store;
  AnnotationServer server;
  int port = 0;
  std::thread thread;
};

json body(const httplib::Result& r) { return json::parse(r->body); }

std::string create_session(const httplib::Client& cc) {
  auto& c = const_cast<httplib::Client&>(cc);
  auto r = c.Post("/sessions", kSessionBody, "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return body(r).at("id").get<std::string>();
}

std::string label_body(const std::string& image, int region, const std::vector<std::pair<int, int>>& points) {
  json j = {{"image_id", image}, {"region_index", region}};
  if (points.empty()) {
    j["background"] = true;
  } else {
    json p = json::array();
    for (auto [r, c] : points) p.push_back({r, c});
    j["points"] = p;
  }
  return j.dump();
}

}  // namespace

TEST_CASE("base64 matches the RFC test vectors and round-trips") {
  auto enc = [](std::string s) {
    return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foobar") == "Zm9vYmFy");
  std::mt19937 rng(3);
  for (int n = 0; n < 40; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
  }
  CHECK_THROWS_AS(base64_decode("Zg="), InvalidArgument);
  CHECK_THROWS_AS(base64_decode("Z!=="), InvalidArgument);
  CHECK_THROWS_AS(base64_decode("=Zg="), InvalidArgument);
}

TEST_CASE("session lifecycle over HTTP") {
  TempDir tmp;
  std::string id;
  Status before;
  std::map<std::string, std::vector<RegionState>> states_before;
  std::string queue_before;
  {
    LiveServer live(tmp.path());
    auto c = live.client();

    // Creation errors.
    auto r = c.Post("/sessions", R"({"manifest": "/nonexistent/ds"})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 404);
    CHECK(body(r).at("error").get<std::string>().find("/nonexistent/ds") != std::string::npos);
    r = c.Post("/sessions", R"({"config": {"regions_per_image": 0}})", "application/json");
    CHECK(r->status == 400);
    r = c.Post("/sessions", "not json", "application/json");
    CHECK(r->status == 400);

    id = create_session(c);
    const std::string base = "/sessions/" + id;
    CHECK(c.Get("/sessions/nope/status")->status == 404);

    // CORS.
    r = c.Get(base + "/status");
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
    httplib::Request opt;
    opt.method = "OPTIONS";
    opt.path = base + "/labels";
    auto ro = c.send(opt);
    CHECK(ro->status == 204);

    // Seed queue.
    r = c.Get(base + "/queue?k=5");
    REQUIRE(r->status == 200);
    auto q = body(r);
    REQUIRE(q.at("regions").size() == 5);
    CHECK_FALSE(q.at("exhausted").get<bool>());
    const auto first = q.at("regions")[0];
    const auto png = base64_decode(first.at("crop_png").get<std::string>());
    REQUIRE(png.size() > 8);
    CHECK(png[1] == 'P');
    CHECK(png[2] == 'N');
    CHECK(first.at("rect").at("height").get<int>() == 8);
    CHECK(c.Get(base + "/queue?k=5")->body == r->body);

    const auto image = first.at("image_id").get<std::string>();
    const int row0 = first.at("rect").at("row").get<int>();
    const int col0 = first.at("rect").at("col").get<int>();
    const int region = first.at("region_index").get<int>();

    // Labels.
    r = c.Post(base + "/labels", label_body(image, region, {{-1, 0}}), "application/json");
    CHECK(r->status == 422);
    r = c.Post(base + "/labels", label_body(image, region, {{row0 + 1, col0 + 1}}), "application/json");
    REQUIRE(r->status == 200);
    CHECK(body(r).at("state") == "PointLabeled");
    CHECK(body(r).at("budget_seconds").get<double>() == 3.0);
    r = c.Post(base + "/labels", label_body(image, region, {{row0, col0}}), "application/json");
    CHECK(r->status == 409);
    r = c.Post(base + "/labels", label_body(image, 999, {}), "application/json");
    CHECK(r->status == 404);
    r = c.Post(base + "/labels", label_body("ghost", 0, {}), "application/json");
    CHECK(r->status == 404);
    r = c.Post(base + "/labels", R"({"image_id": "x"})", "application/json");
    CHECK(r->status == 400);

    const auto second = q.at("regions")[1];
    r = c.Post(base + "/labels", label_body(image, second.at("region_index").get<int>(), {}), "application/json");
    REQUIRE(r->status == 200);
    CHECK(body(r).at("state") == "BackgroundTagged");
    CHECK(body(r).at("budget_seconds").get<double>() == 6.0);

    // Two points on one region are charged separately.
    const auto third = q.at("regions")[2];
    const int r3 = third.at("rect").at("row").get<int>();
    const int c3 = third.at("rect").at("col").get<int>();
    r = c.Post(base + "/labels", label_body(image, third.at("region_index").get<int>(), {{r3, c3}, {r3 + 2, c3 + 2}}),
               "application/json");
    REQUIRE(r->status == 200);
    CHECK(body(r).at("budget_seconds").get<double>() == 12.0);

    r = c.Get(base + "/queue?k=5");
    CHECK(body(r).at("regions")[0].at("region_index").get<int>() == 3);

    // Training.
    r = c.Post(base + "/train", "", "application/json");
    CHECK(r->status == 202);
    r = c.Post(base + "/train", "", "application/json");
    CHECK(r->status == 409);
    live.store.get(id).wait_idle();
    auto st = body(c.Get(base + "/status"));
    CHECK(st.at("cycle") == 1);
    CHECK(st.at("job").at("state") == "idle");
    CHECK(st.at("labeled_regions") == 3);
    CHECK(st.at("budget_seconds").get<double>() == 12.0);
    CHECK(c.Post(base + "/train", "", "application/json")->status == 409);

    r = c.Get(base + "/curve");
    CHECK(r->status == 200);
    std::istringstream csv(r->body);
    std::string header, row, extra;
    std::getline(csv, header);
    CHECK(header == eval::kCurveHeader);
    CHECK(std::getline(csv, row));
    CHECK_FALSE(std::getline(csv, extra));
    CHECK(row.rfind("0,12", 0) == 0);

    // The model-ranked queue: descending scores, stable between submissions,
    // with entropy overlays.
    r = c.Get(base + "/queue?k=6");
    q = body(r);
    REQUIRE(q.at("regions").size() == 6);
    for (std::size_t i = 1; i < q.at("regions").size(); ++i) {
      CHECK(q.at("regions")[i - 1].at("score").get<double>() >= q.at("regions")[i].at("score").get<double>());
    }
    CHECK(q.at("regions")[0].contains("entropy_png"));
    CHECK(c.Get(base + "/queue?k=6")->body == r->body);

    // Status counts match the ledger's labeled regions.
    auto& s = live.store.get(id);
    CHECK(s.ledger_size() == 4);
    before = s.status();
    states_before = s.region_states();
    queue_before = c.Get(base + "/queue?k=6&images=0")->body;
  }

  // Restart from disk: same budget, labels and queue.
  LiveServer again(tmp.path());
  auto c = again.client();
  auto& s = again.store.get(id);
  const auto after = s.status();
  CHECK(after.cycle == before.cycle);
  CHECK(after.budget_seconds == before.budget_seconds);
  CHECK(after.labeled_regions == before.labeled_regions);
  CHECK(after.test_dice == before.test_dice);
  CHECK(s.region_states() == states_before);
  CHECK(c.Get("/sessions/" + id + "/queue?k=6&images=0")->body == queue_before);
}

TEST_CASE("labeled regions equal the distinct regions in the ledger") {
  TempDir tmp;
  SessionStore store(tmp.path());
  auto& s = store.create(kSessionBody);
  std::mt19937 rng(8);
  const auto q = s.queue(10);
  for (const auto& item : q.items) {
    LabelRequest req{item.region.image_id, item.region.region_index, {}, false};
    const int clicks = static_cast<int>(rng() % 3);
    for (int i = 0; i < clicks; ++i) req.points.push_back({item.rect.row + i, item.rect.col + i});
    req.background = clicks == 0;
    s.label(req);
  }
  const auto st = s.status();
  std::size_t background = 0, point_actions = 0;
  std::set<std::pair<std::string, int>> distinct;
  std::ifstream in(tmp.path() / s.id() / "labels.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    const auto a = oracle::action_from_json(line);
    distinct.insert({a.image_id, a.region_index});
    if (a.kind == oracle::ActionKind::BackgroundTag) ++background;
    if (a.kind == oracle::ActionKind::PointLabel) ++point_actions;
  }
  CHECK(st.labeled_regions == 10);
  CHECK(distinct.size() == 10);
  CHECK(s.ledger_size() == background + point_actions);
  CHECK(st.budget_seconds == 3.0 * static_cast<double>(background + point_actions));
}

TEST_CASE("queue reports exhaustion once every region is labeled") {
  TempDir tmp;
  SessionStore store(tmp.path());
  auto& s = store.create(R"({"config": {
    "dataset": {"synthetic": {"n_images": 20, "height": 16, "width": 16}},
    "split": {"mode": "mixed", "fractions": [0.2, 0.2, 0.6]},
    "regions_per_image": 4, "images_per_cycle": 1, "mc_samples": 1, "train": {"max_epochs": 1}}})");
  for (;;) {
    auto q = s.queue(100);
    if (q.exhausted) break;
    if (q.needs_training) {
      s.start_training();
      s.wait_idle();
      continue;
    }
    for (const auto& item : q.items) s.label({item.region.image_id, item.region.region_index, {}, true});
  }
  const auto q = s.queue(5);
  CHECK(q.items.empty());
  CHECK(q.exhausted);
  CHECK(s.status().labeled_regions == 4 * 4);
}

TEST_CASE("a diverging training job reports failure and survives a restart") {
  TempDir tmp;
  const char* body = R"({"config": {
    "dataset": {"synthetic": {"n_images": 20, "height": 16, "width": 16}},
    "split": {"mode": "mixed", "fractions": [0.2, 0.2, 0.6]},
    "regions_per_image": 4, "images_per_cycle": 1, "mc_samples": 1,
    "train": {"max_epochs": 3, "learning_rate": 1e200}}})";
  std::string id;
  {
    SessionStore store(tmp.path());
    auto& s = store.create(body);
    id = s.id();
    for (const auto& item : s.queue(10).items) s.label({item.region.image_id, item.region.region_index, {}, true});
    s.start_training();
    s.wait_idle();
    const auto st = s.status();
    CHECK(st.job.state == JobState::Failed);
    CHECK_FALSE(st.job.reason.empty());
    CHECK(st.cycle == 0);
  }
  SessionStore reopened(tmp.path());
  const auto st = reopened.get(id).status();
  CHECK(st.job.state == JobState::Failed);
  CHECK(st.cycle == 0);
  CHECK(st.labeled_regions == 4);
}
