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

#include "ral/service/server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "ral/data/errors.hpp"
#include "ral/service/codec.hpp"

namespace ral::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

LabelRequest parse_label(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("malformed JSON: ") + e.what());
  }
  try {
    LabelRequest req;
    req.image_id = j.at("image_id").get<std::string>();
    req.region_index = j.at("region_index").get<int>();
    req.background = j.value("background", false);
    if (j.contains("points")) {
      for (const auto& p : j.at("points")) {
        if (p.is_array() && p.size() == 2) {
          req.points.push_back({p[0].get<int>(), p[1].get<int>()});
        } else if (p.is_object()) {
          req.points.push_back({p.at("row").get<int>(), p.at("col").get<int>()});
        } else {
          throw ServiceError(400, "points must be [row, col] pairs or {row, col} objects");
        }
      }
    }
    return req;
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("bad label body: ") + e.what());
  }
}

json queue_json(const Session& s, const Queue& q, bool images) {
  json items = json::array();
  std::map<std::string, Array2D<std::uint8_t>> slices;
  for (const auto& item : q.items) {
    json o = {{"image_id", item.region.image_id},
              {"region_index", item.region.region_index},
              {"rect",
               {{"row", item.rect.row}, {"col", item.rect.col}, {"height", item.rect.height}, {"width", item.rect.width}}},
              {"score", item.score}};
    if (images) {
      auto it = slices.find(item.region.image_id);
      if (it == slices.end()) it = slices.emplace(item.region.image_id, s.slice_u8(item.region.image_id)).first;
      o["crop_png"] = png_base64(crop(it->second, item.rect));
      o["context_png"] = png_base64(it->second);
      if (auto e = s.entropy_u8(item.region.image_id)) o["entropy_png"] = png_base64(*e);
    }
    items.push_back(std::move(o));
  }
  return {{"cycle", q.cycle}, {"exhausted", q.exhausted}, {"needs_training", q.needs_training}, {"regions", items}};
}

json status_json(const Status& st) {
  json job = {{"state", to_string(st.job.state)}};
  if (!st.job.phase.empty()) job["phase"] = st.job.phase;
  if (!st.job.reason.empty()) job["reason"] = st.job.reason;
  return {{"id", st.id},
          {"cycle", st.cycle},
          {"budget_seconds", st.budget_seconds},
          {"labeled_regions", st.labeled_regions},
          {"val_dice", optional_number(st.val_dice)},
          {"test_dice", optional_number(st.test_dice)},
          {"job", job}};
}

// Runs a handler, mapping ServiceError and library errors to status codes.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    send_error(res, e.status(), e.what());
  } catch (const InvalidArgument& e) {
    send_error(res, 400, e.what());
  } catch (const InvalidState& e) {
    send_error(res, 409, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

AnnotationServer::AnnotationServer(SessionStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});

  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, {{"sessions", store_.ids()}}); });
  });

  srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto& s = store_.create(req.body);
      send_json(res, 201, {{"id", s.id()}});
    });
  });

  srv.Get(R"(/sessions/([^/]+)/queue)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto& s = store_.get(req.matches[1]);
      int k = 5;
      if (req.has_param("k")) {
        try {
          k = std::stoi(req.get_param_value("k"));
        } catch (const std::exception&) {
          throw ServiceError(400, "k must be an integer");
        }
      }
      const bool images = !req.has_param("images") || req.get_param_value("images") != "0";
      send_json(res, 200, queue_json(s, s.queue(k), images));
    });
  });

  srv.Post(R"(/sessions/([^/]+)/labels)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto& s = store_.get(req.matches[1]);
      const auto label = parse_label(req.body);
      const auto r = s.label(label);
      send_json(res, 200,
                {{"image_id", label.image_id},
                 {"region_index", label.region_index},
                 {"state", to_string(r.state)},
                 {"cost_seconds", static_cast<double>(r.cost_ms) / 1000.0},
                 {"budget_seconds", static_cast<double>(r.budget_ms) / 1000.0}});
    });
  });

  srv.Post(R"(/sessions/([^/]+)/train)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto& s = store_.get(req.matches[1]);
      s.start_training();
      send_json(res, 202, {{"accepted", true}, {"cycle", s.status().cycle}});
    });
  });

  srv.Get(R"(/sessions/([^/]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, status_json(store_.get(req.matches[1]).status())); });
  });

  srv.Get(R"(/sessions/([^/]+)/curve)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.status = 200;
      res.set_content(store_.get(req.matches[1]).curve_csv(), "text/csv");
    });
  });
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool AnnotationServer::listen() { return server_->listen_after_bind(); }

void AnnotationServer::stop() {
  if (server_->is_running()) server_->stop();
}

void AnnotationServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace ral::service
