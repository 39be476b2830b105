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

#include <memory>
#include <string>

#include "ral/service/session.hpp"

namespace httplib {
class Server;
}

namespace ral::service {

/// HTTP front end of a SessionStore. Routes:
///   POST /sessions                       -> 201 {"id": ...}
///   GET  /sessions/{id}/queue?k=N         -> pending regions with images
///   POST /sessions/{id}/labels            -> updated region state
///   POST /sessions/{id}/train             -> 202 job accepted
///   GET  /sessions/{id}/status            -> cycle, budget, job state
///   GET  /sessions/{id}/curve             -> curve CSV
/// Every response carries permissive CORS headers.
class AnnotationServer {
 public:
  explicit AnnotationServer(SessionStore& store);
  ~AnnotationServer();

  /// Binds and returns the port (an ephemeral one when `port` is 0), or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false on socket errors.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  SessionStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ral::service
