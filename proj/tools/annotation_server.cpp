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

// HTTP annotation service for human-in-the-loop sessions.

#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ral/service/server.hpp"

namespace {
ral::service::AnnotationServer* g_server = nullptr;
void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annotation service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "sessions";
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port (0 picks a free one)");
  app.add_option("--data-dir", data_dir, "Session root directory");
  CLI11_PARSE(app, argc, argv);

  try {
    ral::service::SessionStore store(data_dir);
    ral::service::AnnotationServer server(store);
    const int bound = server.bind(host, port);
    if (bound < 0) {
      std::cerr << "error: cannot bind " << host << ":" << port << '\n';
      return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving " << store.ids().size() << " session(s) from " << data_dir << " on http://" << host << ":"
              << bound << '\n';
    if (!server.listen()) {
      std::cerr << "error: server stopped unexpectedly\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
