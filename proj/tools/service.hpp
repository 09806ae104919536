// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// HTTP API over one scenario: placement edits, synchronous view valuation and
// asynchronous flow jobs.
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace settle::service {

struct ServiceOptions {
  std::filesystem::path scenario_path;
  /// Directory served under "/"; nothing is mounted when empty.
  std::filesystem::path static_dir;
  /// Default stabilization for flow jobs; a request may override it.
  double gamma = 1e8;
};

class Service {
 public:
  /// Loads and validates the scenario. Throws settle::Error.
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void register_routes(httplib::Server& server);
  /// Blocks until no flow job is queued or running.
  void wait_idle();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Serves until the process is stopped. Returns false when binding fails.
bool serve(const ServiceOptions& options, const std::string& host, int port);

}  // namespace settle::service
