// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

// In-process stand-in for an oracle bridge server, backed by the toy
// oracles. Fault modes exercise the client's protocol checks.

#pragma once

#include <string>

#include "json.hpp"

#include "guidedgen/manifest.hpp"

namespace guidedgen::testing {

enum class FakeMode {
  kNormal,
  kUnnormalized,   // lm_next probabilities scaled by 0.8
  kServerError,    // every op but ping answers ok=false
  kBadId,          // non-ping responses carry the wrong id
  kHashMismatch,   // ping reports a foreign vocabulary hash
  kWrongDim,       // embed_text vectors lose their last component
};

FakeMode parse_fake_mode(const std::string& name);

class FakeBridge {
 public:
  FakeBridge(OracleBundle toy, FakeMode mode) : toy_(std::move(toy)), mode_(mode) {}

  nlohmann::json handle(const nlohmann::json& request) const;
  std::string handle_line(const std::string& line) const;

  // Answers one request per line until EOF on in_fd.
  void serve(int in_fd, int out_fd) const;

 private:
  OracleBundle toy_;
  FakeMode mode_;
};

// Listens on 127.0.0.1 with an ephemeral port; returns the socket and sets
// *port.
int listen_loopback(int* port);

}  // namespace guidedgen::testing
