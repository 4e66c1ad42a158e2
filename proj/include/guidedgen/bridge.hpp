// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "guidedgen/oracles.hpp"
#include "guidedgen/types.hpp"

namespace guidedgen {

class BridgeError : public OracleError {
 public:
  using OracleError::OracleError;
};

// A bidirectional line channel. Lines exclude the trailing '\n'.
class LineTransport {
 public:
  virtual ~LineTransport() = default;
  virtual void write_line(const std::string& line) = 0;
  virtual std::string read_line() = 0;
};

// Reads and writes on a pair of file descriptors; owns and closes them.
class FdTransport : public LineTransport {
 public:
  FdTransport(int read_fd, int write_fd);
  ~FdTransport() override;
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;

  void write_line(const std::string& line) override;
  std::string read_line() override;

 protected:
  void close_fds();

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

// Spawns `/bin/sh -c command` and talks to it over its stdin/stdout.
class ProcessTransport final : public FdTransport {
 public:
  static std::unique_ptr<ProcessTransport> spawn(const std::string& command);
  ~ProcessTransport() override;

 private:
  ProcessTransport(int read_fd, int write_fd, int pid);
  int pid_;
};

// Endpoint syntax: "exec:<shell command>", "tcp://host:port" or "host:port".
std::unique_ptr<LineTransport> open_transport(const std::string& endpoint);

struct BridgeDims {
  std::size_t lm_vocab = 0;
  int mm = 0;
  std::optional<std::string> vocab_hash;
};

inline constexpr double kBridgeProbTolerance = 1e-6;
inline constexpr double kBridgeNormTolerance = 1e-6;

// Checks a response against the protocol schema for request["op"].
// `dims` (from ping) bounds vector lengths when known. Throws BridgeError
// prefixed with the op name.
void validate_bridge_response(const nlohmann::json& request,
                              const nlohmann::json& response,
                              const std::optional<BridgeDims>& dims);

// Client side of the newline-delimited JSON protocol. One request is in
// flight per client; concurrent callers are serialized.
class BridgeClient {
 public:
  explicit BridgeClient(std::unique_ptr<LineTransport> transport);
  static std::shared_ptr<BridgeClient> connect(const std::string& endpoint);

  // Assigns the request id, sends, reads and validates the response.
  nlohmann::json call(nlohmann::json request) const;

  BridgeDims ping() const;
  // Pings when needed and refuses a server whose vocabulary size or
  // reported token-list hash differs from `vocab`.
  void check_vocabulary(const Vocabulary& vocab) const;

  std::vector<double> lm_next(std::span<const TokenId> prefix) const;
  std::vector<double> lm_repr(std::span<const TokenId> prefix, TokenId token) const;
  std::vector<double> embed_text(const std::string& text) const;
  std::vector<double> embed_control(const std::string& ref) const;

  const std::optional<BridgeDims>& dims() const { return dims_; }

 private:
  mutable std::mutex mu_;
  std::unique_ptr<LineTransport> transport_;
  mutable std::int64_t next_id_ = 1;
  mutable std::optional<BridgeDims> dims_;
};

class BridgeLM final : public BaseLM {
 public:
  BridgeLM(std::shared_ptr<const BridgeClient> client, std::size_t vocab_size);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<double> next_distribution(
      std::span<const TokenId> prefix) const override;
  std::vector<double> representation(std::span<const TokenId> prefix,
                                     TokenId token) const override;
  std::string id() const override { return "bridge-lm"; }

 private:
  std::shared_ptr<const BridgeClient> client_;
  std::size_t vocab_size_;
};

// Text is sent as the space-joined token strings.
class BridgeMultimodalOracle final : public MultimodalOracle {
 public:
  BridgeMultimodalOracle(std::shared_ptr<const BridgeClient> client,
                         std::shared_ptr<const Vocabulary> vocab);

  int dim() const override;
  std::vector<double> embed_text(std::span<const TokenId> tokens) const override;
  std::vector<double> embed_control(const VisualControl& control) const override;
  std::string id() const override { return "bridge-mm"; }

 private:
  std::shared_ptr<const BridgeClient> client_;
  std::shared_ptr<const Vocabulary> vocab_;
};

}  // namespace guidedgen
