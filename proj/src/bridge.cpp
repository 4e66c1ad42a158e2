// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/bridge.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "guidedgen/vector_math.hpp"

namespace guidedgen {

using nlohmann::json;

FdTransport::FdTransport(int read_fd, int write_fd)
    : read_fd_(read_fd), write_fd_(write_fd) {}

FdTransport::~FdTransport() { close_fds(); }

void FdTransport::close_fds() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  read_fd_ = write_fd_ = -1;
}

void FdTransport::write_line(const std::string& line) {
  std::string data = line;
  data += '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("transport failure: write: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string FdTransport::read_line() {
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("transport failure: read: ") + std::strerror(errno));
    }
    if (n == 0) throw BridgeError("transport failure: connection closed");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ProcessTransport::ProcessTransport(int read_fd, int write_fd, int pid)
    : FdTransport(read_fd, write_fd), pid_(pid) {}

ProcessTransport::~ProcessTransport() {
  close_fds();
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

std::unique_ptr<ProcessTransport> ProcessTransport::spawn(const std::string& command) {
  std::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw BridgeError("transport failure: pipe");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw BridgeError("transport failure: pipe");
  }
  pid_t pid = ::fork();
  if (pid < 0) throw BridgeError("transport failure: fork");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::unique_ptr<ProcessTransport>(
      new ProcessTransport(from_child[0], to_child[1], pid));
}

namespace {

std::unique_ptr<LineTransport> connect_tcp(const std::string& hostport) {
  const auto colon = hostport.rfind(':');
  if (colon == std::string::npos) {
    throw BridgeError("transport failure: endpoint '" + hostport + "' lacks a port");
  }
  const std::string host = hostport.substr(0, colon);
  const std::string port = hostport.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw BridgeError("transport failure: resolve " + hostport + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw BridgeError("transport failure: cannot connect to " + hostport);
  std::signal(SIGPIPE, SIG_IGN);
  return std::make_unique<FdTransport>(fd, fd);
}

std::vector<double> number_array(const json& response, const char* field,
                                  const std::string& op) {
  auto it = response.find(field);
  if (it == response.end() || !it->is_array()) {
    throw BridgeError(op + ": schema violation: missing array '" + field + "'");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& x : *it) {
    if (!x.is_number()) {
      throw BridgeError(op + ": schema violation: non-numeric entry in '" + field + "'");
    }
    double v = x.get<double>();
    if (!std::isfinite(v)) {
      throw BridgeError(op + ": schema violation: non-finite entry in '" + field + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::unique_ptr<LineTransport> open_transport(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) return ProcessTransport::spawn(endpoint.substr(5));
  if (endpoint.rfind("tcp://", 0) == 0) return connect_tcp(endpoint.substr(6));
  return connect_tcp(endpoint);
}

void validate_bridge_response(const json& request, const json& response,
                              const std::optional<BridgeDims>& dims) {
  const std::string op = request.value("op", std::string("?"));
  if (!response.is_object()) throw BridgeError(op + ": schema violation: not an object");
  if (!response.contains("id") || response["id"] != request["id"]) {
    throw BridgeError(op + ": schema violation: response id does not match request");
  }
  auto ok = response.find("ok");
  if (ok == response.end() || !ok->is_boolean()) {
    throw BridgeError(op + ": schema violation: missing boolean 'ok'");
  }
  if (!ok->get<bool>()) {
    std::string reason = "unspecified error";
    if (auto e = response.find("error"); e != response.end()) {
      reason = e->is_string() ? e->get<std::string>() : e->dump();
    }
    throw BridgeError(op + ": server error: " + reason);
  }

  if (op == "ping") {
    auto d = response.find("dims");
    if (d == response.end() || !d->is_object() ||
        !d->contains("lm_vocab") || !(*d)["lm_vocab"].is_number_integer() ||
        !d->contains("mm") || !(*d)["mm"].is_number_integer()) {
      throw BridgeError("ping: schema violation: missing dims.lm_vocab / dims.mm");
    }
  } else if (op == "lm_next") {
    auto probs = number_array(response, "probs", op);
    if (dims && probs.size() != dims->lm_vocab) {
      throw BridgeError("lm_next: schema violation: expected " +
                        std::to_string(dims->lm_vocab) + " probabilities, got " +
                        std::to_string(probs.size()));
    }
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw BridgeError("lm_next: schema violation: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kBridgeProbTolerance) {
      throw BridgeError("lm_next: unnormalized distribution (sum " +
                        std::to_string(sum) + ")");
    }
  } else if (op == "lm_repr") {
    if (number_array(response, "vec", op).empty()) {
      throw BridgeError("lm_repr: schema violation: empty vector");
    }
  } else if (op == "embed_text" || op == "embed_control") {
    auto vec = number_array(response, "vec", op);
    if (dims && vec.size() != static_cast<std::size_t>(dims->mm)) {
      throw BridgeError(op + ": schema violation: expected dimension " +
                        std::to_string(dims->mm) + ", got " + std::to_string(vec.size()));
    }
    if (std::abs(l2_norm(vec) - 1.0) > kBridgeNormTolerance) {
      throw BridgeError(op + ": schema violation: vector is not unit-norm");
    }
  } else {
    throw BridgeError(op + ": unknown op");
  }
}

BridgeClient::BridgeClient(std::unique_ptr<LineTransport> transport)
    : transport_(std::move(transport)) {}

std::shared_ptr<BridgeClient> BridgeClient::connect(const std::string& endpoint) {
  return std::make_shared<BridgeClient>(open_transport(endpoint));
}

json BridgeClient::call(json request) const {
  std::lock_guard<std::mutex> lock(mu_);
  request["id"] = next_id_++;
  transport_->write_line(request.dump());
  const std::string line = transport_->read_line();
  json response = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (response.is_discarded()) {
    throw BridgeError(request.value("op", std::string("?")) +
                      ": schema violation: response is not JSON");
  }
  validate_bridge_response(request, response, dims_);
  return response;
}

BridgeDims BridgeClient::ping() const {
  json r = call({{"op", "ping"}});
  BridgeDims d;
  d.lm_vocab = r["dims"]["lm_vocab"].get<std::size_t>();
  d.mm = r["dims"]["mm"].get<int>();
  if (auto h = r.find("vocab_hash"); h != r.end() && h->is_string()) {
    d.vocab_hash = h->get<std::string>();
  }
  std::lock_guard<std::mutex> lock(mu_);
  dims_ = d;
  return d;
}

void BridgeClient::check_vocabulary(const Vocabulary& vocab) const {
  BridgeDims d = dims_ ? *dims_ : ping();
  if (d.lm_vocab != vocab.size()) {
    throw BridgeError("ping: vocabulary size mismatch (server " +
                      std::to_string(d.lm_vocab) + ", engine " +
                      std::to_string(vocab.size()) + ")");
  }
  if (d.vocab_hash && *d.vocab_hash != vocab.hash_hex()) {
    throw BridgeError("ping: vocabulary hash mismatch (server " + *d.vocab_hash +
                      ", engine " + vocab.hash_hex() + ")");
  }
}

std::vector<double> BridgeClient::lm_next(std::span<const TokenId> prefix) const {
  json r = call({{"op", "lm_next"},
                 {"prefix", std::vector<TokenId>(prefix.begin(), prefix.end())}});
  return r["probs"].get<std::vector<double>>();
}

std::vector<double> BridgeClient::lm_repr(std::span<const TokenId> prefix,
                                          TokenId token) const {
  json r = call({{"op", "lm_repr"},
                 {"prefix", std::vector<TokenId>(prefix.begin(), prefix.end())},
                 {"token", token}});
  return r["vec"].get<std::vector<double>>();
}

std::vector<double> BridgeClient::embed_text(const std::string& text) const {
  json r = call({{"op", "embed_text"}, {"text", text}});
  return r["vec"].get<std::vector<double>>();
}

std::vector<double> BridgeClient::embed_control(const std::string& ref) const {
  json r = call({{"op", "embed_control"}, {"ref", ref}});
  return r["vec"].get<std::vector<double>>();
}

BridgeLM::BridgeLM(std::shared_ptr<const BridgeClient> client, std::size_t vocab_size)
    : client_(std::move(client)), vocab_size_(vocab_size) {}

std::vector<double> BridgeLM::next_distribution(std::span<const TokenId> prefix) const {
  auto p = client_->lm_next(prefix);
  if (p.size() != vocab_size_) {
    throw BridgeError("lm_next: schema violation: distribution length " +
                      std::to_string(p.size()) + " != vocabulary size " +
                      std::to_string(vocab_size_));
  }
  return p;
}

std::vector<double> BridgeLM::representation(std::span<const TokenId> prefix,
                                             TokenId token) const {
  return client_->lm_repr(prefix, token);
}

BridgeMultimodalOracle::BridgeMultimodalOracle(std::shared_ptr<const BridgeClient> client,
                                               std::shared_ptr<const Vocabulary> vocab)
    : client_(std::move(client)), vocab_(std::move(vocab)) {}

int BridgeMultimodalOracle::dim() const {
  const auto& d = client_->dims();
  return d ? d->mm : client_->ping().mm;
}

std::vector<double> BridgeMultimodalOracle::embed_text(
    std::span<const TokenId> tokens) const {
  if (tokens.empty()) throw OracleError("embed_text: empty sequence");
  return client_->embed_text(vocab_->decode({tokens.begin(), tokens.end()}));
}

std::vector<double> BridgeMultimodalOracle::embed_control(
    const VisualControl& control) const {
  if (const auto* ref = std::get_if<std::string>(&control.payload)) {
    return client_->embed_control(*ref);
  }
  if (const auto* vec = std::get_if<std::vector<double>>(&control.payload)) {
    if (vec->size() != static_cast<std::size_t>(dim())) {
      throw OracleError("embed_control: control vector has dimension " +
                        std::to_string(vec->size()) + ", oracle expects " +
                        std::to_string(dim()));
    }
    std::vector<double> out = *vec;
    if (!normalize_in_place(out)) throw OracleError("embed_control: zero-norm control");
    return out;
  }
  throw OracleError("embed_control: empty visual control");
}

}  // namespace guidedgen
