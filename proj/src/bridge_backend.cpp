#include "swir/bridge_backend.hpp"

#include <csignal>
#include <cstring>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "swir/error.hpp"

extern char** environ;

namespace swir {

namespace {

template <typename T>
T expect(wire::Response response, const char* what) {
  if (const auto* err = std::get_if<wire::ErrorReply>(&response)) {
    throw Error(Errc::BackendFailure, std::string(what) + ": bridge error " + err->code + ": " + err->text);
  }
  if (auto* r = std::get_if<T>(&response)) return std::move(*r);
  throw Error(Errc::BackendFailure, std::string(what) + ": unexpected response kind");
}

}  // namespace

BridgeBackend::BridgeBackend(const std::string& command, const std::string& model, const std::string& device) {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw Error(Errc::BackendFailure, std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

  std::string sh = "/bin/sh";
  std::string flag = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), flag.data(), cmd.data(), nullptr};
  const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    ::close(to_child_);
    ::close(from_child_);
    throw Error(Errc::BackendFailure, std::string("spawn: ") + std::strerror(rc));
  }
  // a dead bridge should surface as a write error, not kill the controller
  std::signal(SIGPIPE, SIG_IGN);

  try {
    ready_ = expect<wire::Ready>(exchange(wire::Init{model, device}), "init");
    special_ = expect<wire::Special>(exchange(wire::SpecialIdsRequest{}), "special_ids").ids;
    std::vector<double> data;
    data.reserve(ready_.vocab * ready_.dim);
    for (std::uint64_t v = 0; v < ready_.vocab; ++v) {
      const auto row = expect<wire::Row>(exchange(wire::EmbeddingRow{static_cast<TokenId>(v)}), "embedding_row");
      if (row.values.size() != ready_.dim) throw Error(Errc::BackendFailure, "embedding row has wrong dimension");
      data.insert(data.end(), row.values.begin(), row.values.end());
    }
    table_ = EmbeddingTable(ready_.vocab, ready_.dim, std::move(data));
  } catch (...) {
    ::close(to_child_);
    ::close(from_child_);
    ::waitpid(pid_, nullptr, 0);
    throw;
  }
}

BridgeBackend::~BridgeBackend() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) ::waitpid(pid_, nullptr, 0);
}

wire::Response BridgeBackend::exchange_raw(std::span<const std::uint8_t> payload) {
  const wire::FrameChannel channel(from_child_, to_child_);
  wire::Bytes reply;
  try {
    channel.write_frame(payload);
    if (!channel.read_frame(reply)) throw Error(Errc::BackendFailure, "bridge closed the connection");
    return wire::decode_response(reply);
  } catch (const Error& e) {
    if (e.code() == Errc::BackendFailure) throw;
    throw Error(Errc::BackendFailure, e.what());
  }
}

wire::Response BridgeBackend::exchange(const wire::Request& request) { return exchange_raw(wire::encode(request)); }

std::vector<double> BridgeBackend::step(const TokenInput& input) {
  wire::Step request;
  if (const auto* id = std::get_if<TokenId>(&input)) {
    request.input = *id;
  } else {
    const auto& e = std::get<Embedding>(input);
    request.input = std::vector<float>(e.begin(), e.end());
  }
  const auto logits = expect<wire::Logits>(exchange(request), "step");
  if (logits.values.size() != ready_.vocab) throw Error(Errc::BackendFailure, "logits length differs from vocab");
  return {logits.values.begin(), logits.values.end()};
}

void BridgeBackend::reset() { expect<wire::Ready>(exchange(wire::Reset{}), "reset"); }

}  // namespace swir
