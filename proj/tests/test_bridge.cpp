#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"
#include "swir/bridge_backend.hpp"
#include "swir/error.hpp"
#include "swir/trace.hpp"
#include "wire_gen.hpp"

extern char** environ;

using namespace swir;

namespace {

std::string bridge(const std::string& args = "") { return std::string(SWIR_FAKE_BRIDGE) + " " + args; }

// Minimal child process with piped stdio, for talking raw frames.
struct Child {
  pid_t pid = -1;
  int to = -1;
  int from = -1;

  explicit Child(const std::string& arg) {
    int in[2], out[2];
    REQUIRE(::pipe(in) == 0);
    REQUIRE(::pipe(out) == 0);
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&fa, in[1]);
    posix_spawn_file_actions_addclose(&fa, out[0]);
    std::string path = SWIR_FAKE_BRIDGE;
    std::string a = arg;
    char* argv[] = {path.data(), a.data(), nullptr};
    REQUIRE(posix_spawn(&pid, path.c_str(), &fa, nullptr, argv, environ) == 0);
    posix_spawn_file_actions_destroy(&fa);
    ::close(in[0]);
    ::close(out[1]);
    to = in[1];
    from = out[0];
  }
  ~Child() {
    ::close(to);
    ::close(from);
    int status = 0;
    ::waitpid(pid, &status, 0);
  }
  wire::FrameChannel channel() const { return {from, to}; }
};

}  // namespace

TEST_CASE("handshake reports the model shape") {
  BridgeBackend b(bridge("--vocab 40 --dim 6 --seed 3"), "tiny");
  CHECK(b.embedding_table().rows() == 40);
  CHECK(b.embedding_table().dim() == 6);
  CHECK(b.special_ids() == SpecialIds{39, {37}, {38}});
  TinyModel local({40, 6, 3});
  for (std::size_t v = 0; v < 40; ++v) {
    const auto r = b.embedding_table().row(v);
    const auto l = local.embedding_table().row(v);
    for (std::size_t j = 0; j < 6; ++j) CHECK(r[j] == static_cast<double>(static_cast<float>(l[j])));
  }
}

TEST_CASE("token and row inputs give the same logits") {
  BridgeBackend by_id(bridge(), "tiny");
  BridgeBackend by_row(bridge(), "tiny");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    const auto id = static_cast<TokenId>(rng() % 32);
    const auto row = by_row.embedding_table().row(static_cast<std::size_t>(id));
    const auto a = by_id.step(id);
    const auto b = by_row.step(Embedding(row.begin(), row.end()));
    REQUIRE(a.size() == b.size());
    for (std::size_t v = 0; v < a.size(); ++v) REQUIRE(std::fabs(a[v] - b[v]) <= 1e-4);
  }
}

TEST_CASE("malformed frames get a protocol error and the session survives") {
  BridgeBackend b(bridge(), "tiny");
  const auto before = b.step(1);
  const std::vector<std::uint8_t> junk{0xde, 0xad, 0xbe, 0xef};
  const auto reply = b.exchange_raw(junk);
  const auto* err = std::get_if<wire::ErrorReply>(&reply);
  REQUIRE(err != nullptr);
  CHECK(err->code == "PROTOCOL");
  b.reset();
  CHECK(b.step(1) == before);

  const auto dim = b.exchange(wire::Step{std::vector<float>{1.0f}});
  REQUIRE(std::holds_alternative<wire::ErrorReply>(dim));
  CHECK(std::get<wire::ErrorReply>(dim).code == "DIM_MISMATCH");
  CHECK_THROWS_AS(b.step(Embedding{1.0}), Error);
  CHECK(b.step(2).size() == 32);
}

TEST_CASE("bridge failures surface as backend failures") {
  try {
    BridgeBackend b(bridge("--fail-init"), "missing-model");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BackendFailure);
    CHECK(std::string(e.what()).find("MODEL_LOAD") != std::string::npos);
  }
  try {
    BridgeBackend b("exit 3", "tiny");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BackendFailure);
  }
}

TEST_CASE("echo server returns 10,000 randomized frames intact") {
  std::mt19937_64 rng(77);
  {
    Child echo("--echo");
    const auto ch = echo.channel();
    wire::Bytes got;
    for (int i = 0; i < 5000; ++i) {
      const auto req = wire_gen::random_request(rng);
      const auto bytes = wire::encode(req);
      ch.write_frame(bytes);
      REQUIRE(ch.read_frame(got));
      REQUIRE(got == bytes);
      REQUIRE(wire::decode_request(got) == req);
    }
  }
  {
    Child echo("--echo-responses");
    const auto ch = echo.channel();
    wire::Bytes got;
    for (int i = 0; i < 5000; ++i) {
      const auto resp = wire_gen::random_response(rng);
      const auto bytes = wire::encode(resp);
      ch.write_frame(bytes);
      REQUIRE(ch.read_frame(got));
      REQUIRE(wire::decode_response(got) == resp);
    }
  }
}

TEST_CASE("a bridged decode replays exactly through the core") {
  BridgeBackend b(bridge("--vocab 48 --dim 8 --seed 11"), "tiny");
  DecodeConfig cfg;
  cfg.switching.window_explicit_to_latent = 4;
  cfg.budget = BudgetConfig{3, 8, b.special_ids().think_end, b.special_ids().think_end};
  cfg.schedule.alpha0 = 0.6;
  cfg.with_t_max(120);
  const std::vector<TokenId> prompt{1, 2, 3};
  const auto tr = decode(prompt, b, cfg);
  const auto trace = replay(record(tr, cfg, b.special_ids()));
  CHECK(trace.transcript == tr);
  CHECK(verify_decisions(trace.transcript, cfg.switching).ok);

  // and the bridge is deterministic across a reset
  b.reset();
  CHECK(decode(prompt, b, cfg) == tr);
}
