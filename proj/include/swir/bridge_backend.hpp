#pragma once

#include <string>
#include <sys/types.h>

#include "swir/backend.hpp"
#include "swir/wire.hpp"

namespace swir {

/// Backend served by a bridge process over stdio frames.
///
/// The command runs under /bin/sh. On construction the client performs the
/// Init/Ready handshake, fetches the special ids and downloads the full
/// embedding table row by row. Any error reply or broken pipe surfaces as
/// Errc::BackendFailure.
class BridgeBackend final : public Backend {
 public:
  BridgeBackend(const std::string& command, const std::string& model, const std::string& device = "cpu");
  ~BridgeBackend() override;

  BridgeBackend(const BridgeBackend&) = delete;
  BridgeBackend& operator=(const BridgeBackend&) = delete;

  std::vector<double> step(const TokenInput& input) override;
  void reset() override;
  const EmbeddingTable& embedding_table() const override { return table_; }
  SpecialIds special_ids() const override { return special_; }

  /// One raw request/response exchange; exposed for protocol tests.
  wire::Response exchange_raw(std::span<const std::uint8_t> payload);
  wire::Response exchange(const wire::Request& request);

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  wire::Ready ready_;
  SpecialIds special_;
  EmbeddingTable table_;
};

}  // namespace swir
