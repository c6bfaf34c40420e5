#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "swir/backend.hpp"

namespace swir {

/// Replays a fixed list of logit vectors, one per `step` call, ignoring the
/// input. Fails with Errc::BackendFailure once the script is exhausted.
class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend(std::vector<std::vector<double>> script, EmbeddingTable table, SpecialIds special);

  /// Loads the JSON script format documented in docs/formats.md.
  static ScriptedBackend from_file(const std::filesystem::path& path);

  std::vector<double> step(const TokenInput& input) override;
  void reset() override { cursor_ = 0; }
  const EmbeddingTable& embedding_table() const override { return table_; }
  SpecialIds special_ids() const override { return special_; }

  std::size_t calls() const noexcept { return cursor_; }

 private:
  std::vector<std::vector<double>> script_;
  EmbeddingTable table_;
  SpecialIds special_;
  std::size_t cursor_ = 0;
};

struct TinyModelConfig {
  std::size_t vocab_size = 64;
  std::size_t dim = 16;
  std::uint64_t seed = 1;
  double logit_scale = 4.0;
  // 0 keeps the running mean of every input; a value in (0, 1) keeps an
  // exponential moving average with that weight on the past instead.
  double memory = 0.0;
  // Negative ids count back from the end of the vocabulary.
  TokenId eos = -1;
  TokenId think_begin = -3;
  TokenId think_end = -2;
};

/// Deterministic toy language model.
///
/// The hidden state is the running mean of every input embedding seen so far
/// (or a moving average, see TinyModelConfig::memory); logits are `logit_scale * output_matrix * state`. Token ids are looked up
/// in the embedding table and then take exactly the same path as raw
/// embeddings, so feeding a row reproduces feeding its id bit for bit.
class TinyModel final : public Backend {
 public:
  explicit TinyModel(const TinyModelConfig& config);

  std::vector<double> step(const TokenInput& input) override;
  void reset() override;
  const EmbeddingTable& embedding_table() const override { return table_; }
  SpecialIds special_ids() const override { return special_; }

 private:
  std::size_t vocab_;
  std::size_t dim_;
  double logit_scale_;
  double memory_;
  EmbeddingTable table_;
  std::vector<double> output_;  // vocab x dim, row-major
  SpecialIds special_;
  std::vector<double> state_;
  std::size_t seen_ = 0;
};

}  // namespace swir
