#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace swir {

using TokenId = std::int32_t;

/// Next-token probability vector over the vocabulary.
///
/// Always holds at least two entries, all non-negative, summing to 1 within
/// 1e-6. Immutable once constructed.
class TokenDistribution {
 public:
  /// Validates and adopts an explicit probability vector.
  static TokenDistribution from_probs(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t v) const noexcept { return probs_[v]; }

  /// Highest-probability id, lowest id on ties.
  TokenId argmax() const noexcept;

 private:
  explicit TokenDistribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  friend TokenDistribution from_logits(std::span<const double> logits);

  std::vector<double> probs_;
};

/// Shannon entropy in nats.
struct EntropyValue {
  double nats = 0.0;

  auto operator<=>(const EntropyValue&) const = default;
};

/// Max-shifted softmax. Throws Errc::TooShort for fewer than two logits and
/// Errc::NonFinite for NaN or infinite entries.
TokenDistribution from_logits(std::span<const double> logits);

/// Entropy of the distribution; zero-probability terms contribute nothing.
EntropyValue entropy(const TokenDistribution& dist);

}  // namespace swir
