#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <variant>

#include "swir/confidence.hpp"

namespace swir {

struct GreedyPolicy {
  bool operator==(const GreedyPolicy&) const = default;
};

struct SampledPolicy {
  double temperature = 1.0;
  std::optional<std::size_t> top_k;
  std::optional<double> top_p;
  std::uint64_t seed = 0;

  bool operator==(const SampledPolicy&) const = default;
};

using SamplingPolicy = std::variant<GreedyPolicy, SampledPolicy>;

/// Throws Errc::InvalidArgument for out-of-range policy parameters.
void validate(const SamplingPolicy& policy);

/// Seeded explicit-step token picker.
///
/// Greedy returns the argmax (lowest id on ties). Sampled tempers the
/// log-probabilities, keeps the top-k ids, then the smallest nucleus whose
/// mass reaches top-p, renormalizes and draws. Ranking ties go to the lower
/// id, so top_k = 1 always agrees with greedy.
class Sampler {
 public:
  explicit Sampler(SamplingPolicy policy);

  TokenId sample(const TokenDistribution& dist);

  const SamplingPolicy& policy() const noexcept { return policy_; }

 private:
  SamplingPolicy policy_;
  std::mt19937_64 rng_;
};

}  // namespace swir
