#include "swir/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "swir/error.hpp"

namespace swir {

void validate(const SamplingPolicy& policy) {
  if (const auto* s = std::get_if<SampledPolicy>(&policy)) {
    if (!(s->temperature > 0.0) || !std::isfinite(s->temperature)) {
      throw Error(Errc::InvalidArgument, "temperature must be > 0");
    }
    if (s->top_k && *s->top_k < 1) throw Error(Errc::InvalidArgument, "top_k must be >= 1");
    if (s->top_p && !(*s->top_p > 0.0 && *s->top_p <= 1.0)) {
      throw Error(Errc::InvalidArgument, "top_p must lie in (0, 1]");
    }
  }
}

Sampler::Sampler(SamplingPolicy policy) : policy_(std::move(policy)) {
  validate(policy_);
  if (const auto* s = std::get_if<SampledPolicy>(&policy_)) rng_.seed(s->seed);
}

TokenId Sampler::sample(const TokenDistribution& dist) {
  const auto* params = std::get_if<SampledPolicy>(&policy_);
  if (params == nullptr) return dist.argmax();

  const auto probs = dist.probs();
  std::vector<TokenId> ranked;
  ranked.reserve(probs.size());
  for (std::size_t v = 0; v < probs.size(); ++v) {
    if (probs[v] > 0.0) ranked.push_back(static_cast<TokenId>(v));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](TokenId a, TokenId b) { return probs[a] > probs[b]; });
  if (params->top_k && ranked.size() > *params->top_k) ranked.resize(*params->top_k);
  if (ranked.empty()) throw Error(Errc::EmptySupport, "no token survives truncation");

  // temperature on log-probabilities, shifted by the top entry
  const double top_log = std::log(probs[ranked.front()]);
  std::vector<double> weights(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    weights[i] = std::exp((std::log(probs[ranked[i]]) - top_log) / params->temperature);
  }
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  if (params->top_p) {
    double cumulative = 0.0;
    std::size_t keep = 0;
    while (keep < weights.size()) {
      cumulative += weights[keep] / total;
      ++keep;
      if (cumulative >= *params->top_p) break;
    }
    weights.resize(keep);
    ranked.resize(keep);
    total = std::accumulate(weights.begin(), weights.end(), 0.0);
  }
  if (!(total > 0.0)) throw Error(Errc::EmptySupport, "truncated distribution has no mass");

  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return ranked[i];
  }
  return ranked.back();
}

}  // namespace swir
