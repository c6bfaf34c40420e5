#include "swir/confidence.hpp"

#include <cmath>

#include "swir/error.hpp"
#include "swir/kernels.hpp"

namespace swir {

TokenDistribution TokenDistribution::from_probs(std::vector<double> probs) {
  if (probs.size() < 2) throw Error(Errc::TooShort, "distribution needs at least two entries");
  long double sum = 0.0L;
  for (const double p : probs) {
    if (!std::isfinite(p)) throw Error(Errc::NonFinite, "probability is not finite");
    if (p < 0.0) throw Error(Errc::InvalidDistribution, "negative probability");
    sum += p;
  }
  if (std::fabs(static_cast<double>(sum) - 1.0) > 1e-6) {
    throw Error(Errc::InvalidDistribution, "probabilities do not sum to 1");
  }
  return TokenDistribution(std::move(probs));
}

TokenId TokenDistribution::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t v = 1; v < probs_.size(); ++v) {
    if (probs_[v] > probs_[best]) best = v;
  }
  return static_cast<TokenId>(best);
}

TokenDistribution from_logits(std::span<const double> logits) {
  if (logits.size() < 2) throw Error(Errc::TooShort, "need at least two logits");
  for (const double l : logits) {
    if (!std::isfinite(l)) throw Error(Errc::NonFinite, "logit is NaN or infinite");
  }
  std::vector<double> probs(logits.size());
  kernels::parallel::softmax(logits, probs);
  return TokenDistribution(std::move(probs));
}

EntropyValue entropy(const TokenDistribution& dist) {
  return EntropyValue{kernels::parallel::entropy(dist.probs())};
}

}  // namespace swir
