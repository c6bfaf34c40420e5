#include <algorithm>
#include <cmath>
#include <vector>

#include "swir/kernels.hpp"

namespace swir::kernels::serial {

double softmax(std::span<const double> logits, std::span<double> out) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  long double sum = 0.0L;
  for (std::size_t v = 0; v < logits.size(); ++v) {
    out[v] = std::exp(logits[v] - max_logit);
    sum += out[v];
  }
  for (std::size_t v = 0; v < logits.size(); ++v) {
    out[v] = static_cast<double>(out[v] / sum);
  }
  return max_logit;
}

double entropy(std::span<const double> probs) {
  long double sum = 0.0L;
  for (const double p : probs) {
    if (p > 0.0) sum += p * std::log(p);
  }
  return -static_cast<double>(sum);
}

void weighted_row_sum(std::span<const double> probs, std::span<const double> table, std::size_t dim,
                      std::span<double> out) {
  std::vector<long double> acc(dim, 0.0L);
  for (std::size_t v = 0; v < probs.size(); ++v) {
    const double p = probs[v];
    if (p == 0.0) continue;
    const double* row = table.data() + v * dim;
    for (std::size_t j = 0; j < dim; ++j) acc[j] += static_cast<long double>(p) * row[j];
  }
  for (std::size_t j = 0; j < dim; ++j) out[j] = static_cast<double>(acc[j]);
}

}  // namespace swir::kernels::serial
