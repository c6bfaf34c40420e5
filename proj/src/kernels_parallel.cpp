#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <omp.h>

#include "swir/kernels.hpp"

namespace swir::kernels::parallel {

namespace {

bool go_parallel(std::size_t n) { return n >= kParallelThreshold; }

}  // namespace

double softmax(std::span<const double> logits, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(logits.size());
  double max_logit = logits[0];
#pragma omp parallel for reduction(max : max_logit) if (go_parallel(logits.size()))
  for (std::int64_t v = 0; v < n; ++v) max_logit = std::max(max_logit, logits[v]);

#pragma omp parallel for if (go_parallel(logits.size()))
  for (std::int64_t v = 0; v < n; ++v) out[v] = std::exp(logits[v] - max_logit);

  // ascending-order sum keeps results identical to the serial kernel
  long double sum = 0.0L;
  for (std::int64_t v = 0; v < n; ++v) sum += out[v];

#pragma omp parallel for if (go_parallel(logits.size()))
  for (std::int64_t v = 0; v < n; ++v) out[v] = static_cast<double>(out[v] / sum);
  return max_logit;
}

double entropy(std::span<const double> probs) {
  thread_local std::vector<double> terms;
  terms.resize(probs.size());
  const auto n = static_cast<std::int64_t>(probs.size());
  double* t = terms.data();
#pragma omp parallel for if (go_parallel(probs.size()))
  for (std::int64_t v = 0; v < n; ++v) {
    const double p = probs[v];
    t[v] = p > 0.0 ? p * std::log(p) : 0.0;
  }
  long double sum = 0.0L;
  for (std::int64_t v = 0; v < n; ++v) {
    if (probs[v] > 0.0) sum += t[v];
  }
  return -static_cast<double>(sum);
}

void weighted_row_sum(std::span<const double> probs, std::span<const double> table, std::size_t dim,
                      std::span<double> out) {
  const std::size_t vocab = probs.size();
  // Each thread owns a contiguous slice of output columns and walks rows in
  // ascending id order, so per-column accumulation order matches serial.
#pragma omp parallel if (go_parallel(vocab * dim))
  {
    const std::size_t threads = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t chunk = (dim + threads - 1) / threads;
    const std::size_t begin = std::min(dim, tid * chunk);
    const std::size_t end = std::min(dim, begin + chunk);
    if (begin < end) {
      std::vector<long double> acc(end - begin, 0.0L);
      for (std::size_t v = 0; v < vocab; ++v) {
        const double p = probs[v];
        if (p == 0.0) continue;
        const double* row = table.data() + v * dim;
        for (std::size_t j = begin; j < end; ++j) acc[j - begin] += static_cast<long double>(p) * row[j];
      }
      for (std::size_t j = begin; j < end; ++j) out[j] = static_cast<double>(acc[j - begin]);
    }
  }
}

}  // namespace swir::kernels::parallel
