#pragma once

// Vocabulary-sized inner loops used on every decode step.
//
// Two implementations are kept side by side: `serial` is the reference used
// by tests; `parallel` splits the elementwise work across OpenMP threads but
// keeps every reduction in ascending vocabulary-id order, so both produce
// bit-identical results regardless of thread count.

#include <cstddef>
#include <span>

namespace swir::kernels {

namespace serial {

// out[v] = exp(logits[v] - max) / sum. Returns the max logit.
double softmax(std::span<const double> logits, std::span<double> out);

// -sum p log p in nats, 0 log 0 = 0.
double entropy(std::span<const double> probs);

// out[j] = sum_v probs[v] * table[v * dim + j].
void weighted_row_sum(std::span<const double> probs, std::span<const double> table, std::size_t dim,
                      std::span<double> out);

}  // namespace serial

namespace parallel {

double softmax(std::span<const double> logits, std::span<double> out);
double entropy(std::span<const double> probs);
void weighted_row_sum(std::span<const double> probs, std::span<const double> table, std::size_t dim,
                      std::span<double> out);

}  // namespace parallel

// Below this many elements the parallel kernels run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 8192;

}  // namespace swir::kernels
