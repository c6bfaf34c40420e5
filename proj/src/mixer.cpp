#include "swir/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swir/error.hpp"
#include "swir/kernels.hpp"

namespace swir {

EmbeddingTable::EmbeddingTable(std::size_t rows, std::size_t dim, std::vector<double> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw Error(Errc::DimensionMismatch, "embedding dimension must be >= 1");
  if (data_.size() != rows_ * dim_) {
    throw Error(Errc::DimensionMismatch, "table has " + std::to_string(data_.size()) +
                                             " values, expected " + std::to_string(rows_ * dim_));
  }
}

EmbeddingTable EmbeddingTable::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(Errc::DimensionMismatch, "empty embedding table");
  const std::size_t dim = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(Errc::DimensionMismatch, "ragged embedding rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return EmbeddingTable(rows.size(), dim, std::move(data));
}

Embedding soft_embedding(const TokenDistribution& dist, const EmbeddingTable& table) {
  if (dist.size() != table.rows()) {
    throw Error(Errc::DimensionMismatch, "distribution has " + std::to_string(dist.size()) +
                                             " entries but table has " +
                                             std::to_string(table.rows()) + " rows");
  }
  Embedding out(table.dim());
  kernels::parallel::weighted_row_sum(dist.probs(), table.data(), table.dim(), out);
  return out;
}

namespace {

double ramp(double initial, std::size_t t, std::size_t t_max) {
  if (t > t_max) {
    throw Error(Errc::StepOutOfRange,
                "step " + std::to_string(t) + " exceeds t_max " + std::to_string(t_max));
  }
  if (!(initial >= 0.0 && initial <= 1.0)) {
    throw Error(Errc::InvalidArgument, "initial mixing ratio must lie in [0, 1]");
  }
  if (t == t_max) return 1.0;
  const double frac = static_cast<double>(t) / static_cast<double>(t_max);
  return std::clamp(initial + (1.0 - initial) * frac, initial, 1.0);
}

Embedding blend(std::span<const double> soft, std::span<const double> signal, double weight) {
  if (soft.size() != signal.size()) {
    throw Error(Errc::DimensionMismatch, "signal embedding dimension differs from soft embedding");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw Error(Errc::InvalidArgument, "mixing weight must lie in [0, 1]");
  }
  Embedding out(soft.size());
  for (std::size_t j = 0; j < soft.size(); ++j) {
    out[j] = weight * soft[j] + (1.0 - weight) * signal[j];
  }
  return out;
}

}  // namespace

double alpha_at(const MixSchedule& schedule, std::size_t t) { return ramp(schedule.alpha0, t, schedule.t_max); }

double beta_at(const MixSchedule& schedule, std::size_t t) { return ramp(schedule.beta0, t, schedule.t_max); }

Embedding mix_block_entry(std::span<const double> soft, std::span<const double> think_embedding,
                          double alpha) {
  return blend(soft, think_embedding, alpha);
}

Embedding mix_block_exit(std::span<const double> soft, std::span<const double> end_think_embedding,
                         double beta) {
  return blend(soft, end_think_embedding, beta);
}

Embedding signal_embedding(const EmbeddingTable& table, std::span<const TokenId> ids) {
  if (ids.empty()) throw Error(Errc::InvalidArgument, "signal marker has no token ids");
  std::vector<long double> acc(table.dim(), 0.0L);
  for (const TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= table.rows()) {
      throw Error(Errc::InvalidArgument, "signal token id " + std::to_string(id) + " out of range");
    }
    const auto row = table.row(static_cast<std::size_t>(id));
    for (std::size_t j = 0; j < row.size(); ++j) acc[j] += row[j];
  }
  Embedding out(table.dim());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = static_cast<double>(acc[j] / static_cast<long double>(ids.size()));
  }
  return out;
}

}  // namespace swir
