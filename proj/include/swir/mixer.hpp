#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swir/confidence.hpp"

namespace swir {

using Embedding = std::vector<double>;

/// Row-major |V| x d token embedding matrix.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  /// `data` holds rows * dim values. Throws DimensionMismatch otherwise.
  EmbeddingTable(std::size_t rows, std::size_t dim, std::vector<double> data);
  static EmbeddingTable from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t v) const { return {data_.data() + v * dim_, dim_}; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Probability-weighted sum of table rows.
Embedding soft_embedding(const TokenDistribution& dist, const EmbeddingTable& table);

/// Linear ramp from the initial ratio at t = 0 to exactly 1 at t = t_max.
struct MixSchedule {
  double alpha0 = 1.0;
  double beta0 = 0.7;
  std::size_t t_max = 32768;

  bool operator==(const MixSchedule&) const = default;
};

double alpha_at(const MixSchedule& schedule, std::size_t t);
double beta_at(const MixSchedule& schedule, std::size_t t);

/// weight * soft + (1 - weight) * signal.
Embedding mix_block_entry(std::span<const double> soft, std::span<const double> think_embedding,
                          double alpha);
Embedding mix_block_exit(std::span<const double> soft, std::span<const double> end_think_embedding,
                         double beta);

// Mean of the rows for a (possibly multi-token) signal marker.
Embedding signal_embedding(const EmbeddingTable& table, std::span<const TokenId> ids);

}  // namespace swir
