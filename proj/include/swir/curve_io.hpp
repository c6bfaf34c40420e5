#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "swir/metrics.hpp"

namespace swir::metrics {

// Delimiter-separated curve files: a header row, then `method,x,y` rows.
// Efficiency curves use the header `method,tokens,accuracy`; pass@k curves
// use `method,k,pass_at_k`.

struct PassAtKCurve {
  std::string method;
  std::vector<std::pair<std::size_t, double>> points;

  bool operator==(const PassAtKCurve&) const = default;
};

/// Groups rows by method in first-seen order. Throws LineError(CorruptLine)
/// with the 1-based line number on a bad header, wrong column count or
/// unparsable number.
std::vector<EfficiencyCurve> read_efficiency_curves(std::istream& in);
std::vector<EfficiencyCurve> read_efficiency_curves(const std::filesystem::path& path);
void write_efficiency_curves(std::ostream& out, const std::vector<EfficiencyCurve>& curves);

std::vector<PassAtKCurve> read_pass_at_k_curves(std::istream& in);
void write_pass_at_k_curves(std::ostream& out, const std::vector<PassAtKCurve>& curves);

}  // namespace swir::metrics
