#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swir::metrics {

struct CurvePoint {
  double tokens = 0.0;
  double accuracy = 0.0;  // fraction in [0, 1]

  bool operator==(const CurvePoint&) const = default;
};

/// Accuracy as a function of generated-token budget for one method.
/// Points are kept sorted by strictly increasing token count.
class EfficiencyCurve {
 public:
  EfficiencyCurve() = default;
  /// Sorts the points; throws InvalidArgument on duplicate token counts,
  /// non-positive token counts or accuracies outside [0, 1].
  EfficiencyCurve(std::string method, std::vector<CurvePoint> points);

  const std::string& method() const noexcept { return method_; }
  std::span<const CurvePoint> points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }

  bool operator==(const EfficiencyCurve&) const = default;

 private:
  std::string method_;
  std::vector<CurvePoint> points_;
};

struct NormalizationAnchor {
  double cot_star_accuracy = 0.0;
  double cot_star_tokens = 0.0;
};

/// Highest-accuracy point of the CoT curve, ties going to fewer tokens.
NormalizationAnchor anchor_from(const EfficiencyCurve& cot);

/// Accuracy per generated token. Throws ZeroTokens if tokens <= 0.
double plain_efficiency(double accuracy, double tokens);

/// Plain efficiency in units of the CoT anchor's plain efficiency.
double normalized_efficiency(double accuracy, double tokens, const NormalizationAnchor& anchor);

/// (integral of E_method - E_cot) / (integral of E_cot) over the token range
/// both curves cover.
///
/// Each curve's normalized efficiency is treated as piecewise linear between
/// its own points; the integrals are taken by the trapezoid rule on the union
/// of both curves' breakpoints inside the overlap, which is exact for
/// piecewise-linear integrands. Throws NoOverlap when the ranges are disjoint
/// or touch in a single point.
double avg_efficiency_gain(const EfficiencyCurve& method, const EfficiencyCurve& cot,
                           const NormalizationAnchor& anchor);

struct SampleCounts {
  std::size_t n = 0;  // attempts
  std::size_t c = 0;  // correct attempts
};

/// Mean over problems of 1 - C(n - c, k) / C(n, k). Throws KTooLarge if any
/// problem has fewer than k attempts.
double pass_at_k(std::span<const SampleCounts> problems, std::size_t k);

/// Smallest k whose value is within 1e-12 of the curve maximum.
std::size_t k_star(std::span<const std::pair<std::size_t, double>> curve);

}  // namespace swir::metrics
