#include "swir/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "swir/error.hpp"

namespace swir::metrics {

EfficiencyCurve::EfficiencyCurve(std::string method, std::vector<CurvePoint> points)
    : method_(std::move(method)), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end(),
            [](const CurvePoint& a, const CurvePoint& b) { return a.tokens < b.tokens; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.tokens > 0.0) || !std::isfinite(p.tokens)) {
      throw Error(Errc::InvalidArgument, method_ + ": token counts must be positive");
    }
    if (!(p.accuracy >= 0.0 && p.accuracy <= 1.0)) {
      throw Error(Errc::InvalidArgument, method_ + ": accuracy must lie in [0, 1]");
    }
    if (i > 0 && points_[i - 1].tokens == p.tokens) {
      throw Error(Errc::InvalidArgument, method_ + ": duplicate token count " + std::to_string(p.tokens));
    }
  }
}

NormalizationAnchor anchor_from(const EfficiencyCurve& cot) {
  if (cot.empty()) throw Error(Errc::NoAnchor, "CoT curve is empty");
  const CurvePoint* best = nullptr;
  for (const auto& p : cot.points()) {
    // points are sorted by tokens, so strict > keeps the fewest-token tie
    if (best == nullptr || p.accuracy > best->accuracy) best = &p;
  }
  if (!(best->accuracy > 0.0)) throw Error(Errc::NoAnchor, "CoT curve never reaches nonzero accuracy");
  return {best->accuracy, best->tokens};
}

double plain_efficiency(double accuracy, double tokens) {
  if (!(tokens > 0.0)) throw Error(Errc::ZeroTokens, "token count must be positive");
  return accuracy / tokens;
}

double normalized_efficiency(double accuracy, double tokens, const NormalizationAnchor& anchor) {
  return plain_efficiency(accuracy, tokens) /
         plain_efficiency(anchor.cot_star_accuracy, anchor.cot_star_tokens);
}

namespace {

// Normalized efficiency of `curve`, linear between its points.
double efficiency_at(const EfficiencyCurve& curve, double x, const NormalizationAnchor& anchor) {
  const auto pts = curve.points();
  auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const CurvePoint& p, double v) { return p.tokens < v; });
  if (hi != pts.end() && hi->tokens == x) return normalized_efficiency(hi->accuracy, hi->tokens, anchor);
  const auto lo = hi - 1;
  const double e_lo = normalized_efficiency(lo->accuracy, lo->tokens, anchor);
  const double e_hi = normalized_efficiency(hi->accuracy, hi->tokens, anchor);
  const double w = (x - lo->tokens) / (hi->tokens - lo->tokens);
  return e_lo + w * (e_hi - e_lo);
}

}  // namespace

double avg_efficiency_gain(const EfficiencyCurve& method, const EfficiencyCurve& cot,
                           const NormalizationAnchor& anchor) {
  if (method.empty() || cot.empty()) throw Error(Errc::NoOverlap, "empty curve");
  const double lo = std::max(method.points().front().tokens, cot.points().front().tokens);
  const double hi = std::min(method.points().back().tokens, cot.points().back().tokens);
  if (!(lo < hi)) throw Error(Errc::NoOverlap, method.method() + " and " + cot.method() + " do not overlap");

  std::vector<double> grid{lo, hi};
  for (const auto* c : {&method, &cot}) {
    for (const auto& p : c->points()) {
      if (p.tokens > lo && p.tokens < hi) grid.push_back(p.tokens);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double diff_area = 0.0;
  double cot_area = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double width = grid[i] - grid[i - 1];
    const double m0 = efficiency_at(method, grid[i - 1], anchor);
    const double m1 = efficiency_at(method, grid[i], anchor);
    const double c0 = efficiency_at(cot, grid[i - 1], anchor);
    const double c1 = efficiency_at(cot, grid[i], anchor);
    diff_area += 0.5 * width * ((m0 - c0) + (m1 - c1));
    cot_area += 0.5 * width * (c0 + c1);
  }
  if (!(cot_area > 0.0)) throw Error(Errc::NoAnchor, "CoT efficiency integrates to zero");
  return diff_area / cot_area;
}

double pass_at_k(std::span<const SampleCounts> problems, std::size_t k) {
  if (problems.empty()) throw Error(Errc::InvalidArgument, "no problems");
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  double total = 0.0;
  for (const auto& p : problems) {
    if (p.c > p.n) throw Error(Errc::InvalidArgument, "correct count exceeds attempts");
    if (k > p.n) {
      throw Error(Errc::KTooLarge, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(p.n));
    }
    if (p.n - p.c < k) {
      total += 1.0;
      continue;
    }
    // C(n-c, k) / C(n, k) = prod_{i<k} (n-c-i) / (n-i)
    double miss = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      miss *= static_cast<double>(p.n - p.c - i) / static_cast<double>(p.n - i);
    }
    total += 1.0 - miss;
  }
  return total / static_cast<double>(problems.size());
}

std::size_t k_star(std::span<const std::pair<std::size_t, double>> curve) {
  if (curve.empty()) throw Error(Errc::InvalidArgument, "empty pass@k curve");
  double peak = curve.front().second;
  for (const auto& [k, v] : curve) peak = std::max(peak, v);
  std::size_t best = 0;
  bool found = false;
  for (const auto& [k, v] : curve) {
    if (v >= peak - 1e-12 && (!found || k < best)) {
      best = k;
      found = true;
    }
  }
  return best;
}

}  // namespace swir::metrics
