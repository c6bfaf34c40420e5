#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "swir/curve_io.hpp"
#include "swir/error.hpp"
#include "swir/metrics.hpp"

using namespace swir;
using namespace swir::metrics;

namespace {

const EfficiencyCurve& by_method(const std::vector<EfficiencyCurve>& curves, const std::string& m) {
  for (const auto& c : curves)
    if (c.method() == m) return c;
  FAIL("missing curve " << m);
  return curves.front();
}

std::vector<EfficiencyCurve> gsm8k() { return read_efficiency_curves(std::filesystem::path(SWIR_FIXTURE_DIR) / "gsm8k_qwen3_8b.csv"); }

}  // namespace

TEST_CASE("plain efficiency") {
  CHECK(plain_efficiency(1.0, 1000) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(plain_efficiency(0.956, 2138) == doctest::Approx(4.47147e-4).epsilon(1e-5));
  CHECK(plain_efficiency(0.0, 500) == 0.0);
  CHECK_THROWS_AS(plain_efficiency(0.5, 0), Error);
}

TEST_CASE("normalized efficiency against the reported anchor") {
  const NormalizationAnchor anchor{0.956, 2138};
  CHECK(normalized_efficiency(0.956, 2138, anchor) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(normalized_efficiency(0.9219, 301, anchor) - 6.84963024229) < 1e-9);
  CHECK(std::fabs(normalized_efficiency(0.9219, 301, anchor) - 6.85) <= 0.01);
  CHECK(std::fabs(normalized_efficiency(0.4450, 990, anchor) - 1.00525125734) < 1e-9);
  CHECK(std::fabs(normalized_efficiency(0.4450, 990, anchor) - 1.005) <= 0.005);
}

TEST_CASE("normalized efficiency is homogeneous in the anchor") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> acc(0.01, 1.0);
  std::uniform_real_distribution<double> tok(10.0, 30000.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const NormalizationAnchor a{acc(rng), tok(rng)};
    const double s = scale(rng);
    const NormalizationAnchor b{a.cot_star_accuracy * s, a.cot_star_tokens * s};
    const double x = acc(rng);
    const double l = tok(rng);
    CHECK(normalized_efficiency(x, l, a) == doctest::Approx(normalized_efficiency(x, l, b)).epsilon(1e-12));
  }
}

TEST_CASE("anchor selection prefers accuracy, then fewer tokens") {
  const auto curves = gsm8k();
  const auto anchor = anchor_from(by_method(curves, "CoT"));
  CHECK(anchor.cot_star_accuracy == 0.956);
  CHECK(anchor.cot_star_tokens == 2136);
  const auto& swir = by_method(curves, "SwiR");
  double peak = 0.0;
  for (const auto& p : swir.points()) peak = std::max(peak, normalized_efficiency(p.accuracy, p.tokens, anchor));
  CHECK(std::fabs(peak - 6.84322273037) < 1e-9);
}

TEST_CASE("average efficiency gain") {
  const auto curves = gsm8k();
  const auto& cot = by_method(curves, "CoT");
  const NormalizationAnchor anchor{0.956, 2138};
  CHECK(avg_efficiency_gain(cot, cot, anchor) == 0.0);

  // frozen regression values from an independent dense-grid integration
  CHECK(avg_efficiency_gain(by_method(curves, "SwiR"), cot, anchor) ==
        doctest::Approx(1.3454938594772483).epsilon(1e-12));
  CHECK(avg_efficiency_gain(by_method(curves, "Soft Thinking"), cot, anchor) ==
        doctest::Approx(0.020540708484985588).epsilon(1e-9));
  CHECK(avg_efficiency_gain(by_method(curves, "CoT (Greedy)"), cot, anchor) ==
        doctest::Approx(0.013433560199325557).epsilon(1e-9));
  // the gain is a ratio of integrals, so the anchor cancels
  CHECK(avg_efficiency_gain(by_method(curves, "SwiR"), cot, anchor_from(cot)) ==
        doctest::Approx(1.3454938594772483).epsilon(1e-12));

  const EfficiencyCurve base("base", {{100, 0.1}, {200, 0.3}, {400, 0.45}});
  const EfficiencyCurve twice("twice", {{100, 0.2}, {200, 0.6}, {400, 0.9}});
  CHECK(avg_efficiency_gain(twice, base, anchor) == doctest::Approx(1.0).epsilon(1e-12));

  const EfficiencyCurve disjoint("far", {{5000, 0.9}, {6000, 0.95}});
  CHECK_THROWS_AS(avg_efficiency_gain(disjoint, base, anchor), Error);
}

TEST_CASE("pass@k") {
  const std::vector<SampleCounts> one{{4, 1}};
  CHECK(pass_at_k(one, 2) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<SampleCounts> all{{8, 8}};
  for (std::size_t k = 1; k <= 8; ++k) CHECK(pass_at_k(all, k) == 1.0);
  CHECK(pass_at_k(std::vector<SampleCounts>{{8, 1}}, 8) == 1.0);
  CHECK(pass_at_k(std::vector<SampleCounts>{{8, 0}}, 8) == 0.0);
  try {
    pass_at_k(one, 5);
    FAIL("expected KTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::KTooLarge);
  }
}

TEST_CASE("pass@k is monotone in k and c") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 64;
    std::vector<SampleCounts> probs(1 + rng() % 10);
    for (auto& p : probs) p = {n, static_cast<std::size_t>(rng() % (n + 1))};
    double prev = -1.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double v = pass_at_k(probs, k);
      REQUIRE(v >= prev);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      auto more = probs;
      auto& p = more[rng() % more.size()];
      if (p.c < p.n) ++p.c;
      REQUIRE(pass_at_k(more, k) >= v);
      prev = v;
    }
  }
}

TEST_CASE("k*") {
  std::vector<std::pair<std::size_t, double>> rising{{1, 0.1}, {2, 0.2}, {3, 0.3}};
  CHECK(k_star(rising) == 3);
  std::vector<std::pair<std::size_t, double>> flat{{1, 0.5}, {2, 0.5}, {3, 0.5}};
  CHECK(k_star(flat) == 1);
}

TEST_CASE("k* fixtures survive the curve reader round trip") {
  std::ifstream in(std::filesystem::path(SWIR_FIXTURE_DIR) / "aime_pass_at_k.csv");
  const auto curves = read_pass_at_k_curves(in);
  REQUIRE(curves.size() == 4);
  std::map<std::string, std::size_t> expected{
      {"SwiR AIME24", 13}, {"CoT AIME24", 46}, {"SwiR AIME25", 16}, {"CoT AIME25", 22}};
  for (const auto& c : curves) CHECK(k_star(c.points) == expected.at(c.method));

  std::stringstream buf;
  write_pass_at_k_curves(buf, curves);
  const auto again = read_pass_at_k_curves(buf);
  CHECK(again == curves);
}

TEST_CASE("efficiency curve files") {
  const auto curves = gsm8k();
  REQUIRE(curves.size() == 4);
  CHECK(curves[0].method() == "CoT (Greedy)");
  CHECK(by_method(curves, "SwiR").points().front() == CurvePoint{301, 0.9219});

  std::stringstream buf;
  write_efficiency_curves(buf, curves);
  CHECK(read_efficiency_curves(buf) == curves);

  std::istringstream bad("method,tokens,accuracy\nCoT,100,0.5\nCoT,200\n");
  try {
    read_efficiency_curves(bad);
    FAIL("expected CorruptLine");
  } catch (const LineError& e) {
    CHECK(e.code() == Errc::CorruptLine);
    CHECK(e.line() == 3);
  }
  std::istringstream header("m,t,a\n");
  CHECK_THROWS_AS(read_efficiency_curves(header), LineError);
  std::istringstream dup("method,tokens,accuracy\nCoT,100,0.5\nCoT,100,0.6\n");
  CHECK_THROWS_AS(read_efficiency_curves(dup), Error);
  CHECK_THROWS_AS(EfficiencyCurve("x", {{10, 1.5}}), Error);
}
