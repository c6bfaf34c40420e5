#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "swir/error.hpp"
#include "swir/mixer.hpp"

using namespace swir;

namespace {

EmbeddingTable table2(std::vector<std::vector<double>> rows) { return EmbeddingTable::from_rows(rows); }

}  // namespace

TEST_CASE("soft embedding examples") {
  std::vector<std::vector<double>> rows{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}};
  const auto t = table2(rows);
  const auto onehot = soft_embedding(TokenDistribution::from_probs({0, 0, 0, 1, 0}), t);
  CHECK(onehot == std::vector<double>{6, 7});

  const auto mid = soft_embedding(TokenDistribution::from_probs({0.5, 0.5}), table2({{0, 0}, {2, 2}}));
  CHECK(mid == std::vector<double>{1, 1});

  const auto w = soft_embedding(TokenDistribution::from_probs({0.25, 0.75}), table2({{0, 4}, {4, 0}}));
  CHECK(w[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("soft embedding dimension mismatch") {
  CHECK_THROWS_AS(soft_embedding(TokenDistribution::from_probs({0.5, 0.5}), table2({{1}, {2}, {3}})), Error);
  CHECK_THROWS_AS(EmbeddingTable(2, 2, {1, 2, 3}), Error);
  CHECK_THROWS_AS(table2({{1, 2}, {3}}), Error);
}

TEST_CASE("schedules") {
  const MixSchedule s{0.5, 0.7, 100};
  CHECK(alpha_at(s, 100) == 1.0);
  CHECK(alpha_at(s, 50) == 0.75);
  CHECK(alpha_at(s, 0) == 0.5);
  CHECK(beta_at(s, 0) == 0.7);
  CHECK(beta_at(s, 100) == 1.0);
  const MixSchedule off{1.0, 0.7, 100};
  for (std::size_t t = 0; t <= 100; ++t) CHECK(alpha_at(off, t) == 1.0);
  CHECK_THROWS_AS(alpha_at(s, 101), Error);
  CHECK_THROWS_AS(alpha_at(MixSchedule{1.2, 0.7, 10}, 0), Error);
}

TEST_CASE("schedules are monotone and reach exactly one") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> horizon(1, 40000);
  for (int i = 0; i < 200; ++i) {
    const MixSchedule s{unit(rng), unit(rng), horizon(rng)};
    double prev = -1.0;
    for (std::size_t t = 0; t <= s.t_max; t += 1 + s.t_max / 97) {
      const double a = alpha_at(s, t);
      CHECK(a >= s.alpha0);
      CHECK(a <= 1.0);
      CHECK(a >= prev);
      prev = a;
    }
    CHECK(alpha_at(s, s.t_max) == 1.0);
    CHECK(beta_at(s, s.t_max) == 1.0);
  }
}

TEST_CASE("block mixing") {
  const std::vector<double> soft{1, 0};
  const std::vector<double> think{0, 1};
  CHECK(mix_block_entry(soft, think, 1.0) == soft);
  CHECK(mix_block_entry(soft, think, 0.0) == think);
  const auto m = mix_block_entry(soft, think, 0.6);
  CHECK(m[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(m[1] == doctest::Approx(0.4).epsilon(1e-15));

  CHECK(mix_block_exit(soft, think, 1.0) == soft);
  CHECK(mix_block_exit(soft, think, 0.0) == think);
  const MixSchedule defaults;
  const auto e = mix_block_exit(soft, think, beta_at(defaults, 0));
  CHECK(e[0] == doctest::Approx(0.7).epsilon(1e-15));

  CHECK_THROWS_AS(mix_block_entry(soft, std::vector<double>{1, 2, 3}, 0.5), Error);
  CHECK_THROWS_AS(mix_block_exit(soft, think, 1.5), Error);
}

TEST_CASE("multi-token signal embedding is the mean row") {
  const auto t = table2({{0, 0}, {2, 4}, {4, 8}});
  const std::vector<TokenId> ids{1, 2};
  CHECK(signal_embedding(t, ids) == std::vector<double>{3, 6});
  CHECK_THROWS_AS(signal_embedding(t, std::vector<TokenId>{}), Error);
  CHECK_THROWS_AS(signal_embedding(t, std::vector<TokenId>{3}), Error);
}
