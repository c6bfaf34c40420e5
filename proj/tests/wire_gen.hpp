#pragma once

#include <random>
#include <string>
#include <vector>

#include "swir/wire.hpp"

namespace wire_gen {

inline std::string random_text(std::mt19937_64& rng) {
  static const std::string alphabet = "abcXYZ019 -_/.:\xc3\xa9";
  std::string s(rng() % 24, ' ');
  for (auto& c : s) c = alphabet[rng() % (alphabet.size() - 2)];
  if (rng() % 4 == 0) s += "\xc3\xa9";  // keep some multi-byte UTF-8
  return s;
}

inline std::vector<float> random_floats(std::mt19937_64& rng, std::size_t max_len = 300) {
  std::vector<float> v(rng() % max_len);
  std::normal_distribution<float> normal(0.0f, 100.0f);
  for (auto& x : v) x = normal(rng);
  return v;
}

inline swir::TokenId random_id(std::mt19937_64& rng) {
  return static_cast<swir::TokenId>(rng() % 3 == 0 ? rng() : rng() % 200000);
}

inline swir::wire::Request random_request(std::mt19937_64& rng) {
  using namespace swir::wire;
  switch (rng() % 6) {
    case 0: return Init{random_text(rng), random_text(rng)};
    case 1: return Step{random_id(rng)};
    case 2: return Step{random_floats(rng)};
    case 3: return Reset{};
    case 4: return SpecialIdsRequest{};
    default: return EmbeddingRow{random_id(rng)};
  }
}

inline swir::wire::Response random_response(std::mt19937_64& rng) {
  using namespace swir::wire;
  switch (rng() % 5) {
    case 0: return Ready{rng() % 100000, rng()};
    case 1: return Logits{random_floats(rng)};
    case 2: return Row{random_floats(rng)};
    case 3: {
      swir::SpecialIds ids{random_id(rng), {}, {}};
      for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) ids.think_begin.push_back(random_id(rng));
      for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) ids.think_end.push_back(random_id(rng));
      return Special{ids};
    }
    default: return ErrorReply{random_text(rng), random_text(rng)};
  }
}

}  // namespace wire_gen
