#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "oracle/reference_controller.hpp"
#include "swir/backends.hpp"
#include "swir/decode.hpp"

namespace testing_support {

// A randomized scripted decode scenario plus matching oracle parameters.
struct Scenario {
  std::vector<std::vector<double>> script;
  swir::EmbeddingTable table;
  swir::SpecialIds special;
  swir::DecodeConfig config;
  oracle::ControllerParams oracle;
};

inline Scenario random_scenario(std::mt19937_64& rng, std::size_t max_vocab = 64, std::size_t max_len = 2048) {
  std::uniform_int_distribution<std::size_t> vocab_dist(6, max_vocab);
  std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Scenario s;
  const std::size_t vocab = vocab_dist(rng);
  const std::size_t len = len_dist(rng);
  const std::size_t dim = 4;

  s.special.eos = static_cast<swir::TokenId>(vocab - 1);
  s.special.think_begin = {static_cast<swir::TokenId>(vocab - 3)};
  if (unit(rng) < 0.5) {
    s.special.think_end = {static_cast<swir::TokenId>(vocab - 2)};
  } else {
    s.special.think_end = {static_cast<swir::TokenId>(vocab - 2), static_cast<swir::TokenId>(vocab - 4)};
  }

  std::vector<double> rows(vocab * dim);
  for (auto& x : rows) x = normal(rng);
  s.table = swir::EmbeddingTable(vocab, dim, std::move(rows));

  // per-step temperature varies so entropies rise and fall; occasional exact
  // repeats exercise the strict-inequality ties
  const double eos_rate = unit(rng) * 0.004;
  const double marker_rate = unit(rng) * 0.01;
  s.script.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    if (t > 0 && unit(rng) < 0.05) {
      s.script.push_back(s.script.back());
      continue;
    }
    const double scale = unit(rng) * 5.0;
    std::vector<double> logits(vocab);
    for (auto& x : logits) x = scale * normal(rng);
    const double top = *std::max_element(logits.begin(), logits.end());
    const double u = unit(rng);
    if (u < eos_rate) {
      logits[vocab - 1] = top + 1.0;
    } else if (u < eos_rate + marker_rate) {
      logits[vocab - 2] = top + 1.0;
    }
    s.script.push_back(std::move(logits));
  }

  std::uniform_int_distribution<std::size_t> window_dist(0, 12);
  std::uniform_int_distribution<std::size_t> cmax_dist(1, 8);
  std::uniform_int_distribution<std::size_t> budget_dist(1, 64);
  std::uniform_int_distribution<std::size_t> extra_dist(0, 5);
  std::uniform_int_distribution<swir::TokenId> tok_dist(0, static_cast<swir::TokenId>(vocab - 5));

  s.config.switching.window_explicit_to_latent = window_dist(rng);
  s.config.switching.window_latent_to_explicit = unit(rng) < 0.7 ? 0 : window_dist(rng) / 4;
  s.config.schedule.alpha0 = unit(rng);
  s.config.schedule.beta0 = 0.7;
  s.config.budget.max_switches = cmax_dist(rng);
  s.config.budget.answer_budget = budget_dist(rng);
  s.config.budget.end_think_token_ids = s.special.think_end;
  s.config.budget.final_prefix_token_ids = s.special.think_end;
  const std::size_t extra = extra_dist(rng);
  for (std::size_t i = 0; i < extra; ++i) s.config.budget.final_prefix_token_ids.push_back(tok_dist(rng));
  s.config.with_t_max(len);

  s.oracle.window_e2l = s.config.switching.window_explicit_to_latent;
  s.oracle.window_l2e = s.config.switching.window_latent_to_explicit;
  s.oracle.c_max = s.config.budget.max_switches;
  s.oracle.answer_budget = s.config.budget.answer_budget;
  s.oracle.end_think.assign(s.special.think_end.begin(), s.special.think_end.end());
  s.oracle.final_prefix.assign(s.config.budget.final_prefix_token_ids.begin(),
                               s.config.budget.final_prefix_token_ids.end());
  s.oracle.eos = s.special.eos;
  s.oracle.t_max = len;
  return s;
}

inline swir::ScriptedBackend backend_for(const Scenario& s) {
  return swir::ScriptedBackend(s.script, s.table, s.special);
}

inline char mode_char(swir::Mode m) { return m == swir::Mode::Latent ? 'L' : 'E'; }

inline char kind_char(swir::ActionKind k) {
  switch (k) {
    case swir::ActionKind::Sampled: return 's';
    case swir::ActionKind::Injected: return 'i';
    case swir::ActionKind::Latent: return 'l';
  }
  return '?';
}

// Steps emitting a discrete token strictly after the termination step.
inline std::size_t tokens_after_termination(const swir::Transcript& tr) {
  std::size_t fired = tr.steps.size();
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    if (tr.steps[i].trigger == swir::Trigger::Termination) {
      fired = i;
      break;
    }
  }
  std::size_t n = 0;
  for (std::size_t i = fired + 1; i < tr.steps.size(); ++i) n += tr.steps[i].discrete() ? 1 : 0;
  return n;
}

// Plain greedy chain-of-thought loop used as a reference decoder.
inline std::vector<swir::TokenId> reference_greedy(swir::Backend& backend, const std::vector<swir::TokenId>& prompt,
                                                   std::size_t t_max) {
  std::vector<double> logits;
  for (auto id : prompt) logits = backend.step(id);
  const auto eos = backend.special_ids().eos;
  std::vector<swir::TokenId> out;
  for (std::size_t t = 1; t <= t_max; ++t) {
    const auto best = static_cast<swir::TokenId>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    out.push_back(best);
    if (best == eos || t == t_max) break;
    logits = backend.step(best);
  }
  return out;
}

}  // namespace testing_support
