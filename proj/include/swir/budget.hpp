#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "swir/confidence.hpp"

namespace swir {

struct BudgetConfig {
  std::size_t max_switches = 1;
  std::size_t answer_budget = 1;
  std::vector<TokenId> end_think_token_ids;
  // Pre-tokenized answer prefix, starting with the end-of-thinking marker.
  std::vector<TokenId> final_prefix_token_ids;

  bool operator==(const BudgetConfig&) const = default;
};

/// Throws Errc::BudgetConfigInvalid when a field is out of range.
void validate(const BudgetConfig& config);

enum class Trigger { None, Convergence, Termination };

std::string_view to_string(Trigger trigger);

struct BudgetState {
  std::deque<TokenId> queue;
  // Unset until the termination trigger arms it.
  std::optional<std::size_t> remaining_answer_tokens;
  std::set<std::size_t> convergence_fired_for;
  bool terminated = false;

  bool operator==(const BudgetState&) const = default;
};

/// First switch count at which the convergence trigger fires: ceil(C_max / 2).
std::size_t convergence_threshold(std::size_t max_switches);

/// Applies the switch-count triggers for one Latent -> Explicit transition.
///
/// `switch_count` is the count after incrementing for this transition. In the
/// upper half of the budget the end-of-thinking ids are queued (once per
/// count); past the budget the answer prefix is queued and the answer budget
/// is armed. Throws Errc::AlreadyTerminated once decoding has terminated.
Trigger on_switch_to_explicit(BudgetState& state, std::size_t switch_count, const BudgetConfig& config);

/// Pops the head of the injection queue, if any.
std::optional<TokenId> next_injected(BudgetState& state);

/// Counts one emitted answer token. Returns true when the budget is spent.
bool tick_answer_budget(BudgetState& state);

}  // namespace swir
