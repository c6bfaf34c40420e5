#include "swir/budget.hpp"

#include "swir/error.hpp"

namespace swir {

void validate(const BudgetConfig& config) {
  if (config.max_switches < 1) throw Error(Errc::BudgetConfigInvalid, "max_switches must be >= 1");
  if (config.answer_budget < 1) throw Error(Errc::BudgetConfigInvalid, "answer_budget must be >= 1");
  if (config.end_think_token_ids.empty()) {
    throw Error(Errc::BudgetConfigInvalid, "end-of-thinking token ids are empty");
  }
  if (config.final_prefix_token_ids.empty()) {
    throw Error(Errc::BudgetConfigInvalid, "final answer prefix token ids are empty");
  }
}

std::string_view to_string(Trigger trigger) {
  switch (trigger) {
    case Trigger::None: return "none";
    case Trigger::Convergence: return "convergence";
    case Trigger::Termination: return "termination";
  }
  return "none";
}

std::size_t convergence_threshold(std::size_t max_switches) { return (max_switches + 1) / 2; }

Trigger on_switch_to_explicit(BudgetState& state, std::size_t switch_count, const BudgetConfig& config) {
  if (state.terminated) throw Error(Errc::AlreadyTerminated, "decoding already terminated");

  if (switch_count > config.max_switches) {
    if (state.remaining_answer_tokens) return Trigger::None;
    state.queue.insert(state.queue.end(), config.final_prefix_token_ids.begin(),
                       config.final_prefix_token_ids.end());
    state.remaining_answer_tokens = config.answer_budget;
    return Trigger::Termination;
  }
  if (switch_count >= convergence_threshold(config.max_switches) &&
      state.convergence_fired_for.insert(switch_count).second) {
    state.queue.insert(state.queue.end(), config.end_think_token_ids.begin(),
                       config.end_think_token_ids.end());
    return Trigger::Convergence;
  }
  return Trigger::None;
}

std::optional<TokenId> next_injected(BudgetState& state) {
  if (state.queue.empty()) return std::nullopt;
  const TokenId id = state.queue.front();
  state.queue.pop_front();
  return id;
}

bool tick_answer_budget(BudgetState& state) {
  if (!state.remaining_answer_tokens) return false;
  auto& remaining = *state.remaining_answer_tokens;
  if (remaining > 0) --remaining;
  if (remaining == 0) state.terminated = true;
  return state.terminated;
}

}  // namespace swir
