#include "swir/switch_machine.hpp"

namespace swir {

std::string_view to_string(Mode mode) { return mode == Mode::Latent ? "latent" : "explicit"; }

std::string_view to_string(Transition transition) {
  switch (transition) {
    case Transition::NoSwitch: return "none";
    case Transition::ToExplicit: return "to_explicit";
    case Transition::ToLatent: return "to_latent";
  }
  return "none";
}

SwitchState init_switch_state(EntropyValue first_entropy, Mode initial_mode) {
  return SwitchState{initial_mode, first_entropy, 0, 0};
}

std::pair<SwitchState, SwitchDecision> step(const SwitchState& state, EntropyValue current,
                                            const SwitchConfig& config) {
  SwitchState next = state;
  if (state.mode == Mode::Latent && current < state.ref_entropy &&
      state.dwell_steps >= config.window_latent_to_explicit) {
    next.mode = Mode::Explicit;
    next.ref_entropy = current;
    next.dwell_steps = 0;
    ++next.completed_switches;
    return {next, {Transition::ToExplicit, true}};
  }
  if (state.mode == Mode::Explicit && current > state.ref_entropy &&
      state.dwell_steps >= config.window_explicit_to_latent) {
    next.mode = Mode::Latent;
    next.ref_entropy = current;
    next.dwell_steps = 0;
    return {next, {Transition::ToLatent, true}};
  }
  ++next.dwell_steps;
  return {next, {Transition::NoSwitch, false}};
}

}  // namespace swir
