#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <utility>

#include "swir/confidence.hpp"

namespace swir {

enum class Mode { Latent, Explicit };

std::string_view to_string(Mode mode);

/// Dwell windows for the two transition directions.
///
/// `kNever` as a window disables that direction entirely. `initial_mode` is
/// Latent for the standard controller; starting Explicit with switching to
/// Latent disabled reduces the decode loop to plain chain-of-thought.
struct SwitchConfig {
  static constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

  std::size_t window_explicit_to_latent = 512;
  std::size_t window_latent_to_explicit = 0;
  Mode initial_mode = Mode::Latent;

  bool operator==(const SwitchConfig&) const = default;
};

struct SwitchState {
  Mode mode = Mode::Latent;
  EntropyValue ref_entropy;
  std::size_t dwell_steps = 0;
  // Latent -> Explicit transitions only.
  std::size_t completed_switches = 0;

  bool operator==(const SwitchState&) const = default;
};

enum class Transition { NoSwitch, ToExplicit, ToLatent };

std::string_view to_string(Transition transition);

struct SwitchDecision {
  Transition transition = Transition::NoSwitch;
  bool block_entry = false;

  bool operator==(const SwitchDecision&) const = default;
};

SwitchState init_switch_state(EntropyValue first_entropy, Mode initial_mode = Mode::Latent);

/// One step of the block-wise entropy-trend rule.
///
/// Latent switches to Explicit when the entropy drops strictly below the
/// block reference and the Latent dwell window has elapsed; Explicit switches
/// to Latent when it rises strictly above and the Explicit dwell window has
/// elapsed. A switch resets the reference to the current entropy and the
/// dwell counter to zero; otherwise the dwell counter advances.
std::pair<SwitchState, SwitchDecision> step(const SwitchState& state, EntropyValue current,
                                            const SwitchConfig& config);

}  // namespace swir
