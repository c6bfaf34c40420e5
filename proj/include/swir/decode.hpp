#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "swir/backend.hpp"
#include "swir/budget.hpp"
#include "swir/mixer.hpp"
#include "swir/sampling.hpp"
#include "swir/switch_machine.hpp"

namespace swir {

enum class ActionKind { Sampled, Injected, Latent };
enum class StopReason { Eos, BudgetExhausted, MaxSteps };

std::string_view to_string(ActionKind kind);
std::string_view to_string(StopReason reason);

/// One decode step.
///
/// `token` is the fed id for Sampled/Injected steps and the argmax id
/// (debug only) for Latent steps. `switch_evaluated` is false on steps that
/// bypass the switch machine (injections and the locked answer phase).
struct StepRecord {
  std::size_t t = 0;
  Mode mode = Mode::Latent;
  double entropy = 0.0;
  ActionKind kind = ActionKind::Latent;
  TokenId token = 0;
  bool switch_evaluated = false;
  Transition transition = Transition::NoSwitch;
  Trigger trigger = Trigger::None;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::uint64_t logits_digest = 0;
  // Digest of the fed embedding; 0 for discrete steps.
  std::uint64_t input_digest = 0;
  // Fed embedding, kept only when DecodeConfig::keep_inputs is set.
  Embedding input;

  bool discrete() const noexcept { return kind != ActionKind::Latent; }
  bool operator==(const StepRecord&) const = default;
};

struct AnswerSpan {
  std::size_t begin = 0;  // step index, inclusive
  std::size_t end = 0;    // step index, exclusive

  bool operator==(const AnswerSpan&) const = default;
};

struct Transcript {
  std::size_t prompt_length = 0;
  std::vector<StepRecord> steps;
  StopReason stop = StopReason::MaxSteps;
  std::size_t switch_count = 0;
  std::optional<AnswerSpan> answer_span;

  bool operator==(const Transcript&) const = default;
};

struct DecodeConfig {
  SwitchConfig switching;
  MixSchedule schedule;
  BudgetConfig budget;
  SamplingPolicy policy = GreedyPolicy{};
  std::size_t t_max = 32768;
  bool keep_inputs = false;

  /// Sets both the step limit and the schedule horizon.
  DecodeConfig& with_t_max(std::size_t steps) {
    t_max = steps;
    schedule.t_max = steps;
    return *this;
  }

  bool operator==(const DecodeConfig&) const = default;
};

/// Runs the switching controller to completion against `backend`.
///
/// Prompt ids are fed first; the logits after the last prompt token drive
/// step 1. Each step then either pops an injected token, samples a discrete
/// token (Explicit mode past the block's first step), or feeds the soft
/// embedding. The first step of a Latent block is mixed toward the
/// begin-thinking embedding and the first step of an Explicit block toward
/// the end-thinking embedding, unless a budget trigger fired on that step.
/// Once the end-of-thinking marker is sampled, or the termination trigger
/// fires, the remainder of the decode is locked to Explicit sampling.
Transcript decode(std::span<const TokenId> prompt, Backend& backend, const DecodeConfig& config);

struct Answer {
  std::vector<TokenId> tokens;
  // False when no end-of-thinking marker was ever emitted.
  bool complete = false;
};

/// Discrete tokens after the last end-of-thinking marker, EOS excluded.
Answer extract_answer(const Transcript& transcript, const SpecialIds& special);

/// Locates the answer span: steps after the last completed end-of-thinking
/// marker, dropping a trailing EOS step.
std::optional<AnswerSpan> find_answer_span(std::span<const StepRecord> steps, const SpecialIds& special);

/// FNV-1a over the IEEE-754 bytes of the values.
std::uint64_t digest(std::span<const double> values);

}  // namespace swir
