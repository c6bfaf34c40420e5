#include "swir/decode.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <tuple>

#include "swir/error.hpp"

namespace swir {

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Sampled: return "sampled";
    case ActionKind::Injected: return "injected";
    case ActionKind::Latent: return "latent";
  }
  return "latent";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Eos: return "eos";
    case StopReason::BudgetExhausted: return "budget";
    case StopReason::MaxSteps: return "max_steps";
  }
  return "max_steps";
}

std::uint64_t digest(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const double x : values) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) {
      h ^= bits & 0xffU;
      h *= 0x100000001b3ULL;
      bits >>= 8;
    }
  }
  return h;
}

namespace {

std::vector<double> call_backend(Backend& backend, const TokenInput& input, std::size_t vocab) {
  std::vector<double> logits;
  try {
    logits = backend.step(input);
  } catch (const Error& e) {
    if (e.code() == Errc::BackendFailure) throw;
    throw Error(Errc::BackendFailure, e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::BackendFailure, e.what());
  }
  if (logits.size() != vocab) {
    throw Error(Errc::BackendFailure, "backend returned " + std::to_string(logits.size()) +
                                          " logits, vocabulary has " + std::to_string(vocab));
  }
  return logits;
}

bool ends_with(const std::vector<TokenId>& seq, std::span<const TokenId> marker) {
  return !marker.empty() && seq.size() >= marker.size() &&
         std::equal(marker.begin(), marker.end(), seq.end() - static_cast<std::ptrdiff_t>(marker.size()));
}

}  // namespace

Transcript decode(std::span<const TokenId> prompt, Backend& backend, const DecodeConfig& config) {
  if (prompt.empty()) throw Error(Errc::InvalidArgument, "prompt is empty");
  if (config.t_max < 1) throw Error(Errc::InvalidArgument, "t_max must be >= 1");
  if (config.schedule.t_max < config.t_max) {
    throw Error(Errc::InvalidArgument, "schedule horizon is shorter than t_max");
  }
  validate(config.budget);

  const EmbeddingTable& table = backend.embedding_table();
  const SpecialIds special = backend.special_ids();
  const Embedding think_embedding = signal_embedding(table, special.think_begin);
  const Embedding end_think_embedding = signal_embedding(table, special.think_end);
  const std::size_t vocab = table.rows();

  Sampler sampler(config.policy);
  Transcript transcript;
  transcript.prompt_length = prompt.size();

  std::vector<double> logits;
  for (const TokenId id : prompt) logits = call_backend(backend, id, vocab);

  SwitchState sw;
  BudgetState budget;
  bool locked = false;
  std::vector<TokenId> emitted;

  for (std::size_t t = 1; t <= config.t_max; ++t) {
    const TokenDistribution dist = from_logits(logits);
    const EntropyValue h = entropy(dist);

    StepRecord rec;
    rec.t = t;
    rec.entropy = h.nats;
    rec.logits_digest = digest(logits);
    TokenInput fed;
    bool stop = false;

    if (const auto injected = next_injected(budget)) {
      rec.mode = locked ? Mode::Explicit : sw.mode;
      rec.kind = ActionKind::Injected;
      rec.token = *injected;
      fed = *injected;
      emitted.push_back(*injected);
      if (*injected == special.eos) {
        transcript.stop = StopReason::Eos;
        stop = true;
      }
    } else if (locked) {
      rec.mode = Mode::Explicit;
      rec.kind = ActionKind::Sampled;
      rec.token = sampler.sample(dist);
      fed = rec.token;
      emitted.push_back(rec.token);
      if (rec.token == special.eos) {
        transcript.stop = StopReason::Eos;
        stop = true;
      } else if (tick_answer_budget(budget)) {
        transcript.stop = StopReason::BudgetExhausted;
        stop = true;
      }
    } else {
      if (t == 1) sw = init_switch_state(h, config.switching.initial_mode);
      SwitchDecision decision;
      std::tie(sw, decision) = step(sw, h, config.switching);
      rec.switch_evaluated = true;
      rec.transition = decision.transition;
      rec.mode = sw.mode;
      if (decision.transition == Transition::ToExplicit) {
        rec.trigger = on_switch_to_explicit(budget, sw.completed_switches, config.budget);
        if (rec.trigger == Trigger::Termination) locked = true;
      }

      if (sw.mode == Mode::Explicit && sw.dwell_steps > 0) {
        rec.kind = ActionKind::Sampled;
        rec.token = sampler.sample(dist);
        fed = rec.token;
        emitted.push_back(rec.token);
        if (rec.token == special.eos) {
          transcript.stop = StopReason::Eos;
          stop = true;
        } else if (ends_with(emitted, special.think_end)) {
          locked = true;
        }
      } else {
        Embedding soft = soft_embedding(dist, table);
        if (sw.mode == Mode::Latent && sw.dwell_steps == 0) {
          rec.alpha = alpha_at(config.schedule, t);
          soft = mix_block_entry(soft, think_embedding, *rec.alpha);
        }
        // a trigger on this step queues the end-of-thinking marker itself
        if (sw.mode == Mode::Explicit && sw.dwell_steps == 0 && rec.trigger == Trigger::None) {
          rec.beta = beta_at(config.schedule, t);
          soft = mix_block_exit(soft, end_think_embedding, *rec.beta);
        }
        rec.kind = ActionKind::Latent;
        rec.token = dist.argmax();
        rec.input_digest = digest(soft);
        if (config.keep_inputs) rec.input = soft;
        fed = std::move(soft);
      }
    }

    transcript.steps.push_back(std::move(rec));
    if (stop) break;
    if (t == config.t_max) {
      transcript.stop = StopReason::MaxSteps;
      break;
    }
    logits = call_backend(backend, fed, vocab);
  }

  transcript.switch_count = sw.completed_switches;
  transcript.answer_span = find_answer_span(transcript.steps, special);
  return transcript;
}

std::optional<AnswerSpan> find_answer_span(std::span<const StepRecord> steps, const SpecialIds& special) {
  std::vector<TokenId> emitted;
  std::optional<std::size_t> last_marker_end;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!steps[i].discrete()) continue;
    emitted.push_back(steps[i].token);
    if (ends_with(emitted, special.think_end)) last_marker_end = i + 1;
  }
  if (!last_marker_end) return std::nullopt;
  std::size_t end = steps.size();
  if (end > *last_marker_end && steps[end - 1].discrete() && steps[end - 1].token == special.eos) --end;
  return AnswerSpan{*last_marker_end, end};
}

Answer extract_answer(const Transcript& transcript, const SpecialIds& special) {
  Answer answer;
  const auto span = find_answer_span(transcript.steps, special);
  if (!span) return answer;
  answer.complete = true;
  for (std::size_t i = span->begin; i < span->end; ++i) {
    const auto& s = transcript.steps[i];
    if (s.discrete()) answer.tokens.push_back(s.token);
  }
  return answer;
}

}  // namespace swir
