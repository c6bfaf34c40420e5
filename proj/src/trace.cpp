#include "swir/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "swir/error.hpp"

namespace swir {

using nlohmann::json;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t unhex(const std::string& s) {
  if (s.size() != 16) throw std::invalid_argument("digest must be 16 hex digits");
  std::size_t used = 0;
  const auto v = std::stoull(s, &used, 16);
  if (used != s.size()) throw std::invalid_argument("bad digest");
  return v;
}

template <typename E>
E parse_enum(const std::string& s, std::initializer_list<E> values) {
  for (const E v : values) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown value '" + s + "'");
}

json config_to_json(const DecodeConfig& c) {
  json policy;
  if (const auto* s = std::get_if<SampledPolicy>(&c.policy)) {
    policy = {{"kind", "sample"}, {"temperature", s->temperature}, {"seed", s->seed}};
    policy["top_k"] = s->top_k ? json(*s->top_k) : json(nullptr);
    policy["top_p"] = s->top_p ? json(*s->top_p) : json(nullptr);
  } else {
    policy = {{"kind", "greedy"}};
  }
  return {
      {"switch",
       {{"window_e2l", c.switching.window_explicit_to_latent},
        {"window_l2e", c.switching.window_latent_to_explicit},
        {"initial_mode", to_string(c.switching.initial_mode)}}},
      {"mix", {{"alpha0", c.schedule.alpha0}, {"beta0", c.schedule.beta0}, {"t_max", c.schedule.t_max}}},
      {"budget",
       {{"c_max", c.budget.max_switches},
        {"answer_budget", c.budget.answer_budget},
        {"end_think_ids", c.budget.end_think_token_ids},
        {"final_prefix_ids", c.budget.final_prefix_token_ids}}},
      {"policy", policy},
      {"t_max", c.t_max},
      {"keep_inputs", c.keep_inputs},
  };
}

DecodeConfig config_from_json(const json& j) {
  DecodeConfig c;
  const auto& sw = j.at("switch");
  c.switching.window_explicit_to_latent = sw.at("window_e2l").get<std::size_t>();
  c.switching.window_latent_to_explicit = sw.at("window_l2e").get<std::size_t>();
  c.switching.initial_mode =
      parse_enum(sw.at("initial_mode").get<std::string>(), {Mode::Latent, Mode::Explicit});
  const auto& mix = j.at("mix");
  c.schedule.alpha0 = mix.at("alpha0").get<double>();
  c.schedule.beta0 = mix.at("beta0").get<double>();
  c.schedule.t_max = mix.at("t_max").get<std::size_t>();
  const auto& b = j.at("budget");
  c.budget.max_switches = b.at("c_max").get<std::size_t>();
  c.budget.answer_budget = b.at("answer_budget").get<std::size_t>();
  c.budget.end_think_token_ids = b.at("end_think_ids").get<std::vector<TokenId>>();
  c.budget.final_prefix_token_ids = b.at("final_prefix_ids").get<std::vector<TokenId>>();
  const auto& p = j.at("policy");
  if (p.at("kind").get<std::string>() == "sample") {
    SampledPolicy s;
    s.temperature = p.at("temperature").get<double>();
    s.seed = p.at("seed").get<std::uint64_t>();
    if (!p.at("top_k").is_null()) s.top_k = p.at("top_k").get<std::size_t>();
    if (!p.at("top_p").is_null()) s.top_p = p.at("top_p").get<double>();
    c.policy = s;
  } else {
    c.policy = GreedyPolicy{};
  }
  c.t_max = j.at("t_max").get<std::size_t>();
  c.keep_inputs = j.value("keep_inputs", false);
  return c;
}

json step_to_json(const StepRecord& s, const TraceOptions& options) {
  json j = {
      {"t", s.t},
      {"mode", s.mode == Mode::Latent ? "L" : "E"},
      {"H", s.entropy},
      {"kind", to_string(s.kind)},
      {"tok", s.token},
      {"dig", s.discrete() ? json(nullptr) : json(hex(s.input_digest))},
      {"alpha", s.alpha ? json(*s.alpha) : json(nullptr)},
      {"beta", s.beta ? json(*s.beta) : json(nullptr)},
      {"ldig", hex(s.logits_digest)},
      {"sw", s.switch_evaluated ? json(to_string(s.transition)) : json(nullptr)},
      {"trig", to_string(s.trigger)},
  };
  if (options.full_embeddings && !s.input.empty()) j["emb"] = s.input;
  return j;
}

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.t = j.at("t").get<std::size_t>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode != "L" && mode != "E") throw std::invalid_argument("mode must be L or E");
  s.mode = mode == "L" ? Mode::Latent : Mode::Explicit;
  s.entropy = j.at("H").get<double>();
  s.kind = parse_enum(j.at("kind").get<std::string>(),
                      {ActionKind::Sampled, ActionKind::Injected, ActionKind::Latent});
  s.token = j.at("tok").get<TokenId>();
  if (!j.at("dig").is_null()) s.input_digest = unhex(j.at("dig").get<std::string>());
  if (!j.at("alpha").is_null()) s.alpha = j.at("alpha").get<double>();
  if (!j.at("beta").is_null()) s.beta = j.at("beta").get<double>();
  s.logits_digest = unhex(j.at("ldig").get<std::string>());
  if (!j.at("sw").is_null()) {
    s.switch_evaluated = true;
    s.transition = parse_enum(j.at("sw").get<std::string>(),
                              {Transition::NoSwitch, Transition::ToExplicit, Transition::ToLatent});
  }
  s.trigger = parse_enum(j.at("trig").get<std::string>(),
                         {Trigger::None, Trigger::Convergence, Trigger::Termination});
  if (j.contains("emb")) s.input = j.at("emb").get<Embedding>();
  return s;
}

}  // namespace

std::string record(const Transcript& transcript, const DecodeConfig& config, const SpecialIds& special,
                   const TraceOptions& options) {
  json header = {
      {"format", kTraceVersion},
      {"config", config_to_json(config)},
      {"special",
       {{"eos", special.eos}, {"think_begin", special.think_begin}, {"think_end", special.think_end}}},
      {"prompt_length", transcript.prompt_length},
      {"steps", transcript.steps.size()},
      {"stop", to_string(transcript.stop)},
      {"switch_count", transcript.switch_count},
      {"answer_span", transcript.answer_span
                          ? json::array({transcript.answer_span->begin, transcript.answer_span->end})
                          : json(nullptr)},
  };
  std::string out = header.dump();
  out += '\n';
  for (const auto& s : transcript.steps) {
    out += step_to_json(s, options).dump();
    out += '\n';
  }
  return out;
}

Trace replay(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw LineError(Errc::CorruptLine, 1, "missing header");
  ++line_no;
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw LineError(Errc::CorruptLine, line_no, e.what());
  }
  if (!header.is_object() || !header.contains("format") || !header["format"].is_string()) {
    throw LineError(Errc::CorruptLine, line_no, "header has no format tag");
  }
  if (header["format"].get<std::string>() != kTraceVersion) {
    throw Error(Errc::VersionMismatch, "unsupported trace format '" + header["format"].get<std::string>() +
                                           "', expected '" + std::string(kTraceVersion) + "'");
  }

  Trace trace;
  std::size_t expected_steps = 0;
  try {
    trace.config = config_from_json(header.at("config"));
    const auto& sp = header.at("special");
    trace.special.eos = sp.at("eos").get<TokenId>();
    trace.special.think_begin = sp.at("think_begin").get<std::vector<TokenId>>();
    trace.special.think_end = sp.at("think_end").get<std::vector<TokenId>>();
    trace.transcript.prompt_length = header.at("prompt_length").get<std::size_t>();
    expected_steps = header.at("steps").get<std::size_t>();
    trace.transcript.stop = parse_enum(header.at("stop").get<std::string>(),
                                       {StopReason::Eos, StopReason::BudgetExhausted, StopReason::MaxSteps});
    trace.transcript.switch_count = header.at("switch_count").get<std::size_t>();
    const auto& span = header.at("answer_span");
    if (!span.is_null()) {
      trace.transcript.answer_span = AnswerSpan{span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
    }
  } catch (const std::exception& e) {
    throw LineError(Errc::CorruptLine, line_no, e.what());
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    try {
      trace.transcript.steps.push_back(step_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw LineError(Errc::CorruptLine, line_no, e.what());
    }
    if (trace.transcript.steps.back().t != trace.transcript.steps.size()) {
      throw LineError(Errc::CorruptLine, line_no, "step index out of sequence");
    }
  }
  if (trace.transcript.steps.size() != expected_steps) {
    throw LineError(Errc::CorruptLine, line_no + 1,
                    "expected " + std::to_string(expected_steps) + " steps, found " +
                        std::to_string(trace.transcript.steps.size()));
  }
  return trace;
}

void write_trace_file(const std::filesystem::path& path, const Transcript& transcript,
                      const DecodeConfig& config, const SpecialIds& special, const TraceOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  out << record(transcript, config, special, options);
}

Trace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return replay(buf.str());
}

ReplayCheck verify_decisions(const Transcript& transcript, const SwitchConfig& config) {
  ReplayCheck check;
  SwitchState state;
  bool started = false;
  for (std::size_t i = 0; i < transcript.steps.size(); ++i) {
    const auto& s = transcript.steps[i];
    if (!s.switch_evaluated) continue;
    if (!started) {
      state = init_switch_state(EntropyValue{s.entropy}, config.initial_mode);
      started = true;
    }
    SwitchDecision decision;
    std::tie(state, decision) = step(state, EntropyValue{s.entropy}, config);
    if (decision.transition != s.transition || state.mode != s.mode) {
      check.ok = false;
      check.first_mismatch = i;
      check.detail = "step " + std::to_string(s.t) + ": replay gives " +
                     std::string(to_string(decision.transition)) + "/" + std::string(to_string(state.mode)) +
                     ", recorded " + std::string(to_string(s.transition)) + "/" +
                     std::string(to_string(s.mode));
      return check;
    }
  }
  if (state.completed_switches != transcript.switch_count) {
    check.ok = false;
    check.detail = "replayed switch count " + std::to_string(state.completed_switches) +
                   " differs from recorded " + std::to_string(transcript.switch_count);
  }
  return check;
}

}  // namespace swir
