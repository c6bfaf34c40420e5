#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "swir/bridge_backend.hpp"
#include "swir/error.hpp"

namespace swir::cli {

namespace {

const std::set<std::string> kKnownKeys{
    "backend.kind",          "backend.vocab_size",     "backend.dim",         "backend.seed",
    "backend.logit_scale",   "backend.memory",         "backend.script",         "backend.command",     "backend.model",
    "backend.device",        "switch.window_e2l",      "switch.window_l2e",   "switch.initial_mode",
    "mix.alpha0",            "mix.beta0",              "mix.t_max",           "budget.c_max",
    "budget.answer_budget",  "budget.end_think_ids",   "budget.final_prefix_ids",
    "sampling.policy",       "sampling.temperature",   "sampling.top_k",      "sampling.top_p",
    "sampling.seed",         "run.prompt_ids",         "run.t_max",           "run.trace",
    "run.transcript",        "run.full_embeddings",    "sweep.c_max",         "sweep.problems",
    "sweep.checker",         "sweep.workers",          "sweep.output",        "sweep.method",
    "sweep.stop_at_saturation", "metrics.inputs",      "metrics.output",      "metrics.plot",
    "metrics.anchor_method", "metrics.anchor_accuracy", "metrics.anchor_tokens",
};

std::string label(const std::string& key) {
  const auto dot = key.find('.');
  return "[" + key.substr(0, dot) + "] " + key.substr(dot + 1);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::string> raw(const Settings& s, const std::string& key) {
  const auto v = s.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
  if (!v) return std::nullopt;
  return trim(*v);
}

std::string text(const Settings& s, const std::string& key, const std::string& fallback) {
  return raw(s, key).value_or(fallback);
}

double number(const Settings& s, const std::string& key, double fallback) {
  const auto v = raw(s, key);
  if (!v) return fallback;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || !std::isfinite(out)) {
    throw ConfigError(label(key) + ": expected a number, got '" + *v + "'");
  }
  return out;
}

std::uint64_t count(const Settings& s, const std::string& key, std::uint64_t fallback, bool allow_never = false) {
  const auto v = raw(s, key);
  if (!v) return fallback;
  if (allow_never && *v == "never") return SwitchConfig::kNever;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError(label(key) + ": expected a nonnegative integer" + (allow_never ? " or 'never'" : "") +
                      ", got '" + *v + "'");
  }
  return out;
}

std::uint64_t required_count(const Settings& s, const std::string& key, const char* why) {
  if (!raw(s, key)) throw ConfigError("missing " + label(key) + " (" + why + ")");
  return count(s, key, 0);
}

bool flag(const Settings& s, const std::string& key, bool fallback) {
  auto v = raw(s, key);
  if (!v) return fallback;
  std::transform(v->begin(), v->end(), v->begin(), [](unsigned char c) { return std::tolower(c); });
  if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
  if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
  throw ConfigError(label(key) + ": expected true or false, got '" + *v + "'");
}

void in_unit_interval(const std::string& key, double v) {
  if (v < 0.0 || v > 1.0) {
    std::ostringstream msg;
    msg << label(key) << " = " << v << " is outside [0, 1]";
    throw ConfigError(msg.str());
  }
}

void at_least_one(const std::string& key, std::uint64_t v) {
  if (v < 1) throw ConfigError(label(key) + " must be at least 1");
}

void check_known(const Settings& s) {
  for (const auto& [section, body] : s) {
    if (body.empty()) throw ConfigError("setting '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!kKnownKeys.count(full)) throw ConfigError("unknown setting " + label(full));
    }
  }
}

}  // namespace

Settings load_settings(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  Settings s;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), s);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  check_known(s);
  // input files named in a config are relative to the config's directory
  const auto base = path.parent_path();
  for (const char* key : {"backend.script", "sweep.problems", "metrics.inputs"}) {
    const auto v = raw(s, key);
    if (!v) continue;
    std::string resolved, list = *v;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream words(list);
    std::string word;
    while (words >> word) {
      const std::filesystem::path p(word);
      if (!resolved.empty()) resolved += ' ';
      resolved += (p.is_absolute() ? p : base / p).string();
    }
    s.put(boost::property_tree::ptree::path_type(key, '.'), resolved);
  }
  return s;
}

void apply_override(Settings& settings, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  }
  const auto key = trim(assignment.substr(0, eq));
  if (!kKnownKeys.count(key)) throw ConfigError("unknown setting " + label(key));
  settings.put(boost::property_tree::ptree::path_type(key, '.'), trim(assignment.substr(eq + 1)));
}

std::vector<TokenId> parse_ids(const std::string& input, const std::string& key) {
  std::vector<TokenId> ids;
  std::string cleaned = input;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::string word;
  while (in >> word) {
    TokenId id = 0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), id);
    if (ec != std::errc() || ptr != word.data() + word.size() || id < 0) {
      throw ConfigError(label(key) + ": '" + word + "' is not a token id");
    }
    ids.push_back(id);
  }
  return ids;
}

BackendSpec backend_spec(const Settings& s) {
  BackendSpec spec;
  const auto kind = text(s, "backend.kind", "tiny");
  if (kind == "tiny") {
    spec.kind = BackendKind::Tiny;
  } else if (kind == "scripted") {
    spec.kind = BackendKind::Scripted;
  } else if (kind == "bridge") {
    spec.kind = BackendKind::Bridge;
  } else {
    throw ConfigError("[backend] kind: expected tiny, scripted or bridge, got '" + kind + "'");
  }
  spec.tiny.vocab_size = count(s, "backend.vocab_size", spec.tiny.vocab_size);
  spec.tiny.dim = count(s, "backend.dim", spec.tiny.dim);
  spec.tiny.seed = count(s, "backend.seed", spec.tiny.seed);
  spec.tiny.logit_scale = number(s, "backend.logit_scale", spec.tiny.logit_scale);
  spec.tiny.memory = number(s, "backend.memory", spec.tiny.memory);
  if (spec.tiny.memory < 0.0 || spec.tiny.memory >= 1.0) throw ConfigError("[backend] memory must lie in [0, 1)");
  if (spec.tiny.vocab_size < 4) throw ConfigError("[backend] vocab_size must be at least 4");
  at_least_one("backend.dim", spec.tiny.dim);
  spec.script = text(s, "backend.script", "");
  spec.command = text(s, "backend.command", "");
  spec.model = text(s, "backend.model", spec.model);
  spec.device = text(s, "backend.device", spec.device);
  if (spec.kind == BackendKind::Scripted) {
    if (spec.script.empty()) throw ConfigError("missing [backend] script for the scripted backend");
    if (!std::filesystem::exists(spec.script)) throw ConfigError("[backend] script: file not found: " + spec.script.string());
  }
  if (spec.kind == BackendKind::Bridge && spec.command.empty()) {
    throw ConfigError("missing [backend] command for the bridge backend");
  }
  return spec;
}

DecodeConfig decode_config(const Settings& s, const SpecialIds& special) {
  DecodeConfig c;
  c.switching.window_explicit_to_latent = count(s, "switch.window_e2l", 512, true);
  c.switching.window_latent_to_explicit = count(s, "switch.window_l2e", 0, true);
  const auto initial = text(s, "switch.initial_mode", "latent");
  if (initial == "latent") {
    c.switching.initial_mode = Mode::Latent;
  } else if (initial == "explicit") {
    c.switching.initial_mode = Mode::Explicit;
  } else {
    throw ConfigError("[switch] initial_mode: expected latent or explicit, got '" + initial + "'");
  }

  c.t_max = count(s, "run.t_max", 32768);
  at_least_one("run.t_max", c.t_max);
  c.schedule.alpha0 = number(s, "mix.alpha0", 1.0);
  c.schedule.beta0 = number(s, "mix.beta0", 0.7);
  in_unit_interval("mix.alpha0", c.schedule.alpha0);
  in_unit_interval("mix.beta0", c.schedule.beta0);
  c.schedule.t_max = count(s, "mix.t_max", c.t_max);
  if (c.schedule.t_max < c.t_max) throw ConfigError("[mix] t_max must be at least [run] t_max");

  c.budget.max_switches = required_count(s, "budget.c_max", "the switch budget has no default");
  c.budget.answer_budget = required_count(s, "budget.answer_budget", "the answer budget has no default");
  at_least_one("budget.c_max", c.budget.max_switches);
  at_least_one("budget.answer_budget", c.budget.answer_budget);
  c.budget.end_think_token_ids = special.think_end;
  if (const auto v = raw(s, "budget.end_think_ids")) c.budget.end_think_token_ids = parse_ids(*v, "budget.end_think_ids");
  c.budget.final_prefix_token_ids = special.think_end;
  if (const auto v = raw(s, "budget.final_prefix_ids")) {
    c.budget.final_prefix_token_ids = parse_ids(*v, "budget.final_prefix_ids");
  }
  if (c.budget.final_prefix_token_ids.empty()) throw ConfigError("[budget] final_prefix_ids must not be empty");

  const auto policy = text(s, "sampling.policy", "greedy");
  if (policy == "sample") {
    SampledPolicy p;
    p.temperature = number(s, "sampling.temperature", 1.0);
    if (p.temperature <= 0.0) throw ConfigError("[sampling] temperature must be positive");
    if (raw(s, "sampling.top_k")) {
      p.top_k = count(s, "sampling.top_k", 0);
      at_least_one("sampling.top_k", *p.top_k);
    }
    if (raw(s, "sampling.top_p")) {
      p.top_p = number(s, "sampling.top_p", 1.0);
      if (*p.top_p <= 0.0 || *p.top_p > 1.0) throw ConfigError("[sampling] top_p must lie in (0, 1]");
    }
    p.seed = count(s, "sampling.seed", 0);
    c.policy = p;
  } else if (policy != "greedy") {
    throw ConfigError("[sampling] policy: expected greedy or sample, got '" + policy + "'");
  }
  c.keep_inputs = flag(s, "run.full_embeddings", false);
  return c;
}

RunOutputs run_outputs(const Settings& s) {
  RunOutputs out;
  out.prompt = parse_ids(text(s, "run.prompt_ids", ""), "run.prompt_ids");
  out.trace = text(s, "run.trace", out.trace.string());
  out.transcript = text(s, "run.transcript", out.transcript.string());
  out.full_embeddings = flag(s, "run.full_embeddings", false);
  return out;
}

SweepSpec sweep_spec(const Settings& s) {
  SweepSpec spec;
  std::string list = text(s, "sweep.c_max", "");
  std::replace(list.begin(), list.end(), ',', ' ');
  std::istringstream in(list);
  std::string word;
  while (in >> word) {
    const auto dash = word.find('-');
    auto parse = [&](const std::string& w) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
      if (ec != std::errc() || ptr != w.data() + w.size() || v < 1) {
        throw ConfigError("[sweep] c_max: '" + word + "' is not a positive integer or range");
      }
      return v;
    };
    if (dash == std::string::npos) {
      spec.c_max.push_back(parse(word));
    } else {
      const auto lo = parse(word.substr(0, dash));
      const auto hi = parse(word.substr(dash + 1));
      if (hi < lo) throw ConfigError("[sweep] c_max: empty range '" + word + "'");
      for (auto v = lo; v <= hi; ++v) spec.c_max.push_back(v);
    }
  }
  if (spec.c_max.empty()) throw ConfigError("[sweep] c_max: the list of switch budgets is empty");
  spec.problems = text(s, "sweep.problems", "");
  if (spec.problems.empty()) throw ConfigError("missing [sweep] problems");
  if (!std::filesystem::exists(spec.problems)) throw ConfigError("[sweep] problems: file not found: " + spec.problems.string());
  spec.checker = text(s, "sweep.checker", "");
  spec.workers = static_cast<int>(count(s, "sweep.workers", 1));
  at_least_one("sweep.workers", static_cast<std::uint64_t>(spec.workers));
  spec.output = text(s, "sweep.output", spec.output.string());
  spec.method = text(s, "sweep.method", spec.method);
  spec.stop_at_saturation = flag(s, "sweep.stop_at_saturation", true);
  return spec;
}

MetricsSpec metrics_spec(const Settings& s) {
  MetricsSpec spec;
  std::string list = text(s, "metrics.inputs", "");
  std::replace(list.begin(), list.end(), ',', ' ');
  std::istringstream in(list);
  std::string word;
  while (in >> word) spec.inputs.emplace_back(word);
  if (spec.inputs.empty()) throw ConfigError("no curve files given ([metrics] inputs)");
  for (const auto& p : spec.inputs) {
    if (!std::filesystem::exists(p)) throw ConfigError("curve file not found: " + p.string());
  }
  spec.output = text(s, "metrics.output", spec.output.string());
  spec.plot = text(s, "metrics.plot", spec.plot.string());
  spec.anchor_method = text(s, "metrics.anchor_method", spec.anchor_method);
  if (raw(s, "metrics.anchor_accuracy")) {
    spec.anchor_accuracy = number(s, "metrics.anchor_accuracy", 0.0);
    in_unit_interval("metrics.anchor_accuracy", *spec.anchor_accuracy);
  }
  if (raw(s, "metrics.anchor_tokens")) {
    spec.anchor_tokens = number(s, "metrics.anchor_tokens", 0.0);
    if (*spec.anchor_tokens <= 0.0) throw ConfigError("[metrics] anchor_tokens must be positive");
  }
  if (spec.anchor_accuracy.has_value() != spec.anchor_tokens.has_value()) {
    throw ConfigError("[metrics] anchor_accuracy and anchor_tokens must be given together");
  }
  return spec;
}

BackendFactory::BackendFactory(BackendSpec spec) : spec_(std::move(spec)) {
  if (spec_.kind == BackendKind::Scripted) {
    try {
      script_ = std::make_shared<const ScriptedBackend>(ScriptedBackend::from_file(spec_.script));
    } catch (const Error& e) {
      throw ConfigError("[backend] script: " + std::string(e.what()));
    }
  }
}

std::unique_ptr<Backend> BackendFactory::make() const {
  switch (spec_.kind) {
    case BackendKind::Tiny: return std::make_unique<TinyModel>(spec_.tiny);
    case BackendKind::Scripted: return std::make_unique<ScriptedBackend>(*script_);
    case BackendKind::Bridge: return std::make_unique<BridgeBackend>(spec_.command, spec_.model, spec_.device);
  }
  return nullptr;
}

}  // namespace swir::cli
