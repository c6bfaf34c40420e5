#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "swir/error.hpp"

namespace {

using swir::Errc;

// Flag name -> config key. A flag always wins over the file and over --set.
struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::vector<Flag> kDecodeFlags{
    {"--backend", "backend.kind", "tiny, scripted or bridge"},
    {"--vocab-size", "backend.vocab_size", "tiny model vocabulary size"},
    {"--dim", "backend.dim", "tiny model embedding width"},
    {"--model-seed", "backend.seed", "tiny model seed"},
    {"--logit-scale", "backend.logit_scale", "tiny model logit scale"},
    {"--memory", "backend.memory", "tiny model moving-average weight in [0, 1)"},
    {"--script", "backend.script", "scripted backend JSON file"},
    {"--bridge-command", "backend.command", "bridge process command line"},
    {"--model", "backend.model", "model name sent to the bridge"},
    {"--device", "backend.device", "device name sent to the bridge"},
    {"--window-e2l", "switch.window_e2l", "explicit-to-latent dwell window, or 'never'"},
    {"--window-l2e", "switch.window_l2e", "latent-to-explicit dwell window, or 'never'"},
    {"--initial-mode", "switch.initial_mode", "latent or explicit"},
    {"--alpha0", "mix.alpha0", "initial block-entry weight in [0, 1]"},
    {"--beta0", "mix.beta0", "initial block-exit weight in [0, 1]"},
    {"--schedule-t-max", "mix.t_max", "mixing schedule horizon"},
    {"--answer-budget", "budget.answer_budget", "answer tokens allowed after termination"},
    {"--end-think-ids", "budget.end_think_ids", "end-of-thinking marker ids"},
    {"--final-prefix-ids", "budget.final_prefix_ids", "answer prefix ids injected on termination"},
    {"--policy", "sampling.policy", "greedy or sample"},
    {"--temperature", "sampling.temperature", "sampling temperature"},
    {"--top-k", "sampling.top_k", "keep the k most likely ids"},
    {"--top-p", "sampling.top_p", "nucleus mass in (0, 1]"},
    {"--sample-seed", "sampling.seed", "sampler seed"},
    {"--t-max", "run.t_max", "maximum decode steps"},
    {"--prompt", "run.prompt_ids", "prompt token ids"},
};

struct Options {
  std::map<std::string, std::string> values;  // key -> value
  std::vector<std::pair<CLI::Option*, std::string>> bound;
  std::vector<std::string> sets;
};

void add_flags(CLI::App* cmd, Options& opts, const std::vector<Flag>& flags) {
  for (const auto& f : flags) {
    auto* opt = cmd->add_option(f.name, opts.values[f.key], std::string(f.help) + " [" + f.key + "]");
    opts.bound.emplace_back(opt, f.key);
  }
}

CLI::App* add_command(CLI::App& app, Options& opts, const char* name, const char* help) {
  auto* cmd = app.add_subcommand(name, help);
  cmd->add_option("--set", opts.sets, "override any setting: section.key=value (repeatable)")->allow_extra_args(false);
  return cmd;
}

swir::cli::Settings settings_for(const std::string& config_path, const Options& opts) {
  swir::cli::Settings s;
  if (!config_path.empty()) s = swir::cli::load_settings(config_path);
  for (const auto& assignment : opts.sets) swir::cli::apply_override(s, assignment);
  for (const auto& [opt, key] : opts.bound) {
    if (opt->count() > 0) swir::cli::apply_override(s, key + "=" + opts.values.at(key));
  }
  return s;
}

// Configuration and usage problems exit 1; failures of the model, the wire
// or the numerics at run time exit 2.
int exit_code_for(Errc code) {
  switch (code) {
    case Errc::BackendFailure:
    case Errc::Protocol:
    case Errc::NonFinite:
    case Errc::TooShort:
    case Errc::InvalidDistribution:
    case Errc::DimensionMismatch:
    case Errc::AlreadyTerminated:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-guided switching between latent and explicit reasoning"};
  app.require_subcommand(1);
  std::string config_path;
  Options opts;
  app.add_option("-c,--config", config_path, "INI config file")->envname("SWIR_CONFIG");

  auto* run = add_command(app, opts, "run", "decode one prompt and write its trace and transcript");
  add_flags(run, opts, kDecodeFlags);
  add_flags(run, opts, {{"--c-max", "budget.c_max", "maximum thinking-block switches"},
                        {"--trace", "run.trace", "trace output file"},
                        {"--transcript", "run.transcript", "transcript output file"}});
  bool full_embeddings = false;
  run->add_flag("--full-embeddings", full_embeddings, "store fed embeddings in the trace [run.full_embeddings]");

  auto* replay = add_command(app, opts, "replay", "check a trace's switch decisions, optionally re-decoding it");
  std::string trace_path;
  bool rerun = false;
  replay->add_option("trace", trace_path, "trace file (default: [run] trace)");
  replay->add_flag("--rerun", rerun, "decode again with the configured backend and compare");
  add_flags(replay, opts, kDecodeFlags);

  auto* sweep = add_command(app, opts, "sweep", "decode a problem set for each switch budget");
  add_flags(sweep, opts, kDecodeFlags);
  add_flags(sweep, opts, {{"--c-max", "sweep.c_max", "switch budgets, e.g. 1-8 or 1,2,4"},
                          {"--problems", "sweep.problems", "problems file"},
                          {"--checker", "sweep.checker", "answer checker command"},
                          {"--workers", "sweep.workers", "parallel decode workers"},
                          {"--output", "sweep.output", "curve CSV output"},
                          {"--method", "sweep.method", "method label for the curve"},
                          {"--stop-at-saturation", "sweep.stop_at_saturation", "true or false"}});

  auto* metrics = add_command(app, opts, "metrics", "token-efficiency curves, gains and a plot");
  std::vector<std::string> inputs;
  metrics->add_option("inputs", inputs, "curve CSV files [metrics.inputs]");
  add_flags(metrics, opts, {{"--output", "metrics.output", "metrics CSV output"},
                            {"--plot", "metrics.plot", "SVG plot output"},
                            {"--anchor-method", "metrics.anchor_method", "curve used as the normalization anchor"},
                            {"--anchor-accuracy", "metrics.anchor_accuracy", "explicit anchor accuracy"},
                            {"--anchor-tokens", "metrics.anchor_tokens", "explicit anchor token count"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (full_embeddings) opts.sets.emplace_back("run.full_embeddings=true");
    if (!inputs.empty()) {
      std::string joined;
      for (const auto& i : inputs) joined += (joined.empty() ? "" : " ") + i;
      opts.sets.push_back("metrics.inputs=" + joined);
    }
    const auto settings = settings_for(config_path, opts);
    if (*run) return swir::cli::cmd_run(settings, std::cout);
    if (*replay) {
      if (trace_path.empty()) trace_path = settings.get<std::string>("run.trace", "trace.jsonl");
      return swir::cli::cmd_replay(settings, trace_path, rerun, std::cout);
    }
    if (*sweep) return swir::cli::cmd_sweep(settings, std::cout);
    if (*metrics) return swir::cli::cmd_metrics(settings, std::cout);
  } catch (const swir::cli::ConfigError& e) {
    std::cerr << "swir: config error: " << e.what() << "\n";
    return 1;
  } catch (const swir::Error& e) {
    const int code = exit_code_for(e.code());
    std::cerr << "swir: " << (code == 2 ? "runtime error: " : "error: ") << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "swir: runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
