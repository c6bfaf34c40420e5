#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include <omp.h>
#include <spawn.h>
#include <sys/wait.h>

#include "swir/curve_io.hpp"
#include "swir/error.hpp"
#include "swir/trace.hpp"

extern char** environ;

namespace swir::cli {

namespace {

std::string join_ids(const std::vector<TokenId>& ids) {
  std::string s;
  for (const auto id : ids) {
    if (!s.empty()) s += ' ';
    s += std::to_string(id);
  }
  return s;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << body;
  if (!f) throw ConfigError("cannot write " + path.string());
}

const char* mode_name(Mode m) { return m == Mode::Latent ? "latent" : "explicit"; }

// Runs `/bin/sh -c '<checker> "$1" "$2"' sh answer expected`; exit 0 means correct.
bool run_checker(const std::string& checker, const std::string& answer, const std::string& expected) {
  std::string script = checker + " \"$1\" \"$2\"";
  std::string sh = "/bin/sh", dash_c = "-c", name = "sh", a = answer, e = expected;
  char* argv[] = {sh.data(), dash_c.data(), script.data(), name.data(), a.data(), e.data(), nullptr};
  pid_t pid = -1;
  if (posix_spawn(&pid, sh.c_str(), nullptr, nullptr, argv, environ) != 0) {
    throw Error(Errc::BackendFailure, "cannot start checker '" + checker + "'");
  }
  int status = 0;
  if (::waitpid(pid, &status, 0) < 0) throw Error(Errc::BackendFailure, "lost checker process");
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

std::string describe(const StepRecord& s) {
  std::ostringstream o;
  o << "t=" << s.t << " mode=" << mode_name(s.mode) << " kind=" << to_string(s.kind) << " token=" << s.token
    << " logits=" << std::hex << s.logits_digest << " input=" << s.input_digest;
  return o.str();
}

}  // namespace

std::string format_transcript(const Transcript& tr, const SpecialIds& special) {
  std::ostringstream o;
  const auto answer = extract_answer(tr, special);
  o << "# prompt tokens: " << tr.prompt_length << "\n"
    << "# steps: " << tr.steps.size() << ", stop: " << to_string(tr.stop) << ", switches: " << tr.switch_count
    << "\n"
    << "# answer: " << (answer.complete ? join_ids(answer.tokens) : "(incomplete)") << "\n";
  if (tr.answer_span) o << "# answer span: [" << tr.answer_span->begin << ", " << tr.answer_span->end << ")\n";
  char line[192];
  std::snprintf(line, sizeof line, "%6s  %-8s  %-8s  %6s  %9s  %6s  %6s  %s\n", "t", "mode", "kind", "token", "entropy",
                "alpha", "beta", "event");
  o << line;
  for (const auto& s : tr.steps) {
    std::string event;
    if (s.transition != Transition::NoSwitch) event = std::string(to_string(s.transition));
    if (s.trigger != Trigger::None) event += (event.empty() ? "" : " ") + std::string(to_string(s.trigger));
    std::snprintf(line, sizeof line, "%6zu  %-8s  %-8s  %6d  %9.5f  %6s  %6s  %s\n", s.t, mode_name(s.mode),
                  std::string(to_string(s.kind)).c_str(), s.token, s.entropy,
                  s.alpha ? fixed(*s.alpha, 4).c_str() : "-", s.beta ? fixed(*s.beta, 4).c_str() : "-",
                  event.c_str());
    o << line;
  }
  return o.str();
}

int cmd_run(const Settings& settings, std::ostream& out) {
  const BackendFactory factory(backend_spec(settings));
  const auto outputs = run_outputs(settings);
  if (outputs.prompt.empty()) throw ConfigError("[run] prompt_ids is empty");
  auto backend = factory.make();
  const auto special = backend->special_ids();
  const auto config = decode_config(settings, special);

  const auto tr = decode(outputs.prompt, *backend, config);
  write_trace_file(outputs.trace, tr, config, special, TraceOptions{outputs.full_embeddings});
  write_text(outputs.transcript, format_transcript(tr, special));

  const auto latent = std::count_if(tr.steps.begin(), tr.steps.end(), [](const auto& s) { return !s.discrete(); });
  const auto answer = extract_answer(tr, special);
  out << "stop: " << to_string(tr.stop) << "\n"
      << "steps: " << tr.steps.size() << " (" << latent << " latent, " << tr.steps.size() - latent
      << " discrete)\n"
      << "switches: " << tr.switch_count << " of " << config.budget.max_switches << "\n"
      << "answer: " << (answer.complete ? join_ids(answer.tokens) : "(incomplete: no end-of-thinking marker)")
      << "\n"
      << "trace: " << outputs.trace.string() << "\n"
      << "transcript: " << outputs.transcript.string() << "\n";
  return 0;
}

int cmd_replay(const Settings& settings, const std::filesystem::path& path, bool rerun, std::ostream& out) {
  if (!std::filesystem::exists(path)) throw ConfigError("trace file not found: " + path.string());
  const auto trace = read_trace_file(path);
  const auto& tr = trace.transcript;
  const auto check = verify_decisions(tr, trace.config.switching);
  out << "trace: " << path.string() << "\n"
      << "steps: " << tr.steps.size() << ", switches: " << tr.switch_count << ", stop: " << to_string(tr.stop)
      << "\n";
  if (!check.ok) {
    out << "decisions: MISMATCH at step " << check.first_mismatch.value_or(0) << ": " << check.detail << "\n";
    return 2;
  }
  out << "decisions: ok\n";
  if (!rerun) return 0;

  const BackendFactory factory(backend_spec(settings));
  const auto prompt = run_outputs(settings).prompt;
  if (prompt.size() != tr.prompt_length) {
    throw ConfigError("[run] prompt_ids has " + std::to_string(prompt.size()) + " tokens but the trace was recorded with " +
                      std::to_string(tr.prompt_length));
  }
  auto backend = factory.make();
  if (backend->special_ids() != trace.special) {
    out << "rerun: MISMATCH: backend special ids differ from the trace\n";
    return 2;
  }
  const auto again = decode(prompt, *backend, trace.config);
  const auto n = std::min(again.steps.size(), tr.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto expect = tr.steps[i];
    auto got = again.steps[i];
    // digest-only traces do not carry the fed vectors
    if (expect.input.empty()) got.input.clear();
    if (!(expect == got)) {
      out << "rerun: MISMATCH at step " << expect.t << "\n  recorded: " << describe(expect)
          << "\n  decoded:  " << describe(got) << "\n";
      return 2;
    }
  }
  if (again.steps.size() != tr.steps.size() || again.stop != tr.stop || again.switch_count != tr.switch_count ||
      again.answer_span != tr.answer_span) {
    out << "rerun: MISMATCH: decoded " << again.steps.size() << " steps (" << to_string(again.stop)
        << "), recorded " << tr.steps.size() << " (" << to_string(tr.stop) << ")\n";
    return 2;
  }
  out << "rerun: identical (" << again.steps.size() << " steps)\n";
  return 0;
}

std::vector<Problem> read_problems(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read problems file " + path.string());
  std::vector<Problem> problems;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto bar = line.find('|');
    const std::string where = path.string() + ":" + std::to_string(number);
    if (bar == std::string::npos || line.find('|', bar + 1) != std::string::npos) {
      throw ConfigError(where + ": expected 'prompt ids | expected ids'");
    }
    Problem p;
    try {
      p.prompt = parse_ids(line.substr(0, bar), "sweep.problems");
      p.expected = parse_ids(line.substr(bar + 1), "sweep.problems");
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (p.prompt.empty()) throw ConfigError(where + ": empty prompt");
    problems.push_back(std::move(p));
  }
  if (problems.empty()) throw ConfigError("no problems in " + path.string());
  return problems;
}

int cmd_sweep(const Settings& settings, std::ostream& out) {
  const auto spec = sweep_spec(settings);
  const BackendFactory factory(backend_spec(settings));
  const auto problems = read_problems(spec.problems);
  const auto special = factory.make()->special_ids();
  // the per-run switch budget is replaced on every sweep step
  Settings base = settings;
  if (!base.get_optional<std::string>("budget.c_max")) base.put("budget.c_max", spec.c_max.front());
  auto config = decode_config(base, special);
  const auto n = problems.size();

  std::ostringstream csv;
  csv << "method,tokens,accuracy\n";
  char line[160];
  std::snprintf(line, sizeof line, "%6s  %12s  %9s  %s\n", "c_max", "mean_tokens", "accuracy", "note");
  out << line;

  std::vector<Transcript> previous;
  std::size_t rows = 0;
  for (const auto c_max : spec.c_max) {
    config.budget.max_switches = c_max;
    std::vector<Transcript> results(n);
    std::vector<char> correct(n, 0);
    std::vector<std::exception_ptr> errors(n);

#pragma omp parallel num_threads(spec.workers)
    {
      std::unique_ptr<Backend> backend;
      std::exception_ptr setup;
      try {
        backend = factory.make();
      } catch (...) {
        setup = std::current_exception();
      }
#pragma omp for schedule(dynamic)
      for (std::size_t i = 0; i < n; ++i) {
        if (setup) {
          errors[i] = setup;
          continue;
        }
        try {
          backend->reset();
          results[i] = decode(problems[i].prompt, *backend, config);
          const auto answer = extract_answer(results[i], special);
          const auto got = join_ids(answer.tokens);
          const auto want = join_ids(problems[i].expected);
          correct[i] = spec.checker.empty() ? (answer.complete && got == want) : run_checker(spec.checker, got, want);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    if (spec.stop_at_saturation && results == previous) {
      std::snprintf(line, sizeof line, "%6zu  %12s  %9s  %s\n", c_max, "-", "-", "saturated: same transcripts as c_max - 1");
      out << line;
      break;
    }
    double tokens = 0.0;
    for (const auto& r : results) tokens += static_cast<double>(r.steps.size());
    tokens /= static_cast<double>(n);
    const double accuracy = static_cast<double>(std::count(correct.begin(), correct.end(), 1)) / static_cast<double>(n);
    csv << spec.method << "," << fixed(tokens, 4) << "," << fixed(accuracy, 6) << "\n";
    std::snprintf(line, sizeof line, "%6zu  %12.4f  %9.6f\n", c_max, tokens, accuracy);
    out << line;
    ++rows;
    previous = std::move(results);
  }
  write_text(spec.output, csv.str());
  out << rows << " rows written to " << spec.output.string() << "\n";
  return 0;
}

namespace {

double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (const char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string render_efficiency_svg(const std::vector<metrics::EfficiencyCurve>& curves,
                                  const metrics::NormalizationAnchor& anchor) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double width = 760, height = 460, left = 70, right = 200, top = 30, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double x_lo = INFINITY, x_hi = -INFINITY, y_hi = 0.0;
  for (const auto& c : curves) {
    for (const auto& p : c.points()) {
      x_lo = std::min(x_lo, p.tokens);
      x_hi = std::max(x_hi, p.tokens);
      y_hi = std::max(y_hi, metrics::normalized_efficiency(p.accuracy, p.tokens, anchor));
    }
  }
  if (!(x_hi > x_lo)) {
    x_lo = std::max(0.0, x_lo - 1.0);
    x_hi = x_lo + 2.0;
  }
  const double ystep = nice_step(y_hi > 0 ? y_hi : 1.0, 5);
  y_hi = std::ceil((y_hi > 0 ? y_hi : 1.0) / ystep) * ystep;
  const double xstep = nice_step(x_hi - x_lo, 6);
  auto X = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto Y = [&](double v) { return top + ph - v / y_hi * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double y = 0; y <= y_hi + 1e-9 * y_hi; y += ystep) {
    o << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << Y(y) << "\" y2=\"" << Y(y)
      << "\" stroke=\"#ddd\"/>\n<text x=\"" << left - 8 << "\" y=\"" << Y(y) + 4 << "\" text-anchor=\"end\">"
      << fixed(y, ystep < 1 ? 1 : 0) << "</text>\n";
  }
  for (double x = std::ceil(x_lo / xstep) * xstep; x <= x_hi + 1e-9 * x_hi; x += xstep) {
    o << "<line x1=\"" << X(x) << "\" x2=\"" << X(x) << "\" y1=\"" << top + ph << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"black\"/>\n<text x=\"" << X(x) << "\" y=\"" << top + ph + 20
      << "\" text-anchor=\"middle\">" << fixed(x, 0) << "</text>\n";
  }
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">tokens</text>\n"
    << "<text transform=\"translate(18," << top + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">normalized efficiency</text>\n";

  std::size_t i = 0;
  for (const auto& c : curves) {
    const char* color = kColors[i % (sizeof kColors / sizeof *kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : c.points()) {
      o << fixed(X(p.tokens), 2) << "," << fixed(Y(metrics::normalized_efficiency(p.accuracy, p.tokens, anchor)), 2)
        << " ";
    }
    o << "\"/>\n";
    for (const auto& p : c.points()) {
      o << "<circle r=\"3\" fill=\"" << color << "\" cx=\"" << fixed(X(p.tokens), 2) << "\" cy=\""
        << fixed(Y(metrics::normalized_efficiency(p.accuracy, p.tokens, anchor)), 2) << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(i);
    o << "<line x1=\"" << left + pw + 15 << "\" x2=\"" << left + pw + 40 << "\" y1=\"" << ly << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4
      << "\">" << xml_escape(c.method()) << "</text>\n";
    ++i;
  }
  o << "</svg>\n";
  return o.str();
}

int cmd_metrics(const Settings& settings, std::ostream& out) {
  const auto spec = metrics_spec(settings);
  std::vector<metrics::EfficiencyCurve> curves;
  for (const auto& path : spec.inputs) {
    std::vector<metrics::EfficiencyCurve> more;
    try {
      more = metrics::read_efficiency_curves(path);
    } catch (const Error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    for (auto& c : more) {
      const auto dup = std::find_if(curves.begin(), curves.end(), [&](const auto& k) { return k.method() == c.method(); });
      if (dup != curves.end()) throw ConfigError(path.string() + ": method '" + c.method() + "' appears in two files");
      curves.push_back(std::move(c));
    }
  }
  const auto cot = std::find_if(curves.begin(), curves.end(), [&](const auto& c) { return c.method() == spec.anchor_method; });
  if (cot == curves.end()) throw Error(Errc::NoAnchor, "no curve labelled '" + spec.anchor_method + "'");

  metrics::NormalizationAnchor anchor = metrics::anchor_from(*cot);
  if (spec.anchor_accuracy) anchor = {*spec.anchor_accuracy, *spec.anchor_tokens};
  if (anchor.cot_star_accuracy <= 0.0) throw Error(Errc::NoAnchor, "anchor accuracy is zero");

  std::ostringstream csv;
  csv << "row,method,tokens,accuracy,efficiency\n";
  out << "anchor: " << spec.anchor_method << " accuracy " << fixed(anchor.cot_star_accuracy, 4) << " at "
      << fixed(anchor.cot_star_tokens, 1) << " tokens\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-24s  %10s  %10s  %12s\n", "method", "peak E", "at tokens", "gain");
  out << line;
  std::ostringstream gains;
  for (const auto& c : curves) {
    double peak = -INFINITY, at = 0.0;
    for (const auto& p : c.points()) {
      const auto e = metrics::normalized_efficiency(p.accuracy, p.tokens, anchor);
      csv << "point," << c.method() << "," << p.tokens << "," << p.accuracy << "," << fixed(e, 9) << "\n";
      if (e > peak) {
        peak = e;
        at = p.tokens;
      }
    }
    std::string gain_text = "n/a";
    try {
      const auto g = metrics::avg_efficiency_gain(c, *cot, anchor);
      gains << "gain," << c.method() << ",,," << fixed(g, 9) << "\n";
      gain_text = (g >= 0 ? "+" : "") + fixed(100.0 * g, 2) + "%";
    } catch (const Error& e) {
      if (e.code() != Errc::NoOverlap) throw;
    }
    std::snprintf(line, sizeof line, "%-24s  %10.4f  %10.1f  %12s\n", c.method().c_str(), peak, at, gain_text.c_str());
    out << line;
  }
  csv << gains.str();
  write_text(spec.output, csv.str());
  write_text(spec.plot, render_efficiency_svg(curves, anchor));
  out << "csv: " << spec.output.string() << "\nplot: " << spec.plot.string() << "\n";
  return 0;
}

}  // namespace swir::cli
