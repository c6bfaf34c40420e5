#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "swir/metrics.hpp"

namespace swir::cli {

// Each command returns the process exit code; errors propagate as
// ConfigError or swir::Error and are mapped in main.

int cmd_run(const Settings& settings, std::ostream& out);

/// Checks a trace's recorded switch decisions. With `rerun`, decodes the
/// trace's prompt again under the trace's own config against the configured
/// backend and compares step by step.
int cmd_replay(const Settings& settings, const std::filesystem::path& trace, bool rerun, std::ostream& out);

int cmd_sweep(const Settings& settings, std::ostream& out);
int cmd_metrics(const Settings& settings, std::ostream& out);

/// Human-readable one-line-per-step listing.
std::string format_transcript(const Transcript& transcript, const SpecialIds& special);

/// Efficiency-vs-tokens line chart, one polyline per curve.
std::string render_efficiency_svg(const std::vector<metrics::EfficiencyCurve>& curves,
                                  const metrics::NormalizationAnchor& anchor);

struct Problem {
  std::vector<TokenId> prompt;
  std::vector<TokenId> expected;
};

/// `prompt ids | expected ids` per line; blank lines and `#` comments skipped.
std::vector<Problem> read_problems(const std::filesystem::path& path);

}  // namespace swir::cli
