#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "swir/backends.hpp"
#include "swir/decode.hpp"

namespace swir::cli {

// Bad or missing configuration; always exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BackendKind { Tiny, Scripted, Bridge };

struct BackendSpec {
  BackendKind kind = BackendKind::Tiny;
  TinyModelConfig tiny;
  std::filesystem::path script;
  std::string command;
  std::string model = "tiny";
  std::string device = "cpu";
};

struct RunOutputs {
  std::vector<TokenId> prompt;
  std::filesystem::path trace = "trace.jsonl";
  std::filesystem::path transcript = "transcript.txt";
  bool full_embeddings = false;
};

struct SweepSpec {
  std::vector<std::size_t> c_max;
  std::filesystem::path problems;
  std::string checker;
  int workers = 1;
  std::filesystem::path output = "sweep.csv";
  std::string method = "SwiR";
  bool stop_at_saturation = true;
};

struct MetricsSpec {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output = "metrics.csv";
  std::filesystem::path plot = "efficiency.svg";
  std::string anchor_method = "CoT";
  std::optional<double> anchor_accuracy;
  std::optional<double> anchor_tokens;
};

using Settings = boost::property_tree::ptree;

/// Reads an INI file (see docs/formats.md). Throws ConfigError with the
/// file and line on syntax errors.
Settings load_settings(const std::filesystem::path& path);

/// Applies a `section.key=value` override.
void apply_override(Settings& settings, const std::string& assignment);

BackendSpec backend_spec(const Settings& settings);
/// Decode configuration; budget marker ids default to the backend's
/// end-of-thinking ids when not configured.
DecodeConfig decode_config(const Settings& settings, const SpecialIds& special);
RunOutputs run_outputs(const Settings& settings);
SweepSpec sweep_spec(const Settings& settings);
MetricsSpec metrics_spec(const Settings& settings);

std::vector<TokenId> parse_ids(const std::string& text, const std::string& field);

/// Builds a fresh backend instance for one decode sequence.
class BackendFactory {
 public:
  explicit BackendFactory(BackendSpec spec);
  std::unique_ptr<Backend> make() const;
  const BackendSpec& spec() const noexcept { return spec_; }

 private:
  BackendSpec spec_;
  std::shared_ptr<const ScriptedBackend> script_;
};

}  // namespace swir::cli
