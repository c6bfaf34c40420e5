#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "swir/decode.hpp"

namespace swir {

inline constexpr std::string_view kTraceVersion = "switrace/1";

struct TraceOptions {
  // Store every fed embedding in full instead of only its digest.
  bool full_embeddings = false;
};

/// A decoded trace: the transcript plus the configuration that produced it.
struct Trace {
  DecodeConfig config;
  SpecialIds special;
  Transcript transcript;
};

/// Serializes a finished transcript as line-delimited JSON: one header line
/// (format tag, config snapshot, summary) followed by one line per step.
std::string record(const Transcript& transcript, const DecodeConfig& config, const SpecialIds& special,
                   const TraceOptions& options = {});

/// Parses bytes produced by `record`. Throws VersionMismatch for an unknown
/// format tag and a LineError with Errc::CorruptLine naming the first bad
/// line. Unknown fields are ignored.
Trace replay(std::string_view bytes);

void write_trace_file(const std::filesystem::path& path, const Transcript& transcript,
                      const DecodeConfig& config, const SpecialIds& special,
                      const TraceOptions& options = {});
Trace read_trace_file(const std::filesystem::path& path);

struct ReplayCheck {
  bool ok = true;
  std::optional<std::size_t> first_mismatch;  // step index
  std::string detail;
};

/// Re-runs the switch machine over the recorded entropies and compares the
/// resulting modes, transitions and switch count with the recording.
ReplayCheck verify_decisions(const Transcript& transcript, const SwitchConfig& config);

}  // namespace swir
