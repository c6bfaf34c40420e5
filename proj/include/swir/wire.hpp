#pragma once

// Controller side of the stdio bridge protocol (see docs/wire.md).
//
// A frame is a 4-byte little-endian payload length followed by a CBOR map.
// Every map carries "kind"; Init and Ready also carry the version tag.
// Vectors travel as CBOR byte strings of little-endian float32 values.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swir/backend.hpp"

namespace swir::wire {

inline constexpr std::string_view kWireVersion = "swibridge/1";
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 30;

using Bytes = std::vector<std::uint8_t>;

struct Init {
  std::string model;
  std::string device;
  bool operator==(const Init&) const = default;
};
struct Step {
  // Embedding inputs are narrowed to float32 on the wire.
  std::variant<TokenId, std::vector<float>> input;
  bool operator==(const Step&) const = default;
};
struct Reset {
  bool operator==(const Reset&) const = default;
};
struct SpecialIdsRequest {
  bool operator==(const SpecialIdsRequest&) const = default;
};
struct EmbeddingRow {
  TokenId id = 0;
  bool operator==(const EmbeddingRow&) const = default;
};
using Request = std::variant<Init, Step, Reset, SpecialIdsRequest, EmbeddingRow>;

struct Ready {
  std::uint64_t dim = 0;
  std::uint64_t vocab = 0;
  bool operator==(const Ready&) const = default;
};
struct Logits {
  std::vector<float> values;
  bool operator==(const Logits&) const = default;
};
struct Row {
  std::vector<float> values;
  bool operator==(const Row&) const = default;
};
struct Special {
  SpecialIds ids;
  bool operator==(const Special&) const = default;
};
struct ErrorReply {
  std::string code;  // MODEL_LOAD, DIM_MISMATCH, PROTOCOL
  std::string text;
  bool operator==(const ErrorReply&) const = default;
};
using Response = std::variant<Ready, Logits, Row, Special, ErrorReply>;

Bytes encode(const Request& request);
Bytes encode(const Response& response);
/// Throw Error(Errc::Protocol) on malformed payloads.
Request decode_request(std::span<const std::uint8_t> payload);
Response decode_response(std::span<const std::uint8_t> payload);

/// Length-prefixed frame I/O over a pair of file descriptors.
class FrameChannel {
 public:
  FrameChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void write_frame(std::span<const std::uint8_t> payload) const;
  /// Returns false on clean EOF before a frame starts.
  bool read_frame(Bytes& payload) const;

 private:
  int read_fd_;
  int write_fd_;
};

}  // namespace swir::wire
