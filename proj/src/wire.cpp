#include "swir/wire.hpp"

#include <cerrno>
#include <cstring>

#include <unistd.h>

#include "json.hpp"

#include "swir/error.hpp"

namespace swir::wire {

using nlohmann::json;

namespace {

json floats_to_binary(const std::vector<float>& values) {
  std::vector<std::uint8_t> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &values[i], 4);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return json::binary(std::move(bytes));
}

std::vector<float> binary_to_floats(const json& j) {
  if (!j.is_binary()) throw Error(Errc::Protocol, "expected a float32 byte string");
  const auto& bytes = j.get_binary();
  if (bytes.size() % 4 != 0) throw Error(Errc::Protocol, "float32 byte string length not a multiple of 4");
  std::vector<float> values(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    std::memcpy(&values[i], &bits, 4);
  }
  return values;
}

Bytes to_bytes(const json& j) { return json::to_cbor(j); }

json from_bytes(std::span<const std::uint8_t> payload) {
  try {
    json j = json::from_cbor(payload.begin(), payload.end());
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
      throw Error(Errc::Protocol, "payload is not a map with a 'kind' string");
    }
    return j;
  } catch (const json::exception& e) {
    throw Error(Errc::Protocol, std::string("malformed payload: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::Protocol, std::string("field '") + name + "': " + e.what());
  }
}

void check_version(const json& j) {
  if (field<std::string>(j, "v") != kWireVersion) {
    throw Error(Errc::Protocol, "unsupported protocol version '" + field<std::string>(j, "v") + "'");
  }
}

}  // namespace

Bytes encode(const Request& request) {
  return std::visit(
      [](const auto& r) -> Bytes {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Init>) {
          return to_bytes({{"kind", "init"}, {"v", kWireVersion}, {"model", r.model}, {"device", r.device}});
        } else if constexpr (std::is_same_v<T, Step>) {
          if (const auto* id = std::get_if<TokenId>(&r.input)) return to_bytes({{"kind", "step"}, {"token", *id}});
          return to_bytes({{"kind", "step"}, {"embedding", floats_to_binary(std::get<std::vector<float>>(r.input))}});
        } else if constexpr (std::is_same_v<T, Reset>) {
          return to_bytes({{"kind", "reset"}});
        } else if constexpr (std::is_same_v<T, SpecialIdsRequest>) {
          return to_bytes({{"kind", "special_ids"}});
        } else {
          return to_bytes({{"kind", "embedding_row"}, {"id", r.id}});
        }
      },
      request);
}

Bytes encode(const Response& response) {
  return std::visit(
      [](const auto& r) -> Bytes {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Ready>) {
          return to_bytes({{"kind", "ready"}, {"v", kWireVersion}, {"d", r.dim}, {"vocab", r.vocab}});
        } else if constexpr (std::is_same_v<T, Logits>) {
          return to_bytes({{"kind", "logits"}, {"data", floats_to_binary(r.values)}});
        } else if constexpr (std::is_same_v<T, Row>) {
          return to_bytes({{"kind", "row"}, {"data", floats_to_binary(r.values)}});
        } else if constexpr (std::is_same_v<T, Special>) {
          return to_bytes({{"kind", "special_ids"},
                           {"eos", r.ids.eos},
                           {"think_begin", r.ids.think_begin},
                           {"think_end", r.ids.think_end}});
        } else {
          return to_bytes({{"kind", "error"}, {"code", r.code}, {"text", r.text}});
        }
      },
      response);
}

Request decode_request(std::span<const std::uint8_t> payload) {
  const json j = from_bytes(payload);
  const auto kind = j["kind"].get<std::string>();
  if (kind == "init") {
    check_version(j);
    return Init{field<std::string>(j, "model"), field<std::string>(j, "device")};
  }
  if (kind == "step") {
    if (j.contains("token")) return Step{field<TokenId>(j, "token")};
    if (j.contains("embedding")) return Step{binary_to_floats(j["embedding"])};
    throw Error(Errc::Protocol, "step carries neither token nor embedding");
  }
  if (kind == "reset") return Reset{};
  if (kind == "special_ids") return SpecialIdsRequest{};
  if (kind == "embedding_row") return EmbeddingRow{field<TokenId>(j, "id")};
  throw Error(Errc::Protocol, "unknown request kind '" + kind + "'");
}

Response decode_response(std::span<const std::uint8_t> payload) {
  const json j = from_bytes(payload);
  const auto kind = j["kind"].get<std::string>();
  if (kind == "ready") {
    check_version(j);
    return Ready{field<std::uint64_t>(j, "d"), field<std::uint64_t>(j, "vocab")};
  }
  if (kind == "logits") return Logits{binary_to_floats(j.at("data"))};
  if (kind == "row") return Row{binary_to_floats(j.at("data"))};
  if (kind == "special_ids") {
    return Special{SpecialIds{field<TokenId>(j, "eos"), field<std::vector<TokenId>>(j, "think_begin"),
                              field<std::vector<TokenId>>(j, "think_end")}};
  }
  if (kind == "error") return ErrorReply{field<std::string>(j, "code"), field<std::string>(j, "text")};
  throw Error(Errc::Protocol, "unknown response kind '" + kind + "'");
}

namespace {

void write_all(int fd, const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::Protocol, std::string("write failed: ") + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

// Returns bytes read; short only at EOF.
std::size_t read_all(int fd, std::uint8_t* data, std::size_t size) {
  std::size_t got = 0;
  while (got < size) {
    const ssize_t n = ::read(fd, data + got, size - got);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::Protocol, std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) break;
    got += static_cast<std::size_t>(n);
  }
  return got;
}

}  // namespace

void FrameChannel::write_frame(std::span<const std::uint8_t> payload) const {
  if (payload.size() > kMaxFrameBytes) throw Error(Errc::Protocol, "frame too large");
  const auto len = static_cast<std::uint32_t>(payload.size());
  const std::uint8_t header[4] = {static_cast<std::uint8_t>(len), static_cast<std::uint8_t>(len >> 8),
                                  static_cast<std::uint8_t>(len >> 16), static_cast<std::uint8_t>(len >> 24)};
  write_all(write_fd_, header, 4);
  write_all(write_fd_, payload.data(), payload.size());
}

bool FrameChannel::read_frame(Bytes& payload) const {
  std::uint8_t header[4];
  const std::size_t got = read_all(read_fd_, header, 4);
  if (got == 0) return false;
  if (got < 4) throw Error(Errc::Protocol, "truncated frame header");
  const std::uint32_t len = static_cast<std::uint32_t>(header[0]) | (static_cast<std::uint32_t>(header[1]) << 8) |
                            (static_cast<std::uint32_t>(header[2]) << 16) |
                            (static_cast<std::uint32_t>(header[3]) << 24);
  if (len > kMaxFrameBytes) throw Error(Errc::Protocol, "frame length exceeds limit");
  payload.resize(len);
  if (read_all(read_fd_, payload.data(), len) < len) throw Error(Errc::Protocol, "truncated frame payload");
  return true;
}

}  // namespace swir::wire
