#include <algorithm>
#include <random>
#include <unistd.h>
#include <vector>

#include <doctest.h>

#include "json.hpp"
#include "swir/error.hpp"
#include "swir/wire.hpp"
#include "wire_gen.hpp"

using namespace swir;
using namespace swir::wire;

TEST_CASE("codec round trips randomized messages") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10000; ++i) {
    const auto req = wire_gen::random_request(rng);
    const auto bytes = encode(req);
    REQUIRE(decode_request(bytes) == req);
    REQUIRE(encode(decode_request(bytes)) == bytes);
    const auto resp = wire_gen::random_response(rng);
    REQUIRE(decode_response(encode(resp)) == resp);
  }
}

TEST_CASE("float payloads are little-endian float32") {
  const auto bytes = encode(Response{Logits{{1.0f, -2.0f}}});
  // 1.0f = 0x3f800000, -2.0f = 0xc0000000
  const std::vector<std::uint8_t> one{0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
  CHECK(std::search(bytes.begin(), bytes.end(), one.begin(), one.end()) != bytes.end());
}

TEST_CASE("malformed payloads are protocol errors") {
  auto expect_protocol = [](auto&& fn) {
    try {
      fn();
      FAIL("expected a protocol error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Protocol);
    }
  };
  const std::vector<std::uint8_t> garbage{0xff, 0x00, 0x13};
  expect_protocol([&] { decode_request(garbage); });
  expect_protocol([&] { decode_response(garbage); });
  // a CBOR array instead of a map
  expect_protocol([&] { decode_request(std::vector<std::uint8_t>{0x81, 0x01}); });

  auto bad_version = encode(Request{Init{"m", "cpu"}});
  const std::string tag = "swibridge/1";
  auto at = std::search(bad_version.begin(), bad_version.end(), tag.begin(), tag.end());
  REQUIRE(at != bad_version.end());
  *(at + 10) = '9';
  expect_protocol([&] { decode_request(bad_version); });

  // five bytes cannot be float32s
  const auto odd = nlohmann::json::to_cbor({{"kind", "row"}, {"data", nlohmann::json::binary({1, 2, 3, 4, 5})}});
  expect_protocol([&] { decode_response(odd); });
  const auto missing = nlohmann::json::to_cbor({{"kind", "embedding_row"}});
  expect_protocol([&] { decode_request(missing); });
  expect_protocol([&] { decode_request(encode(Response{Ready{1, 2}})); });
  expect_protocol([&] { decode_response(encode(Request{Reset{}})); });
}

TEST_CASE("frames over a pipe") {
  int fds[2];
  REQUIRE(::pipe(fds) == 0);
  const FrameChannel writer(-1, fds[1]);
  const FrameChannel reader(fds[0], -1);
  const auto payload = encode(Request{EmbeddingRow{12}});
  writer.write_frame(payload);
  writer.write_frame({});
  Bytes got;
  REQUIRE(reader.read_frame(got));
  CHECK(got == payload);
  REQUIRE(reader.read_frame(got));
  CHECK(got.empty());

  const std::uint8_t partial[2] = {5, 0};
  REQUIRE(::write(fds[1], partial, 2) == 2);
  ::close(fds[1]);
  CHECK_THROWS_AS(reader.read_frame(got), Error);
  ::close(fds[0]);

  REQUIRE(::pipe(fds) == 0);
  ::close(fds[1]);
  CHECK_FALSE(FrameChannel(fds[0], -1).read_frame(got));
  ::close(fds[0]);
}
