#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace modform {

inline constexpr std::string_view kToolVersion = "modform/0.1.0";

// Error taxonomy, mapped onto process exit codes by the CLI:
//   UsageError        -> 2 (bad arguments, contract violations at the surface)
//   ResourceError     -> 3 (configured limits exceeded, memory budget)
//   DataError         -> 3 (missing or malformed trace data)
//   VerificationError -> 1 (a certified claim failed to re-establish)
//   InternalError     -> 1 (integrality/negativity violations; indicates a bug)
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : Error {
  using Error::Error;
};
struct ResourceError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct VerificationError : Error {
  using Error::Error;
};
struct InternalError : Error {
  using Error::Error;
};

// 64-bit FNV-1a, streamed. Scan digests feed each dimension value as eight
// little-endian bytes, levels in ascending order.
struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;

  void add_byte(unsigned char b) {
    state ^= b;
    state *= 0x100000001b3ull;
  }
  void add_u64_le(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      add_byte(static_cast<unsigned char>(v & 0xff));
      v >>= 8;
    }
  }
};

std::string to_hex16(std::uint64_t v);
std::uint64_t from_hex16(const std::string& s);

}  // namespace modform
