#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clnp {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Lowercase hex, no separators.
std::string hex_encode(ByteView data);

/// Decodes hex, skipping any whitespace. Returns nullopt on odd digit
/// count or non-hex characters.
std::optional<Bytes> hex_decode(std::string_view text);

std::string u8_hex(std::uint8_t v);

/// FNV-1a 64-bit digest, used for compact payload identities in traces.
std::uint64_t fnv1a64(ByteView data);
std::string digest_hex(ByteView data);

inline std::uint16_t read_be16(ByteView b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] << 8 | b[at + 1]);
}

inline void put_be16(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v & 0xFF);
}

inline void append_be16(Bytes& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

}  // namespace clnp
