#include "clnp/bytes.hpp"

#include <cctype>

namespace clnp {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string hex_encode(ByteView data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0F]);
    }
    return out;
}

std::optional<Bytes> hex_decode(std::string_view text) {
    Bytes out;
    out.reserve(text.size() / 2);
    int hi = -1;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        int v = hex_value(c);
        if (v < 0) return std::nullopt;
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<std::uint8_t>(hi << 4 | v));
            hi = -1;
        }
    }
    if (hi >= 0) return std::nullopt;  // dangling nibble
    return out;
}

std::string u8_hex(std::uint8_t v) {
    return {kHexDigits[v >> 4], kHexDigits[v & 0x0F]};
}

std::uint64_t fnv1a64(ByteView data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint8_t b : data) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string digest_hex(ByteView data) {
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHexDigits[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace clnp
