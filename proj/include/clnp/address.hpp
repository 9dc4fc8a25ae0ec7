#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "clnp/bytes.hpp"

namespace clnp {

inline constexpr std::size_t kMaxNsapLength = 20;

/// NSAP address: an opaque byte string of 1..20 octets. Decoding keeps
/// whatever length the wire carried; header analysis rejects lengths
/// outside the valid range, and composition refuses to emit them.
class NsapAddress {
public:
    NsapAddress() = default;
    explicit NsapAddress(Bytes octets) : octets_(std::move(octets)) {}

    static std::optional<NsapAddress> from_hex(std::string_view text) {
        auto bytes = hex_decode(text);
        if (!bytes) return std::nullopt;
        return NsapAddress(std::move(*bytes));
    }

    const Bytes& octets() const { return octets_; }
    std::size_t size() const { return octets_.size(); }
    bool empty() const { return octets_.empty(); }
    bool wire_valid() const { return !octets_.empty() && octets_.size() <= kMaxNsapLength; }

    std::string to_hex() const { return hex_encode(octets_); }

    friend auto operator<=>(const NsapAddress&, const NsapAddress&) = default;

private:
    Bytes octets_;
};

}  // namespace clnp
