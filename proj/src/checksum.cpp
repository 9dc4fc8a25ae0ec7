#include "clnp/checksum.hpp"

namespace clnp {

namespace {

std::uint8_t mod255(std::int64_t v) {
    std::int64_t r = v % 255;
    if (r < 0) r += 255;
    return static_cast<std::uint8_t>(r);
}

std::uint8_t nonzero(std::uint8_t residue) { return residue == 0 ? 255 : residue; }

struct FletcherSums {
    std::uint32_t c0 = 0;
    std::uint32_t c1 = 0;
};

FletcherSums sum_header(ByteView header, std::size_t skip_pos, bool skip_checksum) {
    FletcherSums s;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::uint8_t v = header[i];
        if (skip_checksum && (i == skip_pos || i == skip_pos + 1)) v = 0;
        s.c0 = (s.c0 + v) % 255;
        s.c1 = (s.c1 + s.c0) % 255;
    }
    return s;
}

}  // namespace

Result<ChecksumPair, ChecksumError> compute_checksum(ByteView header, std::size_t checksum_pos) {
    if (checksum_pos + 1 >= header.size()) return ChecksumError::HeaderTooShort;

    const FletcherSums s = sum_header(header, checksum_pos, true);
    // With the checksum octets at 1-based position n = checksum_pos+1, the
    // two mod-255 sums vanish for
    //   x = (L - n) * c0 - c1,  y = c1 - (L - n + 1) * c0.
    const std::int64_t k =
        static_cast<std::int64_t>(header.size()) - static_cast<std::int64_t>(checksum_pos) - 1;
    const std::uint8_t x = mod255(k * s.c0 - s.c1);
    const std::uint8_t y = mod255(static_cast<std::int64_t>(s.c1) - (k + 1) * s.c0);
    return ChecksumPair{nonzero(x), nonzero(y)};
}

Result<ChecksumVerdict, ChecksumError> verify_checksum(ByteView header, std::size_t checksum_pos) {
    if (checksum_pos + 1 >= header.size()) return ChecksumError::HeaderTooShort;
    if (header[checksum_pos] == 0 && header[checksum_pos + 1] == 0) {
        return ChecksumVerdict::NotUsed;
    }
    const FletcherSums s = sum_header(header, checksum_pos, false);
    return (s.c0 == 0 && s.c1 == 0) ? ChecksumVerdict::Valid : ChecksumVerdict::Invalid;
}

Result<ChecksumPair, ChecksumError> adjust_checksum(std::span<std::uint8_t> header,
                                                    std::size_t changed_pos,
                                                    std::uint8_t old_value,
                                                    std::uint8_t new_value,
                                                    std::size_t checksum_pos) {
    if (checksum_pos + 1 >= header.size()) return ChecksumError::HeaderTooShort;
    if (changed_pos >= header.size()) return ChecksumError::IndexOutOfRange;

    std::uint8_t& c0 = header[checksum_pos];
    std::uint8_t& c1 = header[checksum_pos + 1];
    if (c0 == 0 && c1 == 0) return ChecksumPair{0, 0};  // checksum not in use
    if (old_value == new_value) return ChecksumPair{c0, c1};

    // Residue shift of the changed octet; 1-based positions i (changed) and
    // n (first checksum octet) give
    //   x' = x + d * (i - n - 1),  y' = y + d * (n - i).
    const std::int64_t d = static_cast<std::int64_t>(new_value) - old_value;
    const std::int64_t i = static_cast<std::int64_t>(changed_pos) + 1;
    const std::int64_t n = static_cast<std::int64_t>(checksum_pos) + 1;
    const std::uint8_t x = mod255(static_cast<std::int64_t>(c0) + d * (i - n - 1));
    const std::uint8_t y = mod255(static_cast<std::int64_t>(c1) + d * (n - i));
    c0 = nonzero(x);
    c1 = nonzero(y);
    return ChecksumPair{c0, c1};
}

}  // namespace clnp
