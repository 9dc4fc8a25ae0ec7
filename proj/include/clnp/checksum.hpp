#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "clnp/bytes.hpp"
#include "clnp/result.hpp"

namespace clnp {

enum class ChecksumVerdict { Valid, Invalid, NotUsed };

enum class ChecksumError { HeaderTooShort, IndexOutOfRange };

using ChecksumPair = std::pair<std::uint8_t, std::uint8_t>;

/// Computes the header checksum octets. The two octets at `checksum_pos`
/// are treated as zero during summation; neither returned octet is zero
/// (255 substitutes for a zero residue).
Result<ChecksumPair, ChecksumError> compute_checksum(ByteView header, std::size_t checksum_pos);

/// NotUsed when both stored octets are zero, Valid when both mod-255 sums
/// vanish, Invalid otherwise.
Result<ChecksumVerdict, ChecksumError> verify_checksum(ByteView header, std::size_t checksum_pos);

/// Incremental update after header[changed_pos] went from `old_value` to
/// `new_value` (the buffer already holds the new value). Rewrites the
/// checksum octets in place and returns them; a not-in-use checksum stays
/// zero. Equivalent to a full recomputation over the modified header.
Result<ChecksumPair, ChecksumError> adjust_checksum(std::span<std::uint8_t> header,
                                                    std::size_t changed_pos,
                                                    std::uint8_t old_value,
                                                    std::uint8_t new_value,
                                                    std::size_t checksum_pos);

}  // namespace clnp
