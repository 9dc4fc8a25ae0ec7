#pragma once

#include <cstddef>
#include <optional>

#include "clnp/bytes.hpp"
#include "clnp/pdu.hpp"
#include "clnp/result.hpp"

namespace clnp {

enum class ParseErrorKind {
    TruncatedHeader,   // input shorter than the header claims
    TruncatedPdu,      // input shorter than segment_length
    BadNlpid,          // first octet is neither 0x81 nor 0x00
    MalformedOptions,  // an option runs past the header end
};

struct ParseError {
    ParseErrorKind kind;
    std::size_t at;  // byte offset the parser was looking at
};

struct AnalysisError {
    ReasonForDiscard reason;
};

enum class ComposeError { InvariantViolation };

/// Decodes one PDU from the start of `raw`. Octets beyond segment_length
/// are ignored (link padding). A leading 0x00 octet yields an inactive
/// PDU whose payload is everything after it. Never reads out of bounds.
Result<Pdu, ParseError> parse_pdu(ByteView raw);

/// Encodes exactly header_length octets. The stored checksum octets are
/// emitted as-is; composition does not compute them.
Result<Bytes, ComposeError> compose_header(const ClnpHeader& header);

/// Header followed by payload; validates payload length against
/// segment_length.
Result<Bytes, ComposeError> encode_pdu(const Pdu& pdu);

/// Header format analysis. Returns the first violated rule with the
/// offending octet index, or nullopt when the header is well formed.
/// Inactive PDUs are exempt from analysis.
std::optional<AnalysisError> analyze_header(const Pdu& pdu);

/// The unique option with this code, or nullptr.
const OptionParam* find_option(const ClnpHeader& header, std::uint8_t code);

}  // namespace clnp
