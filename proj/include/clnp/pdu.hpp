#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clnp/address.hpp"
#include "clnp/bytes.hpp"

namespace clnp {

inline constexpr std::uint8_t kNlpidClnp = 0x81;
inline constexpr std::uint8_t kNlpidInactive = 0x00;
inline constexpr std::uint8_t kProtocolVersion = 0x01;

inline constexpr std::size_t kFixedPartLength = 9;
inline constexpr std::size_t kMaxHeaderLength = 254;
inline constexpr std::size_t kLifetimePos = 3;
inline constexpr std::size_t kFlagsTypePos = 4;
inline constexpr std::size_t kSegmentLengthPos = 5;
inline constexpr std::size_t kChecksumPos = 7;

// Option parameter codes.
inline constexpr std::uint8_t kOptReasonForDiscard = 0xC1;
inline constexpr std::uint8_t kOptQosMaintenance = 0xC3;
inline constexpr std::uint8_t kOptSourceRouting = 0xC8;
inline constexpr std::uint8_t kOptPadding = 0xCC;

/// QoS maintenance option: globally-unique format marker (top two bits of
/// the first value octet) and the congestion-experienced bit in the last
/// value octet.
inline constexpr std::uint8_t kQosGlobalFormatMask = 0xC0;
inline constexpr std::uint8_t kQosCongestionBit = 0x08;

struct PduType {
    enum class Kind : std::uint8_t { Data, ErrorReport, Inactive, Unknown };

    static constexpr std::uint8_t kDataCode = 0x1C;         // 0b11100
    static constexpr std::uint8_t kErrorReportCode = 0x01;  // 0b00001

    Kind kind = Kind::Data;
    std::uint8_t code = kDataCode;  // raw 5-bit type code; 0 for inactive

    static PduType data() { return {Kind::Data, kDataCode}; }
    static PduType error_report() { return {Kind::ErrorReport, kErrorReportCode}; }
    static PduType inactive() { return {Kind::Inactive, 0}; }

    /// Maps a 5-bit wire code; anything unrecognized stays Unknown(code).
    static PduType from_code(std::uint8_t code) {
        code &= 0x1F;
        if (code == kDataCode) return data();
        if (code == kErrorReportCode) return error_report();
        return {Kind::Unknown, code};
    }

    bool is_data() const { return kind == Kind::Data; }
    bool is_error_report() const { return kind == Kind::ErrorReport; }
    bool is_inactive() const { return kind == Kind::Inactive; }

    friend bool operator==(const PduType&, const PduType&) = default;
};

std::string to_string(const PduType& type);

struct Flags {
    bool sp = false;  // segmentation permitted
    bool ms = false;  // more segments
    bool er = false;  // error report requested

    friend bool operator==(const Flags&, const Flags&) = default;
};

struct SegmentationPart {
    std::uint16_t data_unit_id = 0;
    std::uint16_t segment_offset = 0;  // octets into the initial PDU's data
    std::uint16_t total_length = 0;    // initial PDU length including header

    friend bool operator==(const SegmentationPart&, const SegmentationPart&) = default;
};

struct OptionParam {
    std::uint8_t code = 0;
    Bytes value;

    friend bool operator==(const OptionParam&, const OptionParam&) = default;
};

struct ClnpHeader {
    std::uint8_t nlpid = kNlpidClnp;
    std::uint8_t header_length = 0;
    std::uint8_t version = kProtocolVersion;
    std::uint8_t lifetime = 0;  // units of 500 ms
    Flags flags;
    PduType type = PduType::data();
    std::uint16_t segment_length = 0;  // total octets of this PDU
    std::uint8_t checksum_c0 = 0;
    std::uint8_t checksum_c1 = 0;
    NsapAddress dest;
    NsapAddress src;
    std::optional<SegmentationPart> seg;
    std::vector<OptionParam> options;

    bool is_inactive() const { return nlpid == kNlpidInactive; }
    bool checksum_in_use() const { return checksum_c0 != 0 || checksum_c1 != 0; }

    friend bool operator==(const ClnpHeader&, const ClnpHeader&) = default;
};

/// Header length implied by the variable parts, in octets.
std::size_t expected_header_length(const ClnpHeader& h);

/// Offset of the segmentation part within the encoded header.
std::size_t segmentation_part_offset(const ClnpHeader& h);

/// Offset of the first option within the encoded header.
std::size_t options_offset(const ClnpHeader& h);

/// Offset of the code octet of the option with `code`, if present.
std::optional<std::size_t> option_offset(const ClnpHeader& h, std::uint8_t code);

struct Pdu {
    ClnpHeader header;
    Bytes payload;

    friend bool operator==(const Pdu&, const Pdu&) = default;
};

// Reason-for-discard class codes carried in the 0xC1 option.
namespace reason {
inline constexpr std::uint8_t kNotSpecified = 0x00;
inline constexpr std::uint8_t kBadChecksum = 0x02;
inline constexpr std::uint8_t kCongestion = 0x03;
inline constexpr std::uint8_t kHeaderSyntaxBase = 0x80;  // + offending octet
inline constexpr std::uint8_t kSegmentationNotPermitted = 0x90;
inline constexpr std::uint8_t kIncompletePdu = 0xA0;  // reassembly timeout
inline constexpr std::uint8_t kDestinationUnreachable = 0xC0;
inline constexpr std::uint8_t kDestinationUnknown = 0xC1;
inline constexpr std::uint8_t kSourceRouteSyntax = 0xD1;
inline constexpr std::uint8_t kSourceRouteUnknownAddress = 0xD2;
inline constexpr std::uint8_t kLifetimeExpired = 0xE0;
inline constexpr std::uint8_t kReassemblyLifetimeExpired = 0xE1;
}  // namespace reason

struct ReasonForDiscard {
    std::uint8_t class_code = reason::kNotSpecified;
    std::uint8_t offending_octet = 0;  // index into the discarded header; 0 = n/a

    static ReasonForDiscard not_specified() { return {reason::kNotSpecified, 0}; }
    static ReasonForDiscard bad_checksum() {
        return {reason::kBadChecksum, static_cast<std::uint8_t>(kChecksumPos)};
    }
    static ReasonForDiscard congestion() { return {reason::kCongestion, 0}; }
    static ReasonForDiscard header_syntax(std::uint8_t octet) {
        return {static_cast<std::uint8_t>(reason::kHeaderSyntaxBase + octet), octet};
    }
    static ReasonForDiscard segmentation_not_permitted() {
        return {reason::kSegmentationNotPermitted, 0};
    }
    static ReasonForDiscard incomplete_pdu() { return {reason::kIncompletePdu, 0}; }
    static ReasonForDiscard destination_unreachable() {
        return {reason::kDestinationUnreachable, 0};
    }
    static ReasonForDiscard destination_unknown() { return {reason::kDestinationUnknown, 0}; }
    static ReasonForDiscard source_route_syntax() { return {reason::kSourceRouteSyntax, 0}; }
    static ReasonForDiscard source_route_unknown_address() {
        return {reason::kSourceRouteUnknownAddress, 0};
    }
    static ReasonForDiscard lifetime_expired() { return {reason::kLifetimeExpired, 0}; }
    static ReasonForDiscard reassembly_lifetime_expired() {
        return {reason::kReassemblyLifetimeExpired, 0};
    }

    friend bool operator==(const ReasonForDiscard&, const ReasonForDiscard&) = default;
};

/// Per-node data unit identifier source; wraps after 2^16 values.
class DataUnitIdCounter {
public:
    std::uint16_t next() { return next_++; }

private:
    std::uint16_t next_ = 0;
};

}  // namespace clnp
