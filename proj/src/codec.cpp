#include "clnp/codec.hpp"

#include <algorithm>

namespace clnp {

std::string to_string(const PduType& type) {
    switch (type.kind) {
        case PduType::Kind::Data: return "DT";
        case PduType::Kind::ErrorReport: return "ER";
        case PduType::Kind::Inactive: return "INACTIVE";
        case PduType::Kind::Unknown: return "UNKNOWN(" + u8_hex(type.code) + ")";
    }
    return "?";
}

std::size_t expected_header_length(const ClnpHeader& h) {
    if (h.is_inactive()) return 1;
    std::size_t n = kFixedPartLength + 1 + h.dest.size() + 1 + h.src.size();
    if (h.seg) n += 6;
    for (const auto& opt : h.options) n += 2 + opt.value.size();
    return n;
}

std::size_t segmentation_part_offset(const ClnpHeader& h) {
    return kFixedPartLength + 1 + h.dest.size() + 1 + h.src.size();
}

std::size_t options_offset(const ClnpHeader& h) {
    return segmentation_part_offset(h) + (h.seg ? 6 : 0);
}

std::optional<std::size_t> option_offset(const ClnpHeader& h, std::uint8_t code) {
    std::size_t pos = options_offset(h);
    for (const auto& opt : h.options) {
        if (opt.code == code) return pos;
        pos += 2 + opt.value.size();
    }
    return std::nullopt;
}

const OptionParam* find_option(const ClnpHeader& header, std::uint8_t code) {
    for (const auto& opt : header.options) {
        if (opt.code == code) return &opt;
    }
    return nullptr;
}

Result<Pdu, ParseError> parse_pdu(ByteView raw) {
    if (raw.empty()) return ParseError{ParseErrorKind::TruncatedHeader, 0};

    if (raw[0] == kNlpidInactive) {
        Pdu pdu;
        ClnpHeader& h = pdu.header;
        h.nlpid = kNlpidInactive;
        h.header_length = 1;
        h.version = 0;
        h.type = PduType::inactive();
        h.segment_length = static_cast<std::uint16_t>(std::min<std::size_t>(raw.size(), 0xFFFF));
        pdu.payload.assign(raw.begin() + 1, raw.begin() + h.segment_length);
        return pdu;
    }
    if (raw[0] != kNlpidClnp) return ParseError{ParseErrorKind::BadNlpid, 0};
    if (raw.size() < kFixedPartLength) return ParseError{ParseErrorKind::TruncatedHeader, raw.size()};

    const std::uint8_t hlen = raw[1];
    if (hlen < kFixedPartLength) return ParseError{ParseErrorKind::TruncatedHeader, 1};
    if (raw.size() < hlen) return ParseError{ParseErrorKind::TruncatedHeader, raw.size()};

    Pdu pdu;
    ClnpHeader& h = pdu.header;
    h.nlpid = raw[0];
    h.header_length = hlen;
    h.version = raw[2];
    h.lifetime = raw[3];
    const std::uint8_t flags_type = raw[4];
    h.flags.sp = (flags_type & 0x80) != 0;
    h.flags.ms = (flags_type & 0x40) != 0;
    h.flags.er = (flags_type & 0x20) != 0;
    h.type = PduType::from_code(flags_type & 0x1F);
    h.segment_length = read_be16(raw, kSegmentLengthPos);
    h.checksum_c0 = raw[kChecksumPos];
    h.checksum_c1 = raw[kChecksumPos + 1];

    std::size_t pos = kFixedPartLength;
    auto read_address = [&](NsapAddress& out) -> std::optional<ParseError> {
        if (pos >= hlen) return ParseError{ParseErrorKind::TruncatedHeader, pos};
        const std::uint8_t alen = raw[pos];
        ++pos;
        if (pos + alen > hlen) return ParseError{ParseErrorKind::TruncatedHeader, pos};
        out = NsapAddress(Bytes(raw.begin() + pos, raw.begin() + pos + alen));
        pos += alen;
        return std::nullopt;
    };
    if (auto err = read_address(h.dest)) return *err;
    if (auto err = read_address(h.src)) return *err;

    if (h.flags.sp) {
        if (pos + 6 > hlen) return ParseError{ParseErrorKind::TruncatedHeader, pos};
        SegmentationPart seg;
        seg.data_unit_id = read_be16(raw, pos);
        seg.segment_offset = read_be16(raw, pos + 2);
        seg.total_length = read_be16(raw, pos + 4);
        h.seg = seg;
        pos += 6;
    }

    while (pos < hlen) {
        if (pos + 2 > hlen) return ParseError{ParseErrorKind::MalformedOptions, pos};
        OptionParam opt;
        opt.code = raw[pos];
        const std::uint8_t vlen = raw[pos + 1];
        if (pos + 2 + vlen > hlen) return ParseError{ParseErrorKind::MalformedOptions, pos};
        opt.value.assign(raw.begin() + pos + 2, raw.begin() + pos + 2 + vlen);
        h.options.push_back(std::move(opt));
        pos += 2 + vlen;
    }

    if (h.segment_length < hlen) return ParseError{ParseErrorKind::TruncatedPdu, kSegmentLengthPos};
    if (raw.size() < h.segment_length) {
        return ParseError{ParseErrorKind::TruncatedPdu, raw.size()};
    }
    pdu.payload.assign(raw.begin() + hlen, raw.begin() + h.segment_length);
    return pdu;
}

Result<Bytes, ComposeError> compose_header(const ClnpHeader& h) {
    if (h.is_inactive()) {
        // The whole header is the one NLPID octet; anything else set on
        // the struct would be silently lost, so refuse it.
        if (h.header_length != 1 || h.seg || !h.options.empty() || !h.dest.empty() ||
            !h.src.empty() || h.flags != Flags{} || h.checksum_in_use()) {
            return ComposeError::InvariantViolation;
        }
        return Bytes{kNlpidInactive};
    }

    if (h.nlpid != kNlpidClnp) return ComposeError::InvariantViolation;
    if (h.version != kProtocolVersion) return ComposeError::InvariantViolation;
    if (!h.dest.wire_valid() || !h.src.wire_valid()) return ComposeError::InvariantViolation;
    if (h.flags.ms && !h.flags.sp) return ComposeError::InvariantViolation;
    if (h.flags.sp != h.seg.has_value()) return ComposeError::InvariantViolation;
    if (h.seg && h.seg->segment_offset % 8 != 0) return ComposeError::InvariantViolation;
    if (h.type.is_inactive() || h.type.code > 0x1F) return ComposeError::InvariantViolation;
    for (std::size_t i = 0; i < h.options.size(); ++i) {
        if (h.options[i].value.size() > 252) return ComposeError::InvariantViolation;
        for (std::size_t j = 0; j < i; ++j) {
            if (h.options[i].code == h.options[j].code) return ComposeError::InvariantViolation;
        }
    }

    const std::size_t hlen = expected_header_length(h);
    if (hlen > kMaxHeaderLength) return ComposeError::InvariantViolation;
    if (h.header_length != hlen) return ComposeError::InvariantViolation;
    if (h.segment_length < hlen) return ComposeError::InvariantViolation;

    Bytes out;
    out.reserve(hlen);
    out.push_back(h.nlpid);
    out.push_back(h.header_length);
    out.push_back(h.version);
    out.push_back(h.lifetime);
    out.push_back(static_cast<std::uint8_t>((h.flags.sp ? 0x80 : 0) | (h.flags.ms ? 0x40 : 0) |
                                            (h.flags.er ? 0x20 : 0) | h.type.code));
    append_be16(out, h.segment_length);
    out.push_back(h.checksum_c0);
    out.push_back(h.checksum_c1);
    out.push_back(static_cast<std::uint8_t>(h.dest.size()));
    out.insert(out.end(), h.dest.octets().begin(), h.dest.octets().end());
    out.push_back(static_cast<std::uint8_t>(h.src.size()));
    out.insert(out.end(), h.src.octets().begin(), h.src.octets().end());
    if (h.seg) {
        append_be16(out, h.seg->data_unit_id);
        append_be16(out, h.seg->segment_offset);
        append_be16(out, h.seg->total_length);
    }
    for (const auto& opt : h.options) {
        out.push_back(opt.code);
        out.push_back(static_cast<std::uint8_t>(opt.value.size()));
        out.insert(out.end(), opt.value.begin(), opt.value.end());
    }
    return out;
}

Result<Bytes, ComposeError> encode_pdu(const Pdu& pdu) {
    auto header = compose_header(pdu.header);
    if (!header.ok()) return header.error();
    Bytes out = std::move(header).value();
    if (out.size() + pdu.payload.size() != pdu.header.segment_length) {
        return ComposeError::InvariantViolation;
    }
    out.insert(out.end(), pdu.payload.begin(), pdu.payload.end());
    return out;
}

std::optional<AnalysisError> analyze_header(const Pdu& pdu) {
    const ClnpHeader& h = pdu.header;
    if (h.is_inactive()) return std::nullopt;

    auto syntax = [](std::size_t octet) {
        return AnalysisError{ReasonForDiscard::header_syntax(static_cast<std::uint8_t>(octet))};
    };

    if (h.nlpid != kNlpidClnp) return syntax(0);
    const std::size_t expected = expected_header_length(h);
    if (h.header_length != expected || expected > kMaxHeaderLength) return syntax(1);
    if (h.version != kProtocolVersion) return syntax(2);
    if (h.flags.ms && !h.flags.sp) return syntax(kFlagsTypePos);
    if (h.flags.sp != h.seg.has_value()) return syntax(kFlagsTypePos);
    if (h.segment_length < h.header_length) return syntax(kSegmentLengthPos);
    if (!h.dest.wire_valid()) return syntax(kFixedPartLength);
    if (!h.src.wire_valid()) return syntax(kFixedPartLength + 1 + h.dest.size());
    if (h.seg && h.seg->segment_offset % 8 != 0) {
        return syntax(segmentation_part_offset(h) + 2);
    }

    std::size_t pos = options_offset(h);
    for (std::size_t i = 0; i < h.options.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (h.options[i].code == h.options[j].code) return syntax(pos);
        }
        pos += 2 + h.options[i].value.size();
    }
    return std::nullopt;
}

}  // namespace clnp
