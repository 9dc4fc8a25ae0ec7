#include "clnp/frame.hpp"

namespace clnp {

std::string mac_to_string(const Mac& mac) {
    std::string out;
    for (std::size_t i = 0; i < mac.size(); ++i) {
        if (i) out += ':';
        out += u8_hex(mac[i]);
    }
    return out;
}

Bytes Frame::encode() const {
    Bytes out;
    out.reserve(14 + kLlcHeader.size() + body.size());
    out.insert(out.end(), dst_mac.begin(), dst_mac.end());
    out.insert(out.end(), src_mac.begin(), src_mac.end());
    append_be16(out, length_field());
    out.insert(out.end(), kLlcHeader.begin(), kLlcHeader.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::optional<Frame> Frame::decode(ByteView raw) {
    if (raw.size() < 14 + kLlcHeader.size()) return std::nullopt;
    Frame f;
    std::copy(raw.begin(), raw.begin() + 6, f.dst_mac.begin());
    std::copy(raw.begin() + 6, raw.begin() + 12, f.src_mac.begin());
    const std::uint16_t length = read_be16(raw, 12);
    if (length < kLlcHeader.size()) return std::nullopt;
    if (raw.size() < 14u + length) return std::nullopt;
    for (std::size_t i = 0; i < kLlcHeader.size(); ++i) {
        if (raw[14 + i] != kLlcHeader[i]) return std::nullopt;
    }
    f.body.assign(raw.begin() + 14 + kLlcHeader.size(), raw.begin() + 14 + length);
    return f;
}

}  // namespace clnp
