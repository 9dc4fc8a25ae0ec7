#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clnp/bytes.hpp"

namespace clnp {

using Mac = std::array<std::uint8_t, 6>;
using DeviceId = std::string;

/// 802.3 LLC header for OSI network-layer traffic: DSAP/SSAP 0xFE, UI.
inline constexpr std::array<std::uint8_t, 3> kLlcHeader = {0xFE, 0xFE, 0x03};

std::string mac_to_string(const Mac& mac);

/// One link-layer frame: 802.3 length field followed by LLC and one
/// encoded PDU.
struct Frame {
    Mac dst_mac{};
    Mac src_mac{};
    Bytes body;  // one encoded PDU

    std::uint16_t length_field() const {
        return static_cast<std::uint16_t>(kLlcHeader.size() + body.size());
    }

    Bytes encode() const;
    static std::optional<Frame> decode(ByteView raw);

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Per-device link state owned by a node.
struct DeviceState {
    Mac mac{};
    std::size_t mtu = 0;
    std::vector<Frame> queue;    // frames handed to the device, not yet on the wire
    std::size_t in_flight = 0;   // frames on the wire, not yet arrived
};

}  // namespace clnp
