#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "clnp/frame.hpp"
#include "clnp/input.hpp"
#include "clnp/pdu.hpp"
#include "clnp/result.hpp"

namespace clnp {

/// A transport-layer send: payload plus the header knobs the caller must
/// choose explicitly.
struct SendRequest {
    Bytes payload;
    NsapAddress src;
    NsapAddress dst;
    bool er_flag = false;
    bool sp_flag = false;
    std::uint8_t lifetime = 0;
    std::vector<OptionParam> options;
};

enum class SendError { PayloadTooLarge, AddressTooLong, InvalidOptions };

/// Builds a DT PDU for the request. With segmentation permitted the
/// segmentation part gets a fresh data unit id from the counter, offset
/// zero and total length equal to the PDU length. The checksum is
/// stamped.
Result<Pdu, SendError> compose(const SendRequest& req, DataUnitIdCounter& duid_counter);

enum class FragmentError { MtuTooSmall, SegmentationNotPermitted };

/// Splits a PDU into segments of at most `mtu` octets. Every non-final
/// data part is a multiple of 8 octets; each segment duplicates the
/// original header with its own offset, length and more-segments flag and
/// is restamped. A PDU that already fits comes back unchanged as the only
/// element.
Result<std::vector<Pdu>, FragmentError> fragment(const Pdu& pdu, std::size_t mtu);

enum class TransmitError { PduExceedsMtu, UnknownNeighbor, UnknownDevice, BadPdu };

/// Frames the PDU for the link and appends it to the device's outgoing
/// queue.
Result<Frame, TransmitError> transmit(const Pdu& pdu, const DeviceId& device,
                                      std::optional<Mac> neighbor_mac, NodeContext& ctx);

}  // namespace clnp
