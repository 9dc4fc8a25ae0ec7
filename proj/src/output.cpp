#include "clnp/output.hpp"

#include "clnp/checksum.hpp"
#include "clnp/codec.hpp"

namespace clnp {

namespace {

bool stamp_checksum(ClnpHeader& h) {
    h.checksum_c0 = 0;
    h.checksum_c1 = 0;
    auto encoded = compose_header(h);
    if (!encoded.ok()) return false;
    auto sum = compute_checksum(encoded.value(), kChecksumPos);
    if (!sum.ok()) return false;
    h.checksum_c0 = sum.value().first;
    h.checksum_c1 = sum.value().second;
    return true;
}

}  // namespace

Result<Pdu, SendError> compose(const SendRequest& req, DataUnitIdCounter& duid_counter) {
    if (!req.src.wire_valid() || !req.dst.wire_valid()) return SendError::AddressTooLong;

    for (std::size_t i = 0; i < req.options.size(); ++i) {
        if (req.options[i].value.size() > 252) return SendError::InvalidOptions;
        for (std::size_t j = 0; j < i; ++j) {
            if (req.options[i].code == req.options[j].code) return SendError::InvalidOptions;
        }
    }

    Pdu pdu;
    ClnpHeader& h = pdu.header;
    h.nlpid = kNlpidClnp;
    h.version = kProtocolVersion;
    h.lifetime = req.lifetime;
    h.flags = Flags{req.sp_flag, false, req.er_flag};
    h.type = PduType::data();
    h.dest = req.dst;
    h.src = req.src;
    h.options = req.options;
    if (req.sp_flag) h.seg = SegmentationPart{duid_counter.next(), 0, 0};

    const std::size_t hlen = expected_header_length(h);
    if (hlen > kMaxHeaderLength) return SendError::InvalidOptions;
    if (hlen + req.payload.size() > 0xFFFF) return SendError::PayloadTooLarge;

    h.header_length = static_cast<std::uint8_t>(hlen);
    h.segment_length = static_cast<std::uint16_t>(hlen + req.payload.size());
    if (h.seg) h.seg->total_length = h.segment_length;
    pdu.payload = req.payload;

    if (!stamp_checksum(h)) return SendError::InvalidOptions;
    return pdu;
}

Result<std::vector<Pdu>, FragmentError> fragment(const Pdu& pdu, std::size_t mtu) {
    if (pdu.header.segment_length <= mtu) return std::vector<Pdu>{pdu};
    if (!pdu.header.flags.sp || !pdu.header.seg) {
        return FragmentError::SegmentationNotPermitted;
    }
    const std::size_t hlen = pdu.header.header_length;
    if (mtu < hlen + 8) return FragmentError::MtuTooSmall;

    // Largest data slice per segment, kept to a multiple of 8 for every
    // non-final part.
    const std::size_t chunk = (mtu - hlen) / 8 * 8;
    const bool checksum_used = pdu.header.checksum_in_use();
    const std::uint16_t base_offset = pdu.header.seg->segment_offset;

    std::vector<Pdu> out;
    std::size_t done = 0;
    while (done < pdu.payload.size()) {
        const std::size_t take = std::min(chunk, pdu.payload.size() - done);
        const bool last = done + take == pdu.payload.size();

        Pdu seg;
        seg.header = pdu.header;
        seg.header.flags.ms = last ? pdu.header.flags.ms : true;
        seg.header.seg->segment_offset = static_cast<std::uint16_t>(base_offset + done);
        seg.header.segment_length = static_cast<std::uint16_t>(hlen + take);
        seg.payload.assign(pdu.payload.begin() + static_cast<std::ptrdiff_t>(done),
                           pdu.payload.begin() + static_cast<std::ptrdiff_t>(done + take));
        if (checksum_used) {
            stamp_checksum(seg.header);
        } else {
            seg.header.checksum_c0 = 0;
            seg.header.checksum_c1 = 0;
        }
        out.push_back(std::move(seg));
        done += take;
    }
    return out;
}

Result<Frame, TransmitError> transmit(const Pdu& pdu, const DeviceId& device,
                                      std::optional<Mac> neighbor_mac, NodeContext& ctx) {
    auto it = ctx.devices.find(device);
    if (it == ctx.devices.end()) return TransmitError::UnknownDevice;
    DeviceState& dev = it->second;
    if (pdu.header.segment_length > dev.mtu) return TransmitError::PduExceedsMtu;
    if (!neighbor_mac) return TransmitError::UnknownNeighbor;

    auto encoded = encode_pdu(pdu);
    if (!encoded.ok()) return TransmitError::BadPdu;

    Frame frame;
    frame.dst_mac = *neighbor_mac;
    frame.src_mac = dev.mac;
    frame.body = std::move(encoded).value();
    dev.queue.push_back(frame);
    ctx.log(TraceAction::Transmit,
            "dev=" + device + " bytes=" + std::to_string(frame.body.size() + 17));
    return frame;
}

}  // namespace clnp
