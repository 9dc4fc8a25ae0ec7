#include "clnp/routing.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "clnp/checksum.hpp"
#include "clnp/codec.hpp"
#include "clnp/output.hpp"

namespace clnp {

bool RouteEntry::matches(const NsapAddress& dst) const {
    if (prefix_len > dst.size()) return false;
    return std::equal(dest.octets().begin(), dest.octets().begin() + static_cast<std::ptrdiff_t>(prefix_len),
                      dst.octets().begin());
}

const RouteEntry* lookup(const RoutingTable& table, const NsapAddress& dst) {
    for (const auto& entry : table.entries) {
        if (entry.matches(dst)) return &entry;
    }
    return nullptr;
}

Result<RouteEntry, std::string> parse_route_entry(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string dest_spec, via, nexthop_hex, dev_kw, device;
    if (!(in >> dest_spec >> via >> nexthop_hex >> dev_kw >> device) || via != "via" ||
        dev_kw != "dev") {
        return std::string("expected '<dest-hex>/<plen> via <hex> dev <device>'");
    }
    std::string extra;
    if (in >> extra) return std::string("trailing tokens after device name");

    RouteEntry entry;
    if (dest_spec == "default") {
        entry.prefix_len = 0;
    } else {
        const auto slash = dest_spec.find('/');
        if (slash == std::string::npos) return std::string("missing '/<prefix-octets>'");
        auto dest = NsapAddress::from_hex(dest_spec.substr(0, slash));
        if (!dest || !dest->wire_valid()) return std::string("bad destination hex");
        std::size_t plen = 0;
        const char* first = dest_spec.data() + slash + 1;
        const char* last = dest_spec.data() + dest_spec.size();
        auto [p, ec] = std::from_chars(first, last, plen);
        if (ec != std::errc() || p != last) return std::string("bad prefix length");
        if (plen > dest->size()) return std::string("prefix length exceeds destination");
        entry.dest = *dest;
        entry.prefix_len = plen;
    }
    auto nexthop = NsapAddress::from_hex(nexthop_hex);
    if (!nexthop || !nexthop->wire_valid()) return std::string("bad next-hop hex");
    entry.next_hop = *nexthop;
    entry.device = device;
    return entry;
}

Bytes SourceRouteParam::encode() const {
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(kind));
    out.push_back(next_index);
    for (const auto& addr : entries) {
        out.push_back(static_cast<std::uint8_t>(addr.size()));
        out.insert(out.end(), addr.octets().begin(), addr.octets().end());
    }
    return out;
}

std::optional<SourceRouteParam> SourceRouteParam::decode(ByteView value) {
    if (value.size() < 2) return std::nullopt;
    if (value[0] != 0x00 && value[0] != 0x01) return std::nullopt;
    SourceRouteParam param;
    param.kind = static_cast<Kind>(value[0]);
    param.next_index = value[1];
    std::size_t pos = 2;
    while (pos < value.size()) {
        const std::uint8_t alen = value[pos];
        ++pos;
        if (alen == 0 || alen > kMaxNsapLength || pos + alen > value.size()) return std::nullopt;
        param.entries.emplace_back(Bytes(value.begin() + pos, value.begin() + pos + alen));
        pos += alen;
    }
    if (param.next_index > param.entries.size()) return std::nullopt;
    return param;
}

std::variant<NextHopChoice, ReasonForDiscard> source_route_analysis(const Pdu& pdu,
                                                                    const RoutingTable& table) {
    const OptionParam* opt = find_option(pdu.header, kOptSourceRouting);
    if (!opt) return ReasonForDiscard::source_route_syntax();
    auto param = SourceRouteParam::decode(opt->value);
    if (!param) return ReasonForDiscard::source_route_syntax();

    auto by_destination = [&]() -> std::variant<NextHopChoice, ReasonForDiscard> {
        const RouteEntry* entry = lookup(table, pdu.header.dest);
        if (!entry) return ReasonForDiscard::destination_unreachable();
        std::optional<SourceRouteParam> updated;
        if (param->next_index != param->entries.size()) {
            updated = *param;
            updated->next_index = static_cast<std::uint8_t>(param->entries.size());
        }
        return NextHopChoice{entry->next_hop, entry->device, std::move(updated)};
    };

    if (param->next_index >= param->entries.size()) return by_destination();

    if (param->kind == SourceRouteParam::Kind::Complete) {
        const RouteEntry* entry = lookup(table, param->entries[param->next_index]);
        if (!entry) return ReasonForDiscard::source_route_unknown_address();
        SourceRouteParam updated = *param;
        updated.next_index++;
        return NextHopChoice{entry->next_hop, entry->device, std::move(updated)};
    }

    // Partial: use the first listed entry that resolves, skipping the
    // rest; fall back to the destination when none do.
    for (std::size_t i = param->next_index; i < param->entries.size(); ++i) {
        if (const RouteEntry* entry = lookup(table, param->entries[i])) {
            SourceRouteParam updated = *param;
            updated.next_index = static_cast<std::uint8_t>(i + 1);
            return NextHopChoice{entry->next_hop, entry->device, std::move(updated)};
        }
    }
    return by_destination();
}

namespace {

/// Re-stamps the stored checksum after one octet of the encoded header
/// changed, using the incremental adjustment.
void adjust_for_octet_change(Pdu& pdu, std::size_t pos, std::uint8_t old_value,
                             std::uint8_t new_value) {
    if (!pdu.header.checksum_in_use()) return;
    auto encoded = compose_header(pdu.header);
    if (!encoded.ok()) return;
    Bytes bytes = std::move(encoded).value();
    if (auto sum = adjust_checksum(bytes, pos, old_value, new_value, kChecksumPos); sum.ok()) {
        pdu.header.checksum_c0 = sum.value().first;
        pdu.header.checksum_c1 = sum.value().second;
    }
}

}  // namespace

Pdu congestion_notify(const Pdu& pdu, std::size_t queue_depth, std::size_t threshold,
                      bool* marked) {
    if (marked) *marked = false;
    if (queue_depth <= threshold) return pdu;
    const OptionParam* qos = find_option(pdu.header, kOptQosMaintenance);
    if (!qos || qos->value.empty()) return pdu;
    if ((qos->value[0] & kQosGlobalFormatMask) != kQosGlobalFormatMask) return pdu;
    if ((qos->value.back() & kQosCongestionBit) != 0) return pdu;  // already marked

    Pdu out = pdu;
    OptionParam* opt = nullptr;
    for (auto& o : out.header.options) {
        if (o.code == kOptQosMaintenance) opt = &o;
    }
    const std::uint8_t old_value = opt->value.back();
    opt->value.back() = static_cast<std::uint8_t>(old_value | kQosCongestionBit);

    const std::size_t value_pos =
        *option_offset(out.header, kOptQosMaintenance) + 2 + opt->value.size() - 1;
    adjust_for_octet_change(out, value_pos, old_value, opt->value.back());
    if (marked) *marked = true;
    return out;
}

std::variant<ForwardOutputs, Discarded> forward(const Pdu& in, NodeContext& ctx,
                                                const RoutingTable& table,
                                                const ForwardEnv& env) {
    auto discard = [&](const ReasonForDiscard& reason) {
        auto er = discard_pdu(in, reason, ctx);
        return Discarded{reason, std::move(er)};
    };

    Pdu pdu = in;  // the original buffer stays untouched

    if (env.decrement_lifetime) {
        if (pdu.header.lifetime <= 1) return discard(ReasonForDiscard::lifetime_expired());
        const std::uint8_t old_lifetime = pdu.header.lifetime;
        pdu.header.lifetime = static_cast<std::uint8_t>(old_lifetime - 1);
        adjust_for_octet_change(pdu, kLifetimePos, old_lifetime, pdu.header.lifetime);
    }

    NsapAddress neighbor;
    DeviceId device;
    if (find_option(pdu.header, kOptSourceRouting)) {
        auto choice = source_route_analysis(pdu, table);
        if (auto* reason = std::get_if<ReasonForDiscard>(&choice)) return discard(*reason);
        auto& hop = std::get<NextHopChoice>(choice);
        neighbor = hop.neighbor;
        device = hop.device;
        if (hop.updated_param) {
            // Only the next-entry index octet changes; adjust, don't recompute.
            for (auto& opt : pdu.header.options) {
                if (opt.code != kOptSourceRouting) continue;
                const std::uint8_t old_index = opt.value[1];
                opt.value[1] = hop.updated_param->next_index;
                const std::size_t pos = *option_offset(pdu.header, kOptSourceRouting) + 2 + 1;
                adjust_for_octet_change(pdu, pos, old_index, opt.value[1]);
                break;
            }
        }
    } else {
        const RouteEntry* entry = lookup(table, pdu.header.dest);
        if (!entry) return discard(ReasonForDiscard::destination_unreachable());
        neighbor = entry->next_hop;
        device = entry->device;
    }

    const auto mtu = env.mtu_of ? env.mtu_of(device) : std::nullopt;
    if (!mtu) return discard(ReasonForDiscard::destination_unreachable());

    ctx.log(TraceAction::Forward, "dev=" + device + " nexthop=" + neighbor.to_hex() + " dst=" +
                                      pdu.header.dest.to_hex());

    std::vector<Pdu> pieces;
    if (pdu.header.segment_length > *mtu) {
        if (!pdu.header.flags.sp) return discard(ReasonForDiscard::segmentation_not_permitted());
        auto split = fragment(pdu, *mtu);
        if (!split.ok()) return discard(ReasonForDiscard::segmentation_not_permitted());
        pieces = std::move(split).value();
        ctx.log(TraceAction::Fragment,
                "count=" + std::to_string(pieces.size()) + " mtu=" + std::to_string(*mtu));
    } else {
        pieces.push_back(std::move(pdu));
    }

    const std::size_t depth = env.queue_depth_of ? env.queue_depth_of(device) : 0;
    ForwardOutputs out;
    out.reserve(pieces.size());
    for (auto& piece : pieces) {
        bool marked = false;
        Pdu stamped = congestion_notify(piece, depth, ctx.limits.congestion_threshold, &marked);
        if (marked) {
            ctx.log(TraceAction::CongestionMark,
                    "dev=" + device + " depth=" + std::to_string(depth));
        }
        out.emplace_back(std::move(stamped), device);
    }
    return out;
}

}  // namespace clnp
