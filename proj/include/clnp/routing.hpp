#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clnp/address.hpp"
#include "clnp/frame.hpp"
#include "clnp/input.hpp"
#include "clnp/pdu.hpp"
#include "clnp/result.hpp"

namespace clnp {

struct RouteEntry {
    NsapAddress dest;        // exact address or prefix
    std::size_t prefix_len = 0;  // matched octets; 0 = default route
    NsapAddress next_hop;
    DeviceId device;

    bool matches(const NsapAddress& dst) const;
};

/// Ordered route list, searched sequentially; the first match wins.
struct RoutingTable {
    std::vector<RouteEntry> entries;
};

const RouteEntry* lookup(const RoutingTable& table, const NsapAddress& dst);

/// Parses `<dest-hex>/<prefix-octets> via <nexthop-hex> dev <device>` or
/// `default via <nexthop-hex> dev <device>`.
Result<RouteEntry, std::string> parse_route_entry(std::string_view text);

/// Source routing parameter (option 0xC8). Value layout: one type octet
/// (0x01 complete, 0x00 partial), one next-entry index octet, then
/// (length, address) pairs.
struct SourceRouteParam {
    enum class Kind : std::uint8_t { Partial = 0x00, Complete = 0x01 };

    Kind kind = Kind::Partial;
    std::uint8_t next_index = 0;  // 0..entries.size(); == size means exhausted
    std::vector<NsapAddress> entries;

    Bytes encode() const;
    static std::optional<SourceRouteParam> decode(ByteView value);

    friend bool operator==(const SourceRouteParam&, const SourceRouteParam&) = default;
};

struct NextHopChoice {
    NsapAddress neighbor;
    DeviceId device;
    std::optional<SourceRouteParam> updated_param;  // set when the option must be rewritten
};

/// Walks the source-route list. Complete routing requires each listed
/// entry to resolve; partial routing skips entries it cannot resolve and
/// falls back to the destination. An exhausted list routes by the final
/// destination for both kinds.
std::variant<NextHopChoice, ReasonForDiscard> source_route_analysis(const Pdu& pdu,
                                                                    const RoutingTable& table);

struct ForwardEnv {
    std::function<std::optional<std::size_t>(const DeviceId&)> mtu_of;
    std::function<std::size_t(const DeviceId&)> queue_depth_of;  // optional; 0 when unset
    bool decrement_lifetime = true;  // false for locally originated PDUs
};

using ForwardOutputs = std::vector<std::pair<Pdu, DeviceId>>;

/// The forward path: copy, lifetime decrement with incremental checksum
/// adjustment, next-hop choice (source route or table lookup),
/// fragmentation to the outgoing MTU, congestion marking. Failures come
/// back as Discarded dispositions; the input PDU is never mutated.
std::variant<ForwardOutputs, Discarded> forward(const Pdu& pdu, NodeContext& ctx,
                                                const RoutingTable& table, const ForwardEnv& env);

/// Sets the congestion-experienced bit in the QoS maintenance option when
/// the queue is deeper than the threshold, restamping the checksum.
Pdu congestion_notify(const Pdu& pdu, std::size_t queue_depth, std::size_t threshold,
                      bool* marked = nullptr);

}  // namespace clnp
