#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clnp/codec.hpp"
#include "clnp/frame.hpp"
#include "clnp/pdu.hpp"
#include "clnp/reassembly.hpp"
#include "clnp/result.hpp"
#include "clnp/trace.hpp"

namespace clnp {

struct DeliverLocal {
    Bytes payload;
    NsapAddress src;
    NsapAddress dst;
    bool error_report = false;  // delivered to the local error sink
    std::optional<ReasonForDiscard> er_reason;
};

struct ForwardCandidate {
    Pdu pdu;
};

struct Discarded {
    ReasonForDiscard reason;
    std::optional<Pdu> error_report;  // generated when the offender asked for one
};

/// A segment was buffered for reassembly; nothing to dispatch yet.
struct HeldForReassembly {};

using Disposition = std::variant<DeliverLocal, ForwardCandidate, Discarded, HeldForReassembly>;

struct NodeLimits {
    std::uint64_t reassembly_lifetime_ms = 10'000;
    std::size_t congestion_threshold = 4;  // queued frames per device
};

/// Per-node state threaded through the receive and forward paths. One
/// logical owner per node; operations on the same context must be
/// serialized.
struct NodeContext {
    std::string name;
    std::vector<NsapAddress> local_addresses;
    std::uint64_t now_ms = 0;
    FragmentStore reassembly;
    NodeLimits limits;
    TraceLog* trace = nullptr;
    std::map<DeviceId, DeviceState> devices;
    DataUnitIdCounter duid;

    /// Error reports raised as side effects of receive (stale-buffer
    /// expiry found by an arriving fragment). The owner drains and routes
    /// them after each call.
    std::vector<Pdu> pending_error_reports;

    bool is_local(const NsapAddress& addr) const;
    void log(TraceAction action, std::string detail);
};

/// Receive path: parse, analyze, checksum-check, reassemble, then match
/// the destination address. Inactive PDUs bypass every check. All
/// failures come back as Discarded, never as exceptions.
Disposition receive(ByteView raw, NodeContext& ctx, const DeviceId& dev = {});

/// Records the discard and builds an error report when the offender asked
/// for one (never for error-report PDUs themselves).
std::optional<Pdu> discard_pdu(const Pdu& pdu, const ReasonForDiscard& reason, NodeContext& ctx);

/// Builds an ER PDU addressed to the offender's source; its data part is
/// the offender's entire header and it carries the reason-for-discard
/// option. The report itself never requests reports and is never
/// segmented.
Result<Pdu, ComposeError> emit_error_report(const Pdu& offender, const ReasonForDiscard& reason,
                                            NodeContext& ctx);

/// Shrinks an error report's data part so the encoded PDU fits `mtu`;
/// returns the input unchanged when it already fits.
Pdu fit_error_report_to_mtu(Pdu er, std::size_t mtu);

}  // namespace clnp
