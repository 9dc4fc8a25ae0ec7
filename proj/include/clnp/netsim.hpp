#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "clnp/input.hpp"
#include "clnp/output.hpp"
#include "clnp/result.hpp"
#include "clnp/routing.hpp"
#include "clnp/trace.hpp"

namespace clnp::sim {

struct ScenarioError {
    std::size_t line = 0;
    std::string message;
};

enum class NodeKind { EndSystem, Intermediate };

// --- parsed scenario ------------------------------------------------------

struct NodeDecl {
    std::size_t line = 0;
    std::string name;
    NodeKind kind = NodeKind::EndSystem;
    std::vector<NsapAddress> addresses;
};

struct LinkDecl {
    std::size_t line = 0;
    std::string node_a, dev_a;
    std::string node_b, dev_b;
    std::size_t mtu = 0;
    std::uint64_t delay_ms = 0;
};

struct RouteDecl {
    std::size_t line = 0;
    std::string node;
    RouteEntry entry;
};

struct InjectionDecl {
    std::size_t line = 0;
    std::uint64_t time = 0;
    std::string node;
    bool raw = false;
    // inject
    NsapAddress dst;
    std::size_t size = 0;
    bool sp = false;
    bool er = false;
    std::uint8_t lifetime = 0;
    bool strip_checksum = false;  // csum=0: send with checksum octets zeroed
    bool qos = false;             // add a globally-unique QoS maintenance option
    std::optional<SourceRouteParam> srcroute;
    // inject_raw
    DeviceId dev;
    Bytes raw_bytes;
    // directives
    bool dropped = false;
};

struct Scenario {
    std::vector<NodeDecl> nodes;
    std::vector<LinkDecl> links;
    std::vector<RouteDecl> routes;
    std::vector<InjectionDecl> injections;
};

/// Parses the line-oriented scenario format. Stanzas:
///   node <name> es|is addr <hex>[,<hex>...]
///   link <a>.<dev> <b>.<dev> mtu <n> delay <ms>
///   route <node> <dest-hex>/<plen> via <hex> dev <dev>
///   route <node> default via <hex> dev <dev>
///   inject t=<ms> node=<name> dst=<hex> size=<n> sp=<0|1> er=<0|1>
///          lifetime=<n> [srcroute=complete|partial:<hex>,...] [csum=0] [qos=1]
///   inject_raw t=<ms> node=<name> dev=<dev> hex=<...>
///   drop inject=<k>
///   reorder inject=<k0>,<k1>,...
/// Comments start with '#'.
Result<Scenario, ScenarioError> parse_scenario(std::string_view text);

/// Deterministic payload for `inject size=<n>`.
Bytes scenario_payload(std::size_t size);

// --- simulation -----------------------------------------------------------

/// Deterministic virtual-clock simulator. Events run in (time, insertion)
/// order; reassembly expiry sweeps fire every 1000 virtual ms, ahead of
/// same-time events. Identical scenario text yields a byte-identical
/// trace.
class Simulation {
public:
    static Result<Simulation, ScenarioError> build(std::string_view scenario_text);

    /// Schedules composition, routing and transmission of a locally
    /// originated PDU. Returns an error message for an unknown node or a
    /// time already in the past.
    std::optional<std::string> inject(std::uint64_t time, const std::string& node,
                                      SendRequest req, bool strip_checksum = false);
    std::optional<std::string> inject_raw(std::uint64_t time, const std::string& node,
                                          const DeviceId& dev, Bytes raw);

    /// Processes every event with time <= until.
    const TraceLog& run(std::uint64_t until_ms);

    const TraceLog& trace() const { return *trace_; }
    std::uint64_t now() const { return clock_; }

    struct Delivery {
        std::string node;
        NsapAddress src;
        NsapAddress dst;
        Bytes payload;
        bool error_report = false;
        std::optional<ReasonForDiscard> er_reason;
    };
    const std::vector<Delivery>& deliveries() const { return deliveries_; }

    /// Every frame that reached a node, in arrival order.
    const std::vector<Frame>& arrived_frames() const { return arrived_frames_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }
    bool has_node(const std::string& name) const;

private:
    static constexpr std::uint64_t kTimerIntervalMs = 1000;

    struct SimNode {
        std::string name;
        NodeKind kind = NodeKind::EndSystem;
        NodeContext ctx;
        RoutingTable table;
        std::map<DeviceId, std::size_t> device_link;
    };

    struct SimLink {
        std::size_t node_a = 0, node_b = 0;
        DeviceId dev_a, dev_b;
        std::size_t mtu = 0;
        std::uint64_t delay_ms = 0;
    };

    struct PendingInject {
        std::size_t node = 0;
        bool raw = false;
        SendRequest req;
        bool strip_checksum = false;
        DeviceId dev;
        Bytes raw_bytes;
    };

    struct Event {
        std::uint64_t time = 0;
        std::uint64_t seq = 0;
        enum class Kind { Inject, Arrival } kind = Kind::Inject;
        std::size_t inject_index = 0;
        std::size_t to_node = 0, from_node = 0;
        DeviceId to_dev, from_dev;
        Frame frame;
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::optional<std::size_t> node_index(const std::string& name) const;
    void schedule(Event ev);
    void process_inject(const Event& ev);
    void process_arrival(const Event& ev);
    void dispatch_received(std::size_t node, ByteView raw, const DeviceId& dev);
    void send_from(std::size_t node, const Pdu& pdu, bool originating);
    void send_error_report(std::size_t node, const Pdu& er);
    void transmit_on(std::size_t node, const Pdu& pdu, const DeviceId& dev);
    void timer_sweep(std::uint64_t t);
    ForwardEnv forward_env(std::size_t node, bool originating);

    std::vector<SimNode> nodes_;
    std::vector<SimLink> links_;
    std::vector<PendingInject> pending_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::unique_ptr<TraceLog> trace_ = std::make_unique<TraceLog>();
    std::vector<Delivery> deliveries_;
    std::vector<Frame> arrived_frames_;
    std::uint64_t clock_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_timer_ = kTimerIntervalMs;
};

/// Builds the topology and schedules the scenario's injections.
Result<Simulation, ScenarioError> build_topology(std::string_view scenario_text);

/// One-shot: build, run, and hand back the trace.
Result<TraceLog, ScenarioError> run_scenario(std::string_view scenario_text,
                                             std::uint64_t until_ms);

}  // namespace clnp::sim
