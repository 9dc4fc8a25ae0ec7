#include "clnp/netsim.hpp"

#include <algorithm>

#include "clnp/codec.hpp"

namespace clnp::sim {

namespace {

Mac make_mac(std::size_t node_index, std::size_t device_index) {
    return Mac{0x02, 0x00, 0x00, 0x00, static_cast<std::uint8_t>(node_index & 0xFF),
               static_cast<std::uint8_t>(device_index & 0xFF)};
}

}  // namespace

bool Simulation::has_node(const std::string& name) const {
    return node_index(name).has_value();
}

std::optional<std::size_t> Simulation::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].name == name) return i;
    }
    return std::nullopt;
}

Result<Simulation, ScenarioError> Simulation::build(std::string_view scenario_text) {
    auto parsed = parse_scenario(scenario_text);
    if (!parsed.ok()) return parsed.error();
    const Scenario& sc = parsed.value();

    Simulation sim;
    for (const auto& decl : sc.nodes) {
        if (sim.has_node(decl.name)) {
            return ScenarioError{decl.line, "duplicate node '" + decl.name + "'"};
        }
        SimNode node;
        node.name = decl.name;
        node.kind = decl.kind;
        node.ctx.name = decl.name;
        node.ctx.local_addresses = decl.addresses;
        node.ctx.trace = sim.trace_.get();
        sim.nodes_.push_back(std::move(node));
    }

    for (const auto& decl : sc.links) {
        auto a = sim.node_index(decl.node_a);
        auto b = sim.node_index(decl.node_b);
        if (!a || !b) return ScenarioError{decl.line, "link references unknown node"};
        SimLink link{*a, *b, decl.dev_a, decl.dev_b, decl.mtu, decl.delay_ms};

        const std::size_t link_index = sim.links_.size();
        for (const auto& [node_idx, dev] :
             {std::make_pair(*a, decl.dev_a), std::make_pair(*b, decl.dev_b)}) {
            SimNode& node = sim.nodes_[node_idx];
            if (node.ctx.devices.count(dev)) {
                return ScenarioError{decl.line,
                                     "device '" + dev + "' already exists on " + node.name};
            }
            DeviceState ds;
            ds.mac = make_mac(node_idx, node.ctx.devices.size());
            ds.mtu = decl.mtu;
            node.ctx.devices.emplace(dev, std::move(ds));
            node.device_link.emplace(dev, link_index);
        }
        sim.links_.push_back(std::move(link));
    }

    for (const auto& decl : sc.routes) {
        auto idx = sim.node_index(decl.node);
        if (!idx) return ScenarioError{decl.line, "route references unknown node"};
        SimNode& node = sim.nodes_[*idx];
        if (!node.ctx.devices.count(decl.entry.device)) {
            return ScenarioError{decl.line,
                                 "route references unknown device '" + decl.entry.device + "'"};
        }
        node.table.entries.push_back(decl.entry);
    }

    for (const auto& decl : sc.injections) {
        if (decl.dropped) continue;
        std::optional<std::string> err;
        if (decl.raw) {
            err = sim.inject_raw(decl.time, decl.node, decl.dev, decl.raw_bytes);
        } else {
            SendRequest req;
            req.payload = scenario_payload(decl.size);
            req.dst = decl.dst;
            req.sp_flag = decl.sp;
            req.er_flag = decl.er;
            req.lifetime = decl.lifetime;
            if (decl.srcroute) {
                req.options.push_back(OptionParam{kOptSourceRouting, decl.srcroute->encode()});
            }
            if (decl.qos) {
                req.options.push_back(OptionParam{kOptQosMaintenance, Bytes{0xC0, 0x00}});
            }
            err = sim.inject(decl.time, decl.node, std::move(req), decl.strip_checksum);
        }
        if (err) return ScenarioError{decl.line, *err};
    }
    return sim;
}

std::optional<std::string> Simulation::inject(std::uint64_t time, const std::string& node,
                                              SendRequest req, bool strip_checksum) {
    auto idx = node_index(node);
    if (!idx) return "unknown node '" + node + "'";
    if (time < clock_) return "injection time is in the past";

    // The source address defaults to the node's first address.
    if (req.src.empty() && !nodes_[*idx].ctx.local_addresses.empty()) {
        req.src = nodes_[*idx].ctx.local_addresses.front();
    }
    PendingInject pending;
    pending.node = *idx;
    pending.req = std::move(req);
    pending.strip_checksum = strip_checksum;
    pending_.push_back(std::move(pending));

    Event ev;
    ev.time = time;
    ev.kind = Event::Kind::Inject;
    ev.inject_index = pending_.size() - 1;
    schedule(std::move(ev));
    return std::nullopt;
}

std::optional<std::string> Simulation::inject_raw(std::uint64_t time, const std::string& node,
                                                  const DeviceId& dev, Bytes raw) {
    auto idx = node_index(node);
    if (!idx) return "unknown node '" + node + "'";
    if (time < clock_) return "injection time is in the past";
    if (!nodes_[*idx].ctx.devices.count(dev)) return "unknown device '" + dev + "'";

    PendingInject pending;
    pending.node = *idx;
    pending.raw = true;
    pending.dev = dev;
    pending.raw_bytes = std::move(raw);
    pending_.push_back(std::move(pending));

    Event ev;
    ev.time = time;
    ev.kind = Event::Kind::Inject;
    ev.inject_index = pending_.size() - 1;
    schedule(std::move(ev));
    return std::nullopt;
}

void Simulation::schedule(Event ev) {
    ev.seq = next_seq_++;
    queue_.push(std::move(ev));
}

ForwardEnv Simulation::forward_env(std::size_t node, bool originating) {
    ForwardEnv env;
    env.decrement_lifetime = !originating;
    env.mtu_of = [this, node](const DeviceId& dev) -> std::optional<std::size_t> {
        const auto& devices = nodes_[node].ctx.devices;
        auto it = devices.find(dev);
        if (it == devices.end()) return std::nullopt;
        return it->second.mtu;
    };
    env.queue_depth_of = [this, node](const DeviceId& dev) -> std::size_t {
        const auto& devices = nodes_[node].ctx.devices;
        auto it = devices.find(dev);
        if (it == devices.end()) return 0;
        return it->second.queue.size() + it->second.in_flight;
    };
    return env;
}

void Simulation::send_from(std::size_t node, const Pdu& pdu, bool originating) {
    SimNode& n = nodes_[node];
    auto result = forward(pdu, n.ctx, n.table, forward_env(node, originating));
    if (auto* discarded = std::get_if<Discarded>(&result)) {
        if (discarded->error_report) send_error_report(node, *discarded->error_report);
        return;
    }
    for (auto& [piece, dev] : std::get<ForwardOutputs>(result)) {
        transmit_on(node, piece, dev);
    }
}

void Simulation::send_error_report(std::size_t node, const Pdu& er) {
    SimNode& n = nodes_[node];
    if (n.ctx.devices.empty()) return;
    std::size_t min_mtu = SIZE_MAX;
    for (const auto& [dev, state] : n.ctx.devices) {
        (void)dev;
        min_mtu = std::min(min_mtu, state.mtu);
    }
    // Reports are never segmented; trim the data part to the smallest
    // local MTU instead.
    send_from(node, fit_error_report_to_mtu(er, min_mtu), true);
}

void Simulation::transmit_on(std::size_t node, const Pdu& pdu, const DeviceId& dev) {
    SimNode& n = nodes_[node];
    auto link_it = n.device_link.find(dev);
    if (link_it == n.device_link.end()) {
        n.ctx.log(TraceAction::Discard, "reason=00 at=0 er=0 detail=no-link dev=" + dev);
        return;
    }
    const SimLink& link = links_[link_it->second];
    const bool from_a = link.node_a == node && link.dev_a == dev;
    const std::size_t peer = from_a ? link.node_b : link.node_a;
    const DeviceId& peer_dev = from_a ? link.dev_b : link.dev_a;
    const Mac neighbor = nodes_[peer].ctx.devices.at(peer_dev).mac;

    auto framed = transmit(pdu, dev, neighbor, n.ctx);
    if (!framed.ok()) {
        n.ctx.log(TraceAction::Discard, "reason=00 at=0 er=0 detail=transmit dev=" + dev);
        return;
    }
    DeviceState& state = n.ctx.devices.at(dev);
    state.queue.pop_back();  // the frame leaves the queue for the wire
    state.in_flight++;

    Event ev;
    ev.time = clock_ + link.delay_ms;
    ev.kind = Event::Kind::Arrival;
    ev.to_node = peer;
    ev.to_dev = peer_dev;
    ev.from_node = node;
    ev.from_dev = dev;
    ev.frame = std::move(framed).value();
    schedule(std::move(ev));
}

void Simulation::dispatch_received(std::size_t node, ByteView raw, const DeviceId& dev) {
    SimNode& n = nodes_[node];
    Disposition disp = receive(raw, n.ctx, dev);

    std::vector<Pdu> side_reports;
    side_reports.swap(n.ctx.pending_error_reports);
    for (const auto& er : side_reports) send_error_report(node, er);

    if (auto* deliver = std::get_if<DeliverLocal>(&disp)) {
        deliveries_.push_back({n.name, deliver->src, deliver->dst, deliver->payload,
                               deliver->error_report, deliver->er_reason});
    } else if (auto* fwd = std::get_if<ForwardCandidate>(&disp)) {
        send_from(node, fwd->pdu, false);
    } else if (auto* discarded = std::get_if<Discarded>(&disp)) {
        if (discarded->error_report) send_error_report(node, *discarded->error_report);
    }
}

void Simulation::process_inject(const Event& ev) {
    PendingInject& inj = pending_[ev.inject_index];
    SimNode& n = nodes_[inj.node];
    n.ctx.now_ms = clock_;
    if (inj.raw) {
        dispatch_received(inj.node, inj.raw_bytes, inj.dev);
        return;
    }
    auto composed = compose(inj.req, n.ctx.duid);
    if (!composed.ok()) {
        n.ctx.log(TraceAction::Discard, "reason=00 at=0 er=0 detail=compose");
        return;
    }
    Pdu pdu = std::move(composed).value();
    if (inj.strip_checksum) {
        pdu.header.checksum_c0 = 0;
        pdu.header.checksum_c1 = 0;
    }
    send_from(inj.node, pdu, true);
}

void Simulation::process_arrival(const Event& ev) {
    DeviceState& sender = nodes_[ev.from_node].ctx.devices.at(ev.from_dev);
    if (sender.in_flight > 0) sender.in_flight--;
    arrived_frames_.push_back(ev.frame);
    nodes_[ev.to_node].ctx.now_ms = clock_;
    dispatch_received(ev.to_node, ev.frame.body, ev.to_dev);
}

void Simulation::timer_sweep(std::uint64_t t) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        SimNode& n = nodes_[i];
        n.ctx.now_ms = t;
        for (const auto& dead : expire(n.ctx.reassembly, t)) {
            std::string detail = "duid=" + std::to_string(dead.key.data_unit_id) +
                                 " src=" + dead.key.src.to_hex() +
                                 " dst=" + dead.key.dst.to_hex();
            n.ctx.log(TraceAction::Expire, std::move(detail));
            const ClnpHeader& first = dead.first_header;
            if (first.flags.er && !first.type.is_error_report()) {
                Pdu offender{first, {}};
                if (auto er = emit_error_report(offender, ReasonForDiscard::incomplete_pdu(),
                                                n.ctx);
                    er.ok()) {
                    send_error_report(i, er.value());
                }
            }
        }
    }
}

const TraceLog& Simulation::run(std::uint64_t until_ms) {
    while (true) {
        const bool have_event = !queue_.empty() && queue_.top().time <= until_ms;
        const bool have_timer = next_timer_ <= until_ms;
        if (!have_event && !have_timer) break;

        // Expiry sweeps take precedence over same-time events.
        if (have_timer && (!have_event || next_timer_ <= queue_.top().time)) {
            clock_ = next_timer_;
            timer_sweep(next_timer_);
            next_timer_ += kTimerIntervalMs;
            continue;
        }
        Event ev = queue_.top();
        queue_.pop();
        clock_ = ev.time;
        if (ev.kind == Event::Kind::Inject) {
            process_inject(ev);
        } else {
            process_arrival(ev);
        }
    }
    clock_ = std::max(clock_, until_ms);
    return *trace_;
}

Result<Simulation, ScenarioError> build_topology(std::string_view scenario_text) {
    return Simulation::build(scenario_text);
}

Result<TraceLog, ScenarioError> run_scenario(std::string_view scenario_text,
                                             std::uint64_t until_ms) {
    auto sim = Simulation::build(scenario_text);
    if (!sim.ok()) return sim.error();
    Simulation s = std::move(sim).value();
    s.run(until_ms);
    return s.trace();
}

}  // namespace clnp::sim
