#include "clnp/input.hpp"

#include <algorithm>

#include "clnp/checksum.hpp"

namespace clnp {

namespace {

constexpr std::uint8_t kErrorReportLifetime = 255;

std::string reason_detail(const ReasonForDiscard& reason) {
    return "reason=" + u8_hex(reason.class_code) +
           " at=" + std::to_string(reason.offending_octet);
}

std::string addr_pair(const ClnpHeader& h) {
    return "src=" + h.src.to_hex() + " dst=" + h.dest.to_hex();
}

std::string recv_detail(const DeviceId& dev, std::size_t bytes, std::string_view disp,
                        const ClnpHeader* h) {
    std::string d;
    if (!dev.empty()) d += "dev=" + dev + " ";
    d += "bytes=" + std::to_string(bytes) + " disp=";
    d += disp;
    if (h && !h->is_inactive()) d += " type=" + to_string(h->type) + " " + addr_pair(*h);
    return d;
}

std::optional<ReasonForDiscard> discard_reason_option(const ClnpHeader& h) {
    const OptionParam* opt = find_option(h, kOptReasonForDiscard);
    if (!opt || opt->value.size() < 2) return std::nullopt;
    return ReasonForDiscard{opt->value[0], opt->value[1]};
}

DeliverLocal make_delivery(Pdu pdu, NodeContext& ctx) {
    DeliverLocal d;
    d.src = pdu.header.src;
    d.dst = pdu.header.dest;
    d.error_report = pdu.header.type.is_error_report();
    if (d.error_report) d.er_reason = discard_reason_option(pdu.header);
    d.payload = std::move(pdu.payload);

    std::string detail = "src=" + d.src.to_hex() + " dst=" + d.dst.to_hex() +
                         " bytes=" + std::to_string(d.payload.size()) +
                         " digest=" + digest_hex(d.payload);
    if (d.error_report) {
        detail += " er=1";
        if (d.er_reason) detail += " " + reason_detail(*d.er_reason);
    }
    ctx.log(TraceAction::Deliver, std::move(detail));
    return d;
}

Disposition dispatch_by_address(Pdu pdu, NodeContext& ctx) {
    if (ctx.is_local(pdu.header.dest)) {
        return make_delivery(std::move(pdu), ctx);
    }
    return ForwardCandidate{std::move(pdu)};
}

/// Maps reassembly bookkeeping errors onto header-syntax reasons at the
/// offending segmentation-part octet.
ReasonForDiscard reassembly_error_reason(ReassemblyError err, const ClnpHeader& h) {
    const std::size_t seg_off = segmentation_part_offset(h);
    const std::size_t octet =
        err == ReassemblyError::InconsistentTotalLength ? seg_off + 4 : seg_off + 2;
    return ReasonForDiscard::header_syntax(static_cast<std::uint8_t>(std::min<std::size_t>(octet, 255)));
}

}  // namespace

bool NodeContext::is_local(const NsapAddress& addr) const {
    return std::find(local_addresses.begin(), local_addresses.end(), addr) !=
           local_addresses.end();
}

void NodeContext::log(TraceAction action, std::string detail) {
    if (trace) trace->append(now_ms, name, action, std::move(detail));
}

std::optional<Pdu> discard_pdu(const Pdu& pdu, const ReasonForDiscard& reason, NodeContext& ctx) {
    std::optional<Pdu> report;
    if (pdu.header.flags.er && !pdu.header.type.is_error_report() &&
        !pdu.header.type.is_inactive() && pdu.header.src.wire_valid()) {
        if (auto er = emit_error_report(pdu, reason, ctx); er.ok()) {
            report = std::move(er).value();
        }
    }
    std::string detail = reason_detail(reason) + " er=" + (report ? "1" : "0");
    if (!pdu.header.is_inactive()) detail += " " + addr_pair(pdu.header);
    ctx.log(TraceAction::Discard, std::move(detail));
    return report;
}

Result<Pdu, ComposeError> emit_error_report(const Pdu& offender, const ReasonForDiscard& reason,
                                            NodeContext& ctx) {
    if (!offender.header.flags.er || offender.header.type.is_error_report()) {
        return ComposeError::InvariantViolation;
    }
    if (ctx.local_addresses.empty()) return ComposeError::InvariantViolation;

    auto offender_header = compose_header(offender.header);
    if (!offender_header.ok()) return offender_header.error();

    Pdu er;
    er.header.nlpid = kNlpidClnp;
    er.header.version = kProtocolVersion;
    er.header.lifetime = kErrorReportLifetime;
    er.header.flags = Flags{};
    er.header.type = PduType::error_report();
    er.header.dest = offender.header.src;
    er.header.src = ctx.local_addresses.front();
    er.header.options.push_back(
        OptionParam{kOptReasonForDiscard, Bytes{reason.class_code, reason.offending_octet}});
    er.payload = std::move(offender_header).value();

    er.header.header_length = static_cast<std::uint8_t>(expected_header_length(er.header));
    er.header.segment_length =
        static_cast<std::uint16_t>(er.header.header_length + er.payload.size());

    auto encoded = compose_header(er.header);
    if (!encoded.ok()) return encoded.error();
    auto sum = compute_checksum(encoded.value(), kChecksumPos);
    if (!sum.ok()) return ComposeError::InvariantViolation;
    er.header.checksum_c0 = sum.value().first;
    er.header.checksum_c1 = sum.value().second;

    ctx.log(TraceAction::EmitEr,
            "to=" + er.header.dest.to_hex() + " " + reason_detail(reason));
    return er;
}

Pdu fit_error_report_to_mtu(Pdu er, std::size_t mtu) {
    if (er.header.segment_length <= mtu || mtu <= er.header.header_length) return er;
    const std::size_t keep = mtu - er.header.header_length;
    if (er.payload.size() <= keep) return er;
    er.payload.resize(keep);
    er.header.segment_length = static_cast<std::uint16_t>(er.header.header_length + keep);
    if (er.header.checksum_in_use()) {
        er.header.checksum_c0 = 0;
        er.header.checksum_c1 = 0;
        if (auto encoded = compose_header(er.header); encoded.ok()) {
            if (auto sum = compute_checksum(encoded.value(), kChecksumPos); sum.ok()) {
                er.header.checksum_c0 = sum.value().first;
                er.header.checksum_c1 = sum.value().second;
            }
        }
    }
    return er;
}

Disposition receive(ByteView raw, NodeContext& ctx, const DeviceId& dev) {
    auto parsed = parse_pdu(raw);
    if (!parsed.ok()) {
        const auto reason = ReasonForDiscard::header_syntax(
            static_cast<std::uint8_t>(std::min<std::size_t>(parsed.error().at, 255)));
        ctx.log(TraceAction::Recv, recv_detail(dev, raw.size(), "discard", nullptr));
        ctx.log(TraceAction::Discard, reason_detail(reason) + " er=0");
        return Discarded{reason, std::nullopt};
    }
    Pdu pdu = std::move(parsed).value();

    // Inactive network layer: one-octet header, payload straight up.
    if (pdu.header.is_inactive()) {
        ctx.log(TraceAction::Recv, recv_detail(dev, raw.size(), "deliver", &pdu.header));
        ctx.log(TraceAction::Deliver, "bytes=" + std::to_string(pdu.payload.size()) +
                                          " digest=" + digest_hex(pdu.payload) + " inactive=1");
        return DeliverLocal{std::move(pdu.payload), {}, {}, false, std::nullopt};
    }

    if (auto bad = analyze_header(pdu)) {
        ctx.log(TraceAction::Recv, recv_detail(dev, raw.size(), "discard", &pdu.header));
        auto er = discard_pdu(pdu, bad->reason, ctx);
        return Discarded{bad->reason, std::move(er)};
    }

    const auto verdict = verify_checksum(raw.first(pdu.header.header_length), kChecksumPos);
    if (!verdict.ok() || verdict.value() == ChecksumVerdict::Invalid) {
        const auto reason = ReasonForDiscard::bad_checksum();
        ctx.log(TraceAction::Recv, recv_detail(dev, raw.size(), "discard", &pdu.header));
        auto er = discard_pdu(pdu, reason, ctx);
        return Discarded{reason, std::move(er)};
    }

    if (pdu.header.flags.sp) {
        auto result = insert_fragment(ctx.reassembly, pdu, ctx.now_ms,
                                      ctx.limits.reassembly_lifetime_ms);
        if (auto* expired = std::get_if<ReassemblyExpired>(&result)) {
            // The buffer outlived its deadline before the periodic sweep ran.
            const ClnpHeader& first = expired->first_header;
            ctx.log(TraceAction::Expire,
                    (first.seg ? "duid=" + std::to_string(first.seg->data_unit_id) + " " : "") +
                        addr_pair(first));
            if (first.flags.er && !first.type.is_error_report()) {
                Pdu offender{first, {}};
                if (auto er = emit_error_report(offender, ReasonForDiscard::incomplete_pdu(), ctx);
                    er.ok()) {
                    ctx.pending_error_reports.push_back(std::move(er).value());
                }
            }
            // Start over with the fragment that found the stale buffer.
            result = insert_fragment(ctx.reassembly, pdu, ctx.now_ms,
                                     ctx.limits.reassembly_lifetime_ms);
        }

        if (auto* err = std::get_if<ReassemblyError>(&result)) {
            const auto reason = reassembly_error_reason(*err, pdu.header);
            ctx.log(TraceAction::Recv, recv_detail(dev, raw.size(), "discard", &pdu.header));
            auto er = discard_pdu(pdu, reason, ctx);
            return Discarded{reason, std::move(er)};
        }
        if (std::holds_alternative<ReassemblyPending>(result)) {
            ctx.log(TraceAction::Recv, recv_detail(dev, raw.size(), "held", &pdu.header));
            return HeldForReassembly{};
        }

        Pdu whole = std::move(std::get<ReassemblyComplete>(result).pdu);
        const bool local = ctx.is_local(whole.header.dest);
        ctx.log(TraceAction::Recv,
                recv_detail(dev, raw.size(), local ? "deliver" : "forward", &pdu.header));
        ctx.log(TraceAction::Reassembled,
                "duid=" + std::to_string(whole.header.seg->data_unit_id) + " " +
                    addr_pair(whole.header) + " bytes=" + std::to_string(whole.payload.size()));
        return dispatch_by_address(std::move(whole), ctx);
    }

    const bool local = ctx.is_local(pdu.header.dest);
    ctx.log(TraceAction::Recv,
            recv_detail(dev, raw.size(), local ? "deliver" : "forward", &pdu.header));
    return dispatch_by_address(std::move(pdu), ctx);
}

}  // namespace clnp
