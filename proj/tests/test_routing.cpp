#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "clnp/checksum.hpp"
#include "clnp/codec.hpp"
#include "clnp/output.hpp"
#include "clnp/routing.hpp"

using namespace clnp;

namespace {

NsapAddress addr(std::initializer_list<std::uint8_t> octets) {
    return NsapAddress(Bytes(octets));
}

const NsapAddress kSrc = NsapAddress(Bytes{0x49, 0x00, 0x01});
const NsapAddress kDst = NsapAddress(Bytes{0x49, 0x00, 0x02});
const NsapAddress kIs1 = NsapAddress(Bytes{0x49, 0x00, 0xA1});
const NsapAddress kIs2 = NsapAddress(Bytes{0x49, 0x00, 0xA2});
const NsapAddress kBogus = NsapAddress(Bytes{0x49, 0x00, 0xFF});

RouteEntry route_to(const NsapAddress& dest, const NsapAddress& next_hop,
                    const DeviceId& dev) {
    return RouteEntry{dest, dest.size(), next_hop, dev};
}

RoutingTable full_table() {
    RoutingTable t;
    t.entries.push_back(route_to(kDst, kIs1, "eth0"));
    t.entries.push_back(route_to(kIs1, kIs1, "eth0"));
    t.entries.push_back(route_to(kIs2, kIs1, "eth0"));
    return t;
}

Pdu make_pdu(std::uint8_t lifetime, bool sp, std::size_t payload_len,
             std::vector<OptionParam> options = {}, bool er = false) {
    SendRequest req;
    req.src = kSrc;
    req.dst = kDst;
    req.sp_flag = sp;
    req.er_flag = er;
    req.lifetime = lifetime;
    req.options = std::move(options);
    req.payload.resize(payload_len);
    for (std::size_t i = 0; i < payload_len; ++i) {
        req.payload[i] = static_cast<std::uint8_t>(i * 3);
    }
    DataUnitIdCounter duid;
    auto pdu = compose(req, duid);
    REQUIRE(pdu.ok());
    return pdu.value();
}

OptionParam srcroute_option(SourceRouteParam::Kind kind, std::vector<NsapAddress> hops,
                            std::uint8_t next_index = 0) {
    SourceRouteParam param{kind, next_index, std::move(hops)};
    return OptionParam{kOptSourceRouting, param.encode()};
}

ForwardEnv env_with_mtu(std::size_t mtu, std::size_t depth = 0) {
    ForwardEnv env;
    env.mtu_of = [mtu](const DeviceId&) -> std::optional<std::size_t> { return mtu; };
    env.queue_depth_of = [depth](const DeviceId&) { return depth; };
    return env;
}

ChecksumVerdict verdict_of(const Pdu& pdu) {
    auto encoded = compose_header(pdu.header);
    REQUIRE(encoded.ok());
    return verify_checksum(encoded.value(), kChecksumPos).value();
}

NodeContext make_ctx() {
    NodeContext ctx;
    ctx.name = "r1";
    ctx.local_addresses = {addr({0x49, 0x00, 0xEE})};
    return ctx;
}

const SourceRouteParam& decoded_srcroute(const Pdu& pdu) {
    static SourceRouteParam param;
    const OptionParam* opt = find_option(pdu.header, kOptSourceRouting);
    REQUIRE(opt != nullptr);
    auto decoded = SourceRouteParam::decode(opt->value);
    REQUIRE(decoded.has_value());
    param = *decoded;
    return param;
}

}  // namespace

TEST_CASE("lookup walks the table in order") {
    RoutingTable t;
    t.entries.push_back(route_to(kDst, kIs1, "eth0"));
    t.entries.push_back(RouteEntry{{}, 0, kIs2, "eth1"});  // default

    const RouteEntry* hit = lookup(t, kDst);
    REQUIRE(hit != nullptr);
    CHECK(hit->next_hop == kIs1);

    const RouteEntry* fallback = lookup(t, kBogus);
    REQUIRE(fallback != nullptr);
    CHECK(fallback->next_hop == kIs2);
}

TEST_CASE("lookup on an empty table finds nothing") {
    RoutingTable t;
    CHECK(lookup(t, kDst) == nullptr);
}

TEST_CASE("a default-only table matches every destination") {
    RoutingTable t;
    t.entries.push_back(RouteEntry{{}, 0, kIs1, "eth0"});
    CHECK(lookup(t, kDst) != nullptr);
    CHECK(lookup(t, addr({0x01})) != nullptr);
    CHECK(lookup(t, addr({0xFF, 0xFF, 0xFF, 0xFF})) != nullptr);
}

TEST_CASE("lookup equals a reference linear scan on random tables") {
    std::mt19937_64 rng(51);
    auto rand_addr = [&](std::size_t len) {
        Bytes b(len);
        for (auto& o : b) o = static_cast<std::uint8_t>(rng() % 4);  // small alphabet, collisions likely
        return NsapAddress(std::move(b));
    };
    for (int trial = 0; trial < 200; ++trial) {
        RoutingTable t;
        const std::size_t entries = rng() % 8;
        for (std::size_t i = 0; i < entries; ++i) {
            NsapAddress dest = rand_addr(1 + rng() % 3);
            t.entries.push_back(RouteEntry{dest, rng() % (dest.size() + 1), rand_addr(2), "eth0"});
        }
        const NsapAddress dst = rand_addr(1 + rng() % 4);

        const RouteEntry* reference = nullptr;
        for (const auto& e : t.entries) {
            const auto& d = e.dest.octets();
            const auto& q = dst.octets();
            if (e.prefix_len <= q.size() &&
                std::equal(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(e.prefix_len),
                           q.begin())) {
                reference = &e;
                break;
            }
        }
        CHECK(lookup(t, dst) == reference);
    }
}

TEST_CASE("route entry text form parses") {
    auto entry = parse_route_entry("4900a1/3 via 4900a1 dev eth0");
    REQUIRE(entry.ok());
    CHECK(entry.value().dest == kIs1);
    CHECK(entry.value().prefix_len == 3);
    CHECK(entry.value().next_hop == kIs1);
    CHECK(entry.value().device == "eth0");

    auto dflt = parse_route_entry("default via 4900a1 dev eth1");
    REQUIRE(dflt.ok());
    CHECK(dflt.value().prefix_len == 0);
    CHECK(dflt.value().dest.empty());

    CHECK_FALSE(parse_route_entry("4900a1 via 4900a1 dev eth0").ok());
    CHECK_FALSE(parse_route_entry("4900a1/9 via 4900a1 dev eth0").ok());
    CHECK_FALSE(parse_route_entry("default table 4900a1 dev eth0").ok());
}

TEST_CASE("source route parameter survives encode and decode") {
    SourceRouteParam param{SourceRouteParam::Kind::Complete, 1, {kIs1, kIs2}};
    auto decoded = SourceRouteParam::decode(param.encode());
    REQUIRE(decoded.has_value());
    CHECK(*decoded == param);

    CHECK_FALSE(SourceRouteParam::decode(Bytes{}).has_value());
    CHECK_FALSE(SourceRouteParam::decode(Bytes{0x02, 0x00}).has_value());        // bad kind
    CHECK_FALSE(SourceRouteParam::decode(Bytes{0x01, 0x03, 0x01, 0x49}).has_value());  // index>size
    CHECK_FALSE(SourceRouteParam::decode(Bytes{0x01, 0x00, 0x05, 0x49}).has_value());  // truncated
}

TEST_CASE("complete source routing resolves listed hops in order") {
    Pdu pdu = make_pdu(32, false, 4,
                       {srcroute_option(SourceRouteParam::Kind::Complete, {kIs1, kIs2})});
    auto choice = source_route_analysis(pdu, full_table());
    REQUIRE(std::holds_alternative<NextHopChoice>(choice));
    const auto& hop = std::get<NextHopChoice>(choice);
    CHECK(hop.neighbor == kIs1);
    REQUIRE(hop.updated_param.has_value());
    CHECK(hop.updated_param->next_index == 1);
}

TEST_CASE("complete source routing discards on an unresolvable hop") {
    Pdu pdu = make_pdu(32, false, 4,
                       {srcroute_option(SourceRouteParam::Kind::Complete, {kBogus, kIs2})});
    auto choice = source_route_analysis(pdu, full_table());
    REQUIRE(std::holds_alternative<ReasonForDiscard>(choice));
    CHECK(std::get<ReasonForDiscard>(choice).class_code == reason::kSourceRouteUnknownAddress);
}

TEST_CASE("partial source routing skips unresolvable hops") {
    Pdu pdu = make_pdu(32, false, 4,
                       {srcroute_option(SourceRouteParam::Kind::Partial, {kBogus, kIs2})});
    auto choice = source_route_analysis(pdu, full_table());
    REQUIRE(std::holds_alternative<NextHopChoice>(choice));
    const auto& hop = std::get<NextHopChoice>(choice);
    CHECK(hop.neighbor == kIs1);  // route toward is2 goes via is1
    REQUIRE(hop.updated_param.has_value());
    CHECK(hop.updated_param->next_index == 2);
}

TEST_CASE("partial source routing falls back to the destination") {
    Pdu pdu = make_pdu(32, false, 4,
                       {srcroute_option(SourceRouteParam::Kind::Partial, {kBogus, kBogus})});
    auto choice = source_route_analysis(pdu, full_table());
    REQUIRE(std::holds_alternative<NextHopChoice>(choice));
    CHECK(std::get<NextHopChoice>(choice).updated_param->next_index == 2);

    RoutingTable empty;
    auto none = source_route_analysis(pdu, empty);
    REQUIRE(std::holds_alternative<ReasonForDiscard>(none));
    CHECK(std::get<ReasonForDiscard>(none).class_code == reason::kDestinationUnreachable);
}

TEST_CASE("an exhausted list routes by destination for both kinds") {
    for (auto kind : {SourceRouteParam::Kind::Complete, SourceRouteParam::Kind::Partial}) {
        Pdu pdu = make_pdu(32, false, 4, {srcroute_option(kind, {kIs1, kIs2}, 2)});
        auto choice = source_route_analysis(pdu, full_table());
        REQUIRE(std::holds_alternative<NextHopChoice>(choice));
        CHECK(std::get<NextHopChoice>(choice).neighbor == kIs1);
        CHECK_FALSE(std::get<NextHopChoice>(choice).updated_param.has_value());
    }
}

TEST_CASE("a malformed source route option is a syntax discard") {
    Pdu pdu = make_pdu(32, false, 4, {OptionParam{kOptSourceRouting, Bytes{0x07}}});
    auto choice = source_route_analysis(pdu, full_table());
    REQUIRE(std::holds_alternative<ReasonForDiscard>(choice));
    CHECK(std::get<ReasonForDiscard>(choice).class_code == reason::kSourceRouteSyntax);
}

TEST_CASE("forward decrements the lifetime and adjusts the checksum") {
    Pdu pdu = make_pdu(2, false, 16);
    NodeContext ctx = make_ctx();
    auto result = forward(pdu, ctx, full_table(), env_with_mtu(1500));
    REQUIRE(std::holds_alternative<ForwardOutputs>(result));
    const auto& out = std::get<ForwardOutputs>(result);
    REQUIRE(out.size() == 1);
    CHECK(out[0].second == "eth0");
    CHECK(out[0].first.header.lifetime == 1);
    CHECK(verdict_of(out[0].first) == ChecksumVerdict::Valid);

    // Adjusted pair equals a full recomputation over the mutated header.
    Pdu expect = out[0].first;
    expect.header.checksum_c0 = 0;
    expect.header.checksum_c1 = 0;
    auto encoded = compose_header(expect.header);
    REQUIRE(encoded.ok());
    auto recomputed = compute_checksum(encoded.value(), kChecksumPos);
    REQUIRE(recomputed.ok());
    CHECK(out[0].first.header.checksum_c0 == recomputed.value().first);
    CHECK(out[0].first.header.checksum_c1 == recomputed.value().second);

    // The input PDU is untouched.
    CHECK(pdu.header.lifetime == 2);
}

TEST_CASE("a not-used checksum stays zero through forwarding") {
    Pdu pdu = make_pdu(5, false, 16);
    pdu.header.checksum_c0 = 0;
    pdu.header.checksum_c1 = 0;
    NodeContext ctx = make_ctx();
    auto result = forward(pdu, ctx, full_table(), env_with_mtu(1500));
    REQUIRE(std::holds_alternative<ForwardOutputs>(result));
    const Pdu& out = std::get<ForwardOutputs>(result)[0].first;
    CHECK(out.header.lifetime == 4);
    CHECK(verdict_of(out) == ChecksumVerdict::NotUsed);
}

TEST_CASE("lifetime exhaustion discards, with a report only when requested") {
    NodeContext ctx = make_ctx();
    TraceLog log;
    ctx.trace = &log;

    Pdu silent = make_pdu(1, false, 8);
    auto result = forward(silent, ctx, full_table(), env_with_mtu(1500));
    REQUIRE(std::holds_alternative<Discarded>(result));
    CHECK(std::get<Discarded>(result).reason.class_code == reason::kLifetimeExpired);
    CHECK_FALSE(std::get<Discarded>(result).error_report.has_value());

    Pdu reporting = make_pdu(1, false, 8, {}, true);
    result = forward(reporting, ctx, full_table(), env_with_mtu(1500));
    REQUIRE(std::holds_alternative<Discarded>(result));
    const auto& discarded = std::get<Discarded>(result);
    REQUIRE(discarded.error_report.has_value());
    CHECK(discarded.error_report->header.type.is_error_report());
    CHECK(discarded.error_report->header.dest == kSrc);
}

TEST_CASE("forward discards when no route matches") {
    Pdu pdu = make_pdu(9, false, 8);
    NodeContext ctx = make_ctx();
    RoutingTable empty;
    auto result = forward(pdu, ctx, empty, env_with_mtu(1500));
    REQUIRE(std::holds_alternative<Discarded>(result));
    CHECK(std::get<Discarded>(result).reason.class_code == reason::kDestinationUnreachable);
}

TEST_CASE("forward fragments oversized PDUs when permitted") {
    Pdu pdu = make_pdu(9, true, 400);
    NodeContext ctx = make_ctx();
    auto result = forward(pdu, ctx, full_table(), env_with_mtu(128));
    REQUIRE(std::holds_alternative<ForwardOutputs>(result));
    const auto& out = std::get<ForwardOutputs>(result);
    CHECK(out.size() > 1);
    std::size_t data = 0;
    for (const auto& [seg, dev] : out) {
        CHECK(dev == "eth0");
        CHECK(seg.header.segment_length <= 128);
        CHECK(seg.header.lifetime == 8);
        CHECK(verdict_of(seg) == ChecksumVerdict::Valid);
        data += seg.payload.size();
    }
    CHECK(data == 400);
}

TEST_CASE("forward discards oversized PDUs when segmentation is not permitted") {
    Pdu pdu = make_pdu(9, false, 400);
    NodeContext ctx = make_ctx();
    auto result = forward(pdu, ctx, full_table(), env_with_mtu(128));
    REQUIRE(std::holds_alternative<Discarded>(result));
    CHECK(std::get<Discarded>(result).reason.class_code == reason::kSegmentationNotPermitted);
}

TEST_CASE("forward rewrites the source-route pointer and stays valid") {
    Pdu pdu = make_pdu(9, false, 8,
                       {srcroute_option(SourceRouteParam::Kind::Complete, {kIs1, kIs2})});
    NodeContext ctx = make_ctx();
    auto result = forward(pdu, ctx, full_table(), env_with_mtu(1500));
    REQUIRE(std::holds_alternative<ForwardOutputs>(result));
    const Pdu& out = std::get<ForwardOutputs>(result)[0].first;
    CHECK(decoded_srcroute(out).next_index == 1);
    CHECK(verdict_of(out) == ChecksumVerdict::Valid);
    CHECK(decoded_srcroute(pdu).next_index == 0);  // input untouched
}

TEST_CASE("congestion marking needs the option, the format and the depth") {
    const OptionParam qos{kOptQosMaintenance, Bytes{0xC0, 0x00}};

    Pdu plain = make_pdu(9, false, 8);
    bool marked = true;
    Pdu unchanged = congestion_notify(plain, 10, 4, &marked);
    CHECK_FALSE(marked);
    CHECK(unchanged == plain);

    Pdu with_qos = make_pdu(9, false, 8, {qos});
    congestion_notify(with_qos, 4, 4, &marked);  // depth not above threshold
    CHECK_FALSE(marked);

    Pdu out = congestion_notify(with_qos, 5, 4, &marked);
    CHECK(marked);
    const OptionParam* opt = find_option(out.header, kOptQosMaintenance);
    REQUIRE(opt != nullptr);
    CHECK((opt->value.back() & kQosCongestionBit) != 0);
    CHECK(verdict_of(out) == ChecksumVerdict::Valid);

    // Non-global format is left alone.
    Pdu local_fmt = make_pdu(9, false, 8, {OptionParam{kOptQosMaintenance, Bytes{0x40, 0x00}}});
    congestion_notify(local_fmt, 9, 4, &marked);
    CHECK_FALSE(marked);
}

TEST_CASE("a PDU of unknown type forwards like any other") {
    Pdu pdu = make_pdu(9, false, 8);
    pdu.header.type = PduType::from_code(0x05);
    // restamp after the type change
    pdu.header.checksum_c0 = 0;
    pdu.header.checksum_c1 = 0;
    auto encoded = compose_header(pdu.header);
    REQUIRE(encoded.ok());
    auto sum = compute_checksum(encoded.value(), kChecksumPos);
    REQUIRE(sum.ok());
    pdu.header.checksum_c0 = sum.value().first;
    pdu.header.checksum_c1 = sum.value().second;

    NodeContext ctx = make_ctx();
    auto result = forward(pdu, ctx, full_table(), env_with_mtu(1500));
    REQUIRE(std::holds_alternative<ForwardOutputs>(result));
    const Pdu& out = std::get<ForwardOutputs>(result)[0].first;
    CHECK(out.header.type == PduType::from_code(0x05));
    CHECK(out.header.lifetime == 8);
    CHECK(verdict_of(out) == ChecksumVerdict::Valid);
}
