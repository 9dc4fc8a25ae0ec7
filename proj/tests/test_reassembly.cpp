#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "clnp/checksum.hpp"
#include "clnp/codec.hpp"
#include "clnp/output.hpp"
#include "clnp/reassembly.hpp"

using namespace clnp;

namespace {

Pdu make_segmented_pdu(std::uint16_t duid, std::size_t payload_len, std::uint8_t seed,
                       bool er = false) {
    SendRequest req;
    req.src = NsapAddress(Bytes{0x49, 0x00, 0x01});
    req.dst = NsapAddress(Bytes{0x49, 0x00, 0x02});
    req.sp_flag = true;
    req.er_flag = er;
    req.lifetime = 32;
    req.payload.resize(payload_len);
    for (std::size_t i = 0; i < payload_len; ++i) {
        req.payload[i] = static_cast<std::uint8_t>(seed + i);
    }
    DataUnitIdCounter counter;
    while (true) {
        auto pdu = compose(req, counter);
        REQUIRE(pdu.ok());
        if (pdu.value().header.seg->data_unit_id == duid) return pdu.value();
        // walk the counter until it hands out the requested id
    }
}

std::vector<Pdu> split(const Pdu& pdu, std::size_t mtu) {
    auto pieces = fragment(pdu, mtu);
    REQUIRE(pieces.ok());
    return pieces.value();
}

}  // namespace

TEST_CASE("eight out-of-order segments reassemble three initial PDUs") {
    Pdu a = make_segmented_pdu(0, 200, 10);
    Pdu b = make_segmented_pdu(1, 200, 40);
    Pdu c = make_segmented_pdu(2, 120, 70);

    const std::size_t mtu = a.header.header_length + 96;
    std::vector<Pdu> segs;
    for (const auto& p : split(a, mtu)) segs.push_back(p);  // 3 segments (96+96+8)
    for (const auto& p : split(b, mtu)) segs.push_back(p);  // 3 segments
    for (const auto& p : split(c, mtu)) segs.push_back(p);  // 2 segments (96+24)
    REQUIRE(segs.size() == 8);

    const std::size_t order[8] = {5, 0, 7, 3, 1, 6, 2, 4};
    FragmentStore store;
    std::vector<Pdu> completed;
    for (std::size_t idx : order) {
        auto r = insert_fragment(store, segs[idx], 0, 10'000);
        if (auto* done = std::get_if<ReassemblyComplete>(&r)) {
            completed.push_back(done->pdu);
        } else {
            CHECK(std::holds_alternative<ReassemblyPending>(r));
        }
    }
    REQUIRE(completed.size() == 3);
    CHECK(store.empty());

    auto matches = [&](const Pdu& original) {
        return std::count(completed.begin(), completed.end(), original) == 1;
    };
    CHECK(matches(a));
    CHECK(matches(b));
    CHECK(matches(c));
}

TEST_CASE("overlapping segments still reassemble the originals") {
    Pdu a = make_segmented_pdu(0, 160, 3);
    Pdu b = make_segmented_pdu(1, 160, 90);
    Pdu c = make_segmented_pdu(2, 64, 200);

    const std::size_t hl = a.header.header_length;
    // Two fragmentations of the same PDU produce overlapping coverage.
    auto a_small = split(a, hl + 64);  // offsets 0,64,128
    auto a_large = split(a, hl + 96);  // offsets 0,96
    std::vector<Pdu> segs = {a_small[0], a_large[0], a_small[2], a_large[1],
                             split(b, hl + 96)[0], split(b, hl + 96)[1],
                             split(c, hl + 32)[0], split(c, hl + 32)[1]};
    REQUIRE(segs.size() == 8);

    FragmentStore store;
    std::vector<Pdu> completed;
    for (const auto& seg : segs) {
        auto r = insert_fragment(store, seg, 0, 10'000);
        if (auto* done = std::get_if<ReassemblyComplete>(&r)) completed.push_back(done->pdu);
    }
    REQUIRE(completed.size() == 3);
    CHECK(store.empty());
    CHECK(std::count(completed.begin(), completed.end(), a) == 1);
    CHECK(std::count(completed.begin(), completed.end(), b) == 1);
    CHECK(std::count(completed.begin(), completed.end(), c) == 1);
}

TEST_CASE("the same data unit id from different sources keeps separate buffers") {
    Pdu a = make_segmented_pdu(7, 160, 10);
    Pdu b = make_segmented_pdu(7, 160, 90);
    b.header.src = NsapAddress(Bytes{0x49, 0x00, 0x33});
    b.header.checksum_c0 = 0;
    b.header.checksum_c1 = 0;
    auto sum = compute_checksum(compose_header(b.header).value(), kChecksumPos);
    REQUIRE(sum.ok());
    b.header.checksum_c0 = sum.value().first;
    b.header.checksum_c1 = sum.value().second;

    const std::size_t mtu = a.header.header_length + 96;
    auto sa = split(a, mtu);
    auto sb = split(b, mtu);

    FragmentStore store;
    insert_fragment(store, sa[0], 0, 10'000);
    insert_fragment(store, sb[0], 0, 10'000);
    CHECK(store.size() == 2);

    std::vector<Pdu> completed;
    for (const auto& seg : {sa[1], sb[1]}) {
        auto r = insert_fragment(store, seg, 0, 10'000);
        if (auto* done = std::get_if<ReassemblyComplete>(&r)) completed.push_back(done->pdu);
    }
    REQUIRE(completed.size() == 2);
    CHECK(std::count(completed.begin(), completed.end(), a) == 1);
    CHECK(std::count(completed.begin(), completed.end(), b) == 1);
    CHECK(store.empty());
}

TEST_CASE("a duplicate of covered octets leaves the buffer pending and unchanged") {
    Pdu a = make_segmented_pdu(0, 200, 1);
    auto segs = split(a, a.header.header_length + 96);
    REQUIRE(segs.size() == 3);

    FragmentStore store;
    CHECK(std::holds_alternative<ReassemblyPending>(insert_fragment(store, segs[0], 0, 10'000)));
    const auto ranges_before = store.buffers().begin()->second.ranges;
    CHECK(std::holds_alternative<ReassemblyPending>(insert_fragment(store, segs[0], 0, 10'000)));
    CHECK(store.buffers().begin()->second.ranges == ranges_before);
    CHECK(store.size() == 1);
}

TEST_CASE("a segment disagreeing on total length is rejected") {
    Pdu a = make_segmented_pdu(0, 200, 1);
    auto segs = split(a, a.header.header_length + 96);

    FragmentStore store;
    insert_fragment(store, segs[0], 0, 10'000);
    Pdu forged = segs[1];
    forged.header.seg->total_length += 8;
    auto r = insert_fragment(store, forged, 0, 10'000);
    REQUIRE(std::holds_alternative<ReassemblyError>(r));
    CHECK(std::get<ReassemblyError>(r) == ReassemblyError::InconsistentTotalLength);
    CHECK(store.size() == 1);  // buffer untouched
}

TEST_CASE("a segment reaching past the total length is rejected") {
    Pdu a = make_segmented_pdu(0, 64, 1);
    auto segs = split(a, a.header.header_length + 32);
    REQUIRE(segs.size() == 2);

    FragmentStore store;
    insert_fragment(store, segs[0], 0, 10'000);
    Pdu forged = segs[1];
    forged.payload.resize(forged.payload.size() + 64, 0xEE);
    forged.header.segment_length =
        static_cast<std::uint16_t>(forged.header.header_length + forged.payload.size());
    auto r = insert_fragment(store, forged, 0, 10'000);
    REQUIRE(std::holds_alternative<ReassemblyError>(r));
    CHECK(std::get<ReassemblyError>(r) == ReassemblyError::OffsetBeyondTotal);
}

TEST_CASE("expiry reaps only overdue buffers") {
    Pdu a = make_segmented_pdu(0, 200, 1);
    Pdu b = make_segmented_pdu(1, 200, 2);
    auto a_segs = split(a, a.header.header_length + 96);
    auto b_segs = split(b, b.header.header_length + 96);

    FragmentStore store;
    insert_fragment(store, a_segs[0], 0, 5'000);      // deadline 5000
    insert_fragment(store, b_segs[0], 4'000, 5'000);  // deadline 9000
    CHECK(store.size() == 2);

    CHECK(expire(store, 0).empty());
    CHECK(store.size() == 2);

    auto dead = expire(store, 5'000);
    REQUIRE(dead.size() == 1);
    CHECK(dead[0].key.data_unit_id == a.header.seg->data_unit_id);
    CHECK(dead[0].first_header == a_segs[0].header);
    CHECK(store.size() == 1);

    CHECK(expire(store, 20'000).size() == 1);
    CHECK(store.empty());

    CHECK(expire(store, 99'000).empty());  // empty store stays empty
}

TEST_CASE("a fragment arriving after the deadline reports the stale buffer") {
    Pdu a = make_segmented_pdu(0, 200, 1);
    auto segs = split(a, a.header.header_length + 96);

    FragmentStore store;
    insert_fragment(store, segs[0], 0, 1'000);
    auto r = insert_fragment(store, segs[1], 2'000, 1'000);
    REQUIRE(std::holds_alternative<ReassemblyExpired>(r));
    CHECK(std::get<ReassemblyExpired>(r).first_header == segs[0].header);
    CHECK(store.empty());

    // The same fragment starts a fresh attempt afterwards.
    CHECK(std::holds_alternative<ReassemblyPending>(insert_fragment(store, segs[1], 2'000, 1'000)));
    CHECK(store.size() == 1);
}

TEST_CASE("an unfragmented segmentation-permitted PDU completes immediately") {
    Pdu a = make_segmented_pdu(0, 40, 9);
    FragmentStore store;
    auto r = insert_fragment(store, a, 0, 10'000);
    REQUIRE(std::holds_alternative<ReassemblyComplete>(r));
    CHECK(std::get<ReassemblyComplete>(r).pdu == a);
    CHECK(store.empty());
}

TEST_CASE("any permutation with duplicates reassembles the original") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t payload_len = rng() % 1500;
        Pdu p = make_segmented_pdu(static_cast<std::uint16_t>(trial), payload_len,
                                   static_cast<std::uint8_t>(rng()));
        const std::size_t mtu = p.header.header_length + 8 + rng() % 256;
        auto segs = split(p, mtu);

        std::vector<std::size_t> order(segs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        // Duplicates of anything but the final segment, placed before the
        // end: coverage completes exactly at the last arrival.
        const std::size_t dups = segs.size() >= 2 ? rng() % 3 : 0;
        for (std::size_t i = 0; i < dups; ++i) {
            std::size_t dup;
            do {
                dup = rng() % segs.size();
            } while (dup == order.back());
            order.insert(order.begin() + static_cast<std::ptrdiff_t>(rng() % order.size()), dup);
        }

        FragmentStore store;
        std::vector<Pdu> completed;
        for (std::size_t idx : order) {
            auto r = insert_fragment(store, segs[idx], 0, 10'000);
            if (auto* done = std::get_if<ReassemblyComplete>(&r)) completed.push_back(done->pdu);
            // Ranges stay sorted and disjoint after every insert.
            for (const auto& [key, buf] : store.buffers()) {
                (void)key;
                for (std::size_t i = 0; i + 1 < buf.ranges.size(); ++i) {
                    REQUIRE(buf.ranges[i].first + buf.ranges[i].second.size() <
                            buf.ranges[i + 1].first);
                }
            }
        }
        REQUIRE(completed.size() == 1);
        CHECK(completed[0] == p);
        CHECK(store.empty());
    }
}
