#include "clnp/reassembly.hpp"

#include <algorithm>

#include "clnp/checksum.hpp"
#include "clnp/codec.hpp"

namespace clnp {

std::uint32_t FragmentBuffer::covered() const {
    std::uint32_t n = 0;
    for (const auto& [start, data] : ranges) {
        (void)start;
        n += static_cast<std::uint32_t>(data.size());
    }
    return n;
}

FragmentBuffer* FragmentStore::find(const FragmentKey& key) {
    auto it = buffers_.find(key);
    return it == buffers_.end() ? nullptr : &it->second;
}

FragmentBuffer& FragmentStore::create(FragmentKey key) {
    auto [it, inserted] = buffers_.emplace(key, FragmentBuffer{});
    it->second.key = std::move(key);
    return it->second;
}

void FragmentStore::erase(const FragmentKey& key) { buffers_.erase(key); }

namespace {

// Inserts [start, start+data) into sorted disjoint ranges, trimming the
// incoming octets against everything already present, then coalesces
// adjacent ranges.
void merge_range(std::vector<std::pair<std::uint32_t, Bytes>>& ranges, std::uint32_t start,
                 ByteView data) {
    std::vector<std::pair<std::uint32_t, Bytes>> pieces;
    std::uint32_t cur = start;
    const std::uint32_t end = start + static_cast<std::uint32_t>(data.size());
    for (const auto& [rs, rd] : ranges) {
        const std::uint32_t re = rs + static_cast<std::uint32_t>(rd.size());
        if (re <= cur) continue;
        if (rs >= end) break;
        if (rs > cur) {
            pieces.emplace_back(cur, Bytes(data.begin() + (cur - start), data.begin() + (rs - start)));
        }
        cur = std::max(cur, re);
        if (cur >= end) break;
    }
    if (cur < end) {
        pieces.emplace_back(cur, Bytes(data.begin() + (cur - start), data.end()));
    }

    for (auto& piece : pieces) {
        auto it = std::upper_bound(ranges.begin(), ranges.end(), piece.first,
                                   [](std::uint32_t s, const auto& r) { return s < r.first; });
        ranges.insert(it, std::move(piece));
    }

    // Coalesce touching neighbours so coverage is the sum of range sizes.
    for (std::size_t i = 0; i + 1 < ranges.size();) {
        auto& a = ranges[i];
        auto& b = ranges[i + 1];
        if (a.first + a.second.size() == b.first) {
            a.second.insert(a.second.end(), b.second.begin(), b.second.end());
            ranges.erase(ranges.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        } else {
            ++i;
        }
    }
}

Pdu reconstruct(const FragmentBuffer& buf) {
    Pdu out;
    out.header = *buf.head_template;
    out.header.flags.ms = false;
    out.header.seg = SegmentationPart{buf.head_template->seg->data_unit_id, 0, buf.total_length};
    out.header.segment_length = buf.total_length;
    out.payload = buf.ranges.empty() ? Bytes{} : buf.ranges.front().second;

    if (out.header.checksum_in_use()) {
        out.header.checksum_c0 = 0;
        out.header.checksum_c1 = 0;
        if (auto encoded = compose_header(out.header); encoded.ok()) {
            if (auto sum = compute_checksum(encoded.value(), kChecksumPos); sum.ok()) {
                out.header.checksum_c0 = sum.value().first;
                out.header.checksum_c1 = sum.value().second;
            }
        }
    }
    return out;
}

}  // namespace

InsertResult insert_fragment(FragmentStore& store, const Pdu& pdu, std::uint64_t now_ms,
                             std::uint64_t lifetime_ms) {
    if (!pdu.header.seg) return ReassemblyError::OffsetBeyondTotal;
    const SegmentationPart& seg = *pdu.header.seg;
    FragmentKey key{seg.data_unit_id, pdu.header.src, pdu.header.dest};

    FragmentBuffer* buf = store.find(key);
    if (buf && buf->deadline_ms <= now_ms) {
        ClnpHeader first = buf->first_header;
        store.erase(key);
        return ReassemblyExpired{std::move(first)};
    }

    if (buf) {
        if (seg.total_length != buf->total_length) {
            return ReassemblyError::InconsistentTotalLength;
        }
    } else {
        if (seg.total_length < pdu.header.header_length) {
            return ReassemblyError::InconsistentTotalLength;
        }
        const std::uint32_t total_data =
            static_cast<std::uint32_t>(seg.total_length - pdu.header.header_length);
        const std::uint32_t end = seg.segment_offset + static_cast<std::uint32_t>(pdu.payload.size());
        if (seg.segment_offset > total_data || end > total_data) {
            return ReassemblyError::OffsetBeyondTotal;
        }
        buf = &store.create(key);
        buf->total_length = seg.total_length;
        buf->header_length = pdu.header.header_length;
        buf->first_header = pdu.header;
        buf->deadline_ms = now_ms + lifetime_ms;
    }

    const std::uint32_t end = seg.segment_offset + static_cast<std::uint32_t>(pdu.payload.size());
    if (seg.segment_offset > buf->data_total() || end > buf->data_total()) {
        return ReassemblyError::OffsetBeyondTotal;
    }

    if (seg.segment_offset == 0) buf->head_template = pdu.header;
    merge_range(buf->ranges, seg.segment_offset, pdu.payload);

    if (buf->covered() == buf->data_total()) {
        Pdu whole = reconstruct(*buf);
        store.erase(key);
        return ReassemblyComplete{std::move(whole)};
    }
    return ReassemblyPending{};
}

std::vector<ExpiredBuffer> expire(FragmentStore& store, std::uint64_t now_ms) {
    std::vector<ExpiredBuffer> out;
    std::vector<FragmentKey> dead;
    for (const auto& [key, buf] : store.buffers()) {
        if (buf.deadline_ms <= now_ms) {
            out.push_back({key, buf.first_header});
            dead.push_back(key);
        }
    }
    for (const auto& key : dead) store.erase(key);
    return out;
}

}  // namespace clnp
