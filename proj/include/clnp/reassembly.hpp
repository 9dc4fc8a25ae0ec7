#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "clnp/pdu.hpp"

namespace clnp {

struct FragmentKey {
    std::uint16_t data_unit_id = 0;
    NsapAddress src;
    NsapAddress dst;

    friend auto operator<=>(const FragmentKey&, const FragmentKey&) = default;
};

/// Reassembly state for one initial PDU. Ranges stay sorted, disjoint and
/// coalesced; overlapping octets of later fragments are trimmed away
/// (first arrival wins).
struct FragmentBuffer {
    FragmentKey key;
    std::uint16_t total_length = 0;   // fixed by the first fragment seen
    std::uint16_t header_length = 0;  // from the first fragment seen
    ClnpHeader first_header;          // header of the fragment that created the buffer
    std::optional<ClnpHeader> head_template;  // header of the offset-0 fragment
    std::vector<std::pair<std::uint32_t, Bytes>> ranges;
    std::uint64_t deadline_ms = 0;

    std::uint32_t data_total() const {
        return static_cast<std::uint32_t>(total_length - header_length);
    }
    std::uint32_t covered() const;
};

class FragmentStore {
public:
    FragmentBuffer* find(const FragmentKey& key);
    FragmentBuffer& create(FragmentKey key);
    void erase(const FragmentKey& key);
    std::size_t size() const { return buffers_.size(); }
    bool empty() const { return buffers_.empty(); }
    const std::map<FragmentKey, FragmentBuffer>& buffers() const { return buffers_; }

private:
    std::map<FragmentKey, FragmentBuffer> buffers_;
};

struct ReassemblyComplete {
    Pdu pdu;
};
struct ReassemblyPending {};
/// The buffer for this key had already passed its deadline; it has been
/// dropped and the incoming fragment was not retained. Callers may insert
/// the fragment again to start a fresh buffer.
struct ReassemblyExpired {
    ClnpHeader first_header;
};
enum class ReassemblyError { InconsistentTotalLength, OffsetBeyondTotal };

using InsertResult =
    std::variant<ReassemblyComplete, ReassemblyPending, ReassemblyExpired, ReassemblyError>;

/// Merges one segment. Requires a PDU with the segmentation part present
/// that already passed header analysis and checksum verification. On full
/// coverage the reconstructed initial PDU is returned (more-segments
/// cleared, offset zero, checksum restamped unless unused) and the buffer
/// is deleted.
InsertResult insert_fragment(FragmentStore& store, const Pdu& pdu, std::uint64_t now_ms,
                             std::uint64_t lifetime_ms);

struct ExpiredBuffer {
    FragmentKey key;
    ClnpHeader first_header;
};

/// Drops every buffer whose deadline has passed and reports enough state
/// for the caller to raise an error report where requested.
std::vector<ExpiredBuffer> expire(FragmentStore& store, std::uint64_t now_ms);

}  // namespace clnp
