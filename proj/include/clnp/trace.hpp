#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clnp {

enum class TraceAction {
    Recv,
    Deliver,
    Forward,
    Discard,
    EmitEr,
    Fragment,
    Reassembled,
    Transmit,
    Expire,
    CongestionMark,
};

inline constexpr std::size_t kTraceActionCount = 10;

std::string_view to_string(TraceAction action);        // "RECV", "EMIT_ER", ...
std::string_view summary_name(TraceAction action);     // "recv", "emit_er", ...

struct TraceRecord {
    std::uint64_t time_ms = 0;
    std::string node;
    TraceAction action = TraceAction::Recv;
    std::string detail;  // stable key=value pairs
};

/// Append-only event record with a stable textual form: one record per
/// line, tab-separated `time<TAB>node<TAB>action<TAB>detail`.
class TraceLog {
public:
    void append(std::uint64_t time_ms, std::string node, TraceAction action, std::string detail);

    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::string to_text() const;

    /// Space-separated `action=count` pairs for actions that occurred,
    /// in declaration order.
    std::string summary() const;

    std::size_t count(TraceAction action) const;

private:
    std::vector<TraceRecord> records_;
};

}  // namespace clnp
