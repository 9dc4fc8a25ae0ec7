#include "clnp/trace.hpp"

namespace clnp {

namespace {
constexpr std::array<std::string_view, kTraceActionCount> kActionNames = {
    "RECV",    "DELIVER",  "FORWARD",     "DISCARD", "EMIT_ER",
    "FRAGMENT", "REASSEMBLED", "TRANSMIT", "EXPIRE",  "CONGESTION_MARK",
};
constexpr std::array<std::string_view, kTraceActionCount> kSummaryNames = {
    "recv",    "deliver",  "forward",     "discard", "emit_er",
    "fragment", "reassembled", "transmit", "expire",  "congestion_mark",
};
}  // namespace

std::string_view to_string(TraceAction action) {
    return kActionNames[static_cast<std::size_t>(action)];
}

std::string_view summary_name(TraceAction action) {
    return kSummaryNames[static_cast<std::size_t>(action)];
}

void TraceLog::append(std::uint64_t time_ms, std::string node, TraceAction action,
                      std::string detail) {
    records_.push_back({time_ms, std::move(node), action, std::move(detail)});
}

std::string TraceLog::to_text() const {
    std::string out;
    for (const auto& r : records_) {
        out += std::to_string(r.time_ms);
        out += '\t';
        out += r.node;
        out += '\t';
        out += to_string(r.action);
        out += '\t';
        out += r.detail;
        out += '\n';
    }
    return out;
}

std::string TraceLog::summary() const {
    std::array<std::size_t, kTraceActionCount> counts{};
    for (const auto& r : records_) counts[static_cast<std::size_t>(r.action)]++;
    std::string out;
    for (std::size_t i = 0; i < kTraceActionCount; ++i) {
        if (counts[i] == 0) continue;
        if (!out.empty()) out += ' ';
        out += kSummaryNames[i];
        out += '=';
        out += std::to_string(counts[i]);
    }
    return out;
}

std::size_t TraceLog::count(TraceAction action) const {
    std::size_t n = 0;
    for (const auto& r : records_) {
        if (r.action == action) ++n;
    }
    return n;
}

}  // namespace clnp
