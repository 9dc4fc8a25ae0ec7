#include <charconv>
#include <sstream>

#include "clnp/netsim.hpp"

namespace clnp::sim {

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

struct KeyValues {
    std::vector<std::pair<std::string, std::string>> pairs;

    const std::string* get(std::string_view key) const {
        for (const auto& [k, v] : pairs) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

std::optional<KeyValues> parse_key_values(const std::vector<std::string>& tokens,
                                          std::size_t from) {
    KeyValues kv;
    for (std::size_t i = from; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0) return std::nullopt;
        kv.pairs.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
    }
    return kv;
}

std::optional<std::vector<NsapAddress>> parse_address_list(std::string_view text) {
    std::vector<NsapAddress> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto part = text.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
        auto addr = NsapAddress::from_hex(part);
        if (!addr || !addr->wire_valid()) return std::nullopt;
        out.push_back(std::move(*addr));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<SourceRouteParam> parse_srcroute_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const auto kind_text = spec.substr(0, colon);
    SourceRouteParam param;
    if (kind_text == "complete") {
        param.kind = SourceRouteParam::Kind::Complete;
    } else if (kind_text == "partial") {
        param.kind = SourceRouteParam::Kind::Partial;
    } else {
        return std::nullopt;
    }
    auto entries = parse_address_list(spec.substr(colon + 1));
    if (!entries || entries->empty()) return std::nullopt;
    param.entries = std::move(*entries);
    return param;
}

std::optional<std::pair<std::string, std::string>> split_endpoint(const std::string& spec) {
    const auto dot = spec.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == spec.size()) return std::nullopt;
    return std::make_pair(spec.substr(0, dot), spec.substr(dot + 1));
}

}  // namespace

Bytes scenario_payload(std::size_t size) {
    Bytes out(size);
    for (std::size_t i = 0; i < size; ++i) {
        out[i] = static_cast<std::uint8_t>((i * 7 + size) & 0xFF);
    }
    return out;
}

Result<Scenario, ScenarioError> parse_scenario(std::string_view text) {
    Scenario sc;
    struct Directive {
        std::size_t line;
        bool drop;  // otherwise reorder
        std::vector<std::size_t> indices;
    };
    std::vector<Directive> directives;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;

        auto fail = [&](std::string msg) -> Result<Scenario, ScenarioError> {
            return ScenarioError{line_no, std::move(msg)};
        };

        const std::string& stanza = tokens[0];
        if (stanza == "node") {
            if (tokens.size() != 5 || tokens[3] != "addr") {
                return fail("expected 'node <name> es|is addr <hex>[,<hex>...]'");
            }
            NodeDecl n;
            n.line = line_no;
            n.name = tokens[1];
            if (tokens[2] == "es") {
                n.kind = NodeKind::EndSystem;
            } else if (tokens[2] == "is") {
                n.kind = NodeKind::Intermediate;
            } else {
                return fail("node kind must be 'es' or 'is'");
            }
            auto addrs = parse_address_list(tokens[4]);
            if (!addrs || addrs->empty()) return fail("bad address list");
            n.addresses = std::move(*addrs);
            sc.nodes.push_back(std::move(n));
        } else if (stanza == "link") {
            if (tokens.size() != 7 || tokens[3] != "mtu" || tokens[5] != "delay") {
                return fail("expected 'link <a>.<dev> <b>.<dev> mtu <n> delay <ms>'");
            }
            LinkDecl l;
            l.line = line_no;
            auto a = split_endpoint(tokens[1]);
            auto b = split_endpoint(tokens[2]);
            if (!a || !b) return fail("endpoints must be '<node>.<device>'");
            l.node_a = a->first;
            l.dev_a = a->second;
            l.node_b = b->first;
            l.dev_b = b->second;
            auto mtu = parse_u64(tokens[4]);
            auto delay = parse_u64(tokens[6]);
            if (!mtu || !delay) return fail("bad mtu or delay");
            if (*mtu < 64) return fail("mtu must be at least 64");
            l.mtu = static_cast<std::size_t>(*mtu);
            l.delay_ms = *delay;
            sc.links.push_back(std::move(l));
        } else if (stanza == "route") {
            if (tokens.size() < 3) return fail("expected 'route <node> <entry>'");
            std::string rest;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                if (i > 2) rest += ' ';
                rest += tokens[i];
            }
            auto entry = parse_route_entry(rest);
            if (!entry.ok()) return fail(entry.error());
            sc.routes.push_back({line_no, tokens[1], std::move(entry).value()});
        } else if (stanza == "inject" || stanza == "inject_raw") {
            auto kv = parse_key_values(tokens, 1);
            if (!kv) return fail("expected key=value arguments");
            InjectionDecl inj;
            inj.line = line_no;
            inj.raw = stanza == "inject_raw";
            const std::string* t = kv->get("t");
            const std::string* node = kv->get("node");
            if (!t || !node) return fail("missing t= or node=");
            auto tv = parse_u64(*t);
            if (!tv) return fail("bad t=");
            inj.time = *tv;
            inj.node = *node;
            if (inj.raw) {
                const std::string* dev = kv->get("dev");
                const std::string* hex = kv->get("hex");
                if (!dev || !hex) return fail("missing dev= or hex=");
                inj.dev = *dev;
                auto bytes = hex_decode(*hex);
                if (!bytes || bytes->empty()) return fail("bad hex=");
                inj.raw_bytes = std::move(*bytes);
                for (const auto& [k, v] : kv->pairs) {
                    (void)v;
                    if (k != "t" && k != "node" && k != "dev" && k != "hex") {
                        return fail("unknown key '" + k + "'");
                    }
                }
            } else {
                const std::string* dst = kv->get("dst");
                const std::string* size = kv->get("size");
                const std::string* sp = kv->get("sp");
                const std::string* er = kv->get("er");
                const std::string* lifetime = kv->get("lifetime");
                if (!dst || !size || !sp || !er || !lifetime) {
                    return fail("missing one of dst=/size=/sp=/er=/lifetime=");
                }
                auto dstv = NsapAddress::from_hex(*dst);
                if (!dstv || !dstv->wire_valid()) return fail("bad dst=");
                inj.dst = *dstv;
                auto sizev = parse_u64(*size);
                if (!sizev || *sizev > 0xFFFF) return fail("bad size=");
                inj.size = static_cast<std::size_t>(*sizev);
                if ((*sp != "0" && *sp != "1") || (*er != "0" && *er != "1")) {
                    return fail("sp= and er= must be 0 or 1");
                }
                inj.sp = *sp == "1";
                inj.er = *er == "1";
                auto lt = parse_u64(*lifetime);
                if (!lt || *lt > 255) return fail("bad lifetime=");
                inj.lifetime = static_cast<std::uint8_t>(*lt);
                for (const auto& [k, v] : kv->pairs) {
                    if (k == "t" || k == "node" || k == "dst" || k == "size" || k == "sp" ||
                        k == "er" || k == "lifetime") {
                        continue;
                    }
                    if (k == "csum") {
                        if (v != "0" && v != "1") return fail("csum= must be 0 or 1");
                        inj.strip_checksum = v == "0";
                    } else if (k == "qos") {
                        if (v != "0" && v != "1") return fail("qos= must be 0 or 1");
                        inj.qos = v == "1";
                    } else if (k == "srcroute") {
                        auto sr = parse_srcroute_spec(v);
                        if (!sr) return fail("bad srcroute=");
                        inj.srcroute = std::move(*sr);
                    } else {
                        return fail("unknown key '" + k + "'");
                    }
                }
            }
            sc.injections.push_back(std::move(inj));
        } else if (stanza == "drop" || stanza == "reorder") {
            auto kv = parse_key_values(tokens, 1);
            if (!kv || kv->pairs.size() != 1 || !kv->get("inject")) {
                return fail("expected 'inject=<indices>'");
            }
            Directive d;
            d.line = line_no;
            d.drop = stanza == "drop";
            std::string_view list = *kv->get("inject");
            std::size_t p = 0;
            while (p <= list.size()) {
                const auto comma = list.find(',', p);
                const auto part =
                    list.substr(p, comma == std::string_view::npos ? comma : comma - p);
                auto idx = parse_u64(part);
                if (!idx) return fail("bad injection index");
                d.indices.push_back(static_cast<std::size_t>(*idx));
                if (comma == std::string_view::npos) break;
                p = comma + 1;
            }
            if (d.drop && d.indices.size() != 1) return fail("drop takes one index");
            if (!d.drop && d.indices.size() < 2) return fail("reorder takes two or more indices");
            directives.push_back(std::move(d));
        } else {
            return fail("unknown stanza '" + stanza + "'");
        }
    }

    for (const auto& d : directives) {
        for (std::size_t idx : d.indices) {
            if (idx >= sc.injections.size()) {
                return ScenarioError{d.line, "injection index out of range"};
            }
        }
        if (d.drop) {
            sc.injections[d.indices[0]].dropped = true;
        } else {
            std::vector<std::uint64_t> times;
            times.reserve(d.indices.size());
            for (std::size_t idx : d.indices) times.push_back(sc.injections[idx].time);
            std::sort(times.begin(), times.end());
            for (std::size_t i = 0; i < d.indices.size(); ++i) {
                sc.injections[d.indices[i]].time = times[i];
            }
        }
    }
    return sc;
}

}  // namespace clnp::sim
