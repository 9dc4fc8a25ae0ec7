#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "clnp/checksum.hpp"
#include "clnp/codec.hpp"
#include "clnp/netsim.hpp"
#include "clnp/output.hpp"
#include "clnp/routing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProtocol = 1;  // parse/verify/fragment-level failure
constexpr int kExitUsage = 2;     // bad arguments or I/O

int fail_usage(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitUsage;
}

int fail_protocol(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitProtocol;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << text;
    return out.good();
}

std::optional<clnp::Bytes> read_hex_file(const std::string& path) {
    auto text = read_file(path);
    if (!text) return std::nullopt;
    return clnp::hex_decode(*text);
}

// Hex wrapped at 64 characters, trailing newline.
std::string format_hex(clnp::ByteView bytes) {
    std::string hex = clnp::hex_encode(bytes);
    std::string out;
    for (std::size_t i = 0; i < hex.size(); i += 64) {
        out += hex.substr(i, 64);
        out += '\n';
    }
    if (out.empty()) out = "\n";
    return out;
}

const char* parse_error_name(clnp::ParseErrorKind kind) {
    switch (kind) {
        case clnp::ParseErrorKind::TruncatedHeader: return "truncated header";
        case clnp::ParseErrorKind::TruncatedPdu: return "truncated pdu";
        case clnp::ParseErrorKind::BadNlpid: return "bad nlpid";
        case clnp::ParseErrorKind::MalformedOptions: return "malformed options";
    }
    return "parse error";
}

void print_pdu(const clnp::Pdu& pdu) {
    const clnp::ClnpHeader& h = pdu.header;
    std::cout << "nlpid: " << clnp::u8_hex(h.nlpid) << "\n";
    if (!h.is_inactive()) {
        std::cout << "header_length: " << int(h.header_length) << "\n";
        std::cout << "version: " << int(h.version) << "\n";
        std::cout << "lifetime: " << int(h.lifetime) << "\n";
        std::cout << "flags: sp=" << h.flags.sp << " ms=" << h.flags.ms << " er=" << h.flags.er
                  << "\n";
        std::cout << "type: " << clnp::to_string(h.type) << "\n";
        std::cout << "segment_length: " << h.segment_length << "\n";
        std::cout << "checksum: " << clnp::u8_hex(h.checksum_c0) << clnp::u8_hex(h.checksum_c1)
                  << "\n";
        std::cout << "dest: " << h.dest.to_hex() << "\n";
        std::cout << "src: " << h.src.to_hex() << "\n";
        if (h.seg) {
            std::cout << "data_unit_id: " << h.seg->data_unit_id << "\n";
            std::cout << "segment_offset: " << h.seg->segment_offset << "\n";
            std::cout << "total_length: " << h.seg->total_length << "\n";
        }
        for (const auto& opt : h.options) {
            std::cout << "option: code=" << clnp::u8_hex(opt.code)
                      << " value=" << clnp::hex_encode(opt.value) << "\n";
        }
    }
    std::cout << "payload: " << clnp::hex_encode(pdu.payload) << "\n";
}

int cmd_decode(const std::string& infile) {
    auto bytes = read_hex_file(infile);
    if (!bytes) return fail_usage("cannot read hex file '" + infile + "'");
    auto pdu = clnp::parse_pdu(*bytes);
    if (!pdu.ok()) {
        return fail_protocol(std::string(parse_error_name(pdu.error().kind)) + " at offset " +
                             std::to_string(pdu.error().at));
    }
    print_pdu(pdu.value());
    return kExitOk;
}

struct CraftArgs {
    std::string dst_hex, src_hex;
    bool sp = false, er = false, ms = false;
    unsigned lifetime = 0;
    std::string payload_file;
    std::string srcroute;
    std::string outfile;
};

int cmd_craft(const CraftArgs& args) {
    auto dst = clnp::NsapAddress::from_hex(args.dst_hex);
    auto src = clnp::NsapAddress::from_hex(args.src_hex);
    if (!dst || !dst->wire_valid()) return fail_usage("bad --dst address");
    if (!src || !src->wire_valid()) return fail_usage("bad --src address");
    if (args.ms && !args.sp) return fail_usage("--ms requires --sp");

    clnp::SendRequest req;
    req.dst = *dst;
    req.src = *src;
    req.sp_flag = args.sp;
    req.er_flag = args.er;
    req.lifetime = static_cast<std::uint8_t>(args.lifetime);
    if (!args.payload_file.empty()) {
        auto payload = read_hex_file(args.payload_file);
        if (!payload) return fail_usage("cannot read payload file");
        req.payload = std::move(*payload);
    }
    if (!args.srcroute.empty()) {
        const auto colon = args.srcroute.find(':');
        if (colon == std::string::npos) return fail_usage("bad --srcroute (missing ':')");
        clnp::SourceRouteParam param;
        const std::string kind = args.srcroute.substr(0, colon);
        if (kind == "complete") {
            param.kind = clnp::SourceRouteParam::Kind::Complete;
        } else if (kind == "partial") {
            param.kind = clnp::SourceRouteParam::Kind::Partial;
        } else {
            return fail_usage("--srcroute kind must be complete or partial");
        }
        std::string rest = args.srcroute.substr(colon + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            auto comma = rest.find(',', pos);
            auto part = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            auto addr = clnp::NsapAddress::from_hex(part);
            if (!addr || !addr->wire_valid()) return fail_usage("bad --srcroute address");
            param.entries.push_back(std::move(*addr));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        req.options.push_back(clnp::OptionParam{clnp::kOptSourceRouting, param.encode()});
    }

    clnp::DataUnitIdCounter duid;
    auto composed = clnp::compose(req, duid);
    if (!composed.ok()) return fail_protocol("compose failed");
    clnp::Pdu pdu = std::move(composed).value();

    if (args.ms) {
        pdu.header.flags.ms = true;
        pdu.header.checksum_c0 = 0;
        pdu.header.checksum_c1 = 0;
        auto encoded = clnp::compose_header(pdu.header);
        if (!encoded.ok()) return fail_protocol("compose failed");
        auto sum = clnp::compute_checksum(encoded.value(), clnp::kChecksumPos);
        if (!sum.ok()) return fail_protocol("compose failed");
        pdu.header.checksum_c0 = sum.value().first;
        pdu.header.checksum_c1 = sum.value().second;
    }

    auto encoded = clnp::encode_pdu(pdu);
    if (!encoded.ok()) return fail_protocol("encode failed");
    if (!write_file(args.outfile, format_hex(encoded.value()))) {
        return fail_usage("cannot write '" + args.outfile + "'");
    }
    return kExitOk;
}

int cmd_checksum(const std::string& mode, const std::string& infile) {
    auto bytes = read_hex_file(infile);
    if (!bytes) return fail_usage("cannot read hex file '" + infile + "'");
    const clnp::Bytes& b = *bytes;
    if (b.empty() || b[0] != clnp::kNlpidClnp || b.size() < clnp::kFixedPartLength ||
        b.size() < b[1]) {
        return fail_protocol("not a well-formed PDU header");
    }
    const std::size_t hlen = b[1];
    if (mode == "verify") {
        auto verdict = clnp::verify_checksum(clnp::ByteView(b.data(), hlen), clnp::kChecksumPos);
        if (!verdict.ok()) return fail_protocol("header too short");
        switch (verdict.value()) {
            case clnp::ChecksumVerdict::Valid: std::cout << "valid\n"; return kExitOk;
            case clnp::ChecksumVerdict::NotUsed: std::cout << "not-used\n"; return kExitOk;
            case clnp::ChecksumVerdict::Invalid: std::cout << "invalid\n"; return kExitProtocol;
        }
        return kExitProtocol;
    }
    // stamp
    clnp::Bytes stamped = b;
    stamped[clnp::kChecksumPos] = 0;
    stamped[clnp::kChecksumPos + 1] = 0;
    auto sum = clnp::compute_checksum(clnp::ByteView(stamped.data(), hlen), clnp::kChecksumPos);
    if (!sum.ok()) return fail_protocol("header too short");
    stamped[clnp::kChecksumPos] = sum.value().first;
    stamped[clnp::kChecksumPos + 1] = sum.value().second;
    std::cout << format_hex(stamped);
    return kExitOk;
}

int cmd_fragment(const std::string& infile, unsigned mtu, const std::string& outdir) {
    auto bytes = read_hex_file(infile);
    if (!bytes) return fail_usage("cannot read hex file '" + infile + "'");
    auto pdu = clnp::parse_pdu(*bytes);
    if (!pdu.ok()) return fail_protocol("input does not parse as a PDU");
    auto pieces = clnp::fragment(pdu.value(), mtu);
    if (!pieces.ok()) {
        return fail_protocol(pieces.error() == clnp::FragmentError::MtuTooSmall
                                 ? "mtu too small for the header"
                                 : "segmentation not permitted");
    }
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) return fail_usage("cannot create directory '" + outdir + "'");
    for (std::size_t i = 0; i < pieces.value().size(); ++i) {
        auto encoded = clnp::encode_pdu(pieces.value()[i]);
        if (!encoded.ok()) return fail_protocol("encode failed");
        char name[16];
        std::snprintf(name, sizeof name, "seg%03zu.hex", i);
        const std::string path = outdir + "/" + name;
        if (!write_file(path, format_hex(encoded.value()))) {
            return fail_usage("cannot write '" + path + "'");
        }
    }
    std::cout << "wrote " << pieces.value().size() << " segment(s)\n";
    return kExitOk;
}

int cmd_run(const std::string& scenario_file, std::uint64_t until, const std::string& outfile) {
    auto text = read_file(scenario_file);
    if (!text) return fail_usage("cannot read scenario '" + scenario_file + "'");
    auto sim = clnp::sim::Simulation::build(*text);
    if (!sim.ok()) {
        return fail_usage("scenario line " + std::to_string(sim.error().line) + ": " +
                          sim.error().message);
    }
    clnp::sim::Simulation s = std::move(sim).value();
    const clnp::TraceLog& trace = s.run(until);
    if (!write_file(outfile, trace.to_text())) {
        return fail_usage("cannot write '" + outfile + "'");
    }
    const std::string summary = trace.summary();
    std::cout << (summary.empty() ? "empty trace" : summary) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CLNP packet crafting, decoding and simulation"};
    app.require_subcommand(1);

    std::string decode_file;
    auto* decode = app.add_subcommand("decode", "print a hex PDU fixture field by field");
    decode->add_option("file", decode_file, "hex PDU file")->required();

    CraftArgs craft_args;
    auto* craft = app.add_subcommand("craft", "compose a PDU and write it as hex");
    craft->add_option("--dst", craft_args.dst_hex, "destination NSAP (hex)")->required();
    craft->add_option("--src", craft_args.src_hex, "source NSAP (hex)")->required();
    craft->add_flag("--sp", craft_args.sp, "segmentation permitted");
    craft->add_flag("--er", craft_args.er, "request error reports");
    craft->add_flag("--ms", craft_args.ms, "more segments (requires --sp)");
    craft->add_option("--lifetime", craft_args.lifetime, "lifetime in 500 ms units")
        ->required()
        ->check(CLI::Range(0u, 255u));
    craft->add_option("--payload", craft_args.payload_file, "hex payload file");
    craft->add_option("--srcroute", craft_args.srcroute,
                      "complete|partial:<hex>,<hex>,... source route");
    craft->add_option("-o,--output", craft_args.outfile, "output hex file")->required();

    std::string checksum_mode, checksum_file;
    auto* checksum = app.add_subcommand("checksum", "verify or stamp the header checksum");
    checksum->add_option("mode", checksum_mode, "verify|stamp")
        ->required()
        ->check(CLI::IsMember({"verify", "stamp"}));
    checksum->add_option("file", checksum_file, "hex PDU file")->required();

    std::string fragment_file, fragment_outdir;
    unsigned fragment_mtu = 0;
    auto* frag = app.add_subcommand("fragment", "segment a PDU to an MTU");
    frag->add_option("--mtu", fragment_mtu, "maximum transmission unit")->required();
    frag->add_option("file", fragment_file, "hex PDU file")->required();
    frag->add_option("-o,--output", fragment_outdir, "output directory")->required();

    std::string run_scenario_file, run_outfile;
    std::uint64_t run_until = 60'000;
    auto* run = app.add_subcommand("run", "execute a scenario and write its trace");
    run->add_option("scenario", run_scenario_file, "scenario file")->required();
    run->add_option("--until", run_until, "virtual time horizon in ms");
    run->add_option("-o,--output", run_outfile, "trace output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (decode->parsed()) return cmd_decode(decode_file);
    if (craft->parsed()) return cmd_craft(craft_args);
    if (checksum->parsed()) return cmd_checksum(checksum_mode, checksum_file);
    if (frag->parsed()) return cmd_fragment(fragment_file, fragment_mtu, fragment_outdir);
    if (run->parsed()) return cmd_run(run_scenario_file, run_until, run_outfile);
    return kExitUsage;
}
