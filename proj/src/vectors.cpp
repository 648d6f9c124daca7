#include "gsmauth/vectors.hpp"

#include <sstream>

#include "gsmauth/auth_core.hpp"
#include "gsmauth/crypto_suite.hpp"

namespace gsmauth {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::MalformedInput, "vector: " + what); }

void expect_arity(const std::string& op, const std::vector<Bytes>& in, std::size_t n) {
    if (in.size() != n) bad(op + " takes " + std::to_string(n) + " inputs, got " + std::to_string(in.size()));
}

std::uint64_t be(ByteView b) {
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

Bytes be_bytes(std::uint64_t v, std::size_t width) {
    Bytes out(width);
    for (std::size_t i = 0; i < width; ++i) out[width - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    return out;
}

Bytes concat(const Tag64& a, const Tag64& b) {
    Bytes out = a.to_vector();
    out.insert(out.end(), b.view().begin(), b.view().end());
    return out;
}

CipherAlgId alg_from_byte(ByteView b) {
    if (b.size() != 1) bad("a5_keystream alg must be one octet");
    switch (b[0]) {
        case 1: return CipherAlgId::A5_1;
        case 2: return CipherAlgId::A5_2;
        case 3: return CipherAlgId::A5_3;
    }
    throw Error(ErrorKind::InvalidAlgorithm, "vector: a5_keystream alg " + to_hex(b));
}

std::string random_digits(Rng& rng, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
    return s;
}

}  // namespace

std::string VectorRecord::to_line() const {
    std::string line = op;
    for (const auto& in : inputs) {
        line += ' ';
        line += to_hex(in);
    }
    line += " -> ";
    line += to_hex(output);
    return line;
}

VectorRecord VectorRecord::parse(std::string_view line) {
    std::istringstream in{std::string(line)};
    VectorRecord r;
    if (!(in >> r.op)) bad("empty record");
    std::string tok;
    bool arrow = false;
    while (in >> tok) {
        if (tok == "->") {
            arrow = true;
            break;
        }
        r.inputs.push_back(from_hex(tok));
    }
    if (!arrow) bad("missing '->' in record for " + r.op);
    if (!(in >> tok)) bad("missing output in record for " + r.op);
    r.output = from_hex(tok);
    if (in >> tok) bad("trailing data in record for " + r.op);
    return r;
}

const std::vector<std::string>& vector_ops() {
    static const std::vector<std::string> ops = {
        "f1_mac",       "f5_mask",
        "a3_sres",      "a8_kc",
        "a5_keystream", "derive_subscriber_keys",
        "build_hijacked_rand", "legacy_response",
    };
    return ops;
}

Bytes evaluate_vector(const std::string& op, const std::vector<Bytes>& in) {
    if (op == "f1_mac") {
        expect_arity(op, in, 2);
        return f1_mac(Key128::from_span(in[0]), in[1]).to_vector();
    }
    if (op == "f5_mask") {
        expect_arity(op, in, 2);
        return f5_mask(Key128::from_span(in[0]), ByteView(in[1])).to_vector();
    }
    if (op == "a3_sres") {
        expect_arity(op, in, 2);
        return a3_sres(Key128::from_span(in[0]), ByteView(in[1])).to_vector();
    }
    if (op == "a8_kc") {
        expect_arity(op, in, 2);
        return a8_kc(Key128::from_span(in[0]), ByteView(in[1])).to_vector();
    }
    if (op == "a5_keystream") {
        expect_arity(op, in, 4);
        if (in[2].size() != 4 || in[3].size() != 2) bad("a5_keystream frame/len must be 4/2 octets");
        return a5_keystream(alg_from_byte(in[0]), Tag64::from_span(in[1]), static_cast<std::uint32_t>(be(in[2])),
                            static_cast<std::size_t>(be(in[3])))
            .bytes;
    }
    if (op == "derive_subscriber_keys") {
        expect_arity(op, in, 2);
        const auto keys = derive_subscriber_keys(Key128::from_span(in[0]), Imsi(std::string(in[1].begin(), in[1].end())));
        Bytes out = keys.ki.to_vector();
        out.insert(out.end(), keys.ka.view().begin(), keys.ka.view().end());
        return out;
    }
    if (op == "build_hijacked_rand") {
        expect_arity(op, in, 3);
        if (in[1].size() != 2 || in[2].size() != 6) bad("build_hijacked_rand amf/sqn must be 2/6 octets");
        return build_hijacked_rand(Key128::from_span(in[0]), Amf16{static_cast<std::uint16_t>(be(in[1]))},
                                   Sqn48(be(in[2])))
            .to_vector();
    }
    if (op == "legacy_response") {
        expect_arity(op, in, 2);
        const auto r = legacy_response(Key128::from_span(in[0]), Rand128::from_span(in[1]));
        return concat(r.sres, r.kc);
    }
    bad("unknown op '" + op + "'");
}

std::vector<VectorRecord> generate_vectors(std::uint64_t seed, std::size_t count) {
    Rng rng(seed);
    std::vector<VectorRecord> out;
    out.reserve(count * vector_ops().size());

    for (const auto& op : vector_ops()) {
        for (std::size_t i = 0; i < count; ++i) {
            VectorRecord r{op, {}, {}};
            if (op == "f1_mac" || op == "f5_mask") {
                r.inputs = {rng.bytes(16), rng.bytes(8)};
            } else if (op == "a3_sres" || op == "a8_kc" || op == "legacy_response") {
                r.inputs = {rng.bytes(16), rng.bytes(16)};
            } else if (op == "a5_keystream") {
                r.inputs = {be_bytes(1 + rng.below(3), 1), rng.bytes(8), be_bytes(rng.next_u64() & 0xffffffffu, 4),
                            be_bytes(1 + rng.below(64), 2)};
            } else if (op == "derive_subscriber_keys") {
                const auto digits = random_digits(rng, 15);
                r.inputs = {rng.bytes(16), Bytes(digits.begin(), digits.end())};
            } else if (op == "build_hijacked_rand") {
                r.inputs = {rng.bytes(16), rng.bytes(2), be_bytes(rng.below(Sqn48::kMax + 1), 6)};
            }
            r.output = evaluate_vector(op, r.inputs);
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::string format_vector_file(std::uint64_t seed, std::size_t count, const std::vector<VectorRecord>& records) {
    std::string text = "# gsmauth vectors v1 seed=" + std::to_string(seed) + " count=" + std::to_string(count) + "\n";
    for (const auto& r : records) {
        text += r.to_line();
        text += '\n';
    }
    return text;
}

std::vector<VectorRecord> parse_vector_file(std::string_view text) {
    std::vector<VectorRecord> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(VectorRecord::parse(line));
    }
    return out;
}

}  // namespace gsmauth
