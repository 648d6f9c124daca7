#include "gsmauth/bytes.hpp"

#include <algorithm>

#include "gsmauth/error.hpp"
#include "gsmauth/identity.hpp"
#include "gsmauth/random.hpp"

namespace gsmauth {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedInput: return "malformed input";
        case ErrorKind::InvalidAlgorithm: return "invalid algorithm";
        case ErrorKind::CounterOverflow: return "counter overflow";
        case ErrorKind::ProtocolOrder: return "protocol order";
        case ErrorKind::Provisioning: return "provisioning";
        case ErrorKind::Lookup: return "lookup";
        case ErrorKind::TripleExhaustion: return "triple exhaustion";
        case ErrorKind::ConfigValidation: return "config validation";
        case ErrorKind::PredicateSpec: return "predicate spec";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

std::string to_hex(ByteView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error(ErrorKind::MalformedInput, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(ErrorKind::MalformedInput, "non-hex character in '" + std::string(hex) + "'");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

Bytes xor_bytes(ByteView a, ByteView b) {
    if (a.size() != b.size()) throw Error(ErrorKind::MalformedInput, "xor of unequal lengths");
    Bytes out(a.size());
    std::transform(a.begin(), a.end(), b.begin(), out.begin(), [](auto x, auto y) { return x ^ y; });
    return out;
}

Imsi::Imsi(std::string_view digits) : digits_(digits) {
    if (digits_.size() != 15 || !std::all_of(digits_.begin(), digits_.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorKind::MalformedInput, "IMSI must be exactly 15 decimal digits: '" + digits_ + "'");
    }
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorKind::MalformedInput, "Rng::below(0)");
    // Rejection sampling keeps the result unbiased and independent of the
    // library's distribution implementation.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

void Rng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = engine_();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word >> (56 - 8 * b));
        }
    }
}

}  // namespace gsmauth
