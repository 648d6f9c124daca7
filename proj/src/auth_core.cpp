#include "gsmauth/auth_core.hpp"

#include <algorithm>
#include <string>

namespace gsmauth {

Sqn48::Sqn48(std::uint64_t value) : value_(value) {
    if (value > kMax) throw Error(ErrorKind::MalformedInput, "SQN exceeds 48 bits: " + std::to_string(value));
}

std::array<std::uint8_t, 6> Sqn48::to_bytes() const {
    std::array<std::uint8_t, 6> out{};
    for (int i = 0; i < 6; ++i) out[i] = static_cast<std::uint8_t>(value_ >> (40 - 8 * i));
    return out;
}

std::array<std::uint8_t, 8> amf_sqn_block(Amf16 amf, Sqn48 sqn) {
    std::array<std::uint8_t, 8> out{};
    out[0] = static_cast<std::uint8_t>(amf.value >> 8);
    out[1] = static_cast<std::uint8_t>(amf.value);
    auto s = sqn.to_bytes();
    std::copy(s.begin(), s.end(), out.begin() + 2);
    return out;
}

std::string_view to_string(RejectReason reason) {
    return reason == RejectReason::MacMismatch ? "MAC_MISMATCH" : "SQN_NOT_FRESH";
}

Rand128 HijackedRandLayout::encode() const {
    Rand128 out;
    auto plain = amf_sqn_block(amf, sqn);
    for (int i = 0; i < 8; ++i) {
        out[i] = plain[i] ^ ak[i];
        out[8 + i] = mac[i];
    }
    return out;
}

HijackedRandLayout layout_for(const Key128& ka, Amf16 amf, Sqn48 sqn) {
    auto mac = f1_mac(ka, amf_sqn_block(amf, sqn));
    return {amf, sqn, mac, f5_mask(ka, mac)};
}

Rand128 build_hijacked_rand(const Key128& ka, Amf16 amf, Sqn48 sqn) {
    return layout_for(ka, amf, sqn).encode();
}

LegacyResponse legacy_response(const Key128& ki, const Rand128& rand) {
    return {a3_sres(ki, rand), a8_kc(ki, rand)};
}

VerifyOutcome verify_hijacked_rand(const Key128& ki, const Key128& ka, Sqn48 counter, const Rand128& rand,
                                   Rng& rng) {
    // Split RAND into X || MAC*, unmask X with AK* = f5(MAC*), recompute XMAC.
    Tag64 received_mac;
    std::array<std::uint8_t, 8> masked{};
    for (int i = 0; i < 8; ++i) {
        masked[i] = rand[i];
        received_mac[i] = rand[8 + i];
    }
    const Tag64 ak = f5_mask(ka, received_mac);

    std::array<std::uint8_t, 8> plain{};
    for (int i = 0; i < 8; ++i) plain[i] = masked[i] ^ ak[i];
    const Amf16 amf{static_cast<std::uint16_t>((plain[0] << 8) | plain[1])};
    std::uint64_t sqn_value = 0;
    for (int i = 2; i < 8; ++i) sqn_value = (sqn_value << 8) | plain[i];
    const Sqn48 sqn(sqn_value);

    const Tag64 xmac = f1_mac(ka, plain);

    std::optional<RejectReason> reason;
    if (!(xmac == received_mac)) {
        reason = RejectReason::MacMismatch;
    } else if (!(sqn > counter)) {
        reason = RejectReason::SqnNotFresh;
    }

    if (!reason) {
        auto legacy = legacy_response(ki, rand);
        return Accepted{amf, sqn, legacy.sres, legacy.kc};
    }

    auto genuine = legacy_response(ki, rand);
    Rejected rejected{*reason, rng.draw<Tag64>(), rng.draw<Tag64>()};
    while (rejected.placeholder_sres == genuine.sres) rejected.placeholder_sres = rng.draw<Tag64>();
    while (rejected.placeholder_kc == genuine.kc) rejected.placeholder_kc = rng.draw<Tag64>();
    return rejected;
}

TripleBatch generate_triples(const Key128& ki, const Key128& ka, Sqn48 counter, Amf16 amf, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::MalformedInput, "triple batch size must be positive");
    if (n > Sqn48::kMax - counter.value()) {
        throw Error(ErrorKind::CounterOverflow, "48-bit SQN space exhausted at counter " +
                                                    std::to_string(counter.value()) + " for batch of " +
                                                    std::to_string(n));
    }

    TripleBatch batch{{}, Sqn48(counter.value() + n)};
    batch.triples.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const Sqn48 sqn(counter.value() + i);
        auto triple = make_legacy_triple(ki, build_hijacked_rand(ka, amf, sqn));
        triple.sqn_hint = sqn;
        batch.triples.push_back(triple);
    }
    return batch;
}

AuthTriple make_legacy_triple(const Key128& ki, const Rand128& rand) {
    auto r = legacy_response(ki, rand);
    return {rand, r.sres, r.kc, Sqn48(0)};
}

}  // namespace gsmauth
