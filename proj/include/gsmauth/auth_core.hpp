#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "gsmauth/bytes.hpp"
#include "gsmauth/crypto_suite.hpp"
#include "gsmauth/random.hpp"

namespace gsmauth {

/// 48-bit sequence number. Construction rejects values >= 2^48.
class Sqn48 {
public:
    static constexpr std::uint64_t kMax = (std::uint64_t{1} << 48) - 1;

    constexpr Sqn48() = default;
    explicit Sqn48(std::uint64_t value);

    constexpr std::uint64_t value() const noexcept { return value_; }
    std::array<std::uint8_t, 6> to_bytes() const;

    friend constexpr auto operator<=>(Sqn48, Sqn48) = default;

private:
    std::uint64_t value_ = 0;
};

struct Amf16 {
    std::uint16_t value = 0;
    friend constexpr bool operator==(Amf16, Amf16) = default;
};

/// AMF || SQN as the 8-octet f1 input.
std::array<std::uint8_t, 8> amf_sqn_block(Amf16 amf, Sqn48 sqn);

/// Decomposed view of a hijacked RAND: ((amf||sqn) xor ak) || mac.
struct HijackedRandLayout {
    Amf16 amf;
    Sqn48 sqn;
    Tag64 mac;
    Tag64 ak;

    Rand128 encode() const;
};

HijackedRandLayout layout_for(const Key128& ka, Amf16 amf, Sqn48 sqn);

struct AuthTriple {
    Rand128 rand;
    Tag64 xres;
    Tag64 kc;
    Sqn48 sqn_hint;  // AuC-side ordering key; never leaves the home/serving network
};

enum class RejectReason { MacMismatch, SqnNotFresh };

std::string_view to_string(RejectReason reason);

struct Accepted {
    Amf16 amf;
    Sqn48 sqn;
    Tag64 sres;
    Tag64 kc;
};

struct Rejected {
    RejectReason reason;
    Tag64 placeholder_sres;
    Tag64 placeholder_kc;
};

using VerifyOutcome = std::variant<Accepted, Rejected>;

inline bool is_accepted(const VerifyOutcome& v) { return std::holds_alternative<Accepted>(v); }

Rand128 build_hijacked_rand(const Key128& ka, Amf16 amf, Sqn48 sqn);

/// SIM-side check of a received RAND against the stored counter.
///
/// Pure: the counter is not touched. On rejection the placeholders come from
/// `rng` and are redrawn in the (2^-64) event that one coincides with the
/// genuine A3/A8 output for this RAND. MAC is checked before freshness.
VerifyOutcome verify_hijacked_rand(const Key128& ki, const Key128& ka, Sqn48 counter, const Rand128& rand, Rng& rng);

struct LegacyResponse {
    Tag64 sres;
    Tag64 kc;
};

LegacyResponse legacy_response(const Key128& ki, const Rand128& rand);

struct TripleBatch {
    std::vector<AuthTriple> triples;
    Sqn48 new_counter;
};

/// Issues n triples with sqn = counter+1 .. counter+n. Throws CounterOverflow
/// rather than wrapping past 2^48-1.
TripleBatch generate_triples(const Key128& ki, const Key128& ka, Sqn48 counter, Amf16 amf, std::size_t n);

AuthTriple make_legacy_triple(const Key128& ki, const Rand128& rand);

}  // namespace gsmauth
