#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsmauth/mobile_equipment.hpp"
#include "gsmauth/network_side.hpp"
#include "gsmauth/trace.hpp"

namespace gsmauth {

struct InterceptedFrame {
    std::uint32_t frame_index = 0;
    CipherAlgId alg = CipherAlgId::NONE;
    Bytes ciphertext;
};

struct InterceptRecord {
    Rand128 rand;
    std::optional<Tag64> sres;
    std::vector<InterceptedFrame> frames;
};

/// What a passive radio eavesdropper has captured about one victim handset.
///
/// Built only from air-interface messages (AUTH_REQUEST to the victim,
/// AUTH_RESPONSE and TRAFFIC from it) so nothing secret can leak in.
class InterceptLog {
public:
    explicit InterceptLog(std::string victim_me) : victim_(std::move(victim_me)) {}

    const std::string& victim() const noexcept { return victim_; }

    void observe(const TraceEvent& event);

    const std::vector<InterceptRecord>& records() const noexcept { return records_; }
    bool empty() const noexcept { return records_.empty(); }

    /// Export as trace records (actor "eavesdropper").
    Trace to_trace() const;

private:
    std::string victim_;
    std::vector<InterceptRecord> records_;
};

enum class AttackKind { MitmEavesdrop, BbkReplay };

std::string_view to_string(AttackKind kind);
std::optional<AttackKind> parse_attack_kind(std::string_view name);

struct AttackReport {
    AttackKind attack = AttackKind::MitmEavesdrop;
    bool succeeded = false;
    std::optional<Tag64> recovered_kc;
    std::optional<Bytes> recovered_plaintext;
    std::optional<std::string> failure_cause;
    std::optional<std::string> note;

    Json to_json() const;
};

/// Where the false base station gets the RAND it sends the victim.
enum class RandSource {
    Fabricated,  // attacker-chosen random value
    Replayed,    // most recent RAND in the intercept log
    RelayFresh,  // fresh genuine challenge for the victim pulled from the live VLR
    SkipAka,     // no AKA at all
};

std::string_view to_string(RandSource source);
std::optional<RandSource> parse_rand_source(std::string_view name);

/// The attacker's paid-for leg into the genuine network: its own UE with its
/// own legitimately provisioned SIM.
struct GenuineLeg {
    ServingNetwork& vlr;
    UserEquipment& attacker_ue;
};

struct FakeNetworkParams {
    RandSource rand_source = RandSource::Fabricated;
    CipherAlgId victim_cipher = CipherAlgId::NONE;
    Bytes victim_plaintext;
    std::uint32_t frame_index = 0;
};

inline constexpr std::string_view kFakeBts = "fake_bts";

/// False base station / man in the middle. Succeeds iff victim traffic is
/// observed in the clear.
AttackReport fake_network_attach(UserEquipment& victim, const FakeNetworkParams& params, const InterceptLog& log,
                                 std::optional<GenuineLeg> relay, Rng& rng, Trace* trace);

struct BbkParams {
    // Sent by the victim under A5/2; the first 8 octets are the known
    // all-zero header.
    Bytes known_frame = Bytes(16, 0);
    std::size_t known_prefix = 8;
};

/// Recovers Kc from one A5/2 frame whose first 8 plaintext octets are known.
Tag64 recover_kc_from_weak_frame(ByteView ciphertext, ByteView known_plaintext, std::uint32_t frame_index);

/// Looks up what the victim really sent in an intercepted frame. Used only to
/// judge the outcome, never by the attack itself.
using GroundTruth = std::function<std::optional<Bytes>(const InterceptedFrame&)>;

/// Replay the logged RAND, force A5/2, recover Kc from the known header, then
/// decrypt every frame logged under that RAND.
AttackReport bbk_attack(const InterceptLog& log, UserEquipment& victim, const BbkParams& params,
                        const GroundTruth& ground_truth, Rng& rng, Trace* trace);

}  // namespace gsmauth
