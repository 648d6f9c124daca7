#include "gsmauth/adversary.hpp"

#include <algorithm>

namespace gsmauth {

void InterceptLog::observe(const TraceEvent& event) {
    if (event.event == "AUTH_REQUEST" && event.to == victim_) {
        records_.push_back({Rand128::from_hex(event.fields.at("rand").get<std::string>()), std::nullopt, {}});
        return;
    }
    if (event.actor != victim_ || records_.empty()) return;

    if (event.event == "AUTH_RESPONSE") {
        records_.back().sres = Tag64::from_hex(event.fields.at("sres").get<std::string>());
    } else if (event.event == "TRAFFIC") {
        auto alg = parse_cipher(event.fields.at("cipher").get<std::string>());
        records_.back().frames.push_back({event.fields.at("frame").get<std::uint32_t>(),
                                          alg.value_or(CipherAlgId::NONE),
                                          from_hex(event.fields.at("data").get<std::string>())});
    }
}

Trace InterceptLog::to_trace() const {
    Trace t;
    for (const auto& r : records_) {
        t.emit("eavesdropper", "", "INTERCEPTED_RAND", Json{{"victim", victim_}, {"rand", r.rand.hex()}});
        if (r.sres) t.emit("eavesdropper", "", "INTERCEPTED_SRES", Json{{"victim", victim_}, {"sres", r.sres->hex()}});
        for (const auto& f : r.frames) {
            t.emit("eavesdropper", "", "INTERCEPTED_TRAFFIC",
                   Json{{"victim", victim_}, {"frame", f.frame_index}, {"cipher", to_string(f.alg)},
                        {"data", to_hex(f.ciphertext)}});
        }
    }
    return t;
}

std::string_view to_string(AttackKind kind) {
    return kind == AttackKind::MitmEavesdrop ? "MITM_EAVESDROP" : "BBK_REPLAY";
}

std::optional<AttackKind> parse_attack_kind(std::string_view name) {
    if (name == "MITM_EAVESDROP") return AttackKind::MitmEavesdrop;
    if (name == "BBK_REPLAY") return AttackKind::BbkReplay;
    return std::nullopt;
}

Json AttackReport::to_json() const {
    Json j;
    j["attack"] = to_string(attack);
    j["succeeded"] = succeeded;
    j["recovered_kc"] = recovered_kc ? Json(recovered_kc->hex()) : Json(nullptr);
    j["recovered_plaintext"] = recovered_plaintext ? Json(to_hex(*recovered_plaintext)) : Json(nullptr);
    j["failure_cause"] = failure_cause ? Json(*failure_cause) : Json(nullptr);
    j["note"] = note ? Json(*note) : Json(nullptr);
    return j;
}

std::string_view to_string(RandSource source) {
    switch (source) {
        case RandSource::Fabricated: return "FABRICATED";
        case RandSource::Replayed: return "REPLAYED";
        case RandSource::RelayFresh: return "RELAY_FRESH";
        case RandSource::SkipAka: return "SKIP_AKA";
    }
    return "?";
}

std::optional<RandSource> parse_rand_source(std::string_view name) {
    for (auto s : {RandSource::Fabricated, RandSource::Replayed, RandSource::RelayFresh, RandSource::SkipAka}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

namespace {

constexpr const char* kDroppedBySim = "connection dropped by SIM";

void emit(Trace* trace, std::string to, std::string event, Json fields) {
    if (trace) trace->emit(std::string(kFakeBts), std::move(to), std::move(event), std::move(fields));
}

// Runs honest AKA for the attacker's own subscriber so traffic can be relayed.
void open_genuine_leg(GenuineLeg& leg, Rng& rng) {
    auto& ue = leg.attacker_ue;
    ue.me.attach(leg.vlr.name());
    auto rand = leg.vlr.challenge(ue.imsi, rng, ue.me.name());
    auto outcome = ue.me.handle_challenge(ue.sim, rand, rng);
    if (outcome.kind != ChallengeOutcome::Kind::Responded || !outcome.sres) {
        throw Error(ErrorKind::Precondition, "attacker's own SIM failed genuine AKA");
    }
    if (leg.vlr.verify(ue.imsi, *outcome.sres) != VlrVerdict::Authenticated) {
        throw Error(ErrorKind::Precondition, "genuine network rejected the attacker's own SIM");
    }
    ue.me.apply_cipher(leg.vlr.select_cipher(ue.imsi, ue.me.name()));
}

}  // namespace

AttackReport fake_network_attach(UserEquipment& victim, const FakeNetworkParams& params, const InterceptLog& log,
                                 std::optional<GenuineLeg> relay, Rng& rng, Trace* trace) {
    AttackReport report;
    report.attack = AttackKind::MitmEavesdrop;

    if (relay) open_genuine_leg(*relay, rng);

    const std::string bts(kFakeBts);
    victim.me.attach(bts);

    if (params.rand_source != RandSource::SkipAka) {
        Rand128 rand;
        switch (params.rand_source) {
            case RandSource::Fabricated:
                rand = rng.draw<Rand128>();
                break;
            case RandSource::Replayed:
                if (log.empty()) throw Error(ErrorKind::Precondition, "replay requested with an empty intercept log");
                rand = log.records().back().rand;
                break;
            case RandSource::RelayFresh:
                if (!relay) throw Error(ErrorKind::Precondition, "fresh-RAND relay needs a genuine-network leg");
                rand = relay->vlr.challenge(victim.imsi, rng, bts);
                break;
            case RandSource::SkipAka:
                break;
        }

        emit(trace, victim.me.name(), "AUTH_REQUEST", Json{{"imsi", victim.imsi.digits()}, {"rand", rand.hex()}});
        auto outcome = victim.me.handle_challenge(victim.sim, rand, rng);
        if (outcome.kind == ChallengeOutcome::Kind::ConnectionDropped) {
            report.failure_cause = kDroppedBySim;
            return report;
        }
        if (params.rand_source == RandSource::RelayFresh && outcome.sres) {
            emit(trace, relay->vlr.name(), "AUTH_RESPONSE", Json{{"sres", outcome.sres->hex()}});
            if (relay->vlr.verify(victim.imsi, *outcome.sres) == VlrVerdict::Authenticated) {
                report.note = "fresh genuine RAND relayed at AKA time; SIM accepted it";
            }
        }
    }

    emit(trace, victim.me.name(), "CIPHER_MODE_COMMAND", Json{{"cipher", to_string(params.victim_cipher)}});
    victim.me.apply_cipher(params.victim_cipher);

    if (!victim.me.can_send()) {
        report.failure_cause = "victim ME refused traffic without AKA";
        return report;
    }

    auto on_air = victim.me.send_traffic(params.victim_plaintext, params.frame_index);
    // Without the victim's Kc the attacker can only read what was sent in the clear.
    if (params.victim_cipher == CipherAlgId::NONE) report.recovered_plaintext = on_air;

    report.succeeded = report.recovered_plaintext && *report.recovered_plaintext == params.victim_plaintext;
    if (!report.succeeded) {
        report.failure_cause = "victim traffic not readable";
        return report;
    }

    if (relay) {
        auto& ue = relay->attacker_ue;
        auto forwarded = ue.me.send_traffic(*report.recovered_plaintext, params.frame_index);
        auto delivered = relay->vlr.receive_traffic(ue.imsi, forwarded, params.frame_index);
        emit(trace, "", "RELAY_DELIVERED",
             Json{{"frame", params.frame_index}, {"ok", delivered && *delivered == *report.recovered_plaintext}});
    }
    return report;
}

Tag64 recover_kc_from_weak_frame(ByteView ciphertext, ByteView known_plaintext, std::uint32_t frame_index) {
    if (ciphertext.size() < 8 || known_plaintext.size() < 8) {
        throw Error(ErrorKind::Precondition, "A5/2 key recovery needs 8 known octets");
    }
    Tag64 kc;
    for (int i = 0; i < 8; ++i) {
        auto frame_octet = static_cast<std::uint8_t>(std::uint64_t{frame_index} >> (56 - 8 * i));
        kc[i] = ciphertext[i] ^ known_plaintext[i] ^ frame_octet;
    }
    return kc;
}

AttackReport bbk_attack(const InterceptLog& log, UserEquipment& victim, const BbkParams& params,
                        const GroundTruth& ground_truth, Rng& rng, Trace* trace) {
    auto is_strong = [](const InterceptedFrame& f) {
        return f.alg == CipherAlgId::A5_1 || f.alg == CipherAlgId::A5_3;
    };
    auto target = std::find_if(log.records().rbegin(), log.records().rend(), [&](const InterceptRecord& r) {
        return std::any_of(r.frames.begin(), r.frames.end(), is_strong);
    });
    if (target == log.records().rend()) {
        throw Error(ErrorKind::Precondition, "intercept log holds no RAND with strongly encrypted traffic");
    }
    if (params.known_frame.size() < params.known_prefix || params.known_prefix < 8) {
        throw Error(ErrorKind::Precondition, "known-plaintext frame shorter than the 8-octet header");
    }

    AttackReport report;
    report.attack = AttackKind::BbkReplay;

    const std::string bts(kFakeBts);
    victim.me.attach(bts);
    emit(trace, victim.me.name(), "AUTH_REQUEST", Json{{"imsi", victim.imsi.digits()}, {"rand", target->rand.hex()}});
    auto outcome = victim.me.handle_challenge(victim.sim, target->rand, rng);
    if (outcome.kind == ChallengeOutcome::Kind::ConnectionDropped) {
        report.failure_cause = kDroppedBySim;
        return report;
    }

    // SRES is ignored; switch the victim to the weak cipher and wait for a frame.
    emit(trace, victim.me.name(), "CIPHER_MODE_COMMAND", Json{{"cipher", to_string(CipherAlgId::A5_2)}});
    victim.me.apply_cipher(CipherAlgId::A5_2);
    constexpr std::uint32_t kWeakFrame = 0;
    auto weak = victim.me.send_traffic(params.known_frame, kWeakFrame);

    const ByteView header(params.known_frame.data(), params.known_prefix);
    const Tag64 kc = recover_kc_from_weak_frame(weak, header, kWeakFrame);
    report.recovered_kc = kc;
    emit(trace, "", "KC_RECOVERED", Json{{"kc", kc.hex()}});

    Bytes recovered;
    bool all_match = true;
    for (const auto& f : target->frames) {
        if (!is_strong(f)) continue;
        auto plain = xor_bytes(f.ciphertext, a5_keystream(f.alg, kc, f.frame_index, f.ciphertext.size()).bytes);
        auto truth = ground_truth ? ground_truth(f) : std::nullopt;
        all_match = all_match && truth && *truth == plain;
        recovered.insert(recovered.end(), plain.begin(), plain.end());
    }
    report.recovered_plaintext = recovered;
    report.succeeded = all_match;
    if (!all_match) report.failure_cause = "decryption of logged traffic does not match";
    emit(trace, "", "LOGGED_TRAFFIC_DECRYPTED", Json{{"plaintext", to_hex(recovered)}, {"matches", all_match}});
    return report;
}

}  // namespace gsmauth
