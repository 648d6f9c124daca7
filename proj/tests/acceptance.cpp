// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "gsmauth/cli.hpp"
#include "gsmauth/harness.hpp"
#include "support/oracle.hpp"
#include "support/scenarios.hpp"
#include "support/util.hpp"

using namespace gsmauth;
namespace fs = std::filesystem;
using testutil::arr;

namespace {

const fs::path kRoot = GSMAUTH_SOURCE_DIR;

struct Check {
    std::string failure;
    void require(bool ok, const std::string& what) {
        if (!ok && failure.empty()) failure = what;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimState make_state(SimMode mode, const Key128& ki, const Key128& ka, std::uint64_t counter) {
    SimState s;
    s.imsi = Imsi("001010000000009");
    s.ki = ki;
    if (mode == SimMode::Enhanced) s.ka = ka;
    s.counter = Sqn48(counter);
    s.mode = mode;
    return s;
}

std::vector<std::string> events_of(const Trace& t, const std::function<bool(const TraceEvent&)>& keep) {
    std::vector<std::string> out;
    for (const auto& e : t.events()) {
        if (keep(e)) out.push_back(e.event);
    }
    return out;
}

// 1. Valid hijacked RANDs are accepted and decode to the issued AMF/SQN, with
// A3/A8 outputs equal to the reference.
void roundtrip(Check& c) {
    Rng rng(101);
    for (int i = 0; i < 10'000 && c.failure.empty(); ++i) {
        const auto ki = rng.draw<Key128>();
        const auto ka = rng.draw<Key128>();
        const auto counter = rng.below(Sqn48::kMax - 1);
        const auto sqn = counter + 1 + rng.below(std::min<std::uint64_t>(1 << 20, Sqn48::kMax - counter));
        const Amf16 amf{static_cast<std::uint16_t>(rng.below(1 << 16))};

        const auto rand = build_hijacked_rand(ka, amf, Sqn48(sqn));
        c.require(arr(rand) == oracle::build_rand(ka.array(), amf.value, sqn), "RAND differs from reference");
        const auto v = verify_hijacked_rand(ki, ka, Sqn48(counter), rand, rng);
        if (!is_accepted(v)) {
            c.require(false, "valid RAND rejected at i=" + std::to_string(i));
            break;
        }
        const auto& a = std::get<Accepted>(v);
        c.require(a.sqn.value() == sqn && a.amf.value == amf.value, "decoded AMF/SQN mismatch");
        c.require(arr(a.sres) == oracle::a3(ki.array(), rand.array()), "SRES mismatch");
        c.require(arr(a.kc) == oracle::a8(ki.array(), rand.array()), "Kc mismatch");
    }
}

// 2. Every single-bit flip of a valid RAND is rejected and does not move the
// SIM counter.
void tamper(Check& c) {
    Rng rng(202);
    for (int i = 0; i < 100 && c.failure.empty(); ++i) {
        const auto ki = rng.draw<Key128>();
        const auto ka = rng.draw<Key128>();
        const auto counter = rng.below(1'000'000);
        const auto rand = build_hijacked_rand(ka, Amf16{}, Sqn48(counter + 1 + rng.below(1000)));
        c.require(is_accepted(verify_hijacked_rand(ki, ka, Sqn48(counter), rand, rng)), "base instance rejected");
        SimCard sim(make_state(SimMode::Enhanced, ki, ka, counter));
        sim.init({false});
        for (int bit = 0; bit < 128; ++bit) {
            auto bad = rand;
            bad[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
            const auto r = sim.run_gsm_algorithm(bad, rng);
            c.require(!is_accepted(*sim.last_outcome()), "flip accepted: trial " + std::to_string(i) + " bit " +
                                                               std::to_string(bit));
            c.require(r.sres != a3_sres(ki, bad), "genuine SRES leaked for tampered RAND");
            c.require(sim.state().counter.value() == counter, "counter moved on tampered RAND");
        }
    }
}

// 3. Replays of an accepted RAND (and of any older one) are rejected.
void replay(Check& c) {
    Rng rng(303);
    for (int i = 0; i < 1000 && c.failure.empty(); ++i) {
        const auto ki = rng.draw<Key128>();
        const auto ka = rng.draw<Key128>();
        SimCard sim(make_state(SimMode::Enhanced, ki, ka, rng.below(1000)));
        sim.init({false});
        const auto sqn = sim.state().counter.value() + 1 + rng.below(5);
        const auto rand = build_hijacked_rand(ka, Amf16{}, Sqn48(sqn));
        sim.run_gsm_algorithm(rand, rng);
        c.require(is_accepted(*sim.last_outcome()), "first use rejected");
        const auto r = sim.run_gsm_algorithm(rand, rng);
        const auto* rej = std::get_if<Rejected>(&*sim.last_outcome());
        c.require(rej && rej->reason == RejectReason::SqnNotFresh, "replay not rejected as stale");
        c.require(r.sres != a3_sres(ki, rand) && r.kc != a8_kc(ki, rand), "replay leaked genuine output");
        c.require(sim.state().counter.value() == sqn, "counter changed by replay");
        if (sqn > 1) {
            sim.run_gsm_algorithm(build_hijacked_rand(ka, Amf16{}, Sqn48(sqn - 1)), rng);
            c.require(!is_accepted(*sim.last_outcome()), "older SQN accepted");
        }
    }
}

// 4. With genuine triples an enhanced subscriber is indistinguishable from a
// legacy one end to end: same A3/A8 outputs and the VLR authenticates.
void legacy_transparency(Check& c) {
    Rng rng(404);
    Trace trace;
    HomeNetwork home(Amf16{0x8000});
    ServingNetwork vlr(ConsumptionPolicy::InOrder, CipherPolicy{});
    const Imsi enh("001010000000001");
    const Imsi leg("001010000000002");
    const auto master = rng.draw<Key128>();
    auto pe = home.provision(enh, SimMode::Enhanced, master);
    auto pl = home.provision(leg, SimMode::Legacy, master);
    UserEquipment ue_e(pe.sim, MeProfile{}, &trace);
    UserEquipment ue_l(pl.sim, MeProfile{}, &trace);

    for (auto* ue : {&ue_e, &ue_l}) {
        ue->me.power_on(ue->sim);
        ue->me.attach("vlr");
        const auto ki = home.record(ue->imsi).ki;
        for (int batch = 0; batch < 100 && c.failure.empty(); ++batch) {
            vlr.request_triples(home, ue->imsi, 100, rng);
            for (int i = 0; i < 100; ++i) {
                const auto rand = vlr.challenge(ue->imsi, rng, ue->me.name());
                const auto out = ue->me.handle_challenge(ue->sim, rand, rng);
                c.require(out.kind == ChallengeOutcome::Kind::Responded && out.sres, "challenge not answered");
                if (!out.sres) break;
                const auto legacy = legacy_response(ki, rand);
                c.require(*out.sres == legacy.sres && ue->me.session().kc == legacy.kc, "differs from legacy response");
                c.require(arr(*out.sres) == oracle::a3(ki.array(), rand.array()), "SRES differs from A3");
                c.require(ue->me.session().kc && arr(*ue->me.session().kc) == oracle::a8(ki.array(), rand.array()),
                          "Kc differs from A8");
                c.require(vlr.verify(ue->imsi, *out.sres) == VlrVerdict::Authenticated, "VLR did not authenticate");
            }
        }
        trace = Trace{};
    }
    c.require(home.record(enh).counter.value() == 10'000, "AuC counter off");
    c.require(ue_e.sim.state().counter.value() == 10'000, "SIM counter off");
}

ScenarioResult run_golden(Check& c, const std::string& name) {
    const auto cfg = ScenarioConfig::from_file(kRoot / "scenarios" / (name + ".json"));
    auto r = run_scenario(cfg);
    c.require(!r.error, name + ": run aborted");
    c.require(r.reports.size() == 1, name + ": expected one attack report");
    c.require(r.trace.to_jsonl() == slurp(kRoot / "tests/golden" / (name + ".jsonl")), name + ": golden trace differs");
    return r;
}

// 5a. MITM against a legacy victim succeeds.
void mitm_legacy(Check& c) {
    const auto r = run_golden(c, "mitm_vs_legacy");
    if (!c.failure.empty()) return;
    c.require(r.reports[0].succeeded, "attack reported failure");
    c.require(r.reports[0].recovered_plaintext.has_value(), "no plaintext recovered");
}

// 5b. MITM against an enhanced victim: the SIM tears down the connection with
// the six-message proactive exchange and no SRES leaves the handset.
void mitm_enhanced(Check& c) {
    const auto r = run_golden(c, "mitm_vs_enhanced");
    if (!c.failure.empty()) return;
    c.require(!r.reports[0].succeeded, "attack reported success");
    c.require(r.reports[0].failure_cause == "connection dropped by SIM", "unexpected failure cause");

    const std::string me = "me/" + scen::kVictim;
    const std::string sim = "sim/" + scen::kVictim;
    const auto stk = events_of(r.trace, [&](const TraceEvent& e) {
        return (e.actor == me || e.actor == sim) &&
               (e.event == "FETCH" || e.event == "PROACTIVE_COMMAND" || e.event == "TERMINAL_RESPONSE");
    });
    const std::vector<std::string> six = {"FETCH", "PROACTIVE_COMMAND", "TERMINAL_RESPONSE",
                                          "FETCH", "PROACTIVE_COMMAND", "TERMINAL_RESPONSE"};
    c.require(stk == six, "teardown is not the six-message exchange");
    std::vector<std::string> commands;
    for (const auto& e : r.trace.events()) {
        if (e.actor == sim && e.event == "PROACTIVE_COMMAND") commands.push_back(e.fields["command"]);
    }
    c.require(commands == std::vector<std::string>{"GET_CHANNEL_STATUS", "CLOSE_CHANNEL"}, "wrong proactive commands");
    c.require(events_of(r.trace, [&](const TraceEvent& e) { return e.actor == me && e.event == "AUTH_RESPONSE"; }).empty(),
              "victim ME sent an SRES");
    c.require(!events_of(r.trace, [&](const TraceEvent& e) { return e.actor == me && e.event == "CONNECTION_DROPPED"; })
                   .empty(),
              "no connection drop");
}

// 5c. BBK against a legacy victim recovers the Kc the AuC would derive for the
// logged RAND and decrypts the logged call.
void bbk_legacy(Check& c) {
    const auto r = run_golden(c, "bbk_vs_legacy");
    if (!c.failure.empty()) return;
    const auto& rep = r.reports[0];
    c.require(rep.succeeded && rep.recovered_kc, "attack did not recover Kc");
    if (!rep.recovered_kc) return;

    const auto cfg = Json::parse(slurp(kRoot / "scenarios/bbk_vs_legacy.json"));
    const auto master = Key128::from_hex(cfg["subscribers"][0]["master_key"].get<std::string>());
    const auto ki = oracle::derive(master.array(), scen::kVictim).first;
    std::optional<Rand128> logged;
    for (const auto& e : r.trace.events()) {
        if (e.actor == "vlr" && e.event == "AUTH_REQUEST" && !logged) logged = Rand128::from_hex(e.fields["rand"].get<std::string>());
    }
    c.require(logged.has_value(), "no logged RAND");
    if (!logged) return;
    c.require(arr(*rep.recovered_kc) == oracle::a8(ki, logged->array()), "recovered Kc is not A8(Ki, logged RAND)");
    std::string sent;
    for (const auto& step : cfg["script"]) {
        if (step["kind"] == "SEND_TRAFFIC") sent += step["plaintext"].get<std::string>();
    }
    c.require(rep.recovered_plaintext && to_hex(*rep.recovered_plaintext) == sent, "decrypted traffic does not match");
}

// 5d. BBK against an enhanced victim fails across seeds, counter positions
// and handset capabilities.
void bbk_enhanced(Check& c) {
    const auto r = run_golden(c, "bbk_vs_enhanced");
    if (!c.failure.empty()) return;
    c.require(!r.reports[0].succeeded, "golden scenario: attack succeeded");
    for (unsigned i = 0; i < 100 && c.failure.empty(); ++i) {
        const auto t = scen::run(scen::bbk_config(
            {.mode = "ENHANCED", .class_e = i % 3 != 0, .seed = 5000 + i, .warmup = i % 5, .open_channel = i % 2 == 0}));
        c.require(!t.error, "trial " + std::to_string(i) + " aborted");
        c.require(t.reports.size() == 1 && !t.reports[0].succeeded, "trial " + std::to_string(i) + " succeeded");
    }
}

// 6. Out-of-order triple consumption shows up as SIM rejections exactly when
// SQN goes backwards; in-order consumption never triggers one.
void ordering(Check& c) {
    auto session = [&](ConsumptionPolicy policy, std::size_t n, std::uint64_t seed, std::size_t& descents) {
        Rng rng(seed);
        Trace trace;
        HomeNetwork home;
        ServingNetwork vlr(policy, CipherPolicy{});
        const Imsi imsi(scen::kVictim);
        auto p = home.provision(imsi, SimMode::Enhanced, rng.draw<Key128>());
        UserEquipment ue(p.sim, MeProfile{}, &trace);
        ue.me.power_on(ue.sim);
        vlr.request_triples(home, imsi, n, rng);
        std::size_t rejections = 0;
        std::uint64_t high = 0;
        const auto ka = *home.record(imsi).ka;
        for (std::size_t i = 0; i < n; ++i) {
            if (!ue.me.session().attached_network) ue.me.attach("vlr");
            const auto rand = vlr.challenge(imsi, rng, ue.me.name());
            const auto out = ue.me.handle_challenge(ue.sim, rand, rng);
            const bool rejected = out.kind != ChallengeOutcome::Kind::Responded;
            // Decode SQN independently to classify the pair.
            const auto mac = std::array<std::uint8_t, 8>{rand[8],  rand[9],  rand[10], rand[11],
                                                         rand[12], rand[13], rand[14], rand[15]};
            const auto ak = oracle::f5(ka.array(), mac);
            std::uint64_t sqn = 0;
            for (int k = 2; k < 8; ++k) sqn = (sqn << 8) | (rand[k] ^ ak[k]);
            const bool descent = sqn <= high;
            c.require(rejected == descent, "rejection does not track SQN order");
            descents += descent;
            rejections += rejected;
            if (!rejected) vlr.verify(imsi, *out.sres);
            high = std::max(high, sqn);
            trace = Trace{};
        }
        return rejections;
    };
    std::size_t d_random = 0, d_in = 0;
    const auto random_rej = session(ConsumptionPolicy::RandomOrder, 10, 606, d_random);
    c.require(d_random >= 1 && random_rej >= 1, "RANDOM_ORDER produced no rejection");
    const auto in_rej = session(ConsumptionPolicy::InOrder, 1000, 607, d_in);
    c.require(in_rej == 0 && d_in == 0, "IN_ORDER produced rejections");
}

// 7. Hijacked RANDs look uniform bit by bit.
void rand_uniformity(Check& c) {
    const auto rep = cli::rand_stats(100'000, 1);
    c.require(rep.passed, "max deviation " + std::to_string(rep.max_deviation_sigma) + " sigma at bit " +
                              std::to_string(rep.worst_bit));
}

// 8. Same config, same bytes.
void determinism(Check& c) {
    for (const auto& entry : fs::directory_iterator(kRoot / "scenarios")) {
        const auto cfg = ScenarioConfig::from_file(entry.path());
        c.require(run_scenario(cfg).trace.to_jsonl() == run_scenario(cfg).trace.to_jsonl(),
                  entry.path().filename().string() + " not reproducible");
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"1 hijacked RAND round trip (10^4)", roundtrip},
        {"2 single-bit tamper rejected (100x128)", tamper},
        {"3 replay rejected (10^3)", replay},
        {"4 legacy transparency (10^4 per mode)", legacy_transparency},
        {"5a MITM vs legacy succeeds", mitm_legacy},
        {"5b MITM vs enhanced torn down, no SRES", mitm_enhanced},
        {"5c BBK vs legacy recovers Kc", bbk_legacy},
        {"5d BBK vs enhanced fails (100 trials)", bbk_enhanced},
        {"6 triple ordering", ordering},
        {"7 RAND bit uniformity (10^5)", rand_uniformity},
        {"8 deterministic traces", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.failure = std::string("exception: ") + e.what();
        }
        if (c.failure.empty()) {
            std::cout << "PASS " << name << "\n";
        } else {
            std::cout << "FAIL " << name << ": " << c.failure << "\n";
            ++failed;
        }
    }
    return failed == 0 ? 0 : 1;
}
