#include <gtest/gtest.h>

#include "gsmauth/harness.hpp"
#include "gsmauth/mobile_equipment.hpp"
#include "support/oracle.hpp"
#include "support/util.hpp"

using namespace gsmauth;

namespace {

const Key128 kKi = testutil::key("000102030405060708090a0b0c0d0e0f");
const Key128 kKa = testutil::key("f0e1d2c3b4a5968778695a4b3c2d1e0f");

SimState sim_state(SimMode mode, std::uint64_t counter = 0) {
    SimState s;
    s.imsi = Imsi("001019999999999");
    s.ki = kKi;
    if (mode == SimMode::Enhanced) s.ka = kKa;
    s.counter = Sqn48(counter);
    s.mode = mode;
    return s;
}

struct Rig {
    Trace trace;
    Rng rng{3};
    UserEquipment ue;

    explicit Rig(SimMode mode, MeProfile profile = {}) : ue(sim_state(mode), profile, &trace) {
        ue.me.power_on(ue.sim);
        ue.me.attach("vlr");
    }

    std::size_t count(const std::string& event) const {
        return static_cast<std::size_t>(std::count_if(trace.events().begin(), trace.events().end(),
                                                      [&](const TraceEvent& e) { return e.event == event; }));
    }
};

Rand128 valid_rand(std::uint64_t sqn) { return build_hijacked_rand(kKa, Amf16{}, Sqn48(sqn)); }

}  // namespace

TEST(ChannelTable, IdsNeverReused) {
    ChannelTable t;
    EXPECT_EQ(t.open(), 1);
    EXPECT_EQ(t.open(), 2);
    EXPECT_TRUE(t.close(1));
    EXPECT_FALSE(t.close(1));
    EXPECT_EQ(t.open(), 3);
    EXPECT_EQ(t.ids(), (std::vector<ChannelId>{2, 3}));
}

TEST(MobileEquipment, ValidRandEnhancedResponds) {
    Rig rig(SimMode::Enhanced);
    const auto rand = valid_rand(1);
    const auto out = rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    EXPECT_EQ(out.kind, ChallengeOutcome::Kind::Responded);
    ASSERT_TRUE(out.sres);
    EXPECT_EQ(testutil::arr(*out.sres), oracle::a3(kKi.array(), rand.array()));
    EXPECT_EQ(rig.ue.me.session().kc, a8_kc(kKi, rand));
    EXPECT_EQ(rig.count("AUTH_RESPONSE"), 1u);
}

TEST(MobileEquipment, ReplayDropsAndClosesChannel) {
    Rig rig(SimMode::Enhanced);
    const auto ch = rig.ue.me.open_channel();
    const auto rand = valid_rand(1);
    rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    const auto before = rig.count("AUTH_RESPONSE");

    const auto out = rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    EXPECT_EQ(out.kind, ChallengeOutcome::Kind::ConnectionDropped);
    EXPECT_FALSE(out.sres);
    EXPECT_FALSE(rig.ue.me.session().channels.contains(ch));
    EXPECT_TRUE(rig.ue.me.session().channels.empty());
    EXPECT_FALSE(rig.ue.me.session().attached_network);
    EXPECT_EQ(rig.count("AUTH_RESPONSE"), before);
    EXPECT_EQ(rig.count("FETCH"), 2u);
    EXPECT_EQ(rig.count("CONNECTION_DROPPED"), 1u);
}

TEST(MobileEquipment, TeardownMessageOrder) {
    Rig rig(SimMode::Enhanced);
    rig.ue.me.open_channel();
    rig.ue.me.handle_challenge(rig.ue.sim, Rand128{}, rig.rng);

    std::vector<std::string> seen;
    for (const auto& e : rig.trace.events()) {
        if (e.event == "FETCH" || e.event == "PROACTIVE_COMMAND" || e.event == "TERMINAL_RESPONSE") {
            seen.push_back(e.event + (e.fields.contains("command") ? ":" + e.fields["command"].get<std::string>() : ""));
        }
    }
    const std::vector<std::string> want = {
        "FETCH", "PROACTIVE_COMMAND:GET_CHANNEL_STATUS", "TERMINAL_RESPONSE:GET_CHANNEL_STATUS",
        "FETCH", "PROACTIVE_COMMAND:CLOSE_CHANNEL",      "TERMINAL_RESPONSE:CLOSE_CHANNEL",
    };
    EXPECT_EQ(seen, want);
    EXPECT_EQ(rig.ue.sim.state().teardown_phase, TeardownPhase::Idle);
}

TEST(MobileEquipment, LegacyReplayStillResponds) {
    Rig rig(SimMode::Legacy);
    const auto rand = Rand128::from_hex("00112233445566778899aabbccddeeff");
    rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    const auto out = rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    EXPECT_EQ(out.kind, ChallengeOutcome::Kind::Responded);
    EXPECT_EQ(out.sres, a3_sres(kKi, rand));
}

TEST(MobileEquipment, LeakyMeSendsSresBeforeDropping) {
    Rig rig(SimMode::Enhanced, MeProfile{true, false, true});
    const auto out = rig.ue.me.handle_challenge(rig.ue.sim, Rand128{}, rig.rng);
    EXPECT_EQ(out.kind, ChallengeOutcome::Kind::ConnectionDropped);
    EXPECT_TRUE(out.sres);
    EXPECT_EQ(rig.count("AUTH_RESPONSE"), 1u);
}

TEST(MobileEquipment, NonClassEMeKeepsPlaceholders) {
    Rig rig(SimMode::Enhanced, MeProfile{false, false, false});
    const Rand128 rand{};
    const auto out = rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    EXPECT_EQ(out.kind, ChallengeOutcome::Kind::Responded);
    ASSERT_TRUE(out.sres);
    EXPECT_NE(*out.sres, a3_sres(kKi, rand));
    EXPECT_EQ(rig.count("FETCH"), 0u);
}

TEST(MobileEquipment, CipherRules) {
    Rig rig(SimMode::Enhanced);
    EXPECT_NO_THROW(rig.ue.me.apply_cipher(CipherAlgId::NONE));
    EXPECT_THROW(rig.ue.me.apply_cipher(CipherAlgId::A5_3), Error);
    rig.ue.me.handle_challenge(rig.ue.sim, valid_rand(1), rig.rng);
    EXPECT_NO_THROW(rig.ue.me.apply_cipher(CipherAlgId::A5_3));
}

TEST(MobileEquipment, TrafficEncryption) {
    Rig rig(SimMode::Enhanced);
    const auto rand = valid_rand(1);
    rig.ue.me.handle_challenge(rig.ue.sim, rand, rig.rng);
    const auto kc = a8_kc(kKi, rand);

    const Bytes plain = from_hex("48656c6c6f20776f726c64");
    EXPECT_EQ(rig.ue.me.send_traffic(plain, 4), plain);

    rig.ue.me.apply_cipher(CipherAlgId::A5_2);
    EXPECT_EQ(rig.ue.me.send_traffic(Bytes(8, 0), 0), kc.to_vector());

    rig.ue.me.apply_cipher(CipherAlgId::A5_3);
    const auto ct = rig.ue.me.send_traffic(plain, 9);
    EXPECT_EQ(xor_bytes(ct, plain), a5_keystream(CipherAlgId::A5_3, kc, 9, plain.size()).bytes);
}

TEST(MobileEquipment, UnauthenticatedTrafficPolicy) {
    Rig strict(SimMode::Legacy, MeProfile{true, false, false});
    EXPECT_FALSE(strict.ue.me.can_send());
    EXPECT_THROW(strict.ue.me.send_traffic(Bytes(4), 0), Error);

    Rig lax(SimMode::Legacy, MeProfile{true, true, false});
    EXPECT_TRUE(lax.ue.me.can_send());
    EXPECT_EQ(lax.ue.me.send_traffic(Bytes(4, 7), 0), Bytes(4, 7));

    lax.ue.me.detach();
    EXPECT_THROW(lax.ue.me.send_traffic(Bytes(4), 0), Error);
}

TEST(MobileEquipment, IdenticalBehaviourForNormalResponses) {
    // With the SIM answering '9000', the ME-side trace has the same shape for
    // both SIM modes; only the SIM's own diagnostic event differs.
    Rig legacy(SimMode::Legacy);
    Rig enhanced(SimMode::Enhanced);
    const auto rand = valid_rand(1);
    legacy.ue.me.handle_challenge(legacy.ue.sim, rand, legacy.rng);
    enhanced.ue.me.handle_challenge(enhanced.ue.sim, rand, enhanced.rng);

    auto me_lines = [](const Trace& t) {
        std::vector<std::string> out;
        for (const auto& e : t.events()) {
            if (e.actor.rfind("me/", 0) == 0) out.push_back(e.event + e.fields.dump());
        }
        return out;
    };
    EXPECT_EQ(me_lines(legacy.trace), me_lines(enhanced.trace));
}

TEST(MobileEquipment, ChallengeWhileDetached) {
    Rig rig(SimMode::Legacy);
    rig.ue.me.detach();
    EXPECT_THROW(rig.ue.me.handle_challenge(rig.ue.sim, Rand128{}, rig.rng), Error);
}
