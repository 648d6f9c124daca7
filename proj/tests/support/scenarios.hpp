#pragma once

#include <string>

#include "gsmauth/harness.hpp"

namespace scen {

using gsmauth::Json;

inline const std::string kVictim = "001010000000001";
inline const std::string kAttacker = "001010000000002";
inline const std::string kVictimMaster = "000102030405060708090a0b0c0d0e0f";
inline const std::string kAttackerMaster = "f0e1d2c3b4a5968778695a4b3c2d1e0f";

struct BbkOptions {
    std::string mode = "LEGACY";
    bool class_e = true;
    std::uint64_t seed = 1;
    unsigned warmup = 0;  // honest AKA rounds before the intercepted session
    bool open_channel = true;
};

inline Json bbk_config(const BbkOptions& o) {
    Json script = Json::array();
    script.push_back({{"kind", "ATTACH"}, {"imsi", kVictim}});
    if (o.open_channel) script.push_back({{"kind", "OPEN_CHANNEL"}, {"imsi", kVictim}});
    script.push_back({{"kind", "REQUEST_TRIPLES"}, {"imsi", kVictim}, {"n", o.warmup + 1}});
    for (unsigned i = 0; i < o.warmup; ++i) script.push_back({{"kind", "CHALLENGE"}, {"imsi", kVictim}});
    script.push_back({{"kind", "CHALLENGE"}, {"imsi", kVictim}});
    script.push_back({{"kind", "SEND_TRAFFIC"}, {"imsi", kVictim}, {"plaintext", "436f6e666964656e7469616c"}, {"frame", 41}});
    script.push_back({{"kind", "POWER_CYCLE_UE"}, {"imsi", kVictim}});
    script.push_back({{"kind", "RUN_ATTACK"}});

    return {
        {"name", "bbk"},
        {"seed", o.seed},
        {"subscribers", Json::array({{{"imsi", kVictim}, {"mode", o.mode}}})},
        {"me_profiles", {{kVictim, {{"class_e_supported", o.class_e}}}}},
        {"network_policy", {{"consumption_policy", "IN_ORDER"}, {"cipher", "A5_3"}}},
        {"attacker", {{"kind", "BBK_REPLAY"}, {"victim", kVictim}}},
        {"script", script},
    };
}

struct MitmOptions {
    std::string mode = "LEGACY";
    bool class_e = true;
    bool accepts_unauthenticated = false;
    std::string rand_source = "FABRICATED";
    std::uint64_t seed = 1;
    bool intercept_first = false;  // victim does one honest AKA so REPLAYED has something to replay
};

inline Json mitm_config(const MitmOptions& o) {
    Json script = Json::array();
    script.push_back({{"kind", "ATTACH"}, {"imsi", kVictim}});
    script.push_back({{"kind", "OPEN_CHANNEL"}, {"imsi", kVictim}});
    if (o.intercept_first) {
        script.push_back({{"kind", "REQUEST_TRIPLES"}, {"imsi", kVictim}, {"n", 1}});
        script.push_back({{"kind", "CHALLENGE"}, {"imsi", kVictim}});
    }
    script.push_back({{"kind", "REQUEST_TRIPLES"}, {"imsi", kAttacker}, {"n", 1}});
    if (o.rand_source == "RELAY_FRESH") {
        script.push_back({{"kind", "REQUEST_TRIPLES"}, {"imsi", kVictim}, {"n", 1}});
    }
    script.push_back({{"kind", "RUN_ATTACK"}});

    return {
        {"name", "mitm"},
        {"seed", o.seed},
        {"subscribers",
         Json::array({{{"imsi", kVictim}, {"mode", o.mode}, {"master_key", kVictimMaster}},
                      {{"imsi", kAttacker}, {"mode", "LEGACY"}, {"master_key", kAttackerMaster}}})},
        {"me_profiles",
         {{kVictim, {{"class_e_supported", o.class_e}, {"accepts_unauthenticated", o.accepts_unauthenticated}}}}},
        {"attacker",
         {{"kind", "MITM_EAVESDROP"}, {"victim", kVictim}, {"own_imsi", kAttacker}, {"rand_source", o.rand_source}}},
        {"script", script},
    };
}

inline gsmauth::ScenarioResult run(const Json& j) { return gsmauth::run_scenario(gsmauth::ScenarioConfig::from_json(j)); }

}  // namespace scen
