#include <fstream>
#include <set>
#include <sstream>

#include "gsmauth/harness.hpp"

namespace gsmauth {

std::string_view to_string(StepKind kind) {
    switch (kind) {
        case StepKind::Attach: return "ATTACH";
        case StepKind::RequestTriples: return "REQUEST_TRIPLES";
        case StepKind::Challenge: return "CHALLENGE";
        case StepKind::SendTraffic: return "SEND_TRAFFIC";
        case StepKind::PowerCycleUe: return "POWER_CYCLE_UE";
        case StepKind::OpenChannel: return "OPEN_CHANNEL";
        case StepKind::RunAttack: return "RUN_ATTACK";
        case StepKind::Assert: return "ASSERT";
    }
    return "?";
}

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::ConfigValidation, where + ": " + what);
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) invalid(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) invalid(where, "unknown key '" + key + "'");
    }
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) invalid(where, std::string("missing '") + key + "'");
    return *it;
}

std::string get_string(const Json& v, const std::string& where) {
    if (!v.is_string()) invalid(where, "expected a string");
    return v.get<std::string>();
}

std::uint64_t get_uint(const Json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        invalid(where, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool get_bool(const Json& v, const std::string& where) {
    if (!v.is_boolean()) invalid(where, "expected true/false");
    return v.get<bool>();
}

Imsi get_imsi(const Json& v, const std::string& where) {
    try {
        return Imsi(get_string(v, where));
    } catch (const Error& e) {
        invalid(where, e.what());
    }
}

Bytes get_hex(const Json& v, const std::string& where) {
    try {
        return from_hex(get_string(v, where));
    } catch (const Error& e) {
        invalid(where, e.what());
    }
}

template <class Parse>
auto get_enum(const Json& v, const std::string& where, Parse parse) {
    auto parsed = parse(get_string(v, where));
    if (!parsed) invalid(where, "unknown value '" + v.get<std::string>() + "'");
    return *parsed;
}

std::optional<StepKind> parse_step_kind(std::string_view name) {
    for (auto k : {StepKind::Attach, StepKind::RequestTriples, StepKind::Challenge, StepKind::SendTraffic,
                   StepKind::PowerCycleUe, StepKind::OpenChannel, StepKind::RunAttack, StepKind::Assert}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

ScenarioStep parse_step(const Json& j, const std::string& where) {
    check_keys(j, where, {"kind", "imsi", "n", "plaintext", "frame", "name", "predicate", "rand_source"});
    ScenarioStep step;
    step.kind = get_enum(require(j, "kind", where), where + ".kind", parse_step_kind);

    if (j.contains("imsi")) step.imsi = get_imsi(j["imsi"], where + ".imsi");
    if (j.contains("n")) {
        step.n = get_uint(j["n"], where + ".n");
        if (step.n == 0) invalid(where + ".n", "must be positive");
    }
    if (j.contains("plaintext")) step.plaintext = get_hex(j["plaintext"], where + ".plaintext");
    if (j.contains("frame")) {
        auto f = get_uint(j["frame"], where + ".frame");
        if (f > UINT32_MAX) invalid(where + ".frame", "frame index exceeds 32 bits");
        step.frame = static_cast<std::uint32_t>(f);
    }
    if (j.contains("name")) step.name = get_string(j["name"], where + ".name");
    if (j.contains("rand_source")) step.rand_source = get_enum(j["rand_source"], where + ".rand_source", parse_rand_source);
    if (j.contains("predicate")) step.predicate = j["predicate"];

    switch (step.kind) {
        case StepKind::Attach:
        case StepKind::RequestTriples:
        case StepKind::Challenge:
        case StepKind::SendTraffic:
        case StepKind::PowerCycleUe:
        case StepKind::OpenChannel:
            if (!step.imsi) invalid(where, std::string(to_string(step.kind)) + " needs 'imsi'");
            break;
        case StepKind::Assert:
            if (!j.contains("predicate")) invalid(where, "ASSERT needs 'predicate'");
            validate_predicate(step.predicate);
            if (step.name.empty()) step.name = where;
            break;
        case StepKind::RunAttack:
            break;
    }
    if (step.kind == StepKind::SendTraffic && step.plaintext.empty()) invalid(where, "SEND_TRAFFIC needs 'plaintext'");
    return step;
}

MeProfile parse_me_profile(const Json& j, const std::string& where) {
    check_keys(j, where, {"class_e_supported", "accepts_unauthenticated", "leaky_me"});
    MeProfile p;
    if (j.contains("class_e_supported")) p.class_e_supported = get_bool(j["class_e_supported"], where);
    if (j.contains("accepts_unauthenticated")) p.accepts_unauthenticated = get_bool(j["accepts_unauthenticated"], where);
    if (j.contains("leaky_me")) p.leaky = get_bool(j["leaky_me"], where);
    return p;
}

AttackerSpec parse_attacker(const Json& j, const std::string& where) {
    check_keys(j, where,
               {"kind", "victim", "own_imsi", "rand_source", "victim_cipher", "victim_plaintext", "known_frame"});
    AttackerSpec a{.victim = get_imsi(require(j, "victim", where), where + ".victim")};
    a.kind = get_enum(require(j, "kind", where), where + ".kind", parse_attack_kind);
    if (j.contains("own_imsi")) a.own_imsi = get_imsi(j["own_imsi"], where + ".own_imsi");
    if (j.contains("rand_source")) a.rand_source = get_enum(j["rand_source"], where + ".rand_source", parse_rand_source);
    if (j.contains("victim_cipher")) a.victim_cipher = get_enum(j["victim_cipher"], where + ".victim_cipher", parse_cipher);
    a.victim_plaintext = j.contains("victim_plaintext") ? get_hex(j["victim_plaintext"], where + ".victim_plaintext")
                                                        : from_hex("48656c6c6f2c2076696374696d");
    a.known_frame = j.contains("known_frame") ? get_hex(j["known_frame"], where + ".known_frame") : Bytes(16, 0);
    if (a.known_frame.size() < 8) invalid(where + ".known_frame", "needs at least the 8-octet zero header");
    for (int i = 0; i < 8; ++i) {
        if (a.known_frame[i] != 0) invalid(where + ".known_frame", "first 8 octets must be the all-zero header");
    }
    return a;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const Json& j) {
    const std::string root = "config";
    check_keys(j, root, {"name", "seed", "amf", "subscribers", "me_profiles", "network_policy", "attacker", "script"});

    ScenarioConfig c;
    if (j.contains("name")) c.name = get_string(j["name"], "name");
    c.seed = get_uint(require(j, "seed", root), "seed");
    if (j.contains("amf")) {
        auto amf = get_hex(j["amf"], "amf");
        if (amf.size() != 2) invalid("amf", "must be 2 octets");
        c.amf.value = static_cast<std::uint16_t>((amf[0] << 8) | amf[1]);
    }

    const auto& subs = require(j, "subscribers", root);
    if (!subs.is_array() || subs.empty()) invalid("subscribers", "expected a non-empty array");
    for (std::size_t i = 0; i < subs.size(); ++i) {
        const std::string where = "subscribers[" + std::to_string(i) + "]";
        check_keys(subs[i], where, {"imsi", "mode", "master_key"});
        SubscriberSpec s{.imsi = get_imsi(require(subs[i], "imsi", where), where + ".imsi")};
        if (subs[i].contains("mode")) s.mode = get_enum(subs[i]["mode"], where + ".mode", parse_sim_mode);
        if (subs[i].contains("master_key")) {
            auto key = get_hex(subs[i]["master_key"], where + ".master_key");
            if (key.size() != 16) invalid(where + ".master_key", "must be 16 octets");
            s.master = Key128::from_span(key);
        }
        c.subscribers.push_back(s);
    }

    if (j.contains("me_profiles")) {
        const auto& profiles = j["me_profiles"];
        if (!profiles.is_object()) invalid("me_profiles", "expected an object keyed by IMSI");
        for (const auto& [imsi, p] : profiles.items()) {
            c.me_profiles[get_imsi(Json(imsi), "me_profiles key")] = parse_me_profile(p, "me_profiles." + imsi);
        }
    }

    if (j.contains("network_policy")) {
        const auto& p = j["network_policy"];
        check_keys(p, "network_policy", {"consumption_policy", "cipher", "batch_size"});
        if (p.contains("consumption_policy")) {
            c.network_policy.consumption =
                get_enum(p["consumption_policy"], "network_policy.consumption_policy", parse_consumption_policy);
        }
        if (p.contains("cipher")) c.network_policy.cipher = get_enum(p["cipher"], "network_policy.cipher", parse_cipher);
        if (p.contains("batch_size")) {
            c.network_policy.batch_size = get_uint(p["batch_size"], "network_policy.batch_size");
            if (c.network_policy.batch_size == 0) invalid("network_policy.batch_size", "must be positive");
        }
    }

    if (j.contains("attacker") && !j["attacker"].is_null()) c.attacker = parse_attacker(j["attacker"], "attacker");

    const auto& script = require(j, "script", root);
    if (!script.is_array()) invalid("script", "expected an array");
    for (std::size_t i = 0; i < script.size(); ++i) {
        c.script.push_back(parse_step(script[i], "script[" + std::to_string(i) + "]"));
    }

    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Json j;
    try {
        j = Json::parse(buf.str());
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ConfigValidation, path.string() + ": " + e.what());
    }
    return from_json(j);
}

void ScenarioConfig::validate() const {
    std::set<Imsi> known;
    for (const auto& s : subscribers) {
        if (!known.insert(s.imsi).second) invalid("subscribers", "duplicate IMSI " + s.imsi.digits());
    }
    auto check = [&](const Imsi& imsi, const std::string& where) {
        if (!known.count(imsi)) invalid(where, "IMSI " + imsi.digits() + " is not provisioned");
    };
    for (const auto& [imsi, _] : me_profiles) check(imsi, "me_profiles");
    if (attacker) {
        check(attacker->victim, "attacker.victim");
        if (attacker->own_imsi) {
            check(*attacker->own_imsi, "attacker.own_imsi");
            if (*attacker->own_imsi == attacker->victim) invalid("attacker.own_imsi", "must differ from the victim");
        }
    }
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto& step = script[i];
        const std::string where = "script[" + std::to_string(i) + "]";
        if (step.imsi) check(*step.imsi, where + ".imsi");
        if (step.kind == StepKind::RunAttack && !attacker) invalid(where, "RUN_ATTACK without an attacker section");
    }
}

}  // namespace gsmauth
