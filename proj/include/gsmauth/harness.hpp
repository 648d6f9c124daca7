#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsmauth/adversary.hpp"
#include "gsmauth/mobile_equipment.hpp"
#include "gsmauth/network_side.hpp"
#include "gsmauth/trace.hpp"

namespace gsmauth {

struct SubscriberSpec {
    Imsi imsi;
    SimMode mode = SimMode::Enhanced;
    std::optional<Key128> master{};  // drawn from the run seed when absent
};

struct NetworkPolicy {
    ConsumptionPolicy consumption = ConsumptionPolicy::InOrder;
    CipherAlgId cipher = CipherAlgId::A5_3;
    std::size_t batch_size = 5;
};

struct AttackerSpec {
    AttackKind kind = AttackKind::MitmEavesdrop;
    Imsi victim;
    std::optional<Imsi> own_imsi{};  // MITM genuine-network leg
    RandSource rand_source = RandSource::Fabricated;
    CipherAlgId victim_cipher = CipherAlgId::NONE;
    Bytes victim_plaintext{};
    Bytes known_frame{};  // BBK: plaintext of the A5/2 frame, all-zero header first
};

enum class StepKind { Attach, RequestTriples, Challenge, SendTraffic, PowerCycleUe, OpenChannel, RunAttack, Assert };

std::string_view to_string(StepKind kind);

struct ScenarioStep {
    StepKind kind = StepKind::Attach;
    std::optional<Imsi> imsi;
    std::size_t n = 0;           // REQUEST_TRIPLES; 0 means the policy batch size
    Bytes plaintext;             // SEND_TRAFFIC
    std::uint32_t frame = 0;     // SEND_TRAFFIC
    std::string name;            // ASSERT
    Json predicate;              // ASSERT
    std::optional<RandSource> rand_source;  // RUN_ATTACK override
};

/// Everything that determines a run. The JSON schema is documented in
/// docs/scenario-format.md.
struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 0;
    Amf16 amf;
    std::vector<SubscriberSpec> subscribers;
    std::map<Imsi, MeProfile> me_profiles;
    NetworkPolicy network_policy;
    std::optional<AttackerSpec> attacker;
    std::vector<ScenarioStep> script;

    /// Throws ConfigValidation for schema or reference errors and
    /// PredicateSpec for malformed ASSERT predicates.
    static ScenarioConfig from_json(const Json& j);
    static ScenarioConfig from_file(const std::filesystem::path& path);

    void validate() const;
};

struct AssertionResult {
    std::string name;
    bool passed = false;
    std::optional<std::uint64_t> divergence_seq;  // first event where the predicate broke
    std::string detail;
};

/// Declarative matcher over traces.
///
///   {"type":"present",  "match":M}
///   {"type":"absent",   "match":M}
///   {"type":"count",    "match":M, "equals":N}
///   {"type":"sequence", "steps":[M...], "exact":bool}
///   {"type":"all",      "of":[P...]}
///
/// Every type except "all" accepts optional "after" / "before" matchers that
/// window the trace to events strictly after the first match of `after` and
/// strictly before the next match of `before`. A matcher M is an object with
/// optional "actor", "to", "event" strings and a "fields" object compared by
/// JSON equality. With "exact", events matching any step must form exactly
/// the step list.
AssertionResult assert_trace(const Trace& trace, const Json& predicate);

/// Throws PredicateSpec if the predicate is malformed.
void validate_predicate(const Json& predicate);

struct RunError {
    ErrorKind kind;
    std::string message;
    std::size_t step_index;
};

struct ScenarioResult {
    Trace trace;
    std::vector<AttackReport> reports;
    std::vector<AssertionResult> assertions;
    std::optional<RunError> error;

    bool assertions_passed() const;
    Json summary(const ScenarioConfig& config) const;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace gsmauth
