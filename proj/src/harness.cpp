#include "gsmauth/harness.hpp"

#include <memory>

namespace gsmauth {

bool ScenarioResult::assertions_passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

Json ScenarioResult::summary(const ScenarioConfig& config) const {
    Json j;
    j["scenario"] = config.name;
    j["seed"] = config.seed;
    j["events"] = trace.size();

    Json reps = Json::array();
    for (const auto& r : reports) reps.push_back(r.to_json());
    j["attack_reports"] = reps;

    Json asserts = Json::array();
    for (const auto& a : assertions) {
        Json aj;
        aj["name"] = a.name;
        aj["passed"] = a.passed;
        aj["divergence_seq"] = a.divergence_seq ? Json(*a.divergence_seq) : Json(nullptr);
        aj["detail"] = a.detail;
        asserts.push_back(aj);
    }
    j["assertions"] = asserts;

    if (error) {
        j["error"] = Json{{"kind", to_string(error->kind)}, {"message", error->message}, {"step", error->step_index}};
    } else {
        j["error"] = nullptr;
    }
    return j;
}

namespace {

constexpr const char* kHarness = "harness";

class Engine {
public:
    explicit Engine(const ScenarioConfig& config)
        : config_(config),
          rng_(config.seed),
          home_(config.amf),
          vlr_(config.network_policy.consumption, CipherPolicy{config.network_policy.cipher}) {
        home_.set_trace(&result_.trace);
        vlr_.set_trace(&result_.trace);
        if (config.attacker) log_.emplace("me/" + config.attacker->victim.digits());
    }

    ScenarioResult run() {
        std::size_t step_index = 0;
        try {
            setup();
            for (; step_index < config_.script.size(); ++step_index) {
                execute(config_.script[step_index]);
                feed_eavesdropper();
            }
        } catch (const Error& e) {
            result_.error = RunError{e.kind(), e.what(), step_index};
            result_.trace.emit(kHarness, "", "ABORTED",
                               Json{{"step", step_index}, {"kind", to_string(e.kind())}, {"message", e.what()}});
        }
        return std::move(result_);
    }

private:
    UserEquipment& ue(const Imsi& imsi) {
        auto it = ues_.find(imsi);
        if (it == ues_.end()) throw Error(ErrorKind::Lookup, "no handset for IMSI " + imsi.digits());
        return *it->second;
    }

    void setup() {
        result_.trace.emit(kHarness, "", "SCENARIO_START", Json{{"name", config_.name}, {"seed", config_.seed}});
        for (const auto& sub : config_.subscribers) {
            const Key128 master = sub.master ? *sub.master : rng_.draw<Key128>();
            auto provisioned = home_.provision(sub.imsi, sub.mode, master);
            result_.trace.emit("auc", "", "PROVISIONED",
                               Json{{"imsi", sub.imsi.digits()}, {"mode", to_string(sub.mode)}, {"counter", 0}});

            auto profile_it = config_.me_profiles.find(sub.imsi);
            const MeProfile profile = profile_it == config_.me_profiles.end() ? MeProfile{} : profile_it->second;
            auto handset = std::make_unique<UserEquipment>(provisioned.sim, profile, &result_.trace);
            handset->me.power_on(handset->sim);
            ues_.emplace(sub.imsi, std::move(handset));
        }
        feed_eavesdropper();
    }

    void feed_eavesdropper() {
        if (!log_) return;
        const auto& events = result_.trace.events();
        for (; observed_ < events.size(); ++observed_) log_->observe(events[observed_]);
    }

    void execute(const ScenarioStep& step) {
        switch (step.kind) {
            case StepKind::Attach: {
                ue(*step.imsi).me.attach(vlr_.name());
                break;
            }
            case StepKind::RequestTriples: {
                const std::size_t n = step.n ? step.n : config_.network_policy.batch_size;
                vlr_.request_triples(home_, *step.imsi, n, rng_);
                break;
            }
            case StepKind::Challenge:
                challenge(ue(*step.imsi));
                break;
            case StepKind::SendTraffic:
                send_traffic(ue(*step.imsi), step);
                break;
            case StepKind::PowerCycleUe:
                power_cycle(ue(*step.imsi));
                break;
            case StepKind::OpenChannel:
                ue(*step.imsi).me.open_channel();
                break;
            case StepKind::RunAttack:
                run_attack(step);
                break;
            case StepKind::Assert: {
                auto r = assert_trace(result_.trace, step.predicate);
                r.name = step.name;
                result_.trace.emit(kHarness, "", "ASSERT",
                                   Json{{"name", r.name},
                                        {"passed", r.passed},
                                        {"divergence_seq", r.divergence_seq ? Json(*r.divergence_seq) : Json(nullptr)},
                                        {"detail", r.detail}});
                result_.assertions.push_back(std::move(r));
                break;
            }
        }
    }

    void challenge(UserEquipment& u) {
        if (u.me.session().attached_network != vlr_.name()) {
            throw Error(ErrorKind::ProtocolOrder, u.me.name() + " is not attached to " + vlr_.name());
        }
        const auto rand = vlr_.challenge(u.imsi, rng_, u.me.name());
        const auto outcome = u.me.handle_challenge(u.sim, rand, rng_);
        if (!outcome.sres) return;

        const auto verdict = vlr_.verify(u.imsi, *outcome.sres);
        if (verdict == VlrVerdict::Authenticated && outcome.kind == ChallengeOutcome::Kind::Responded) {
            u.me.apply_cipher(vlr_.select_cipher(u.imsi, u.me.name()));
        }
    }

    void send_traffic(UserEquipment& u, const ScenarioStep& step) {
        if (!u.me.can_send()) {
            result_.trace.emit(kHarness, "", "TRAFFIC_BLOCKED",
                               Json{{"me", u.me.name()}, {"frame", step.frame},
                                    {"attached", u.me.session().attached_network.has_value()}});
            return;
        }
        const auto on_air = u.me.send_traffic(step.plaintext, step.frame);
        ground_truth_[{u.imsi, to_hex(on_air)}] = step.plaintext;

        if (u.me.session().attached_network == vlr_.name()) {
            auto received = vlr_.receive_traffic(u.imsi, on_air, step.frame);
            result_.trace.emit(vlr_.name(), "", "TRAFFIC_RECEIVED",
                               Json{{"imsi", u.imsi.digits()}, {"frame", step.frame},
                                    {"decrypted_ok", received && *received == step.plaintext}});
        }
    }

    void power_cycle(UserEquipment& u) {
        const std::string snapshot = u.sim.state().to_snapshot();
        u.me.power_off();
        u.sim = SimCard(SimState::from_snapshot(snapshot));
        u.sim.power_cycle();
        u.sim.set_trace(&result_.trace, "sim/" + u.imsi.digits(), u.me.name());
        result_.trace.emit(kHarness, "", "POWER_CYCLE",
                           Json{{"imsi", u.imsi.digits()}, {"counter", u.sim.state().counter.value()}});
        u.me.power_on(u.sim);
    }

    void run_attack(const ScenarioStep& step) {
        const auto& spec = *config_.attacker;
        auto& victim = ue(spec.victim);
        result_.trace.emit(kHarness, "", "ATTACK_START",
                           Json{{"attack", to_string(spec.kind)}, {"victim", victim.me.name()}});

        AttackReport report;
        if (spec.kind == AttackKind::MitmEavesdrop) {
            FakeNetworkParams params;
            params.rand_source = step.rand_source.value_or(spec.rand_source);
            params.victim_cipher = spec.victim_cipher;
            params.victim_plaintext = spec.victim_plaintext;
            std::optional<GenuineLeg> leg;
            if (spec.own_imsi) leg.emplace(GenuineLeg{vlr_, ue(*spec.own_imsi)});
            report = fake_network_attach(victim, params, *log_, leg, rng_, &result_.trace);
        } else {
            BbkParams params;
            params.known_frame = spec.known_frame;
            const Imsi victim_imsi = spec.victim;
            GroundTruth truth = [this, victim_imsi](const InterceptedFrame& f) -> std::optional<Bytes> {
                auto it = ground_truth_.find({victim_imsi, to_hex(f.ciphertext)});
                if (it == ground_truth_.end()) return std::nullopt;
                return it->second;
            };
            report = bbk_attack(*log_, victim, params, truth, rng_, &result_.trace);
        }

        result_.trace.emit(kHarness, "", "ATTACK_REPORT", report.to_json());
        result_.reports.push_back(std::move(report));
    }

    const ScenarioConfig& config_;
    ScenarioResult result_;
    Rng rng_;
    HomeNetwork home_;
    ServingNetwork vlr_;
    std::map<Imsi, std::unique_ptr<UserEquipment>> ues_;
    std::optional<InterceptLog> log_;
    std::size_t observed_ = 0;
    std::map<std::pair<Imsi, std::string>, Bytes> ground_truth_;
};

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) {
    config.validate();
    return Engine(config).run();
}

}  // namespace gsmauth
