#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gsmauth/crypto_suite.hpp"
#include "gsmauth/sim_card.hpp"
#include "gsmauth/trace.hpp"

namespace gsmauth {

struct MeProfile {
    bool class_e_supported = true;
    bool accepts_unauthenticated = false;
    // Sends SRES upstream before honoring a SIM-initiated teardown.
    bool leaky = false;
};

class ChannelTable {
public:
    ChannelId open();
    bool close(ChannelId id);
    void clear() { open_.clear(); }

    bool contains(ChannelId id) const { return open_.count(id) != 0; }
    bool empty() const { return open_.empty(); }
    std::vector<ChannelId> ids() const { return {open_.begin(), open_.end()}; }

private:
    std::set<ChannelId> open_;
    unsigned next_id_ = 1;  // ids are never reused within a run
};

struct MeSession {
    std::optional<Tag64> kc;
    CipherAlgId cipher = CipherAlgId::NONE;
    ChannelTable channels;
    std::optional<std::string> attached_network;
    bool aka_completed = false;
};

struct ChallengeOutcome {
    enum class Kind { Responded, ConnectionDropped };
    Kind kind = Kind::Responded;
    // Present whenever SRES actually left the ME.
    std::optional<Tag64> sres;
};

/// A standard GSM handset. Nothing in here knows whether the SIM runs the
/// enhanced scheme: it only reacts to status words and proactive commands.
class MobileEquipment {
public:
    MobileEquipment(MeProfile profile, std::string name);

    void set_trace(Trace* trace, std::string sim_name = "sim") {
        trace_ = trace;
        sim_name_ = std::move(sim_name);
    }

    const std::string& name() const noexcept { return name_; }
    const MeProfile& profile() const noexcept { return profile_; }
    const MeSession& session() const noexcept { return session_; }

    /// SIM initialisation: sends TERMINAL PROFILE.
    void power_on(SimCard& sim);

    /// Drops the radio session. Channel ids stay burned.
    void power_off();

    void attach(const std::string& network);
    void detach();

    ChannelId open_channel();

    ChallengeOutcome handle_challenge(SimCard& sim, const Rand128& rand, Rng& rng);

    void apply_cipher(CipherAlgId alg);

    bool can_send() const;

    Bytes send_traffic(ByteView plaintext, std::uint32_t frame_index);

private:
    void emit(std::string to, std::string event, Json fields);
    void drop_connection(bool sres_discarded);

    MeProfile profile_;
    std::string name_;
    MeSession session_;
    Trace* trace_ = nullptr;
    std::string sim_name_ = "sim";
};

/// Handset plus the SIM inserted in it, wired to one trace under the names
/// "me/<imsi>" and "sim/<imsi>".
struct UserEquipment {
    UserEquipment(SimState sim_state, MeProfile profile, Trace* trace);

    Imsi imsi;
    SimCard sim;
    MobileEquipment me;
};

}  // namespace gsmauth
