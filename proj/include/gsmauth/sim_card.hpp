#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsmauth/auth_core.hpp"
#include "gsmauth/identity.hpp"
#include "gsmauth/trace.hpp"

namespace gsmauth {

enum class SimMode { Legacy, Enhanced };

std::string_view to_string(SimMode mode);
std::optional<SimMode> parse_sim_mode(std::string_view name);

enum class TeardownPhase { Idle, AwaitFetch1, AwaitChannelStatus, AwaitFetch2, AwaitCloseResult };

std::string_view to_string(TeardownPhase phase);

using ChannelId = std::uint8_t;

enum class StkCommandKind { GetChannelStatus, CloseChannel };

std::string_view to_string(StkCommandKind kind);

struct StkCommand {
    StkCommandKind kind = StkCommandKind::GetChannelStatus;
    std::vector<ChannelId> channel_ids;  // CLOSE CHANNEL only, never empty there

    // Simplified proactive-command TLV (D0 wrapper, command details, device
    // identities, one channel-id TLV per closed channel). Its size is what
    // the SIM advertises after the '91' status byte.
    Bytes encode() const;

    friend bool operator==(const StkCommand&, const StkCommand&) = default;
};

struct TerminalProfile {
    bool class_e = false;
};

struct TerminalResponse {
    StkCommandKind command = StkCommandKind::GetChannelStatus;
    bool success = true;
    std::vector<ChannelId> channel_ids;  // GET CHANNEL STATUS result
};

/// '90 00' or '91 xx'.
struct SimStatus {
    bool proactive_pending = false;
    std::uint8_t length = 0;

    static SimStatus normal() { return {}; }
    static SimStatus pending(std::size_t len) { return {true, static_cast<std::uint8_t>(len)}; }

    std::string status_word() const;
};

struct SimResponse {
    Tag64 sres;
    Tag64 kc;
    SimStatus status;
};

struct SimState {
    Imsi imsi{"000000000000000"};
    Key128 ki;
    std::optional<Key128> ka;  // absent for legacy SIMs
    Sqn48 counter;
    SimMode mode = SimMode::Legacy;
    std::deque<StkCommand> pending_proactive;
    TeardownPhase teardown_phase = TeardownPhase::Idle;

    /// Line-oriented `key=value` record, keys in fixed order:
    /// imsi, mode, ki, ka ("-" when absent), counter, phase, pending.
    std::string to_snapshot() const;
    static SimState from_snapshot(std::string_view text);
};

/// Stateful SIM. The ME is the master; every method is one command from it.
class SimCard {
public:
    explicit SimCard(SimState state);

    void set_trace(Trace* trace, std::string actor_name, std::string peer_name);

    /// TERMINAL PROFILE. Allowed once per power-on.
    void init(const TerminalProfile& profile);

    /// RUN GSM ALGORITHM.
    SimResponse run_gsm_algorithm(const Rand128& rand, Rng& rng);

    StkCommand fetch();

    SimStatus terminal_response(const TerminalResponse& response);

    const SimState& state() const noexcept { return state_; }
    bool initialized() const noexcept { return profile_.has_value(); }
    bool teardown_enabled() const noexcept { return profile_ && profile_->class_e; }

    /// Outcome of the most recent enhanced-mode verification.
    const std::optional<VerifyOutcome>& last_outcome() const noexcept { return last_outcome_; }

    /// Models removing power: volatile state (terminal profile, teardown
    /// progress) is lost, the counter and keys survive.
    void power_cycle();

private:
    void emit(std::string_view event, Json fields, bool to_peer = true);
    SimStatus status_for_queue() const;

    SimState state_;
    std::optional<TerminalProfile> profile_;
    std::optional<VerifyOutcome> last_outcome_;
    Trace* trace_ = nullptr;
    std::string name_ = "sim";
    std::string peer_ = "me";
};

}  // namespace gsmauth
