#include "gsmauth/sim_card.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace gsmauth {

std::string_view to_string(SimMode mode) { return mode == SimMode::Legacy ? "LEGACY" : "ENHANCED"; }

std::optional<SimMode> parse_sim_mode(std::string_view name) {
    if (name == "LEGACY") return SimMode::Legacy;
    if (name == "ENHANCED") return SimMode::Enhanced;
    return std::nullopt;
}

std::string_view to_string(TeardownPhase phase) {
    switch (phase) {
        case TeardownPhase::Idle: return "IDLE";
        case TeardownPhase::AwaitFetch1: return "AWAIT_FETCH_1";
        case TeardownPhase::AwaitChannelStatus: return "AWAIT_CHANNEL_STATUS";
        case TeardownPhase::AwaitFetch2: return "AWAIT_FETCH_2";
        case TeardownPhase::AwaitCloseResult: return "AWAIT_CLOSE_RESULT";
    }
    return "?";
}

namespace {

std::optional<TeardownPhase> parse_phase(std::string_view name) {
    for (auto p : {TeardownPhase::Idle, TeardownPhase::AwaitFetch1, TeardownPhase::AwaitChannelStatus,
                   TeardownPhase::AwaitFetch2, TeardownPhase::AwaitCloseResult}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

Json channel_list(const std::vector<ChannelId>& ids) {
    Json arr = Json::array();
    for (auto id : ids) arr.push_back(id);
    return arr;
}

}  // namespace

std::string_view to_string(StkCommandKind kind) {
    return kind == StkCommandKind::GetChannelStatus ? "GET_CHANNEL_STATUS" : "CLOSE_CHANNEL";
}

Bytes StkCommand::encode() const {
    // Command details: number 01, type 44 (GET CHANNEL STATUS) or 41 (CLOSE
    // CHANNEL), qualifier 00. Device identities: source SIM (81), dest ME (82).
    Bytes body = {0x81, 0x03, 0x01, static_cast<std::uint8_t>(kind == StkCommandKind::GetChannelStatus ? 0x44 : 0x41),
                  0x00, 0x82, 0x02, 0x81, 0x82};
    for (auto id : channel_ids) {
        body.insert(body.end(), {0xB8, 0x01, id});
    }
    Bytes out;
    out.reserve(body.size() + 2);
    out.push_back(0xD0);
    out.push_back(static_cast<std::uint8_t>(body.size()));
    for (auto b : body) out.push_back(b);
    return out;
}

std::string SimStatus::status_word() const {
    char buf[5];
    std::snprintf(buf, sizeof buf, "%02x%02x", proactive_pending ? 0x91 : 0x90, proactive_pending ? length : 0);
    return buf;
}

std::string SimState::to_snapshot() const {
    std::ostringstream out;
    out << "imsi=" << imsi.digits() << '\n'
        << "mode=" << to_string(mode) << '\n'
        << "ki=" << ki.hex() << '\n'
        << "ka=" << (ka ? ka->hex() : "-") << '\n'
        << "counter=" << counter.value() << '\n'
        << "phase=" << to_string(teardown_phase) << '\n'
        << "pending=";
    bool first = true;
    for (const auto& cmd : pending_proactive) {
        if (!first) out << ';';
        first = false;
        out << to_string(cmd.kind);
        if (!cmd.channel_ids.empty()) {
            out << ':';
            for (std::size_t i = 0; i < cmd.channel_ids.size(); ++i) {
                if (i) out << ',';
                out << static_cast<unsigned>(cmd.channel_ids[i]);
            }
        }
    }
    out << '\n';
    return out.str();
}

namespace {

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(ErrorKind::MalformedInput, "bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

std::deque<StkCommand> parse_pending(std::string_view text) {
    std::deque<StkCommand> out;
    while (!text.empty()) {
        auto semi = text.find(';');
        std::string_view item = text.substr(0, semi);
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);

        StkCommand cmd;
        auto colon = item.find(':');
        auto name = item.substr(0, colon);
        if (name == "GET_CHANNEL_STATUS") {
            cmd.kind = StkCommandKind::GetChannelStatus;
        } else if (name == "CLOSE_CHANNEL") {
            cmd.kind = StkCommandKind::CloseChannel;
        } else {
            throw Error(ErrorKind::MalformedInput, "unknown STK command '" + std::string(name) + "'");
        }
        if (colon != std::string_view::npos) {
            auto ids = item.substr(colon + 1);
            while (!ids.empty()) {
                auto comma = ids.find(',');
                auto v = parse_u64(ids.substr(0, comma), "channel id");
                if (v > 0xFF) throw Error(ErrorKind::MalformedInput, "channel id out of range");
                cmd.channel_ids.push_back(static_cast<ChannelId>(v));
                ids = comma == std::string_view::npos ? std::string_view{} : ids.substr(comma + 1);
            }
        }
        if (cmd.kind == StkCommandKind::CloseChannel && cmd.channel_ids.empty()) {
            throw Error(ErrorKind::MalformedInput, "CLOSE_CHANNEL without channel ids");
        }
        out.push_back(std::move(cmd));
    }
    return out;
}

}  // namespace

SimState SimState::from_snapshot(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::MalformedInput, "snapshot line without '=': " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](std::string_view key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorKind::MalformedInput, "snapshot missing '" + std::string(key) + "'");
        return it->second;
    };

    SimState s;
    s.imsi = Imsi(get("imsi"));
    auto mode = parse_sim_mode(get("mode"));
    if (!mode) throw Error(ErrorKind::MalformedInput, "bad snapshot mode");
    s.mode = *mode;
    s.ki = Key128::from_hex(get("ki"));
    if (get("ka") != "-") s.ka = Key128::from_hex(get("ka"));
    s.counter = Sqn48(parse_u64(get("counter"), "counter"));
    auto phase = parse_phase(get("phase"));
    if (!phase) throw Error(ErrorKind::MalformedInput, "bad snapshot phase");
    s.teardown_phase = *phase;
    s.pending_proactive = parse_pending(get("pending"));

    if ((s.mode == SimMode::Enhanced) != s.ka.has_value()) {
        throw Error(ErrorKind::MalformedInput, "snapshot: Ka must be present exactly for ENHANCED SIMs");
    }
    return s;
}

SimCard::SimCard(SimState state) : state_(std::move(state)) {
    if ((state_.mode == SimMode::Enhanced) != state_.ka.has_value()) {
        throw Error(ErrorKind::MalformedInput, "Ka must be present exactly for ENHANCED SIMs");
    }
}

void SimCard::set_trace(Trace* trace, std::string actor_name, std::string peer_name) {
    trace_ = trace;
    name_ = std::move(actor_name);
    peer_ = std::move(peer_name);
}

void SimCard::emit(std::string_view event, Json fields, bool to_peer) {
    if (trace_) trace_->emit(name_, to_peer ? peer_ : std::string{}, std::string(event), std::move(fields));
}

void SimCard::init(const TerminalProfile& profile) {
    if (profile_) throw Error(ErrorKind::ProtocolOrder, "TERMINAL PROFILE received twice");
    profile_ = profile;
    emit("STATUS", Json{{"sw", SimStatus::normal().status_word()}});
}

SimStatus SimCard::status_for_queue() const {
    if (state_.pending_proactive.empty()) return SimStatus::normal();
    return SimStatus::pending(state_.pending_proactive.front().encode().size());
}

SimResponse SimCard::run_gsm_algorithm(const Rand128& rand, Rng& rng) {
    if (!profile_) throw Error(ErrorKind::ProtocolOrder, "RUN GSM ALGORITHM before TERMINAL PROFILE");
    if (state_.teardown_phase != TeardownPhase::Idle) {
        throw Error(ErrorKind::ProtocolOrder, "RUN GSM ALGORITHM during proactive teardown");
    }

    SimResponse resp;
    if (state_.mode == SimMode::Legacy) {
        auto r = legacy_response(state_.ki, rand);
        resp = {r.sres, r.kc, SimStatus::normal()};
    } else {
        const auto before = state_.counter;
        auto outcome = verify_hijacked_rand(state_.ki, *state_.ka, state_.counter, rand, rng);
        last_outcome_ = outcome;

        if (auto* ok = std::get_if<Accepted>(&outcome)) {
            state_.counter = ok->sqn;
            resp = {ok->sres, ok->kc, SimStatus::normal()};
            emit("NETWORK_AUTH",
                 Json{{"result", "ACCEPTED"}, {"counter_before", before.value()}, {"counter_after", state_.counter.value()}},
                 false);
        } else {
            const auto& rej = std::get<Rejected>(outcome);
            resp = {rej.placeholder_sres, rej.placeholder_kc, SimStatus::normal()};
            if (teardown_enabled()) {
                state_.pending_proactive.push_back({StkCommandKind::GetChannelStatus, {}});
                state_.teardown_phase = TeardownPhase::AwaitFetch1;
                resp.status = status_for_queue();
            }
            emit("NETWORK_AUTH",
                 Json{{"result", "REJECTED"},
                      {"reason", to_string(rej.reason)},
                      {"counter_before", before.value()},
                      {"counter_after", state_.counter.value()},
                      {"phase", to_string(state_.teardown_phase)}},
                 false);
        }
    }

    emit("RUN_GSM_ALGORITHM_RESPONSE",
         Json{{"sres", resp.sres.hex()}, {"kc", resp.kc.hex()}, {"sw", resp.status.status_word()}});
    return resp;
}

StkCommand SimCard::fetch() {
    const auto phase = state_.teardown_phase;
    if ((phase != TeardownPhase::AwaitFetch1 && phase != TeardownPhase::AwaitFetch2) ||
        state_.pending_proactive.empty()) {
        throw Error(ErrorKind::ProtocolOrder,
                    "FETCH with nothing pending (phase " + std::string(to_string(phase)) + ")");
    }

    StkCommand cmd = state_.pending_proactive.front();
    state_.pending_proactive.pop_front();
    state_.teardown_phase =
        phase == TeardownPhase::AwaitFetch1 ? TeardownPhase::AwaitChannelStatus : TeardownPhase::AwaitCloseResult;

    emit("PROACTIVE_COMMAND", Json{{"command", to_string(cmd.kind)},
                                   {"channels", channel_list(cmd.channel_ids)},
                                   {"tlv", to_hex(cmd.encode())}});
    return cmd;
}

SimStatus SimCard::terminal_response(const TerminalResponse& response) {
    SimStatus next;
    switch (state_.teardown_phase) {
        case TeardownPhase::AwaitChannelStatus:
            if (response.command != StkCommandKind::GetChannelStatus) {
                throw Error(ErrorKind::ProtocolOrder, "TERMINAL RESPONSE does not answer GET CHANNEL STATUS");
            }
            if (response.channel_ids.empty()) {
                state_.teardown_phase = TeardownPhase::Idle;
                next = SimStatus::normal();
            } else {
                state_.pending_proactive.push_back({StkCommandKind::CloseChannel, response.channel_ids});
                state_.teardown_phase = TeardownPhase::AwaitFetch2;
                next = status_for_queue();
            }
            break;

        case TeardownPhase::AwaitCloseResult:
            if (response.command != StkCommandKind::CloseChannel) {
                throw Error(ErrorKind::ProtocolOrder, "TERMINAL RESPONSE does not answer CLOSE CHANNEL");
            }
            // Back to IDLE whatever the result code; a failed close only shows up in the trace.
            state_.teardown_phase = TeardownPhase::Idle;
            next = SimStatus::normal();
            break;

        default:
            throw Error(ErrorKind::ProtocolOrder, "unexpected TERMINAL RESPONSE in phase " +
                                                      std::string(to_string(state_.teardown_phase)));
    }

    emit("STATUS", Json{{"sw", next.status_word()}});
    return next;
}

void SimCard::power_cycle() {
    profile_.reset();
    last_outcome_.reset();
    state_.pending_proactive.clear();
    state_.teardown_phase = TeardownPhase::Idle;
}

}  // namespace gsmauth
