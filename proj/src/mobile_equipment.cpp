#include "gsmauth/mobile_equipment.hpp"

namespace gsmauth {

ChannelId ChannelTable::open() {
    if (next_id_ > 0xFF) throw Error(ErrorKind::ProtocolOrder, "channel identifiers exhausted");
    auto id = static_cast<ChannelId>(next_id_++);
    open_.insert(id);
    return id;
}

bool ChannelTable::close(ChannelId id) { return open_.erase(id) != 0; }

MobileEquipment::MobileEquipment(MeProfile profile, std::string name)
    : profile_(profile), name_(std::move(name)) {}

void MobileEquipment::emit(std::string to, std::string event, Json fields) {
    if (trace_) trace_->emit(name_, std::move(to), std::move(event), std::move(fields));
}

void MobileEquipment::power_on(SimCard& sim) {
    emit(sim_name_, "TERMINAL_PROFILE", Json{{"class_e", profile_.class_e_supported}});
    sim.init(TerminalProfile{profile_.class_e_supported});
}

void MobileEquipment::power_off() {
    session_.channels.clear();
    session_.kc.reset();
    session_.cipher = CipherAlgId::NONE;
    session_.attached_network.reset();
    session_.aka_completed = false;
}

void MobileEquipment::attach(const std::string& network) {
    session_ = MeSession{std::nullopt, CipherAlgId::NONE, std::move(session_.channels), network, false};
    emit(network, "ATTACH_REQUEST", Json::object());
}

void MobileEquipment::detach() {
    session_.attached_network.reset();
    session_.kc.reset();
    session_.cipher = CipherAlgId::NONE;
    session_.aka_completed = false;
}

ChannelId MobileEquipment::open_channel() {
    if (!session_.attached_network) throw Error(ErrorKind::ProtocolOrder, "cannot open a channel while detached");
    auto id = session_.channels.open();
    emit("", "CHANNEL_OPENED", Json{{"channel", id}});
    return id;
}

void MobileEquipment::drop_connection(bool sres_discarded) {
    Json fields{{"network", session_.attached_network.value_or("")}, {"sres_discarded", sres_discarded}};
    detach();
    emit("", "CONNECTION_DROPPED", std::move(fields));
}

ChallengeOutcome MobileEquipment::handle_challenge(SimCard& sim, const Rand128& rand, Rng& rng) {
    if (!session_.attached_network) throw Error(ErrorKind::ProtocolOrder, "challenge received while detached");
    const std::string network = *session_.attached_network;

    emit(sim_name_, "RUN_GSM_ALGORITHM", Json{{"rand", rand.hex()}});
    const SimResponse resp = sim.run_gsm_algorithm(rand, rng);

    ChallengeOutcome outcome;
    if (!resp.status.proactive_pending || profile_.leaky) {
        session_.kc = resp.kc;
        emit(network, "AUTH_RESPONSE", Json{{"sres", resp.sres.hex()}});
        outcome.sres = resp.sres;
    }
    if (!resp.status.proactive_pending) {
        session_.aka_completed = true;
        return outcome;
    }

    // Proactive loop: FETCH whenever the SIM says '91', execute, report back.
    bool pending = true;
    while (pending) {
        emit(sim_name_, "FETCH", Json::object());
        const StkCommand cmd = sim.fetch();

        TerminalResponse tr;
        tr.command = cmd.kind;
        if (cmd.kind == StkCommandKind::GetChannelStatus) {
            tr.channel_ids = session_.channels.ids();
        } else {
            for (auto id : cmd.channel_ids) tr.success = session_.channels.close(id) && tr.success;
        }

        Json channels = Json::array();
        for (auto id : cmd.kind == StkCommandKind::GetChannelStatus ? tr.channel_ids : cmd.channel_ids) {
            channels.push_back(id);
        }
        emit(sim_name_, "TERMINAL_RESPONSE", Json{{"command", to_string(cmd.kind)},
                                                  {"result", tr.success ? "OK" : "FAILED"},
                                                  {"channels", std::move(channels)}});
        pending = sim.terminal_response(tr).proactive_pending;
    }

    drop_connection(!profile_.leaky);
    outcome.kind = ChallengeOutcome::Kind::ConnectionDropped;
    return outcome;
}

void MobileEquipment::apply_cipher(CipherAlgId alg) {
    if (alg != CipherAlgId::NONE && !session_.kc) {
        throw Error(ErrorKind::ProtocolOrder, "cipher " + std::string(to_string(alg)) + " requested without Kc");
    }
    session_.cipher = alg;
}

bool MobileEquipment::can_send() const {
    return session_.attached_network && (session_.aka_completed || profile_.accepts_unauthenticated);
}

Bytes MobileEquipment::send_traffic(ByteView plaintext, std::uint32_t frame_index) {
    if (!session_.attached_network) throw Error(ErrorKind::ProtocolOrder, "traffic on a detached session");
    if (!can_send()) throw Error(ErrorKind::ProtocolOrder, "traffic before AKA on an ME that requires it");

    Bytes out(plaintext.begin(), plaintext.end());
    if (session_.cipher != CipherAlgId::NONE) {
        out = xor_bytes(plaintext, a5_keystream(session_.cipher, *session_.kc, frame_index, plaintext.size()).bytes);
    }
    emit(*session_.attached_network, "TRAFFIC",
         Json{{"frame", frame_index}, {"cipher", to_string(session_.cipher)}, {"data", to_hex(out)}});
    return out;
}

UserEquipment::UserEquipment(SimState sim_state, MeProfile profile, Trace* trace)
    : imsi(sim_state.imsi), sim(std::move(sim_state)), me(profile, "me/" + imsi.digits()) {
    sim.set_trace(trace, "sim/" + imsi.digits(), me.name());
    me.set_trace(trace, "sim/" + imsi.digits());
}

}  // namespace gsmauth
