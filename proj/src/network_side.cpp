#include "gsmauth/network_side.hpp"

namespace gsmauth {

Provisioned HomeNetwork::provision(const Imsi& imsi, SimMode mode, const Key128& master) {
    if (contains(imsi)) throw Error(ErrorKind::Provisioning, "IMSI " + imsi.digits() + " already registered");

    const auto keys = derive_subscriber_keys(master, imsi);
    SubscriberRecord record{imsi, keys.ki, std::nullopt, Sqn48(0), mode};
    if (mode == SimMode::Enhanced) record.ka = keys.ka;
    registry_.emplace(imsi, record);

    SimState sim;
    sim.imsi = imsi;
    sim.ki = record.ki;
    sim.ka = record.ka;
    sim.counter = Sqn48(0);
    sim.mode = mode;
    return {record, sim};
}

const SubscriberRecord& HomeNetwork::record(const Imsi& imsi) const {
    auto it = registry_.find(imsi);
    if (it == registry_.end()) throw Error(ErrorKind::Lookup, "unknown IMSI " + imsi.digits());
    return it->second;
}

std::vector<AuthTriple> HomeNetwork::request_triples(const Imsi& imsi, std::size_t n, Rng& rng) {
    auto it = registry_.find(imsi);
    if (it == registry_.end()) throw Error(ErrorKind::Lookup, "unknown IMSI " + imsi.digits());
    if (n == 0) throw Error(ErrorKind::MalformedInput, "triple request for zero triples");
    auto& rec = it->second;

    std::vector<AuthTriple> out;
    if (rec.mode == SimMode::Enhanced) {
        auto batch = generate_triples(rec.ki, *rec.ka, rec.counter, amf_, n);
        rec.counter = batch.new_counter;
        out = std::move(batch.triples);
    } else {
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(make_legacy_triple(rec.ki, rng.draw<Rand128>()));
    }

    if (trace_) {
        Json rands = Json::array();
        for (const auto& t : out) rands.push_back(t.rand.hex());
        trace_->emit("auc", "vlr", "AUTH_INFO", Json{{"imsi", imsi.digits()}, {"count", n}, {"rands", rands}});
    }
    return out;
}

std::string_view to_string(ConsumptionPolicy policy) {
    switch (policy) {
        case ConsumptionPolicy::InOrder: return "IN_ORDER";
        case ConsumptionPolicy::RandomOrder: return "RANDOM_ORDER";
        case ConsumptionPolicy::Reuse: return "REUSE";
    }
    return "?";
}

std::optional<ConsumptionPolicy> parse_consumption_policy(std::string_view name) {
    for (auto p : {ConsumptionPolicy::InOrder, ConsumptionPolicy::RandomOrder, ConsumptionPolicy::Reuse}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

std::string_view to_string(VlrVerdict verdict) {
    return verdict == VlrVerdict::Authenticated ? "AUTHENTICATED" : "REJECTED";
}

CipherAlgId vlr_select_cipher(const CipherPolicy& policy) { return policy.alg; }

void TripleStore::add(const Imsi& imsi, const std::vector<AuthTriple>& triples) {
    auto& q = queues_[imsi];
    q.triples.insert(q.triples.end(), triples.begin(), triples.end());
}

std::size_t TripleStore::available(const Imsi& imsi) const {
    auto it = queues_.find(imsi);
    return it == queues_.end() ? 0 : it->second.triples.size();
}

AuthTriple TripleStore::take(const Imsi& imsi, Rng& rng) {
    auto& q = queues_[imsi];

    if (policy_ == ConsumptionPolicy::Reuse && q.last_issued) return *q.last_issued;
    if (q.triples.empty()) throw Error(ErrorKind::TripleExhaustion, "no triples left for IMSI " + imsi.digits());

    std::size_t index = 0;
    if (policy_ == ConsumptionPolicy::RandomOrder) index = static_cast<std::size_t>(rng.below(q.triples.size()));

    AuthTriple t = q.triples[index];
    q.triples.erase(q.triples.begin() + static_cast<std::ptrdiff_t>(index));
    q.last_issued = t;
    return t;
}

void ServingNetwork::emit(std::string to, std::string event, Json fields) {
    if (trace_) trace_->emit(name_, std::move(to), std::move(event), std::move(fields));
}

std::size_t ServingNetwork::request_triples(HomeNetwork& home, const Imsi& imsi, std::size_t n, Rng& rng) {
    emit("auc", "SEND_AUTH_INFO", Json{{"imsi", imsi.digits()}, {"count", n}});
    auto triples = home.request_triples(imsi, n, rng);
    store_.add(imsi, triples);
    return triples.size();
}

Rand128 ServingNetwork::challenge(const Imsi& imsi, Rng& rng, const std::string& to) {
    AuthTriple t = store_.take(imsi, rng);
    auto& s = sessions_[imsi];
    s = Session{t, std::nullopt, CipherAlgId::NONE};
    emit(to, "AUTH_REQUEST", Json{{"imsi", imsi.digits()}, {"rand", t.rand.hex()}});
    return t.rand;
}

VlrVerdict ServingNetwork::verify(const Imsi& imsi, const Tag64& sres) {
    auto it = sessions_.find(imsi);
    if (it == sessions_.end() || !it->second.pending) {
        throw Error(ErrorKind::ProtocolOrder, "SRES without an outstanding challenge for " + imsi.digits());
    }
    auto& s = it->second;
    const auto verdict = sres == s.pending->xres ? VlrVerdict::Authenticated : VlrVerdict::Rejected;
    if (verdict == VlrVerdict::Authenticated) s.kc = s.pending->kc;
    s.pending.reset();
    emit("", "AUTH_RESULT", Json{{"imsi", imsi.digits()}, {"verdict", to_string(verdict)}});
    return verdict;
}

CipherAlgId ServingNetwork::select_cipher(const Imsi& imsi, const std::string& to) {
    auto it = sessions_.find(imsi);
    if (it == sessions_.end() || !it->second.kc) {
        throw Error(ErrorKind::ProtocolOrder, "cipher selection on an unauthenticated session");
    }
    it->second.cipher = vlr_select_cipher(cipher_);
    emit(to, "CIPHER_MODE_COMMAND", Json{{"cipher", to_string(it->second.cipher)}});
    return it->second.cipher;
}

bool ServingNetwork::authenticated(const Imsi& imsi) const {
    auto it = sessions_.find(imsi);
    return it != sessions_.end() && it->second.kc.has_value();
}

std::optional<Bytes> ServingNetwork::receive_traffic(const Imsi& imsi, ByteView data, std::uint32_t frame_index) const {
    auto it = sessions_.find(imsi);
    if (it == sessions_.end() || !it->second.kc) return std::nullopt;
    const auto& s = it->second;
    if (s.cipher == CipherAlgId::NONE) return Bytes(data.begin(), data.end());
    return xor_bytes(data, a5_keystream(s.cipher, *s.kc, frame_index, data.size()).bytes);
}

}  // namespace gsmauth
