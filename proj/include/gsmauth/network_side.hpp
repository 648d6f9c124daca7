#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsmauth/auth_core.hpp"
#include "gsmauth/identity.hpp"
#include "gsmauth/sim_card.hpp"
#include "gsmauth/trace.hpp"

namespace gsmauth {

struct SubscriberRecord {
    Imsi imsi;
    Key128 ki;
    std::optional<Key128> ka;  // enhanced subscribers only
    Sqn48 counter;
    SimMode mode = SimMode::Legacy;
};

struct Provisioned {
    SubscriberRecord record;
    SimState sim;
};

/// AuC plus subscriber registry.
class HomeNetwork {
public:
    explicit HomeNetwork(Amf16 amf = {}) : amf_(amf) {}

    void set_trace(Trace* trace) { trace_ = trace; }

    Provisioned provision(const Imsi& imsi, SimMode mode, const Key128& master);

    /// Enhanced subscribers get hijacked RANDs and advance the stored counter;
    /// legacy ones get RANDs drawn from `rng`.
    std::vector<AuthTriple> request_triples(const Imsi& imsi, std::size_t n, Rng& rng);

    bool contains(const Imsi& imsi) const { return registry_.count(imsi) != 0; }
    const SubscriberRecord& record(const Imsi& imsi) const;

private:
    Amf16 amf_;
    std::map<Imsi, SubscriberRecord> registry_;
    Trace* trace_ = nullptr;
};

enum class ConsumptionPolicy { InOrder, RandomOrder, Reuse };

std::string_view to_string(ConsumptionPolicy policy);
std::optional<ConsumptionPolicy> parse_consumption_policy(std::string_view name);

enum class VlrVerdict { Authenticated, Rejected };

std::string_view to_string(VlrVerdict verdict);

struct CipherPolicy {
    CipherAlgId alg = CipherAlgId::A5_3;
};

CipherAlgId vlr_select_cipher(const CipherPolicy& policy);

/// Per-IMSI triple queues with a consumption policy. No state is shared
/// across IMSIs.
class TripleStore {
public:
    explicit TripleStore(ConsumptionPolicy policy = ConsumptionPolicy::InOrder) : policy_(policy) {}

    ConsumptionPolicy policy() const noexcept { return policy_; }

    void add(const Imsi& imsi, const std::vector<AuthTriple>& triples);
    std::size_t available(const Imsi& imsi) const;

    AuthTriple take(const Imsi& imsi, Rng& rng);

private:
    struct Queue {
        std::deque<AuthTriple> triples;
        std::optional<AuthTriple> last_issued;
    };

    ConsumptionPolicy policy_;
    std::map<Imsi, Queue> queues_;
};

/// Serving network (MSC/VLR). Never looks at SIM mode or Ka.
class ServingNetwork {
public:
    ServingNetwork(ConsumptionPolicy policy, CipherPolicy cipher, std::string name = "vlr")
        : store_(policy), cipher_(cipher), name_(std::move(name)) {}

    void set_trace(Trace* trace) { trace_ = trace; }
    const std::string& name() const noexcept { return name_; }

    TripleStore& store() noexcept { return store_; }
    const TripleStore& store() const noexcept { return store_; }

    /// Home-network round trip: SEND AUTH INFO to the AuC, queue the triples.
    std::size_t request_triples(HomeNetwork& home, const Imsi& imsi, std::size_t n, Rng& rng);

    Rand128 challenge(const Imsi& imsi, Rng& rng, const std::string& to);

    VlrVerdict verify(const Imsi& imsi, const Tag64& sres);

    /// Sends CIPHER MODE COMMAND on an authenticated session.
    CipherAlgId select_cipher(const Imsi& imsi, const std::string& to);

    bool authenticated(const Imsi& imsi) const;

    /// Decrypts uplink traffic with the session Kc; nullopt if the subscriber
    /// has no authenticated session.
    std::optional<Bytes> receive_traffic(const Imsi& imsi, ByteView data, std::uint32_t frame_index) const;

private:
    struct Session {
        std::optional<AuthTriple> pending;
        std::optional<Tag64> kc;
        CipherAlgId cipher = CipherAlgId::NONE;
    };

    void emit(std::string to, std::string event, Json fields);

    TripleStore store_;
    CipherPolicy cipher_;
    std::string name_;
    std::map<Imsi, Session> sessions_;
    Trace* trace_ = nullptr;
};

}  // namespace gsmauth
