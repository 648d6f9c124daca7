#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace gsmauth {

using Json = nlohmann::ordered_json;

/// One message or state transition on the run's single timeline.
///
/// Serialized as one JSON object per line with keys in the fixed order
/// seq, actor, to, event, fields. `to` is empty for internal transitions.
struct TraceEvent {
    std::uint64_t seq = 0;
    std::string actor;
    std::string to;
    std::string event;
    Json fields = Json::object();

    Json to_json() const;
    std::string to_line() const;
    static TraceEvent from_json(const Json& j);
};

class Trace {
public:
    const TraceEvent& emit(std::string actor, std::string to, std::string event, Json fields = Json::object());

    const std::vector<TraceEvent>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }

    std::string to_jsonl() const;
    static Trace from_jsonl(const std::string& text);

private:
    std::vector<TraceEvent> events_;
};

}  // namespace gsmauth
