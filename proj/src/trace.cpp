#include "gsmauth/trace.hpp"

#include <sstream>

#include "gsmauth/error.hpp"

namespace gsmauth {

Json TraceEvent::to_json() const {
    Json j;
    j["seq"] = seq;
    j["actor"] = actor;
    j["to"] = to;
    j["event"] = event;
    j["fields"] = fields;
    return j;
}

std::string TraceEvent::to_line() const { return to_json().dump(); }

TraceEvent TraceEvent::from_json(const Json& j) {
    try {
        TraceEvent e;
        e.seq = j.at("seq").get<std::uint64_t>();
        e.actor = j.at("actor").get<std::string>();
        e.to = j.at("to").get<std::string>();
        e.event = j.at("event").get<std::string>();
        e.fields = j.at("fields");
        return e;
    } catch (const Json::exception& ex) {
        throw Error(ErrorKind::MalformedInput, std::string("trace record: ") + ex.what());
    }
}

const TraceEvent& Trace::emit(std::string actor, std::string to, std::string event, Json fields) {
    TraceEvent e;
    e.seq = events_.size() + 1;
    e.actor = std::move(actor);
    e.to = std::move(to);
    e.event = std::move(event);
    e.fields = std::move(fields);
    events_.push_back(std::move(e));
    return events_.back();
}

std::string Trace::to_jsonl() const {
    std::string out;
    for (const auto& e : events_) {
        out += e.to_line();
        out += '\n';
    }
    return out;
}

Trace Trace::from_jsonl(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& ex) {
            throw Error(ErrorKind::MalformedInput, std::string("trace line: ") + ex.what());
        }
        auto e = TraceEvent::from_json(j);
        if (e.seq != t.events_.size() + 1) throw Error(ErrorKind::MalformedInput, "trace seq_no not contiguous");
        t.events_.push_back(std::move(e));
    }
    return t;
}

}  // namespace gsmauth
