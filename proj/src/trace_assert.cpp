#include <algorithm>

#include "gsmauth/harness.hpp"

namespace gsmauth {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::PredicateSpec, what); }

void validate_matcher(const Json& m, const std::string& where) {
    if (!m.is_object()) malformed(where + ": matcher must be an object");
    for (const auto& [key, value] : m.items()) {
        if (key == "actor" || key == "to" || key == "event") {
            if (!value.is_string()) malformed(where + "." + key + ": expected a string");
        } else if (key == "fields") {
            if (!value.is_object()) malformed(where + ".fields: expected an object");
        } else {
            malformed(where + ": unknown matcher key '" + key + "'");
        }
    }
}

bool matches(const TraceEvent& e, const Json& m) {
    if (auto it = m.find("actor"); it != m.end() && *it != e.actor) return false;
    if (auto it = m.find("to"); it != m.end() && *it != e.to) return false;
    if (auto it = m.find("event"); it != m.end() && *it != e.event) return false;
    if (auto it = m.find("fields"); it != m.end()) {
        for (const auto& [key, want] : it->items()) {
            auto got = e.fields.find(key);
            if (got == e.fields.end() || *got != want) return false;
        }
    }
    return true;
}

struct Window {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool anchored = true;
};

// [begin, end) over trace.events(). `anchored` is false when "after" never matched.
Window window_for(const Trace& trace, const Json& pred) {
    const auto& ev = trace.events();
    Window w{0, ev.size(), true};
    if (auto it = pred.find("after"); it != pred.end()) {
        auto pos = std::find_if(ev.begin(), ev.end(), [&](const TraceEvent& e) { return matches(e, *it); });
        if (pos == ev.end()) return {ev.size(), ev.size(), false};
        w.begin = static_cast<std::size_t>(pos - ev.begin()) + 1;
    }
    if (auto it = pred.find("before"); it != pred.end()) {
        for (std::size_t i = w.begin; i < ev.size(); ++i) {
            if (matches(ev[i], *it)) {
                w.end = i;
                break;
            }
        }
    }
    return w;
}

std::uint64_t seq_at(const Trace& trace, std::size_t index) {
    return index < trace.size() ? trace.events()[index].seq : trace.size() + 1;
}

}  // namespace

void validate_predicate(const Json& p) {
    if (!p.is_object()) malformed("predicate must be an object");
    auto type_it = p.find("type");
    if (type_it == p.end() || !type_it->is_string()) malformed("predicate needs a string 'type'");
    const auto type = type_it->get<std::string>();

    auto allow = [&](std::initializer_list<std::string_view> keys) {
        for (const auto& [key, _] : p.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                malformed("predicate '" + type + "': unknown key '" + key + "'");
            }
        }
    };
    auto need = [&](const char* key) -> const Json& {
        auto it = p.find(key);
        if (it == p.end()) malformed("predicate '" + type + "' needs '" + key + "'");
        return *it;
    };

    if (type == "all") {
        allow({"type", "of"});
        const auto& of = need("of");
        if (!of.is_array() || of.empty()) malformed("'all' needs a non-empty 'of' array");
        for (const auto& sub : of) validate_predicate(sub);
        return;
    }

    if (type == "present" || type == "absent") {
        allow({"type", "match", "after", "before"});
        validate_matcher(need("match"), type + ".match");
    } else if (type == "count") {
        allow({"type", "match", "equals", "after", "before"});
        validate_matcher(need("match"), "count.match");
        if (!need("equals").is_number_unsigned() && !need("equals").is_number_integer()) {
            malformed("count.equals must be an integer");
        }
    } else if (type == "sequence") {
        allow({"type", "steps", "exact", "after", "before"});
        const auto& steps = need("steps");
        if (!steps.is_array() || steps.empty()) malformed("sequence needs a non-empty 'steps' array");
        for (const auto& s : steps) validate_matcher(s, "sequence.steps");
        if (p.contains("exact") && !p["exact"].is_boolean()) malformed("sequence.exact must be boolean");
    } else {
        malformed("unknown predicate type '" + type + "'");
    }
    if (p.contains("after")) validate_matcher(p["after"], type + ".after");
    if (p.contains("before")) validate_matcher(p["before"], type + ".before");
}

AssertionResult assert_trace(const Trace& trace, const Json& pred) {
    validate_predicate(pred);
    const auto type = pred["type"].get<std::string>();
    const auto& ev = trace.events();
    AssertionResult r;

    if (type == "all") {
        for (const auto& sub : pred["of"]) {
            auto sr = assert_trace(trace, sub);
            if (!sr.passed) return sr;
        }
        r.passed = true;
        return r;
    }

    const Window w = window_for(trace, pred);

    if (type == "present") {
        for (std::size_t i = w.begin; i < w.end; ++i) {
            if (matches(ev[i], pred["match"])) {
                r.passed = true;
                return r;
            }
        }
        r.divergence_seq = seq_at(trace, w.end);
        r.detail = w.anchored ? "no matching event in window" : "'after' anchor never occurs";
        return r;
    }

    if (type == "absent") {
        for (std::size_t i = w.begin; i < w.end; ++i) {
            if (matches(ev[i], pred["match"])) {
                r.divergence_seq = ev[i].seq;
                r.detail = "unexpected " + ev[i].event + " from " + ev[i].actor;
                return r;
            }
        }
        r.passed = true;
        return r;
    }

    if (type == "count") {
        const auto want = pred["equals"].get<std::int64_t>();
        std::int64_t got = 0;
        std::optional<std::uint64_t> overflow_seq;
        for (std::size_t i = w.begin; i < w.end; ++i) {
            if (matches(ev[i], pred["match"]) && ++got == want + 1) overflow_seq = ev[i].seq;
        }
        r.passed = got == want;
        if (!r.passed) {
            r.divergence_seq = overflow_seq ? *overflow_seq : seq_at(trace, w.end);
            r.detail = "expected " + std::to_string(want) + " matches, found " + std::to_string(got);
        }
        return r;
    }

    // sequence
    const auto& steps = pred["steps"];
    const bool exact = pred.value("exact", false);
    std::size_t k = 0;
    for (std::size_t i = w.begin; i < w.end; ++i) {
        if (k < steps.size() && matches(ev[i], steps[k])) {
            ++k;
            continue;
        }
        if (exact && std::any_of(steps.begin(), steps.end(), [&](const Json& s) { return matches(ev[i], s); })) {
            r.divergence_seq = ev[i].seq;
            r.detail = "out-of-sequence " + ev[i].event + " while waiting for step " + std::to_string(k);
            return r;
        }
    }
    r.passed = k == steps.size();
    if (!r.passed) {
        r.divergence_seq = seq_at(trace, w.end);
        r.detail = "step " + std::to_string(k) + " of " + std::to_string(steps.size()) + " never matched";
    }
    return r;
}

}  // namespace gsmauth
