#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsmauth {

enum class ErrorKind {
    MalformedInput,
    InvalidAlgorithm,
    CounterOverflow,
    ProtocolOrder,
    Provisioning,
    Lookup,
    TripleExhaustion,
    ConfigValidation,
    PredicateSpec,
    Precondition,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library raises carries one of the kinds above so callers
// (the harness, the CLI) can map it to a verdict or an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace gsmauth
