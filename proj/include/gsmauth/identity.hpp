#pragma once

#include <string>
#include <string_view>

namespace gsmauth {

/// International Mobile Subscriber Identity: exactly 15 decimal digits.
class Imsi {
public:
    explicit Imsi(std::string_view digits);

    const std::string& digits() const noexcept { return digits_; }

    friend bool operator==(const Imsi&, const Imsi&) = default;
    friend auto operator<=>(const Imsi&, const Imsi&) = default;

private:
    std::string digits_;
};

}  // namespace gsmauth
