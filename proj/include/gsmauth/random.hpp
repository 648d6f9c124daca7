#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "gsmauth/bytes.hpp"

namespace gsmauth {

/// Seedable deterministic generator shared by every actor in one run.
///
/// Only raw engine output is used (never std::*_distribution), so a given seed
/// produces the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound). bound must be non-zero.
    std::uint64_t below(std::uint64_t bound);

    void fill(std::span<std::uint8_t> out);

    template <class Fixed>
    Fixed draw() {
        Fixed out;
        fill(out.array());
        return out;
    }

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        fill(out);
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gsmauth
