#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsmauth/error.hpp"

namespace gsmauth {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);

// Accepts upper or lower case; rejects odd length and non-hex characters.
Bytes from_hex(std::string_view hex);

Bytes xor_bytes(ByteView a, ByteView b);

/// Fixed-width octet string. The Tag parameter keeps keys, tags and challenges
/// from being mixed up even when they share a width.
template <std::size_t N, class Tag>
class FixedBytes {
public:
    static constexpr std::size_t size_bytes = N;
    using Array = std::array<std::uint8_t, N>;

    constexpr FixedBytes() : bytes_{} {}
    constexpr explicit FixedBytes(const Array& a) : bytes_(a) {}

    static FixedBytes from_span(ByteView data, std::string_view what = Tag::name) {
        if (data.size() != N) {
            throw Error(ErrorKind::MalformedInput,
                        std::string(what) + " must be " + std::to_string(N) + " octets, got " +
                            std::to_string(data.size()));
        }
        FixedBytes out;
        for (std::size_t i = 0; i < N; ++i) out.bytes_[i] = data[i];
        return out;
    }

    static FixedBytes from_hex(std::string_view hex) {
        return from_span(gsmauth::from_hex(hex), Tag::name);
    }

    const Array& array() const noexcept { return bytes_; }
    Array& array() noexcept { return bytes_; }
    ByteView view() const noexcept { return ByteView(bytes_); }
    Bytes to_vector() const { return Bytes(bytes_.begin(), bytes_.end()); }
    std::string hex() const { return to_hex(view()); }

    std::uint8_t operator[](std::size_t i) const { return bytes_[i]; }
    std::uint8_t& operator[](std::size_t i) { return bytes_[i]; }

    // Full-width comparison: every octet is inspected regardless of where the
    // first difference is.
    friend bool operator==(const FixedBytes& a, const FixedBytes& b) noexcept {
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < N; ++i) acc |= static_cast<std::uint8_t>(a.bytes_[i] ^ b.bytes_[i]);
        return acc == 0;
    }

    friend bool operator<(const FixedBytes& a, const FixedBytes& b) noexcept { return a.bytes_ < b.bytes_; }

    friend FixedBytes operator^(const FixedBytes& a, const FixedBytes& b) noexcept {
        FixedBytes out;
        for (std::size_t i = 0; i < N; ++i) out.bytes_[i] = a.bytes_[i] ^ b.bytes_[i];
        return out;
    }

private:
    Array bytes_;
};

struct Key128Tag { static constexpr std::string_view name = "key"; };
struct Tag64Tag { static constexpr std::string_view name = "64-bit tag"; };
struct Rand128Tag { static constexpr std::string_view name = "RAND"; };

using Key128 = FixedBytes<16, Key128Tag>;
using Tag64 = FixedBytes<8, Tag64Tag>;
using Rand128 = FixedBytes<16, Rand128Tag>;

}  // namespace gsmauth
