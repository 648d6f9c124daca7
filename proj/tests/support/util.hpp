#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "gsmauth/auth_core.hpp"
#include "gsmauth/crypto_suite.hpp"

namespace testutil {

template <std::size_t N, class Tag>
std::array<std::uint8_t, N> arr(const gsmauth::FixedBytes<N, Tag>& b) {
    return b.array();
}

inline gsmauth::Key128 key(const std::string& hex) { return gsmauth::Key128::from_hex(hex); }
inline gsmauth::Tag64 tag(const std::string& hex) { return gsmauth::Tag64::from_hex(hex); }
inline gsmauth::Rand128 rnd(const std::string& hex) { return gsmauth::Rand128::from_hex(hex); }

inline gsmauth::Bytes amf_sqn_bytes(std::uint16_t amf, std::uint64_t sqn) {
    auto b = gsmauth::amf_sqn_block(gsmauth::Amf16{amf}, gsmauth::Sqn48(sqn));
    return {b.begin(), b.end()};
}

}  // namespace testutil
