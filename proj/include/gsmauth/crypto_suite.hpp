#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "gsmauth/bytes.hpp"
#include "gsmauth/identity.hpp"

namespace gsmauth {

/// Primitives shared by the AuC and the SIM.
///
/// Every function here is a truncation of one AES-128 encryption under the
/// relevant long-term key, with a single trailing or whitening octet keeping
/// the functions apart:
///
///   f1_mac   E_ka(amf||sqn || 00*7 || 01)[0..8]
///   f5_mask  E_ka(mac      || 00*7 || 05)[0..8]
///   a3_sres  E_ki(rand xor 33*16)[0..8]
///   a8_kc    E_ki(rand xor 88*16)[0..8]
///   ki / ka  E_master(imsi digits || 4b) / E_master(imsi digits || 4a)
namespace crypto {

inline constexpr std::uint8_t kF1Tag = 0x01;
inline constexpr std::uint8_t kF5Tag = 0x05;
inline constexpr std::uint8_t kA3Whitening = 0x33;
inline constexpr std::uint8_t kA8Whitening = 0x88;
inline constexpr std::uint8_t kKiTag = 0x4B;
inline constexpr std::uint8_t kKaTag = 0x4A;

using Block = std::array<std::uint8_t, 16>;

// Single-block AES-128 encryption. Backed by OpenSSL.
Block aes128_encrypt(const Key128& key, const Block& plaintext);

}  // namespace crypto

enum class CipherAlgId { A5_1, A5_2, A5_3, NONE };

std::string_view to_string(CipherAlgId alg);
std::optional<CipherAlgId> parse_cipher(std::string_view name);

struct KeystreamBlock {
    Bytes bytes;
    std::uint32_t frame_index = 0;
};

Tag64 f1_mac(const Key128& ka, ByteView amf_sqn);
Tag64 f5_mask(const Key128& ka, ByteView mac);
Tag64 a3_sres(const Key128& ki, ByteView rand);
Tag64 a8_kc(const Key128& ki, ByteView rand);

inline Tag64 f5_mask(const Key128& ka, const Tag64& mac) { return f5_mask(ka, mac.view()); }
inline Tag64 a3_sres(const Key128& ki, const Rand128& rand) { return a3_sres(ki, rand.view()); }
inline Tag64 a8_kc(const Key128& ki, const Rand128& rand) { return a8_kc(ki, rand.view()); }

/// Modeled A5 family.
///
/// A5/1 and A5/3 are AES-CTR style PRFs keyed by kc||00*8 over the block
/// (alg tag || 00 00 00 || frame_index BE32 || block counter BE64), with alg
/// tags 0x51 and 0x53. A5/2 is deliberately broken: every keystream octet j is
/// kc[j mod 8] xor BE64(frame_index)[j mod 8], so one known-plaintext frame
/// hands over kc.
KeystreamBlock a5_keystream(CipherAlgId alg, const Tag64& kc, std::uint32_t frame_index, std::size_t len);

struct SubscriberKeys {
    Key128 ki;
    Key128 ka;
};

SubscriberKeys derive_subscriber_keys(const Key128& master, const Imsi& imsi);

}  // namespace gsmauth
