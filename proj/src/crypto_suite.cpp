#include "gsmauth/crypto_suite.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>

namespace gsmauth {
namespace crypto {

namespace {

struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

}  // namespace

Block aes128_encrypt(const Key128& key, const Block& plaintext) {
    thread_local std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");

    Block out{};
    int len = 0;
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.array().data(), nullptr) != 1 ||
        EVP_CIPHER_CTX_set_padding(ctx.get(), 0) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1 ||
        len != 16) {
        throw std::runtime_error("AES-128 block encryption failed");
    }
    return out;
}

namespace {

Tag64 truncate(const Block& block) {
    Tag64 out;
    std::copy_n(block.begin(), 8, out.array().begin());
    return out;
}

// in (8 octets) || 00*7 || tag
Tag64 tagged_prf(const Key128& key, ByteView in, std::uint8_t tag, std::string_view what) {
    if (in.size() != 8) {
        throw Error(ErrorKind::MalformedInput,
                    std::string(what) + " input must be 8 octets, got " + std::to_string(in.size()));
    }
    Block block{};
    std::copy(in.begin(), in.end(), block.begin());
    block[15] = tag;
    return truncate(aes128_encrypt(key, block));
}

Tag64 whitened_prf(const Key128& key, ByteView rand, std::uint8_t whitening, std::string_view what) {
    if (rand.size() != 16) {
        throw Error(ErrorKind::MalformedInput,
                    std::string(what) + " RAND must be 16 octets, got " + std::to_string(rand.size()));
    }
    Block block{};
    for (std::size_t i = 0; i < 16; ++i) block[i] = rand[i] ^ whitening;
    return truncate(aes128_encrypt(key, block));
}

}  // namespace
}  // namespace crypto

std::string_view to_string(CipherAlgId alg) {
    switch (alg) {
        case CipherAlgId::A5_1: return "A5_1";
        case CipherAlgId::A5_2: return "A5_2";
        case CipherAlgId::A5_3: return "A5_3";
        case CipherAlgId::NONE: return "NONE";
    }
    return "?";
}

std::optional<CipherAlgId> parse_cipher(std::string_view name) {
    for (auto alg : {CipherAlgId::A5_1, CipherAlgId::A5_2, CipherAlgId::A5_3, CipherAlgId::NONE}) {
        if (to_string(alg) == name) return alg;
    }
    return std::nullopt;
}

Tag64 f1_mac(const Key128& ka, ByteView amf_sqn) {
    return crypto::tagged_prf(ka, amf_sqn, crypto::kF1Tag, "f1");
}

Tag64 f5_mask(const Key128& ka, ByteView mac) {
    return crypto::tagged_prf(ka, mac, crypto::kF5Tag, "f5");
}

Tag64 a3_sres(const Key128& ki, ByteView rand) {
    return crypto::whitened_prf(ki, rand, crypto::kA3Whitening, "A3");
}

Tag64 a8_kc(const Key128& ki, ByteView rand) {
    return crypto::whitened_prf(ki, rand, crypto::kA8Whitening, "A8");
}

KeystreamBlock a5_keystream(CipherAlgId alg, const Tag64& kc, std::uint32_t frame_index, std::size_t len) {
    KeystreamBlock out{Bytes(len), frame_index};

    switch (alg) {
        case CipherAlgId::NONE:
            throw Error(ErrorKind::InvalidAlgorithm, "no keystream for cipher NONE");

        case CipherAlgId::A5_2: {
            std::array<std::uint8_t, 8> frame_mask{};
            for (int i = 0; i < 8; ++i) frame_mask[i] = static_cast<std::uint8_t>(std::uint64_t{frame_index} >> (56 - 8 * i));
            for (std::size_t j = 0; j < len; ++j) out.bytes[j] = kc[j % 8] ^ frame_mask[j % 8];
            return out;
        }

        case CipherAlgId::A5_1:
        case CipherAlgId::A5_3: {
            Key128 key;
            std::copy_n(kc.array().begin(), 8, key.array().begin());
            crypto::Block block{};
            block[0] = alg == CipherAlgId::A5_1 ? 0x51 : 0x53;
            for (int i = 0; i < 4; ++i) block[4 + i] = static_cast<std::uint8_t>(frame_index >> (24 - 8 * i));

            std::uint64_t counter = 0;
            for (std::size_t done = 0; done < len; ++counter) {
                for (int i = 0; i < 8; ++i) block[8 + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
                auto ks = crypto::aes128_encrypt(key, block);
                std::size_t take = std::min<std::size_t>(16, len - done);
                std::copy_n(ks.begin(), take, out.bytes.begin() + static_cast<std::ptrdiff_t>(done));
                done += take;
            }
            return out;
        }
    }
    throw Error(ErrorKind::InvalidAlgorithm, "unknown cipher");
}

SubscriberKeys derive_subscriber_keys(const Key128& master, const Imsi& imsi) {
    crypto::Block block{};
    std::copy(imsi.digits().begin(), imsi.digits().end(), block.begin());

    block[15] = crypto::kKiTag;
    auto ki = crypto::aes128_encrypt(master, block);
    block[15] = crypto::kKaTag;
    auto ka = crypto::aes128_encrypt(master, block);
    return {Key128(ki), Key128(ka)};
}

}  // namespace gsmauth
