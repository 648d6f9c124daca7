#include <gtest/gtest.h>

#include "gsmauth/crypto_suite.hpp"
#include "gsmauth/random.hpp"
#include "support/ref_aes.hpp"

using namespace gsmauth;

namespace {

refaes::Block blk(const std::string& hex) {
    auto v = from_hex(hex);
    refaes::Block b{};
    std::copy(v.begin(), v.end(), b.begin());
    return b;
}

}  // namespace

TEST(RefAes, SboxSpotValues) {
    EXPECT_EQ(refaes::sbox()[0x00], 0x63);
    EXPECT_EQ(refaes::sbox()[0x01], 0x7c);
    EXPECT_EQ(refaes::sbox()[0x53], 0xed);
    EXPECT_EQ(refaes::sbox()[0xff], 0x16);
}

TEST(RefAes, Fips197AppendixB) {
    auto ct = refaes::encrypt(blk("2b7e151628aed2a6abf7158809cf4f3c"), blk("3243f6a8885a308d313198a2e0370734"));
    EXPECT_EQ(to_hex(ct), "3925841d02dc09fbdc118597196a0b32");
}

TEST(RefAes, Fips197AppendixC1) {
    auto ct = refaes::encrypt(blk("000102030405060708090a0b0c0d0e0f"), blk("00112233445566778899aabbccddeeff"));
    EXPECT_EQ(to_hex(ct), "69c4e0d86a7b0430d8cdb78070b4c55a");
}

TEST(RefAes, LibraryBackendAgrees) {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        auto k = rng.draw<Key128>();
        crypto::Block pt{};
        rng.fill(pt);
        EXPECT_EQ(crypto::aes128_encrypt(k, pt), refaes::encrypt(k.array(), pt));
    }
}
