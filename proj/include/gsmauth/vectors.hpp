#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gsmauth/bytes.hpp"

namespace gsmauth {

/// One line of a vector file: `op <hex-in...> -> <hex-out>`.
///
/// Input encodings per op:
///   f1_mac                 ka, amf||sqn (8)
///   f5_mask                ka, mac (8)
///   a3_sres, a8_kc         ki, rand (16)
///   a5_keystream           alg (1: 01/02/03 for A5/1..A5/3), kc, frame (4, BE), len (2, BE)
///   derive_subscriber_keys master, IMSI digits as ASCII          -> ki || ka
///   build_hijacked_rand    ka, amf (2), sqn (6)                  -> rand
///   legacy_response        ki, rand                              -> sres || kc
struct VectorRecord {
    std::string op;
    std::vector<Bytes> inputs;
    Bytes output;

    std::string to_line() const;
    static VectorRecord parse(std::string_view line);

    friend bool operator==(const VectorRecord&, const VectorRecord&) = default;
};

const std::vector<std::string>& vector_ops();

/// Recomputes a record's output with this library. Unknown ops and badly
/// shaped inputs throw MalformedInput.
Bytes evaluate_vector(const std::string& op, const std::vector<Bytes>& inputs);

/// `count` records per op, inputs drawn from Rng(seed).
std::vector<VectorRecord> generate_vectors(std::uint64_t seed, std::size_t count);

/// Header line followed by one record per line.
std::string format_vector_file(std::uint64_t seed, std::size_t count, const std::vector<VectorRecord>& records);

/// Skips blank and `#` lines.
std::vector<VectorRecord> parse_vector_file(std::string_view text);

}  // namespace gsmauth
