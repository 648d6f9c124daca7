#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gsmauth/trace.hpp"

namespace gsmauth::cli {

// Process exit status contract.
enum Exit : int {
    kOk = 0,
    kMismatch = 1,          // verify-trace difference, rand-stats failure
    kAssertionFailed = 2,   // run: an ASSERT step failed
    kInvalidConfig = 3,     // config or predicate does not validate
    kActorError = 4,        // run aborted on a protocol/actor error
    kUsage = 64,            // bad flags, missing config, n below floor
    kIoError = 74,          // cannot write output / read input
};

int cmd_gen_vectors(const std::filesystem::path& out_path, std::uint64_t seed, std::size_t count, std::ostream& err);

struct RunOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> trace_out;
    bool summary_json = false;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    std::filesystem::path golden;
    std::optional<std::filesystem::path> config;  // run this and compare
    std::optional<std::filesystem::path> trace;   // or compare an existing file
    std::optional<std::filesystem::path> trace_out;
};

int cmd_verify_trace(const VerifyOptions& options, std::ostream& out, std::ostream& err);

constexpr std::uint64_t kRandStatsFloor = 10'000;

struct RandStatsReport {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::array<std::uint64_t, 128> ones{};
    double max_deviation_sigma = 0;
    unsigned worst_bit = 0;
    bool passed = false;

    Json to_json() const;
};

/// n hijacked RANDs with SQN 1..n under a key drawn from the seed; pass iff
/// every bit position's one-count is within 4 sigma of n/2.
RandStatsReport rand_stats(std::uint64_t n, std::uint64_t seed);

int cmd_rand_stats(std::uint64_t n, std::uint64_t seed, std::ostream& out, std::ostream& err);

/// Full command line, including argv[0].
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gsmauth::cli
