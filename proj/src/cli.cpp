#include "gsmauth/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gsmauth/auth_core.hpp"
#include "gsmauth/harness.hpp"
#include "gsmauth/vectors.hpp"

namespace gsmauth::cli {

namespace {

bool write_file(const std::filesystem::path& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        err << "error: cannot open " << path.string() << " for writing\n";
        return false;
    }
    f << text;
    f.flush();
    if (!f) {
        err << "error: write to " << path.string() << " failed\n";
        return false;
    }
    return true;
}

std::optional<std::string> read_file(const std::filesystem::path& path, std::ostream& err) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot open " << path.string() << "\n";
        return std::nullopt;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

int exit_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigValidation:
        case ErrorKind::PredicateSpec:
            return kInvalidConfig;
        case ErrorKind::Io:
            return kIoError;
        default:
            return kActorError;
    }
}

// Loads and validates a config; on failure reports and sets `status`.
std::optional<ScenarioConfig> load_config(const std::filesystem::path& path, std::ostream& err, int& status) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        err << "error: config not found: " << path.string() << "\n";
        status = kUsage;
        return std::nullopt;
    }
    try {
        return ScenarioConfig::from_file(path);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        status = exit_for(e.kind());
        return std::nullopt;
    }
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

int cmd_gen_vectors(const std::filesystem::path& out_path, std::uint64_t seed, std::size_t count, std::ostream& err) {
    const auto text = format_vector_file(seed, count, generate_vectors(seed, count));
    return write_file(out_path, text, err) ? kOk : kIoError;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    int status = kOk;
    auto config = load_config(options.config, err, status);
    if (!config) return status;

    const auto result = run_scenario(*config);

    if (options.trace_out && !write_file(*options.trace_out, result.trace.to_jsonl(), err)) return kIoError;
    if (options.summary_json) out << result.summary(*config).dump() << "\n";

    if (result.error) {
        err << "error: step " << result.error->step_index << ": " << result.error->message << "\n";
        return kActorError;
    }
    for (const auto& a : result.assertions) {
        if (!a.passed) {
            err << "assertion failed: " << a.name;
            if (a.divergence_seq) err << " (diverged at seq " << *a.divergence_seq << ")";
            err << ": " << a.detail << "\n";
        }
    }
    return result.assertions_passed() ? kOk : kAssertionFailed;
}

int cmd_verify_trace(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
    if (options.config.has_value() == options.trace.has_value()) {
        err << "error: verify-trace needs exactly one of --config or --trace\n";
        return kUsage;
    }
    auto golden = read_file(options.golden, err);
    if (!golden) return kIoError;

    std::string actual;
    if (options.config) {
        int status = kOk;
        auto config = load_config(*options.config, err, status);
        if (!config) return status;
        actual = run_scenario(*config).trace.to_jsonl();
        if (options.trace_out && !write_file(*options.trace_out, actual, err)) return kIoError;
    } else {
        auto text = read_file(*options.trace, err);
        if (!text) return kIoError;
        actual = std::move(*text);
    }

    if (actual == *golden) {
        out << "trace matches " << options.golden.string() << "\n";
        return kOk;
    }
    const auto want = split_lines(*golden);
    const auto got = split_lines(actual);
    std::size_t i = 0;
    while (i < want.size() && i < got.size() && want[i] == got[i]) ++i;
    out << "trace differs from " << options.golden.string() << " at line " << i + 1 << "\n";
    out << "  golden: " << (i < want.size() ? want[i] : "<end of file>") << "\n";
    out << "  actual: " << (i < got.size() ? got[i] : "<end of file>") << "\n";
    return kMismatch;
}

Json RandStatsReport::to_json() const {
    Json freq = Json::array();
    for (auto c : ones) freq.push_back(static_cast<double>(c) / static_cast<double>(n));
    Json j;
    j["n"] = n;
    j["seed"] = seed;
    j["bit_frequencies"] = freq;
    j["max_deviation_sigma"] = max_deviation_sigma;
    j["worst_bit"] = worst_bit;
    j["threshold_sigma"] = 4.0;
    j["passed"] = passed;
    return j;
}

RandStatsReport rand_stats(std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    const auto ka = rng.draw<Key128>();
    const Amf16 amf{static_cast<std::uint16_t>(rng.next_u64())};

    RandStatsReport r;
    r.n = n;
    r.seed = seed;
    for (std::uint64_t sqn = 1; sqn <= n; ++sqn) {
        const auto rand = build_hijacked_rand(ka, amf, Sqn48(sqn));
        for (unsigned bit = 0; bit < 128; ++bit) r.ones[bit] += (rand[bit / 8] >> (7 - bit % 8)) & 1u;
    }

    const double mean = static_cast<double>(n) / 2.0;
    const double sigma = std::sqrt(static_cast<double>(n)) / 2.0;
    for (unsigned bit = 0; bit < 128; ++bit) {
        const double dev = std::abs(static_cast<double>(r.ones[bit]) - mean) / sigma;
        if (dev > r.max_deviation_sigma) {
            r.max_deviation_sigma = dev;
            r.worst_bit = bit;
        }
    }
    r.passed = r.max_deviation_sigma <= 4.0;
    return r;
}

int cmd_rand_stats(std::uint64_t n, std::uint64_t seed, std::ostream& out, std::ostream& err) {
    if (n < kRandStatsFloor) {
        err << "error: --n must be at least " << kRandStatsFloor << "\n";
        return kUsage;
    }
    const auto report = rand_stats(n, seed);
    out << report.to_json().dump() << "\n";
    return report.passed ? kOk : kMismatch;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"GSM AKA with authenticated RAND: vectors, scenarios, trace checks"};
    app.require_subcommand(1);

    std::filesystem::path vec_out;
    std::uint64_t vec_seed = 1;
    std::size_t vec_count = 16;
    auto* gen = app.add_subcommand("gen-vectors", "Write test vectors for every primitive");
    gen->add_option("--out,-o", vec_out, "Output file")->required();
    gen->add_option("--seed", vec_seed, "Input generator seed");
    gen->add_option("--count", vec_count, "Records per operation");

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("--config", run_opts.config, "Scenario JSON")->required();
    run->add_option("--trace-out", run_opts.trace_out, "Write the JSONL trace here");
    run->add_flag("--summary-json", run_opts.summary_json, "Print a JSON summary on stdout");

    VerifyOptions verify_opts;
    auto* verify = app.add_subcommand("verify-trace", "Compare a trace with a golden file byte for byte");
    verify->add_option("--golden", verify_opts.golden, "Golden JSONL trace")->required();
    verify->add_option("--config", verify_opts.config, "Run this scenario and compare its trace");
    verify->add_option("--trace", verify_opts.trace, "Compare this existing trace file");
    verify->add_option("--trace-out", verify_opts.trace_out, "With --config, also write the produced trace");

    std::uint64_t stats_n = 100'000;
    std::uint64_t stats_seed = 1;
    auto* stats = app.add_subcommand("rand-stats", "Per-bit frequency smoke test over hijacked RANDs");
    stats->add_option("--n", stats_n, "Number of RANDs");
    stats->add_option("--seed", stats_seed, "Key seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen_vectors(vec_out, vec_seed, vec_count, err);
        if (*run) return cmd_run(run_opts, out, err);
        if (*verify) return cmd_verify_trace(verify_opts, out, err);
        return cmd_rand_stats(stats_n, stats_seed, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e.kind());
    }
}

}  // namespace gsmauth::cli
