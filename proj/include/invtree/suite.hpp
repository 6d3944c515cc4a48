#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace invtree {

struct SuiteOptions {
    std::uint64_t seed = 0x6a09e667f3bcc908ULL;
    unsigned threads = 1;
    std::string out_dir = ".";
    std::vector<int> criteria;  // empty = run nothing
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

inline constexpr int kCriterionCount = 16;

const char* criterion_name(int id);

/// Runs one acceptance criterion at its pinned tolerances.
CriterionResult run_criterion(int id, const SuiteOptions& opt);

/// Parses the line-oriented "key = value" config (keys: harness.seed,
/// harness.threads, harness.out_dir, suite.criteria). Unknown keys or
/// malformed lines throw with a line diagnostic.
SuiteOptions parse_suite_config(const std::string& text);

/// Runs the selected criteria, prints one pass/fail line each, writes
/// report.csv under out_dir. Returns 0 if all pass, 2 if any fail.
int run_suite(const SuiteOptions& opt);

/// Experiment tags used by the suite, for the stream-collision scan.
std::vector<std::string> suite_stream_tags();

}  // namespace invtree
