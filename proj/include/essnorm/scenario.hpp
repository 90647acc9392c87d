#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Batch experiment driver: scenarios are plain-text key/value files, results
// are rows with the fixed CSV columns
//   scenario,theorem,quantity,lower,upper,oracle,gap,seed,runtime_ms
// plus pass/fail metadata (table and JSON only). Identical scenario + seed
// reproduce the CSV byte-identically except for runtime_ms.

namespace essnorm::cli {

struct ResultRow {
    std::string scenario;
    std::string theorem;
    std::string quantity;
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> oracle;
    double gap = 0.0;
    std::uint64_t seed = 0;
    long runtime_ms = 0;

    // not part of the CSV columns
    bool checked = false;
    bool passed = true;
    double tolerance = 0.0;
    std::string witness;
};

struct Scenario {
    std::string name;
    std::string kind;
    std::map<std::string, std::string> params;

    std::uint64_t seed() const;
    std::string get(const std::string& key, const std::string& fallback = "") const;
    double get_num(const std::string& key, double fallback) const;

    /// `key: value` lines; '#' starts a comment; `kind` is required.
    static Scenario parse_text(const std::string& text);
    static Scenario parse_file(const std::string& path);
};

std::vector<ResultRow> run_scenario(const Scenario& sc);

/// Runs scenarios (in parallel when jobs > 1); row order follows scenario
/// order regardless of scheduling.
std::vector<ResultRow> run_scenarios(const std::vector<Scenario>& list, int jobs);

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_table(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);  // schema v1
std::vector<ResultRow> rows_from_json(const std::string& text);

/// CSV with the runtime_ms column blanked; the determinism comparand.
std::string csv_without_runtime(const std::string& csv);

bool all_passed(const std::vector<ResultRow>& rows);

/// The core verification suite: one scenario per acceptance-style criterion.
std::vector<Scenario> core_suite(std::uint64_t seed);

}  // namespace essnorm::cli
