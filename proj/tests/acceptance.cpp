// Acceptance suite: runs each core criterion at its stated tolerance and
// runtime budget, prints one PASS/FAIL line per criterion, and exits nonzero
// on any failure. Criterion 12 drives the installed CLI binary end to end
// (path from the ESSNORM_BIN environment variable).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "essnorm/parse_util.hpp"
#include "essnorm/scenario.hpp"

namespace {

using essnorm::cli::ResultRow;
using essnorm::cli::Scenario;

int g_failures = 0;

struct Criterion {
    int id;
    const char* label;
    double budget_seconds;
};

void report(const Criterion& c, bool ok, double seconds, const std::string& detail) {
    if (!ok) ++g_failures;
    std::printf("%-4s [%2d] %-58s %7.2fs / %.0fs budget%s%s\n",
                ok ? "PASS" : "FAIL", c.id, c.label, seconds, c.budget_seconds,
                detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
}

// Runs one core-suite scenario kind and folds its row checks and the runtime
// budget into a single PASS/FAIL.
void run_core(const Criterion& c, const std::string& kind,
              std::uint64_t seed = 42) {
    Scenario sc;
    sc.kind = kind;
    sc.name = kind;
    sc.params["seed"] = std::to_string(seed);
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        const auto rows = essnorm::cli::run_scenario(sc);
        for (const auto& r : rows) {
            if (r.checked && !r.passed) {
                ok = false;
                detail += (detail.empty() ? "" : "; ") + r.quantity;
            }
        }
        if (rows.empty()) {
            ok = false;
            detail = "no rows";
        }
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > c.budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over budget");
    }
    report(c, ok, secs, detail);
}

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

void criterion12() {
    const Criterion c{12, "verify --suite core: exit 0, < 5 min, byte-identical",
                      300.0};
    const char* bin = std::getenv("ESSNORM_BIN");
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    if (!bin || !*bin) {
        ok = false;
        detail = "ESSNORM_BIN not set";
        report(c, ok, 0.0, detail);
        return;
    }
    const std::string out1 = "acceptance_verify_1.csv";
    const std::string out2 = "acceptance_verify_2.csv";
    const std::string base = std::string(bin) +
                             " verify --suite core --seed 42 --jobs 2 --out ";
    const int rc1 = run_cmd(base + out1 + " > acceptance_verify_1.log 2>&1");
    const int rc2 = run_cmd(base + out2 + " > acceptance_verify_2.log 2>&1");
    if (rc1 != 0 || rc2 != 0) {
        ok = false;
        detail = "exit codes " + std::to_string(rc1) + ", " + std::to_string(rc2);
    } else {
        try {
            const auto csv1 = essnorm::parse::read_file(out1);
            const auto csv2 = essnorm::parse::read_file(out2);
            if (essnorm::cli::csv_without_runtime(csv1) !=
                essnorm::cli::csv_without_runtime(csv2)) {
                ok = false;
                detail = "reruns differ beyond runtime_ms";
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > c.budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over budget");
    }
    report(c, ok, secs, detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite (seed 42)\n");
    run_core({1, "exponent identities over 200 random (p, q)", 1.0},
             "exponents-core");
    run_core({2, "sup realization over the H^p ball (20 random F + |1+z|^2)",
              10.0},
             "lemma21-core");
    run_core({3, "pushforward densities: z^k and zeros {0, 0.5}, MC vs analytic",
              60.0},
             "pushforward-core");
    run_core({4, "composition bracket: z, z^2, (1+z)/2, and M_E C_phi", 60.0},
             "compo-core");
    run_core({5, "diffuse multiplier: formula, witness ratio, orthogonality",
              30.0},
             "mult-core");
    run_core({6, "atomic p<q multiplier vs duality ascent", 10.0},
             "smallp-core");
    run_core({7, "Dirichlet witness: lift vs ergodic, shift witness ratio",
              120.0},
             "dirichlet-core");
    run_core({8, "peaking sequence Fact inequalities (3 levels)", 30.0},
             "peaking-core");
    run_core({9, "shifted-projection norm = Parseval norm (50 random)", 5.0},
             "prop42-core");
    run_core({10, "inclusion operators: interior decay and boundary density",
              30.0},
             "inclusion-core");
    run_core({11, "weighted composition: doubling density and isometry", 10.0},
             "wco-core");
    criterion12();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
