// essnorm: essential-norm calculator for composition, multiplication,
// inclusion and weighted composition operators between L^p/H^p spaces.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "essnorm/kernels.hpp"
#include "essnorm/scenario.hpp"

namespace {

using essnorm::cli::ResultRow;
using essnorm::cli::Scenario;

struct CommonFlags {
    std::string out;
    std::string json_out;
    std::uint64_t seed = 42;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "deterministic RNG seed");
    cmd->add_option("--out", flags.out, "write the CSV results here");
    cmd->add_option("--json", flags.json_out, "write the JSON results here");
    cmd->add_option("--jobs", flags.jobs, "parallel scenarios");
}

int emit(const std::vector<ResultRow>& rows, const CommonFlags& flags) {
    std::cout << essnorm::cli::to_table(rows);
    if (!flags.out.empty()) {
        std::ofstream f(flags.out, std::ios::binary);
        f << essnorm::cli::to_csv(rows);
    }
    if (!flags.json_out.empty()) {
        std::ofstream f(flags.json_out, std::ios::binary);
        f << essnorm::cli::to_json(rows);
    }
    return essnorm::cli::all_passed(rows) ? 0 : 1;
}

// builds a one-shot scenario from command-line flags
Scenario flag_scenario(const std::string& kind, const CommonFlags& flags,
                       const std::vector<std::pair<std::string, std::string>>& kv) {
    Scenario sc;
    sc.kind = kind;
    sc.name = kind;
    sc.params["seed"] = std::to_string(flags.seed);
    for (const auto& [k, v] : kv)
        if (!v.empty()) sc.params[k] = v;
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"essential norms of operators between different L^p/H^p spaces"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string map_spec, u_spec, space_spec, source_spec, target_spec;
    std::string d_spec, f_spec, interior_spec, oracle, p = "4", q = "2";
    std::string grid, samples, bins, window, wco_map = "identity", ergodic;
    std::string suite = "core";
    std::vector<std::string> scenario_files;

    auto* compo = app.add_subcommand("compo", "composition operator C_phi");
    compo->add_option("--map", map_spec, "map spec, e.g. 'blaschke:0,0.5'")
        ->required();
    compo->add_option("--p", p);
    compo->add_option("--q", q);
    compo->add_option("--grid,--bins", bins, "angular bins for the density");
    compo->add_option("--samples", samples);
    add_common(compo, flags);

    auto* mult = app.add_subcommand("mult", "multiplier M_u on a measure space");
    mult->add_option("--space", space_spec, "e.g. 'diffuse: m=16, density=1'")
        ->required();
    mult->add_option("--u", u_spec, "e.g. 'x' or '0;atoms=1,0.5'");
    mult->add_option("--p", p);
    mult->add_option("--q", q);
    mult->add_option("--oracle", oracle);
    add_common(mult, flags);

    auto* smallp = app.add_subcommand("mult-smallp", "atomic multiplier with p < q");
    smallp->add_option("--space", space_spec)->required();
    smallp->add_option("--u", u_spec);
    smallp->add_option("--p", p);
    smallp->add_option("--q", q);
    smallp->add_option("--window", window, "tail window start index");
    smallp->add_option("--oracle", oracle);
    add_common(smallp, flags);

    auto* dirichlet = app.add_subcommand("dirichlet", "Dirichlet-series multiplier");
    dirichlet->add_option("--d", d_spec, "e.g. '1:1, 2:2, 3:1'")->required();
    dirichlet->add_option("--p", p);
    dirichlet->add_option("--q", q);
    dirichlet->add_option("--grid", grid);
    dirichlet->add_option("--ergodic", ergodic, "1 = ergodic cross-check");
    add_common(dirichlet, flags);

    auto* inclusion = app.add_subcommand("inclusion", "inclusion operator J_mu");
    inclusion->add_option("--f", f_spec, "boundary density spec");
    inclusion->add_option("--interior", interior_spec, "'z=mass; z=mass; ...'");
    inclusion->add_option("--p", p);
    inclusion->add_option("--q", q);
    inclusion->add_option("--grid", grid);
    inclusion->add_option("--oracle", oracle);
    add_common(inclusion, flags);

    auto* wco = app.add_subcommand("wco", "weighted composition on measure spaces");
    wco->add_option("--map", wco_map, "identity | doubling");
    wco->add_option("--source", source_spec)->required();
    wco->add_option("--target", target_spec)->required();
    wco->add_option("--u", u_spec);
    wco->add_option("--p", p);
    wco->add_option("--q", q);
    wco->add_option("--oracle", oracle);
    add_common(wco, flags);

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--suite", suite, "suite name (core)");
    add_common(verify, flags);

    auto* runcmd = app.add_subcommand("run", "run scenario files");
    runcmd->add_option("files", scenario_files, "scenario files")->required();
    add_common(runcmd, flags);

    auto* backends = app.add_subcommand("backends", "list kernel backends");

    CLI11_PARSE(app, argc, argv);

    try {
        if (backends->parsed()) {
            namespace kern = essnorm::kern;
            for (auto b : {kern::Backend::scalar, kern::Backend::avx2})
                std::printf("%-8s %s%s\n", kern::backend_name(b),
                            kern::backend_available(b) ? "available" : "absent",
                            kern::active_backend() == b ? " (active)" : "");
            return 0;
        }
        if (verify->parsed()) {
            if (suite != "core") {
                std::cerr << "unknown suite: " << suite << "\n";
                return 2;
            }
            const auto rows = essnorm::cli::run_scenarios(
                essnorm::cli::core_suite(flags.seed), flags.jobs);
            return emit(rows, flags);
        }
        if (runcmd->parsed()) {
            std::vector<Scenario> list;
            for (const auto& f : scenario_files)
                list.push_back(Scenario::parse_file(f));
            return emit(essnorm::cli::run_scenarios(list, flags.jobs), flags);
        }

        Scenario sc;
        if (compo->parsed()) {
            sc = flag_scenario("compo", flags,
                               {{"map", map_spec},
                                {"p", p},
                                {"q", q},
                                {"bins", bins},
                                {"samples", samples}});
        } else if (mult->parsed()) {
            sc = flag_scenario("mult", flags,
                               {{"space", space_spec},
                                {"u", u_spec},
                                {"p", p},
                                {"q", q},
                                {"oracle", oracle}});
        } else if (smallp->parsed()) {
            sc = flag_scenario("mult-smallp", flags,
                               {{"space", space_spec},
                                {"u", u_spec},
                                {"p", p},
                                {"q", q},
                                {"window", window},
                                {"oracle", oracle}});
        } else if (dirichlet->parsed()) {
            sc = flag_scenario("dirichlet", flags,
                               {{"d", d_spec},
                                {"p", p},
                                {"q", q},
                                {"grid", grid},
                                {"ergodic", ergodic}});
        } else if (inclusion->parsed()) {
            sc = flag_scenario("inclusion", flags,
                               {{"f", f_spec},
                                {"interior", interior_spec},
                                {"p", p},
                                {"q", q},
                                {"grid", grid},
                                {"oracle", oracle}});
        } else if (wco->parsed()) {
            sc = flag_scenario("wco", flags,
                               {{"map", wco_map},
                                {"source", source_spec},
                                {"target", target_spec},
                                {"u", u_spec},
                                {"p", p},
                                {"q", q},
                                {"oracle", oracle}});
        } else {
            std::cerr << "no subcommand\n";
            return 2;
        }
        return emit(essnorm::cli::run_scenario(sc), flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
