// vpr_cli: command-line driver for the power-rate allocation experiments.
//
//   vpr_cli run <experiment> --scenario <path|fixture> --out <dir> [--seed --trials --k --delta --alpha ...]
//   vpr_cli fixtures
//   vpr_cli complexity --k 5,10,20,30 [--out <dir>]
//   vpr_cli oracle --scenario <path|fixture> --out <dir>

#include "vpr/vpr.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

namespace {

vpr::Scenario scenario_from(const std::string& ref) {
    if (vpr::is_fixture(ref) && !std::filesystem::exists(ref)) return vpr::load_fixture(ref);
    return vpr::load_scenario(ref);
}

void print_complexity(const std::vector<vpr::ComplexityRow>& rows) {
    std::cout << "K  adds/user  mults/user  lookups/user  (predicted K+3, K+6, 1)\n";
    for (const auto& r : rows)
        std::cout << r.num_users << "  " << r.adds_per_user_iter << "  " << r.mults_per_user_iter << "  "
                  << r.lookups_per_user_iter << "  (" << r.predicted_adds << ", " << r.predicted_mults << ", "
                  << r.predicted_lookups << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verhulst power-rate allocation simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment and write CSV files");
    std::string kind_name;
    std::string scenario_ref = "table1_defaults";
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::vector<std::size_t> ks;
    std::vector<double> deltas;
    std::vector<double> alphas;
    std::size_t iterations = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    run->add_option("experiment", kind_name,
                    "convergence | nser_vs_error | nse_vs_loading | adaptive_compare | complexity")
        ->required();
    run->add_option("--scenario", scenario_ref, "Scenario file or bundled fixture name");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--trials", trials, "Monte Carlo trials per grid point");
    run->add_option("--k", ks, "User counts to sweep")->delimiter(',');
    run->add_option("--delta", deltas, "Error half widths to sweep")->delimiter(',');
    run->add_option("--alpha", alphas, "Fixed convergence factors")->delimiter(',');
    run->add_option("--iterations", iterations, "Iterations per run (0 keeps the experiment default)");
    run->add_option("--threads", threads, "Worker threads");

    auto* fixtures = app.add_subcommand("fixtures", "List bundled scenarios");

    auto* complexity = app.add_subcommand("complexity", "Report per-user operation counts");
    std::vector<std::size_t> complexity_ks = {5, 10, 20, 30};
    std::string complexity_out;
    complexity->add_option("--k", complexity_ks, "User counts")->delimiter(',');
    complexity->add_option("--out", complexity_out, "Write complexity.csv into this directory");

    auto* oracle = app.add_subcommand("oracle", "Dump one channel draw and its analytic solution");
    std::string oracle_scenario = "table1_defaults";
    std::string oracle_out = "out";
    oracle->add_option("--scenario", oracle_scenario, "Scenario file or bundled fixture name");
    oracle->add_option("--out", oracle_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fixtures) {
            for (const auto& name : vpr::list_fixtures()) std::cout << name << "\n";
            return 0;
        }
        if (*complexity) {
            const auto rows = vpr::complexity_report(complexity_ks);
            print_complexity(rows);
            if (!complexity_out.empty()) {
                std::filesystem::create_directories(complexity_out);
                vpr::write_complexity_csv((std::filesystem::path(complexity_out) / "complexity.csv").string(), rows);
            }
            return 0;
        }
        if (*oracle) {
            const vpr::Scenario s = scenario_from(oracle_scenario);
            vpr::validate(s);
            vpr::Rng rng = vpr::make_rng(vpr::derive_seed(s.rng_seed, "oracle", 0, 0));
            auto draw = vpr::draw_channel(s, rng);
            std::filesystem::create_directories(oracle_out);
            const std::filesystem::path dir(oracle_out);
            vpr::write_gain_csv((dir / "gains.csv").string(), draw.gains);
            if (!draw.system.feasible) {
                vpr::write_system_csv((dir / "system.csv").string(), draw.system, nullptr);
                std::cerr << "infeasible: spectral radius " << draw.system.spectral_radius << "\n";
                return 3;
            }
            draw.optimum = vpr::solve_optimal(draw.system, s.radio);
            vpr::write_system_csv((dir / "system.csv").string(), draw.system, &draw.optimum.p_star);
            std::cout << "spectral radius " << draw.system.spectral_radius << ", outage users "
                      << draw.optimum.outage_count() << "\n";
            return 0;
        }

        vpr::Experiment e;
        e.kind = vpr::parse_experiment_kind(kind_name);
        e.scenario = scenario_from(scenario_ref);
        vpr::validate(e.scenario);
        e.sweep.k_values = ks;
        e.sweep.deltas = deltas;
        e.sweep.alphas = alphas;
        e.trials = trials;
        if (iterations > 0) e.iterations = iterations;
        e.seed = seed;
        e.threads = threads;
        for (const auto& f : vpr::run_experiment(e, out_dir)) std::cout << f.string() << "\n";
        return 0;
    } catch (const vpr::ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const vpr::ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
