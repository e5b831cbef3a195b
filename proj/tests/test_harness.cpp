#include "vpr/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vpr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("vpr_harness_" + name);
    fs::remove_all(dir);
    return dir;
}

Experiment small(ExperimentKind kind) {
    Experiment e;
    e.kind = kind;
    e.scenario = load_fixture("fig2_k7");
    e.trials = 3;
    e.iterations = 40;
    e.seed = 11;
    e.threads = 2;
    return e;
}

}  // namespace

TEST(Harness, SeedDerivationSeparatesStreams) {
    EXPECT_EQ(derive_seed(1, "a", 0, 0), derive_seed(1, "a", 0, 0));
    EXPECT_NE(derive_seed(1, "a", 0, 0), derive_seed(2, "a", 0, 0));
    EXPECT_NE(derive_seed(1, "a", 0, 0), derive_seed(1, "b", 0, 0));
    EXPECT_NE(derive_seed(1, "a", 0, 0), derive_seed(1, "a", 1, 0));
    EXPECT_NE(derive_seed(1, "a", 0, 0), derive_seed(1, "a", 0, 1));
    EXPECT_NE(derive_seed(1, "a", 1, 0), derive_seed(1, "a", 0, 1));
}

TEST(Harness, ComplexityReport) {
    const auto rows = complexity_report({1, 5, 30});
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& r : rows) {
        const double k = static_cast<double>(r.num_users);
        EXPECT_EQ(r.adds_per_user_iter, k + 3);
        EXPECT_EQ(r.mults_per_user_iter, k + 6);
        EXPECT_EQ(r.lookups_per_user_iter, 1.0);
        EXPECT_EQ(r.adds_per_user_iter, static_cast<double>(r.predicted_adds));
        EXPECT_EQ(r.mults_per_user_iter, static_cast<double>(r.predicted_mults));
        EXPECT_EQ(r.aggregate, r.num_users + 10);
        EXPECT_EQ(r.counter_sum, 2 * r.num_users + 10);
    }
    EXPECT_EQ(rows[2].adds_per_user_iter, 33.0);
    EXPECT_EQ(rows[2].mults_per_user_iter, 36.0);
    EXPECT_EQ(rows[0].adds_per_user_iter, 4.0);
    EXPECT_EQ(rows[0].mults_per_user_iter, 7.0);
    EXPECT_THROW((void)complexity_report({}), ValidationError);
}

TEST(Harness, DrawTrialRedrawsInfeasibleGeometry) {
    Scenario s = default_scenario(30);
    std::size_t total = 0, failures = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        Rng rng = make_rng(derive_seed(5, "redraw", 0, t));
        std::size_t redraws = 0;
        const auto d = draw_trial(s, rng, &redraws);
        if (!d) {
            ++failures;
            continue;
        }
        EXPECT_EQ(d->redraws, redraws);
        EXPECT_LT(d->system.spectral_radius, 1.0);
        total += redraws;
    }
    EXPECT_EQ(failures, 0u);
    EXPECT_GT(total, 0u);  // K=30 draws are infeasible often enough to exercise the path
}

TEST(Harness, FixedInfeasibleScenarioGivesUp) {
    const Scenario s = load_fixture("infeasible_demo");
    Rng rng = make_rng(1);
    std::size_t redraws = 0;
    EXPECT_FALSE(draw_trial(s, rng, &redraws, 5).has_value());
    EXPECT_EQ(redraws, 6u);
}

TEST(Harness, ParallelForCoversEveryIndexOnce) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                 std::runtime_error);
}

TEST(Harness, GridPointIgnoresThreadCount) {
    GridPointSpec spec;
    spec.experiment = "t";
    spec.scenario = load_fixture("fig2_k7");
    spec.scenario.solver.max_iterations = 30;
    spec.scenario.error_half_width = 0.1;
    spec.variants = {{AlphaMode::fixed, 0.9}, {AlphaMode::fixed, 0.1}};
    spec.trials = 6;
    spec.threads = 1;
    const auto a = run_grid_point(spec);
    spec.threads = 4;
    const auto b = run_grid_point(spec);
    ASSERT_EQ(a.mean_nse.size(), 2u);
    EXPECT_EQ(a.mean_nse[0].per_iteration, b.mean_nse[0].per_iteration);
    EXPECT_EQ(a.mean_nse[1].per_iteration, b.mean_nse[1].per_iteration);
    EXPECT_EQ(a.feasible_trials(), 6u);
}

TEST(Harness, InfeasibleGridPointIsReportedNotFatal) {
    Experiment e = small(ExperimentKind::convergence);
    e.scenario = load_fixture("infeasible_demo");
    e.trials = 2;
    const fs::path dir = fresh_dir("infeasible");
    ASSERT_NO_THROW((void)run_experiment(e, dir));
    const std::string meta = slurp(dir / "convergence_trials.csv");
    EXPECT_NE(meta.find("convergence,20,0,2,0,2,102"), std::string::npos) << meta;
    fs::remove_all(dir);
}

TEST(Harness, EveryExperimentWritesHeaderedCsv) {
    for (auto kind : {ExperimentKind::convergence, ExperimentKind::nser_vs_error, ExperimentKind::nse_vs_loading,
                      ExperimentKind::adaptive_compare, ExperimentKind::complexity}) {
        Experiment e = small(kind);
        if (kind == ExperimentKind::nse_vs_loading) e.sweep.k_values = {4, 6};
        if (kind == ExperimentKind::nser_vs_error || kind == ExperimentKind::nse_vs_loading)
            e.sweep.deltas = {0.0, 0.1};
        if (kind == ExperimentKind::adaptive_compare) e.sweep.k_values = {7};
        if (kind == ExperimentKind::complexity) e.sweep.k_values = {1, 30};
        const fs::path dir = fresh_dir(to_string(kind));
        const auto files = run_experiment(e, dir);
        EXPECT_FALSE(files.empty());
        for (const auto& f : files) {
            ASSERT_TRUE(fs::exists(f)) << f;
            std::ifstream in(f);
            std::string header;
            std::getline(in, header);
            EXPECT_FALSE(header.empty()) << f;
            EXPECT_TRUE(std::isalpha(static_cast<unsigned char>(header[0]))) << f;
        }
        fs::remove_all(dir);
    }
}

TEST(Harness, ConvergenceWritesTracesAndOracle) {
    const fs::path dir = fresh_dir("conv_files");
    (void)run_experiment(small(ExperimentKind::convergence), dir);
    EXPECT_TRUE(fs::exists(dir / "convergence_K7_delta0_trace_fixed_0.1.csv"));
    EXPECT_TRUE(fs::exists(dir / "convergence_K7_delta0_trace_fixed_0.9.csv"));
    EXPECT_TRUE(fs::exists(dir / "convergence_K7_delta0_oracle.csv"));
    EXPECT_TRUE(fs::exists(dir / "convergence_summary.csv"));
    fs::remove_all(dir);
}

TEST(Harness, OutputsAreByteIdenticalAcrossRuns) {
    Experiment e = small(ExperimentKind::nser_vs_error);
    e.sweep.deltas = {0.0, 0.2};
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const auto fa = run_experiment(e, a);
    e.threads = 3;
    const auto fb = run_experiment(e, b);
    ASSERT_EQ(fa.size(), fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(slurp(fa[i]), slurp(fb[i])) << fa[i];
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Harness, SweepValidation) {
    Experiment e = small(ExperimentKind::nser_vs_error);
    e.sweep.deltas = {1.2};
    EXPECT_THROW((void)resolve_defaults(e), ValidationError);
    e.sweep.deltas = {};
    e.sweep.alphas = {0.5};
    EXPECT_THROW((void)resolve_defaults(e), ValidationError);
    e.sweep.alphas = {0.9, 0.1};
    const Experiment r = resolve_defaults(e);
    EXPECT_EQ(r.sweep.deltas.size(), 11u);
    EXPECT_DOUBLE_EQ(r.sweep.deltas.back(), 0.2);
    EXPECT_THROW((void)parse_experiment_kind("fig9"), ValidationError);
}

TEST(Harness, DefaultIterationCounts) {
    Experiment e;
    e.scenario = default_scenario(7);
    e.kind = ExperimentKind::convergence;
    EXPECT_EQ(*resolve_defaults(e).iterations, 300u);
    e.kind = ExperimentKind::nse_vs_loading;
    EXPECT_EQ(*resolve_defaults(e).iterations, 1000u);
    EXPECT_EQ(resolve_defaults(e).sweep.k_values, (std::vector<std::size_t>{10, 20, 30}));
    e.kind = ExperimentKind::adaptive_compare;
    EXPECT_EQ(*resolve_defaults(e).iterations, 700u);
    EXPECT_EQ(e.trials, 100u);
}
