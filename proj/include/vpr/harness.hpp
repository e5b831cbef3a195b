#pragma once

// Monte Carlo experiment driver: seeded per-trial channel draws, oracle
// solve, Verhulst runs for each solver variant, metrics and CSV output.

#include "vpr/analytic.hpp"
#include "vpr/channel.hpp"
#include "vpr/csv.hpp"
#include "vpr/fixtures.hpp"
#include "vpr/linkmath.hpp"
#include "vpr/metrics.hpp"
#include "vpr/random.hpp"
#include "vpr/scenario.hpp"
#include "vpr/verhulst.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace vpr {

inline constexpr std::size_t kMaxRedraws = 50;

// -----------------------------------------------------------------------------
// Trial setup
// -----------------------------------------------------------------------------

/// One channel realization with its oracle solution.
struct TrialDraw {
    Geometry geometry;
    std::vector<std::size_t> class_of_user;
    GainMatrix gains;
    CirTargets targets;
    InterferenceSystem system;
    OptimalPower optimum;
    std::size_t redraws = 0;  // infeasible draws discarded before this one
};

/// One draw of geometry (unless fixed by the scenario), rate assignment
/// (unless explicit) and gains, with the interference system built but not
/// solved. `optimum` is left empty.
[[nodiscard]] inline TrialDraw draw_channel(const Scenario& s, Rng& rng) {
    TrialDraw d;
    d.geometry = s.geometry.mt_positions.empty()
                     ? place_uniform(s.num_users, s.geometry.cell_width, s.geometry.cell_height,
                                     s.geometry.bs_positions, rng)
                     : s.geometry;
    d.class_of_user = s.class_of_user.empty() ? assign_rates_uniform(s.classes.size(), s.num_users, rng)
                                              : s.class_of_user;
    d.gains = build_gain_matrix(d.geometry, s.channel, rng);
    d.targets = cir_targets(s.classes, d.class_of_user, s.radio, s.solver.cir_target_mode);
    d.system = build_system(d.gains, d.targets, s.radio.noise_power);
    return d;
}

/// Retries infeasible draws up to `max_redraws` times. Returns nullopt when
/// every attempt was infeasible; `redraws_out` receives the discarded count.
[[nodiscard]] inline std::optional<TrialDraw> draw_trial(const Scenario& s, Rng& rng,
                                                         std::size_t* redraws_out = nullptr,
                                                         std::size_t max_redraws = kMaxRedraws) {
    std::size_t redraws = 0;
    for (std::size_t attempt = 0; attempt <= max_redraws; ++attempt) {
        TrialDraw d = draw_channel(s, rng);
        if (!d.system.feasible || d.system.spectral_radius >= 1.0 - kSingularMargin) {
            ++redraws;
            continue;
        }
        d.optimum = solve_optimal(d.system, s.radio);
        d.redraws = redraws;
        if (redraws_out) *redraws_out = redraws;
        return d;
    }
    if (redraws_out) *redraws_out = redraws;
    return std::nullopt;
}

// -----------------------------------------------------------------------------
// Parallel trial loop
// -----------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers write
/// results into slot i, so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            (void)t;
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// -----------------------------------------------------------------------------
// Variants and grid points
// -----------------------------------------------------------------------------

/// Short decimal for file names and labels; CSV cells keep full precision.
[[nodiscard]] inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// A solver configuration compared within a trial (same channel draw).
struct Variant {
    AlphaMode mode = AlphaMode::fixed;
    double alpha = 0.1;

    [[nodiscard]] std::string label() const {
        if (mode == AlphaMode::fixed) return "fixed_" + short_num(alpha);
        return to_string(mode);
    }
};

struct VariantOutcome {
    std::vector<double> nse;
    ConvergenceReport convergence;
    bool equilibrium = false;
    std::size_t saturated_users = 0;
    OpCounter ops;
};

struct TrialOutcome {
    std::size_t trial = 0;
    bool feasible = false;
    std::size_t redraws = 0;
    double spectral_radius = 0.0;
    std::size_t outage_count = 0;
    std::vector<VariantOutcome> variants;
};

struct GridPointResult {
    std::size_t num_users = 0;
    double delta = 0.0;
    std::vector<Variant> variants;
    std::vector<TrialOutcome> trials;  // trial-index order, infeasible ones included
    std::vector<NseSeries> mean_nse;   // per variant, over feasible trials only

    [[nodiscard]] std::size_t feasible_trials() const {
        return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(),
                                                      [](const TrialOutcome& t) { return t.feasible; }));
    }
    [[nodiscard]] std::size_t total_redraws() const {
        std::size_t n = 0;
        for (const auto& t : trials) n += t.redraws;
        return n;
    }
};

struct GridPointSpec {
    std::string experiment;
    std::size_t grid_index = 0;
    Scenario scenario;  // K and delta already applied
    std::vector<Variant> variants;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Called with (variant index, trial draw, trace) for trial 0 of each variant.
    std::function<void(std::size_t, const TrialDraw&, const RunTrace&)> on_first_trace;
};

[[nodiscard]] inline Scenario with_variant(Scenario s, const Variant& v) {
    s.solver.alpha_mode = v.mode;
    if (v.mode == AlphaMode::fixed) s.solver.alpha_fixed = v.alpha;
    return s;
}

/// Scenario with K users; explicit classes/positions are kept only if they already match K.
[[nodiscard]] inline Scenario with_users(Scenario s, std::size_t k) {
    if (s.num_users != k) {
        s.num_users = k;
        s.class_of_user.clear();
        s.geometry.mt_positions.clear();
    }
    return s;
}

[[nodiscard]] inline GridPointResult run_grid_point(const GridPointSpec& spec) {
    GridPointResult res;
    res.num_users = spec.scenario.num_users;
    res.delta = spec.scenario.error_half_width;
    res.variants = spec.variants;
    res.trials.resize(spec.trials);

    parallel_for(spec.trials, spec.threads, [&](std::size_t t) {
        TrialOutcome& out = res.trials[t];
        out.trial = t;
        Rng rng = make_rng(derive_seed(spec.seed, spec.experiment, spec.grid_index, t));
        auto draw = draw_trial(spec.scenario, rng, &out.redraws);
        if (!draw) return;
        out.feasible = true;
        out.spectral_radius = draw->system.spectral_radius;
        out.outage_count = draw->optimum.outage_count();
        const std::uint64_t error_seed = derive_seed(spec.seed, spec.experiment + "/error", spec.grid_index, t);
        for (std::size_t v = 0; v < spec.variants.size(); ++v) {
            const Scenario sv = with_variant(spec.scenario, spec.variants[v]);
            Rng error_rng = make_rng(error_seed);  // common random numbers across variants
            const RunTrace trace = run(sv, draw->gains, draw->targets, &draw->optimum.p_star, error_rng);
            VariantOutcome vo;
            vo.convergence = detect_convergence(trace);
            vo.nse = trace.nse;
            vo.equilibrium = trace.converged;
            vo.saturated_users = trace.saturated_users;
            vo.ops = trace.total_ops;
            out.variants.push_back(std::move(vo));
            if (t == 0 && spec.on_first_trace) spec.on_first_trace(v, *draw, trace);
        }
    });

    for (std::size_t v = 0; v < spec.variants.size(); ++v) {
        std::vector<std::vector<double>> series;
        for (const auto& t : res.trials)
            if (t.feasible) series.push_back(t.variants[v].nse);
        res.mean_nse.push_back(average_nse(series));
    }
    return res;
}

// -----------------------------------------------------------------------------
// Experiments
// -----------------------------------------------------------------------------

enum class ExperimentKind { convergence, nser_vs_error, nse_vs_loading, adaptive_compare, complexity };

[[nodiscard]] inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::convergence: return "convergence";
        case ExperimentKind::nser_vs_error: return "nser_vs_error";
        case ExperimentKind::nse_vs_loading: return "nse_vs_loading";
        case ExperimentKind::adaptive_compare: return "adaptive_compare";
        case ExperimentKind::complexity: return "complexity";
    }
    return "convergence";
}

[[nodiscard]] inline ExperimentKind parse_experiment_kind(std::string_view s) {
    for (auto k : {ExperimentKind::convergence, ExperimentKind::nser_vs_error, ExperimentKind::nse_vs_loading,
                   ExperimentKind::adaptive_compare, ExperimentKind::complexity})
        if (s == to_string(k)) return k;
    throw ValidationError("experiment", "unknown experiment '" + std::string(s) + "'");
}

[[nodiscard]] inline std::vector<double> default_delta_grid() {
    std::vector<double> d;
    for (int i = 0; i <= 10; ++i) d.push_back(0.02 * i);
    return d;
}

/// Parameter grid. Empty fields take the experiment's defaults.
struct Sweep {
    std::vector<std::size_t> k_values;
    std::vector<double> deltas;
    std::vector<double> alphas;
};

struct Experiment {
    ExperimentKind kind = ExperimentKind::convergence;
    Scenario scenario;
    Sweep sweep;
    std::size_t trials = 100;
    std::optional<std::size_t> iterations;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Experiment with every default filled in.
[[nodiscard]] inline Experiment resolve_defaults(Experiment e) {
    auto& sw = e.sweep;
    switch (e.kind) {
        case ExperimentKind::convergence:
            if (sw.k_values.empty()) sw.k_values = {e.scenario.num_users};
            if (sw.deltas.empty()) sw.deltas = {e.scenario.error_half_width};
            if (sw.alphas.empty()) sw.alphas = {0.1, 0.9};
            if (!e.iterations) e.iterations = 300;
            break;
        case ExperimentKind::nser_vs_error:
            if (sw.k_values.empty()) sw.k_values = {e.scenario.num_users};
            if (sw.deltas.empty()) sw.deltas = default_delta_grid();
            if (sw.alphas.empty()) sw.alphas = {0.9, 0.1};
            if (!e.iterations) e.iterations = 1000;
            break;
        case ExperimentKind::nse_vs_loading:
            if (sw.k_values.empty()) sw.k_values = {10, 20, 30};
            if (sw.deltas.empty()) sw.deltas = default_delta_grid();
            if (sw.alphas.empty()) sw.alphas = {0.2};
            if (!e.iterations) e.iterations = 1000;
            break;
        case ExperimentKind::adaptive_compare:
            if (sw.k_values.empty()) sw.k_values = {30};
            if (sw.deltas.empty()) sw.deltas = {0.0};
            if (sw.alphas.empty()) sw.alphas = {0.1};
            if (!e.iterations) e.iterations = 700;
            break;
        case ExperimentKind::complexity:
            if (sw.k_values.empty()) sw.k_values = {5, 10, 20, 30};
            if (!e.iterations) e.iterations = 10;
            break;
    }
    for (double d : sw.deltas)
        if (!(d >= 0.0 && d < 1.0)) throw ValidationError("delta", "grid values must lie in [0, 1)");
    for (double a : sw.alphas)
        if (!(a > 0.0 && a <= 1.0)) throw ValidationError("alpha", "grid values must lie in (0, 1]");
    for (std::size_t k : sw.k_values)
        if (k < 1) throw ValidationError("K", "grid values must be >= 1");
    if (e.kind == ExperimentKind::nser_vs_error && sw.alphas.size() != 2)
        throw ValidationError("alpha", "nser_vs_error needs exactly two alphas (fast, slow)");
    if (e.trials < 1 && e.kind != ExperimentKind::complexity) throw ValidationError("trials", "must be >= 1");
    return e;
}

// -----------------------------------------------------------------------------
// Complexity
// -----------------------------------------------------------------------------

struct ComplexityRow {
    std::size_t num_users = 0;
    std::size_t iterations = 0;
    double adds_per_user_iter = 0.0;
    double mults_per_user_iter = 0.0;
    double lookups_per_user_iter = 0.0;
    std::size_t predicted_adds = 0;      // K + 3
    std::size_t predicted_mults = 0;     // K + 6
    std::size_t predicted_lookups = 0;   // 1
    std::size_t aggregate = 0;     // K + 10 per iteration
    std::size_t counter_sum = 0;         // 2K + 10, the rows summed
};

/// Runs the tanh-adaptive recursion on a drawn channel for each K and divides
/// the booked operations by iterations x users.
[[nodiscard]] inline std::vector<ComplexityRow> complexity_report(const std::vector<std::size_t>& k_values,
                                                                  std::size_t iterations = 10,
                                                                  std::uint64_t seed = 1) {
    if (k_values.empty()) throw ValidationError("K", "need at least one K value");
    std::vector<ComplexityRow> rows;
    for (std::size_t idx = 0; idx < k_values.size(); ++idx) {
        const std::size_t k = k_values[idx];
        Scenario s = default_scenario(k);
        s.solver.alpha_mode = AlphaMode::adaptive_tanh;
        s.solver.max_iterations = iterations;
        Rng rng = make_rng(derive_seed(seed, "complexity", idx, 0));
        const Geometry geo = place_uniform(k, s.geometry.cell_width, s.geometry.cell_height, s.geometry.bs_positions, rng);
        const auto cls = assign_rates_uniform(s.classes.size(), k, rng);
        const GainMatrix g = build_gain_matrix(geo, s.channel, rng);
        const CirTargets t = cir_targets(s.classes, cls, s.radio, s.solver.cir_target_mode);
        const RunTrace trace = run(s, g, t, nullptr, rng);
        const double denom = static_cast<double>(trace.iterations * k);
        ComplexityRow r;
        r.num_users = k;
        r.iterations = trace.iterations;
        r.adds_per_user_iter = static_cast<double>(trace.total_ops.additions) / denom;
        r.mults_per_user_iter = static_cast<double>(trace.total_ops.multiplications) / denom;
        r.lookups_per_user_iter = static_cast<double>(trace.total_ops.lookups) / denom;
        r.predicted_adds = k + 3;
        r.predicted_mults = k + 6;
        r.predicted_lookups = 1;
        r.aggregate = k + 10;
        r.counter_sum = 2 * k + 10;
        rows.push_back(r);
    }
    return rows;
}

inline void write_complexity_csv(const std::string& path, const std::vector<ComplexityRow>& rows) {
    CsvWriter csv(path, {"K", "iterations", "adds_per_user_iter", "mults_per_user_iter", "lookups_per_user_iter",
                         "predicted_adds", "predicted_mults", "predicted_lookups", "aggregate_K_plus_10",
                         "counter_sum_2K_plus_10"});
    for (const auto& r : rows) {
        csv << r.num_users << r.iterations << r.adds_per_user_iter << r.mults_per_user_iter << r.lookups_per_user_iter
            << r.predicted_adds << r.predicted_mults << r.predicted_lookups << r.aggregate << r.counter_sum;
        csv.end_row();
    }
}

// -----------------------------------------------------------------------------
// Experiment driver
// -----------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> summary_columns() {
    return {"experiment", "K", "delta", "alpha_mode", "alpha", "trial", "iterations_to_converge", "terminal_nse",
            "outage_count"};
}

inline void write_summary_rows(CsvWriter& csv, const std::string& experiment, const GridPointResult& gp) {
    for (const auto& t : gp.trials) {
        if (!t.feasible) continue;
        for (std::size_t v = 0; v < gp.variants.size(); ++v) {
            const auto& var = gp.variants[v];
            const auto& vo = t.variants[v];
            csv << experiment << gp.num_users << gp.delta << vpr::to_string(var.mode)
                << (var.mode == AlphaMode::fixed ? var.alpha : std::numeric_limits<double>::quiet_NaN()) << t.trial
                << vo.convergence.iterations_to_converge << vo.convergence.terminal_nse << t.outage_count;
            csv.end_row();
        }
    }
}

inline void write_meta_row(CsvWriter& csv, const std::string& experiment, std::size_t trials, const GridPointResult& gp) {
    csv << experiment << gp.num_users << gp.delta << trials << gp.feasible_trials()
        << (trials - gp.feasible_trials()) << gp.total_redraws();
    csv.end_row();
}

inline void log_infeasible(const std::string& experiment, const GridPointResult& gp, std::size_t trials) {
    const std::size_t used = gp.feasible_trials();
    if (gp.total_redraws() > 0 || used < trials)
        std::clog << experiment << ": K=" << gp.num_users << " delta=" << gp.delta << ": " << gp.total_redraws()
                  << " infeasible draws redrawn, " << (trials - used) << " of " << trials
                  << " trials without a feasible draw\n";
    if (used == 0)
        std::clog << experiment << ": K=" << gp.num_users << " delta=" << gp.delta
                  << ": all trials infeasible, grid point reported empty\n";
}

}  // namespace detail

/// Runs the experiment and writes its CSV files into `out_dir`; returns the
/// paths written. Output bytes depend only on the inputs and the seed.
inline std::vector<std::filesystem::path> run_experiment(const Experiment& input, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const Experiment e = resolve_defaults(input);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory '" + out_dir.string() + "'");

    const std::string name = to_string(e.kind);
    std::vector<fs::path> written;
    auto path = [&](const std::string& file) {
        written.push_back(out_dir / file);
        return written.back().string();
    };

    if (e.kind == ExperimentKind::complexity) {
        write_complexity_csv(path("complexity.csv"), complexity_report(e.sweep.k_values, *e.iterations, e.seed));
        return written;
    }

    Scenario base = e.scenario;
    base.solver.max_iterations = *e.iterations;
    base.solver.convergence_tolerance.reset();  // trial series must share one length

    std::vector<Variant> variants;
    if (e.kind == ExperimentKind::adaptive_compare) {
        variants = {{AlphaMode::fixed, e.sweep.alphas.front()},
                    {AlphaMode::adaptive_diff, 0.0},
                    {AlphaMode::adaptive_tanh, 0.0}};
    } else {
        for (double a : e.sweep.alphas) variants.push_back({AlphaMode::fixed, a});
    }

    CsvWriter summary(path(name + "_summary.csv"), detail::summary_columns());
    CsvWriter meta(path(name + "_trials.csv"),
                   {"experiment", "K", "delta", "trials_requested", "trials_used", "trials_infeasible", "redraws"});

    std::optional<CsvWriter> series;
    std::optional<CsvWriter> terminal;
    switch (e.kind) {
        case ExperimentKind::convergence: {
            std::vector<std::string> cols = {"K", "delta", "n"};
            for (const auto& v : variants) cols.push_back("nse_" + v.label());
            series.emplace(path("convergence_nse.csv"), cols);
            break;
        }
        case ExperimentKind::nser_vs_error:
            series.emplace(path("nser.csv"),
                           std::vector<std::string>{"K", "delta", "n", "nse_fast", "nse_slow", "nser", "nser_valid"});
            break;
        case ExperimentKind::nse_vs_loading:
            series.emplace(path("nse_loading_series.csv"), std::vector<std::string>{"K", "delta", "n", "nse"});
            terminal.emplace(path("nse_loading.csv"),
                             std::vector<std::string>{"K", "delta", "alpha", "trials_used", "iteration", "mean_nse"});
            break;
        case ExperimentKind::adaptive_compare:
            series.emplace(path("adaptive_nse.csv"),
                           std::vector<std::string>{"K", "delta", "n", "nse_fixed", "nse_diff", "nse_tanh",
                                                    "nser_tanh_vs_fixed", "nser_diff_vs_fixed"});
            break;
        case ExperimentKind::complexity:
            break;
    }

    std::size_t grid_index = 0;
    for (std::size_t k : e.sweep.k_values) {
        for (double delta : e.sweep.deltas) {
            GridPointSpec spec;
            spec.experiment = name;
            spec.grid_index = grid_index++;
            spec.scenario = with_users(base, k);
            spec.scenario.error_half_width = delta;
            validate(spec.scenario);
            spec.variants = variants;
            spec.trials = e.trials;
            spec.seed = e.seed;
            spec.threads = e.threads;
            if (e.kind == ExperimentKind::convergence) {
                const std::string prefix = "convergence_K" + std::to_string(k) + "_delta" + short_num(delta);
                const fs::path oracle_file = out_dir / (prefix + "_oracle.csv");
                std::vector<fs::path> traces;
                for (const auto& v : variants) traces.push_back(out_dir / (prefix + "_trace_" + v.label() + ".csv"));
                for (const auto& f : traces) written.push_back(f);
                written.push_back(oracle_file);
                spec.on_first_trace = [traces, oracle_file](std::size_t v, const TrialDraw& d, const RunTrace& tr) {
                    write_trace_csv(traces[v].string(), tr, d.targets);
                    if (v == 0) write_system_csv(oracle_file.string(), d.system, &d.optimum.p_star);
                };
            }

            const GridPointResult gp = run_grid_point(spec);
            detail::log_infeasible(name, gp, e.trials);
            detail::write_summary_rows(summary, name, gp);
            detail::write_meta_row(meta, name, e.trials, gp);
            if (gp.feasible_trials() == 0) continue;

            const std::size_t len = gp.mean_nse.front().per_iteration.size();
            auto mean = [&](std::size_t v, std::size_t n) { return gp.mean_nse[v].per_iteration[n]; };
            switch (e.kind) {
                case ExperimentKind::convergence:
                    for (std::size_t n = 0; n < len; ++n) {
                        *series << k << delta << n;
                        for (std::size_t v = 0; v < variants.size(); ++v) *series << mean(v, n);
                        series->end_row();
                    }
                    break;
                case ExperimentKind::nser_vs_error: {
                    const NserSeries r = nser(gp.mean_nse[0], gp.mean_nse[1]);
                    for (std::size_t n = 0; n < len; ++n) {
                        *series << k << delta << n << mean(0, n) << mean(1, n) << r.ratio[n]
                                << std::size_t{r.valid[n] ? 1u : 0u};
                        series->end_row();
                    }
                    break;
                }
                case ExperimentKind::nse_vs_loading:
                    for (std::size_t n = 0; n < len; ++n) {
                        *series << k << delta << n << mean(0, n);
                        series->end_row();
                    }
                    *terminal << k << delta << variants[0].alpha << gp.feasible_trials() << (len - 1) << mean(0, len - 1);
                    terminal->end_row();
                    break;
                case ExperimentKind::adaptive_compare: {
                    const NserSeries tanh_r = nser(gp.mean_nse[2], gp.mean_nse[0]);
                    const NserSeries diff_r = nser(gp.mean_nse[1], gp.mean_nse[0]);
                    for (std::size_t n = 0; n < len; ++n) {
                        *series << k << delta << n << mean(0, n) << mean(1, n) << mean(2, n) << tanh_r.ratio[n]
                                << diff_r.ratio[n];
                        series->end_row();
                    }
                    break;
                }
                case ExperimentKind::complexity:
                    break;
            }
        }
    }
    return written;
}

}  // namespace vpr
