#pragma once

// Discretized Verhulst power-rate recursion
//
//   p_i[n+1] = (1 + alpha) p_i[n] - alpha (delta_i[n] / delta*_i) p_i[n]
//
// with the multirate SNIR delta_i = F_i * Gamma_i, three convergence-factor
// strategies, box clamping to [P_min, P_max] and per-equation op counting.

#include "vpr/channel.hpp"
#include "vpr/linkmath.hpp"
#include "vpr/nse.hpp"
#include "vpr/random.hpp"
#include "vpr/scenario.hpp"
#include "vpr/types.hpp"
#include "vpr/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace vpr {

// -----------------------------------------------------------------------------
// Operation accounting
// -----------------------------------------------------------------------------

struct OpCounter {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;
    std::uint64_t lookups = 0;

    OpCounter& operator+=(const OpCounter& o) noexcept {
        additions += o.additions;
        multiplications += o.multiplications;
        lookups += o.lookups;
        return *this;
    }
    friend OpCounter operator+(OpCounter a, const OpCounter& b) noexcept { return a += b; }
    friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

/// Cost booked per user each time an equation is evaluated. A terminal
/// running the tanh strategy spends K+3 additions, K+6 multiplications and
/// one table lookup per iteration.
namespace op_cost {

inline constexpr OpCounter power_update{2, 3, 0};
[[nodiscard]] constexpr OpCounter snir_evaluation(std::uint64_t users) noexcept {
    return {users, users + 3, 0};
}
inline constexpr OpCounter alpha_tanh{1, 0, 1};  // tanh served from a table
inline constexpr OpCounter alpha_diff{2, 1, 0};
inline constexpr OpCounter alpha_fixed{0, 0, 0};

}  // namespace op_cost

// -----------------------------------------------------------------------------
// Convergence factor
// -----------------------------------------------------------------------------

struct AlphaStrategy {
    AlphaMode mode = AlphaMode::fixed;
    double alpha_fixed = 0.1;
    double alpha_min = 0.1;
    double alpha_max = 0.95;

    [[nodiscard]] static AlphaStrategy from(const SolverSettings& s) {
        return {s.alpha_mode, s.alpha_fixed, s.alpha_min, s.alpha_max};
    }
};

/// alpha_i[n] from the previous SNIR delta_i[n-1].
///   adaptive_diff: min(alpha_max, |delta - delta*| / delta* + alpha_min)
///   adaptive_tanh: max(alpha_min, tanh|delta - delta*|)
[[nodiscard]] inline double alpha_next(const AlphaStrategy& s, double snir_prev, double target_snr) {
    switch (s.mode) {
        case AlphaMode::fixed:
            return s.alpha_fixed;
        case AlphaMode::adaptive_diff:
            return std::min(s.alpha_max, std::abs(snir_prev - target_snr) / target_snr + s.alpha_min);
        case AlphaMode::adaptive_tanh:
            return std::max(s.alpha_min, std::tanh(std::abs(snir_prev - target_snr)));
    }
    return s.alpha_fixed;
}

[[nodiscard]] constexpr OpCounter alpha_cost(AlphaMode mode) noexcept {
    switch (mode) {
        case AlphaMode::adaptive_tanh: return op_cost::alpha_tanh;
        case AlphaMode::adaptive_diff: return op_cost::alpha_diff;
        case AlphaMode::fixed: return op_cost::alpha_fixed;
    }
    return op_cost::alpha_fixed;
}

// -----------------------------------------------------------------------------
// Single-user update and state
// -----------------------------------------------------------------------------

/// One terminal's update. Uses only quantities available at the terminal:
/// its own power, the SNIR fed back by its BS, its target and alpha.
/// Written as p + alpha (1 - delta/delta*) p so that delta == delta* leaves p
/// bit-for-bit unchanged.
[[nodiscard]] constexpr double verhulst_update(double power, double snir_value, double snir_target,
                                               double alpha) noexcept {
    return power + alpha * (1.0 - snir_value / snir_target) * power;
}

struct PowerState {
    Vector p;
    std::size_t iteration = 0;
    Vector alpha_used;           // alpha of the step that produced p
    std::vector<bool> clamped;   // hit a bound in the step that produced p
    Vector last_snir;            // delta[n-1]; empty before the first step
};

/// p[0] = P_min for every user unless the scenario overrides it.
[[nodiscard]] inline PowerState init_state(const Scenario& s) {
    if (s.num_users < 1) throw ValidationError("K", "need at least one user");
    const double p0 = s.solver.p0_dbm ? dbm_to_watts(*s.solver.p0_dbm) : s.radio.p_min;
    const auto k = static_cast<Eigen::Index>(s.num_users);
    PowerState st;
    st.p = Vector::Constant(k, std::clamp(p0, s.radio.p_min, s.radio.p_max));
    st.alpha_used = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
    st.clamped.assign(s.num_users, false);
    return st;
}

/// Per-step diagnostics, measured at p[n] on the gains the step used.
struct StepRecord {
    Vector cir;
    Vector snir;
    Vector alpha;
};

/// Synchronous update of all users from the frozen iteration-n power vector.
/// The first step has no delta[n-1] and takes alpha from delta[0].
[[nodiscard]] inline PowerState step(const PowerState& state, const Matrix& estimated_gains,
                                     const CirTargets& targets, const AlphaStrategy& strategy,
                                     const RadioConstants& radio, OpCounter& counter,
                                     StepRecord* record = nullptr) {
    const Eigen::Index k = state.p.size();
    const auto users = static_cast<std::uint64_t>(k);
    PowerState next;
    next.p.resize(k);
    next.alpha_used.resize(k);
    next.last_snir.resize(k);
    next.clamped.assign(static_cast<std::size_t>(k), false);
    next.iteration = state.iteration + 1;
    if (record) {
        record->cir.resize(k);
        record->snir.resize(k);
        record->alpha.resize(k);
    }
    const OpCounter per_user = op_cost::snir_evaluation(users) + alpha_cost(strategy.mode) + op_cost::power_update;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double gamma = cir(state.p, estimated_gains, radio.noise_power, static_cast<std::size_t>(i));
        const double delta = snir(gamma, targets.spreading(i));
        const double prev = state.last_snir.size() == k ? state.last_snir(i) : delta;
        const double alpha = alpha_next(strategy, prev, targets.snir_target(i));
        double p = verhulst_update(state.p(i), delta, targets.snir_target(i), alpha);
        if (p < radio.p_min || p > radio.p_max) {
            p = std::clamp(p, radio.p_min, radio.p_max);
            next.clamped[static_cast<std::size_t>(i)] = true;
        }
        next.p(i) = p;
        next.alpha_used(i) = alpha;
        next.last_snir(i) = delta;
        counter += per_user;
        if (record) {
            record->cir(i) = gamma;
            record->snir(i) = delta;
            record->alpha(i) = alpha;
        }
    }
    return next;
}

// -----------------------------------------------------------------------------
// Full run
// -----------------------------------------------------------------------------

inline constexpr double kEquilibriumTolerance = 1e-6;

struct RunTrace {
    std::size_t users = 0;
    std::vector<Vector> power;  // p[0..N]
    std::vector<Vector> cir;    // per step n = 0..N-1, on the gains the step used
    std::vector<Vector> snir;
    std::vector<Vector> alpha;
    std::vector<double> nse;    // p[0..N] against the oracle, empty without one
    std::vector<std::size_t> clamped_count;  // per row n = 0..N
    std::vector<OpCounter> ops;              // per step
    OpCounter total_ops;
    Vector terminal_cir;  // at p[N] on the true gains
    std::size_t iterations = 0;
    bool stopped_early = false;
    /// Every user either meets its CIR target within kEquilibriumTolerance
    /// on the true gains or sits at P_min with surplus CIR.
    bool converged = false;
    /// Users pinned at P_max while still short of their target.
    std::size_t saturated_users = 0;
};

/// Iterates `step` up to the scenario's max_iterations. With a nonzero error
/// half width the recursion sees (1 + eps) G, redrawn every iteration when
/// `error_per_iteration` is set (once per run otherwise); the true gains are
/// used only to generate those estimates and for the terminal CIR check.
[[nodiscard]] inline RunTrace run(const Scenario& scenario, const GainMatrix& gains,
                                  const CirTargets& targets, const Vector* oracle_p_star,
                                  Rng& error_rng) {
    const auto& radio = scenario.radio;
    const auto strategy = AlphaStrategy::from(scenario.solver);
    const double half_width = scenario.error_half_width;

    RunTrace trace;
    trace.users = gains.size();
    PowerState state = init_state(scenario);
    if (static_cast<std::size_t>(state.p.size()) != trace.users || targets.size() != trace.users)
        throw ValidationError("K", "scenario, gains and targets disagree on the number of users");

    const std::size_t n_max = scenario.solver.max_iterations;
    trace.power.reserve(n_max + 1);
    trace.power.push_back(state.p);
    trace.clamped_count.push_back(0);
    if (oracle_p_star) trace.nse.push_back(nse(state.p, *oracle_p_star));

    Matrix estimate;
    if (half_width > 0.0 && !scenario.error_per_iteration)
        perturb_into(gains.entries, half_width, error_rng, estimate);

    for (std::size_t n = 0; n < n_max; ++n) {
        if (half_width > 0.0 && scenario.error_per_iteration)
            perturb_into(gains.entries, half_width, error_rng, estimate);
        const Matrix& used = half_width > 0.0 ? estimate : gains.entries;

        OpCounter ops;
        StepRecord rec;
        PowerState next = step(state, used, targets, strategy, radio, ops, &rec);

        trace.cir.push_back(std::move(rec.cir));
        trace.snir.push_back(std::move(rec.snir));
        trace.alpha.push_back(std::move(rec.alpha));
        trace.ops.push_back(ops);
        trace.total_ops += ops;
        trace.clamped_count.push_back(static_cast<std::size_t>(
            std::count(next.clamped.begin(), next.clamped.end(), true)));

        double max_change = 0.0;
        for (Eigen::Index i = 0; i < next.p.size(); ++i)
            max_change = std::max(max_change, std::abs(next.p(i) - state.p(i)) / state.p(i));

        state = std::move(next);
        trace.power.push_back(state.p);
        if (oracle_p_star) trace.nse.push_back(nse(state.p, *oracle_p_star));
        ++trace.iterations;

        if (scenario.solver.convergence_tolerance && max_change < *scenario.solver.convergence_tolerance) {
            trace.stopped_early = trace.iterations < n_max;
            break;
        }
    }

    trace.terminal_cir = all_cirs(state.p, gains.entries, radio.noise_power);
    trace.converged = true;
    for (Eigen::Index i = 0; i < state.p.size(); ++i) {
        const double ratio = trace.terminal_cir(i) / targets.cir_min(i);
        const bool met = std::abs(ratio - 1.0) <= kEquilibriumTolerance;
        const bool floor_surplus = state.p(i) <= radio.p_min && ratio > 1.0;
        if (!met && !floor_surplus) trace.converged = false;
        if (state.p(i) >= radio.p_max && ratio < 1.0) ++trace.saturated_users;
    }
    return trace;
}

/// One row per iteration n = 0..N:
/// n, alpha_1..K, p_1..K (dBm), cir_1..K (dB), snir_1..K (dB), nse, clamped_count, adds, mults, lookups.
/// Row N carries the terminal CIR on the true gains and no alpha/op counts.
inline void write_trace_csv(const std::string& path, const RunTrace& t, const CirTargets& targets) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    const std::size_t k = t.users;
    out << "n";
    for (const char* col : {"alpha", "p_dbm", "cir_db", "snir_db"})
        for (std::size_t i = 1; i <= k; ++i) out << "," << col << "_" << i;
    out << ",nse,clamped_count,adds,mults,lookups\n";

    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const std::string nan = "nan";
    for (std::size_t n = 0; n < t.power.size(); ++n) {
        const bool terminal = n == t.iterations;
        const Vector& c = terminal ? t.terminal_cir : t.cir[n];
        out << n;
        for (std::size_t i = 0; i < k; ++i) out << "," << (terminal ? nan : num(t.alpha[n](static_cast<Eigen::Index>(i))));
        for (std::size_t i = 0; i < k; ++i) out << "," << num(watts_to_dbm(t.power[n](static_cast<Eigen::Index>(i))));
        for (std::size_t i = 0; i < k; ++i) out << "," << num(linear_to_db(c(static_cast<Eigen::Index>(i))));
        for (std::size_t i = 0; i < k; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double s = terminal ? snir(c(ii), targets.spreading(ii)) : t.snir[n](ii);
            out << "," << num(linear_to_db(s));
        }
        out << "," << (t.nse.empty() ? nan : num(t.nse[n])) << "," << t.clamped_count[n];
        if (terminal) {
            out << ",0,0,0\n";
        } else {
            out << "," << t.ops[n].additions << "," << t.ops[n].multiplications << "," << t.ops[n].lookups << "\n";
        }
    }
}

}  // namespace vpr
