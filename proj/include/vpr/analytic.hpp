#pragma once

// Analytic optimum of the power-rate problem: interference matrix B, noise
// vector u, Perron-root feasibility test and the direct solve (I - B) p = u.

#include "vpr/channel.hpp"
#include "vpr/errors.hpp"
#include "vpr/linkmath.hpp"
#include "vpr/scenario.hpp"
#include "vpr/types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace vpr {

struct InterferenceSystem {
    Matrix b;
    Vector u;
    double spectral_radius = 0.0;
    bool feasible = false;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(u.size()); }
};

struct OptimalPower {
    Vector p_star;
    double residual = 0.0;  // max_i |((I - B) p* - u)_i| / u_i
    std::vector<bool> within_bounds;

    [[nodiscard]] std::size_t outage_count() const {
        std::size_t n = 0;
        for (bool ok : within_bounds) n += ok ? 0 : 1;
        return n;
    }
};

inline constexpr double kSpectralTolerance = 1e-10;
inline constexpr std::size_t kSpectralMaxSteps = 100'000;
inline constexpr double kSingularMargin = 1e-12;

/// Perron root of a nonnegative matrix by power iteration on B + I. The shift
/// keeps the dominant eigenvalue strictly dominant even when B has eigenvalues
/// of equal modulus and opposite sign (e.g. bipartite coupling).
/// For a positive iterate x the Collatz-Wielandt ratios (Ax)_i / x_i bracket
/// the root; iteration stops once the bracket is within `tolerance`
/// (relative), or once the upper end stops moving, which covers reducible B.
/// The upper end is returned, so a feasibility verdict is never optimistic.
[[nodiscard]] inline double spectral_radius(const Matrix& b, double tolerance = kSpectralTolerance,
                                            std::size_t max_steps = kSpectralMaxSteps) {
    const Eigen::Index k = b.rows();
    if (k == 0) return 0.0;
    if ((b.array() < 0.0).any()) throw ValidationError("B", "matrix must be nonnegative");
    Vector x = Vector::Ones(k);
    double prev_upper = std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < max_steps; ++step) {
        const Vector y = b * x + x;
        double lower = std::numeric_limits<double>::infinity(), upper = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (!(x(i) > 0.0)) continue;
            const double r = y(i) / x(i);
            lower = std::min(lower, r);
            upper = std::max(upper, r);
        }
        if (upper - lower <= tolerance * upper || std::abs(upper - prev_upper) <= 1e-3 * tolerance * upper)
            return std::max(0.0, upper - 1.0);
        prev_upper = upper;
        x = y / y.maxCoeff();
    }
    throw ConvergenceError("power iteration did not converge");
}

/// B_ij = Gamma_i,min g_ij / g_ii (i != j), u_i = Gamma_i,min noise / g_ii.
[[nodiscard]] inline InterferenceSystem build_system(const Matrix& gains, const Vector& cir_min,
                                                     double noise) {
    const Eigen::Index k = gains.rows();
    InterferenceSystem sys;
    sys.b = Matrix::Zero(k, k);
    sys.u.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double own = gains(i, i);
        for (Eigen::Index j = 0; j < k; ++j)
            if (j != i) sys.b(i, j) = cir_min(i) * gains(i, j) / own;
        sys.u(i) = cir_min(i) * noise / own;
    }
    sys.spectral_radius = spectral_radius(sys.b);
    sys.feasible = sys.spectral_radius < 1.0;
    return sys;
}

[[nodiscard]] inline InterferenceSystem build_system(const GainMatrix& gains,
                                                     const CirTargets& targets, double noise) {
    return build_system(gains.entries, targets.cir_min, noise);
}

/// Unconstrained optimum; users outside [P_min, P_max] are flagged, not clamped.
[[nodiscard]] inline OptimalPower solve_optimal(const InterferenceSystem& sys, double p_min,
                                                double p_max) {
    if (!sys.feasible || sys.spectral_radius >= 1.0 - kSingularMargin)
        throw InfeasibleError(sys.spectral_radius);
    const Eigen::Index k = sys.b.rows();
    const Matrix a = Matrix::Identity(k, k) - sys.b;
    OptimalPower out;
    out.p_star = a.partialPivLu().solve(sys.u);
    const Vector r = a * out.p_star - sys.u;
    out.residual = (r.array().abs() / sys.u.array()).maxCoeff();
    out.within_bounds.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i)
        out.within_bounds[static_cast<std::size_t>(i)] = out.p_star(i) >= p_min && out.p_star(i) <= p_max;
    return out;
}

[[nodiscard]] inline OptimalPower solve_optimal(const InterferenceSystem& sys,
                                                const RadioConstants& radio) {
    return solve_optimal(sys, radio.p_min, radio.p_max);
}

/// First line `rho,<value>`, then a header and one row per user:
/// i, u_i, p*_i and row i of B.
inline void write_system_csv(const std::string& path, const InterferenceSystem& sys,
                             const Vector* p_star) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "rho," << num(sys.spectral_radius) << "\n";
    out << "user,u,p_star";
    for (Eigen::Index j = 0; j < sys.b.cols(); ++j) out << ",b_" << j + 1;
    out << "\n";
    for (Eigen::Index i = 0; i < sys.b.rows(); ++i) {
        out << i + 1 << "," << num(sys.u(i)) << "," << (p_star ? num((*p_star)(i)) : std::string("nan"));
        for (Eigen::Index j = 0; j < sys.b.cols(); ++j) out << "," << num(sys.b(i, j));
        out << "\n";
    }
}

}  // namespace vpr
