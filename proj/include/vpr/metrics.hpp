#pragma once

// Solution-quality and convergence metrics over run traces and trial sets.

#include "vpr/nse.hpp"
#include "vpr/types.hpp"
#include "vpr/verhulst.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpr {

struct NseSeries {
    std::vector<double> per_iteration;
    std::size_t trials_averaged = 0;
};

/// Elementwise mean over trials at matched n. All series must have equal length.
[[nodiscard]] inline NseSeries average_nse(const std::vector<std::vector<double>>& trials) {
    NseSeries out;
    if (trials.empty()) return out;
    const std::size_t len = trials.front().size();
    out.per_iteration.assign(len, 0.0);
    for (const auto& t : trials) {
        if (t.size() != len) throw std::invalid_argument("average_nse: series lengths differ");
        for (std::size_t n = 0; n < len; ++n) out.per_iteration[n] += t[n];
    }
    for (auto& v : out.per_iteration) v /= static_cast<double>(trials.size());
    out.trials_averaged = trials.size();
    return out;
}

struct NserSeries {
    std::vector<double> ratio;  // NaN where undefined
    std::vector<bool> valid;
    std::size_t undefined_count = 0;
};

/// NSE(fast) / NSE(slow) per iteration. Iterations where the slow NSE is zero
/// get NaN and are flagged invalid.
[[nodiscard]] inline NserSeries nser(const NseSeries& fast, const NseSeries& slow) {
    if (fast.per_iteration.size() != slow.per_iteration.size())
        throw std::invalid_argument("nser: series lengths differ");
    NserSeries out;
    const std::size_t len = fast.per_iteration.size();
    out.ratio.resize(len);
    out.valid.resize(len);
    for (std::size_t n = 0; n < len; ++n) {
        const double den = slow.per_iteration[n];
        if (den > 0.0) {
            out.ratio[n] = fast.per_iteration[n] / den;
            out.valid[n] = true;
        } else {
            out.ratio[n] = std::numeric_limits<double>::quiet_NaN();
            out.valid[n] = false;
            ++out.undefined_count;
        }
    }
    return out;
}

struct ConvergenceReport {
    bool converged = false;
    std::optional<std::size_t> iterations_to_converge;
    std::string criterion;
    double terminal_nse = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr std::size_t kDefaultConvergenceWindow = 10;
inline constexpr double kDefaultConvergenceTolerance = 1e-6;

/// Converged at the first n such that the max relative per-user power change
/// |p_i[m] - p_i[m-1]| / p_i[m-1] stays below rel_tol for every m in
/// (n - window, n]. A trace that never moves is therefore converged at n = window.
[[nodiscard]] inline ConvergenceReport detect_convergence(const std::vector<Vector>& power,
                                                          std::size_t window = kDefaultConvergenceWindow,
                                                          double rel_tol = kDefaultConvergenceTolerance) {
    if (power.empty()) throw std::invalid_argument("detect_convergence: empty trace");
    if (window < 1) throw std::invalid_argument("detect_convergence: window must be >= 1");
    ConvergenceReport rep;
    char buf[96];
    std::snprintf(buf, sizeof buf, "max relative power change < %g for %zu consecutive iterations",
                  rel_tol, window);
    rep.criterion = buf;
    std::size_t run_length = 0;
    for (std::size_t n = 1; n < power.size(); ++n) {
        const Vector& cur = power[n];
        const Vector& prev = power[n - 1];
        double change = 0.0;
        for (Eigen::Index i = 0; i < cur.size(); ++i) {
            const double d = std::abs(cur(i) - prev(i));
            change = std::max(change, prev(i) != 0.0 ? d / std::abs(prev(i)) : (d == 0.0 ? 0.0 : INFINITY));
        }
        run_length = change < rel_tol ? run_length + 1 : 0;
        if (run_length >= window) {
            rep.converged = true;
            rep.iterations_to_converge = n;
            return rep;
        }
    }
    return rep;
}

[[nodiscard]] inline ConvergenceReport detect_convergence(const RunTrace& trace,
                                                          std::size_t window = kDefaultConvergenceWindow,
                                                          double rel_tol = kDefaultConvergenceTolerance) {
    auto rep = detect_convergence(trace.power, window, rel_tol);
    if (!trace.nse.empty()) rep.terminal_nse = trace.nse.back();
    return rep;
}

/// Median of a non-empty sample (mean of the two middle values for even sizes).
[[nodiscard]] inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace vpr
