#pragma once

// Per-link formulas shared by the iterative solver and the analytic oracle.

#include "vpr/channel.hpp"
#include "vpr/scenario.hpp"
#include "vpr/types.hpp"

#include <cmath>
#include <vector>

namespace vpr {

/// CIR of user i: p_i g_ii / (sum_{j != i} p_j g_ij + noise).
[[nodiscard]] inline double cir(const Vector& powers, const Matrix& gains, double noise,
                                std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double interference = noise;
    for (Eigen::Index j = 0; j < powers.size(); ++j)
        if (j != ii) interference += powers(j) * gains(ii, j);
    return powers(ii) * gains(ii, ii) / interference;
}

[[nodiscard]] inline double cir(const Vector& powers, const GainMatrix& gains, double noise,
                                std::size_t i) {
    return cir(powers, gains.entries, noise, i);
}

[[nodiscard]] inline Vector all_cirs(const Vector& powers, const Matrix& gains, double noise) {
    Vector out(powers.size());
    for (Eigen::Index i = 0; i < powers.size(); ++i) out(i) = cir(powers, gains, noise, static_cast<std::size_t>(i));
    return out;
}

/// SNIR after despreading, delta = F * Gamma.
[[nodiscard]] constexpr double snir(double cir_value, double spreading_factor) noexcept {
    return spreading_factor * cir_value;
}

[[nodiscard]] constexpr double spreading_factor(double chip_rate, double min_rate) noexcept {
    return chip_rate / min_rate;
}

/// Data rate supported by a CIR at the target SNR: R = (R_c / delta*) * Gamma.
[[nodiscard]] constexpr double achieved_rate(double cir_value, double target_snr,
                                             double chip_rate) noexcept {
    return chip_rate / target_snr * cir_value;
}

/// Per-user targets. `cir_min` is what the oracle solves for; `snir_target`
/// is delta*_i, the quantity the distributed update compares against, chosen
/// so that delta_i = delta*_i exactly when Gamma_i = Gamma_i,min.
struct CirTargets {
    CirTargetMode mode = CirTargetMode::spreading_factor;
    Vector cir_min;
    Vector spreading;
    Vector snir_target;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(cir_min.size()); }
};

/// Minimum CIR for one class. Spreading-factor mode: R_min delta* / R_c.
/// Shannon mode: 2^(R_min / R_c) - 1, the rate taken in bits per chip.
[[nodiscard]] inline double class_cir_target(double min_rate, const RadioConstants& radio,
                                             CirTargetMode mode) {
    if (mode == CirTargetMode::shannon) return std::exp2(min_rate / radio.chip_rate) - 1.0;
    return min_rate * radio.target_snr / radio.chip_rate;
}

[[nodiscard]] inline CirTargets cir_targets(const std::vector<UserClass>& classes,
                                            const std::vector<std::size_t>& class_of_user,
                                            const RadioConstants& radio, CirTargetMode mode) {
    const auto k = static_cast<Eigen::Index>(class_of_user.size());
    CirTargets t;
    t.mode = mode;
    t.cir_min.resize(k);
    t.spreading.resize(k);
    t.snir_target.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto& cls = classes.at(class_of_user[static_cast<std::size_t>(i)]);
        t.cir_min(i) = class_cir_target(cls.min_rate, radio, mode);
        t.spreading(i) = spreading_factor(radio.chip_rate, cls.min_rate);
        t.snir_target(i) = mode == CirTargetMode::spreading_factor ? radio.target_snr
                                                                   : t.spreading(i) * t.cir_min(i);
    }
    return t;
}

}  // namespace vpr
