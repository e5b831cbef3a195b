#pragma once

#include "vpr/types.hpp"

#include <stdexcept>

namespace vpr {

/// ||p - p*||^2 / ||p*||^2 for one trial; the expectation is taken by averaging trials.
[[nodiscard]] inline double nse(const Vector& p, const Vector& p_star) {
    const double denom = p_star.squaredNorm();
    if (!(denom > 0.0)) throw std::invalid_argument("nse: reference power vector is all zero");
    if (p.size() != p_star.size()) throw std::invalid_argument("nse: size mismatch");
    return (p - p_star).squaredNorm() / denom;
}

}  // namespace vpr
