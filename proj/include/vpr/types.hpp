#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace vpr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// 2-D position in meters.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

}  // namespace vpr
