#pragma once

// Channel gains from geometry (path loss d^-2, log-normal shadowing, Rician
// fading) and the multiplicative estimation-error model g_hat = (1 + eps) g.

#include "vpr/errors.hpp"
#include "vpr/random.hpp"
#include "vpr/scenario.hpp"
#include "vpr/types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace vpr {

/// Row i is the receiver (serving BS) of user i: entries(i, j) is the gain
/// from transmitter j to that BS, so entries(i, i) is user i's own link.
struct GainMatrix {
    Matrix entries;
    std::vector<std::size_t> serving_bs;
    std::size_t clamped_distances = 0;  // pairs closer than the distance floor

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

struct ErrorModel {
    double half_width = 0.0;
    bool per_iteration = true;
};

[[nodiscard]] inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

[[nodiscard]] inline double path_loss(double meters) { return 1.0 / (meters * meters); }

/// Gains of every (terminal, BS) link: link(j, b) = PL(d_jb) * S_jb * |h_jb|^2.
/// Each physical link gets one shadowing and one fading realization, drawn
/// terminal-major in BS order (shadowing, then the two Rician quadratures).
struct LinkGains {
    Matrix gain;       // K x B
    Matrix path_loss;  // K x B, floor-clamped d^-2
    Matrix shadowing;  // K x B, linear factor
    std::size_t clamped_distances = 0;
};

[[nodiscard]] inline LinkGains draw_link_gains(const Geometry& geometry,
                                               const ChannelSettings& settings, Rng& rng) {
    const auto& mts = geometry.mt_positions;
    const auto& bss = geometry.bs_positions;
    const auto k = static_cast<Eigen::Index>(mts.size());
    const auto nb = static_cast<Eigen::Index>(bss.size());
    LinkGains l;
    l.gain.resize(k, nb);
    l.path_loss.resize(k, nb);
    l.shadowing.resize(k, nb);
    std::normal_distribution<double> shadow_db(0.0, std::sqrt(settings.shadow_var_db));
    std::normal_distribution<double> diffuse(0.0, 1.0);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index b = 0; b < nb; ++b) {
            double d = distance(mts[static_cast<std::size_t>(j)], bss[static_cast<std::size_t>(b)]);
            if (d < settings.min_distance) {
                d = settings.min_distance;
                ++l.clamped_distances;
            }
            const double pl = path_loss(d);
            const double s = settings.shadowing ? std::pow(10.0, shadow_db(rng) / 10.0) : 1.0;
            double h2 = 1.0;
            if (settings.fading) {
                const double re = settings.rice_los + settings.rice_scale * diffuse(rng);
                const double im = settings.rice_scale * diffuse(rng);
                h2 = re * re + im * im;
            }
            l.path_loss(j, b) = pl;
            l.shadowing(j, b) = s;
            l.gain(j, b) = pl * s * h2;
        }
    }
    return l;
}

/// Serving BS of terminal j under the configured association rule.
[[nodiscard]] inline std::size_t serving_bs(const LinkGains& l, Eigen::Index j, Association rule) {
    Eigen::Index best = 0;
    for (Eigen::Index b = 1; b < l.gain.cols(); ++b) {
        double cand = 0.0, cur = 0.0;
        switch (rule) {
            case Association::nearest:
                cand = l.path_loss(j, b);
                cur = l.path_loss(j, best);
                break;
            case Association::large_scale:
                cand = l.path_loss(j, b) * l.shadowing(j, b);
                cur = l.path_loss(j, best) * l.shadowing(j, best);
                break;
            case Association::strongest:
                cand = l.gain(j, b);
                cur = l.gain(j, best);
                break;
        }
        if (cand > cur) best = b;
    }
    return static_cast<std::size_t>(best);
}

/// K x K gain matrix: entries(i, j) is the link gain from terminal j to the
/// BS serving user i. Deterministic given the rng state.
[[nodiscard]] inline GainMatrix build_gain_matrix(const Geometry& geometry,
                                                  const ChannelSettings& settings, Rng& rng) {
    if (geometry.mt_positions.empty()) throw ValidationError("mt_positions", "no terminals placed");
    if (geometry.bs_positions.empty()) throw ValidationError("bs_positions", "need at least one BS");
    const LinkGains links = draw_link_gains(geometry, settings, rng);
    const Eigen::Index k = links.gain.rows();

    GainMatrix g;
    g.entries.resize(k, k);
    g.serving_bs.resize(static_cast<std::size_t>(k));
    g.clamped_distances = links.clamped_distances;
    for (Eigen::Index i = 0; i < k; ++i) {
        const std::size_t b = serving_bs(links, i, settings.association);
        g.serving_bs[static_cast<std::size_t>(i)] = b;
        for (Eigen::Index j = 0; j < k; ++j) g.entries(i, j) = links.gain(j, static_cast<Eigen::Index>(b));
    }
    return g;
}

/// Writes (1 + eps_ij) * true_gains into `out`, eps_ij ~ U[-half_width, half_width].
/// With half_width == 0 the copy is exact and no random numbers are consumed.
inline void perturb_into(const Matrix& true_gains, double half_width, Rng& rng, Matrix& out) {
    if (!(half_width >= 0.0 && half_width < 1.0))
        throw ValidationError("delta", "error half width must lie in [0, 1)");
    out.resize(true_gains.rows(), true_gains.cols());
    if (half_width == 0.0) {
        out = true_gains;
        return;
    }
    std::uniform_real_distribution<double> eps(-half_width, half_width);
    for (Eigen::Index i = 0; i < true_gains.rows(); ++i)
        for (Eigen::Index j = 0; j < true_gains.cols(); ++j)
            out(i, j) = (1.0 + eps(rng)) * true_gains(i, j);
}

[[nodiscard]] inline GainMatrix perturb(const GainMatrix& gains, const ErrorModel& error, Rng& rng) {
    GainMatrix out;
    out.serving_bs = gains.serving_bs;
    out.clamped_distances = gains.clamped_distances;
    perturb_into(gains.entries, error.half_width, rng, out.entries);
    return out;
}

/// Row-major K x K dump, full double precision.
inline void write_gain_csv(const std::string& path, const GainMatrix& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    char buf[32];
    for (Eigen::Index i = 0; i < g.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.entries.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", g.entries(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

}  // namespace vpr
