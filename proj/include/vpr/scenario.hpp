#pragma once

// Experiment description: radio constants, user classes, placement, solver
// settings, and the flat `key = value` scenario file format.

#include "vpr/errors.hpp"
#include "vpr/random.hpp"
#include "vpr/types.hpp"
#include "vpr/units.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace vpr {

// -----------------------------------------------------------------------------
// Domain types
// -----------------------------------------------------------------------------

/// Radio constants. The dB/dBm forms are the source of truth; the linear
/// values are derived from them exactly once by `from_db`.
struct RadioConstants {
    double chip_rate = 3.84e6;  // chips/s
    double target_snr_db = 4.0;
    double target_snr = db_to_linear(4.0);
    double noise_dbm = -63.0;
    double noise_power = dbm_to_watts(-63.0);  // W
    double p_max_dbm = 20.0;
    double p_max = dbm_to_watts(20.0);
    double p_min_dbm = -59.0;
    double p_min = dbm_to_watts(-59.0);
    double slot_duration = 666.7e-6;  // s

    [[nodiscard]] static RadioConstants from_db(double chip_rate, double target_snr_db,
                                                double noise_dbm, double p_max_dbm,
                                                double p_min_dbm,
                                                double slot_duration = 666.7e-6) {
        RadioConstants r;
        r.chip_rate = chip_rate;
        r.target_snr_db = target_snr_db;
        r.target_snr = db_to_linear(target_snr_db);
        r.noise_dbm = noise_dbm;
        r.noise_power = dbm_to_watts(noise_dbm);
        r.p_max_dbm = p_max_dbm;
        r.p_max = dbm_to_watts(p_max_dbm);
        r.p_min_dbm = p_min_dbm;
        r.p_min = dbm_to_watts(p_min_dbm);
        r.slot_duration = slot_duration;
        return r;
    }

    friend bool operator==(const RadioConstants&, const RadioConstants&) = default;
};

struct UserClass {
    std::size_t class_id = 1;  // 1-based, ascending rate
    double min_rate = 0.0;     // bits/s
    std::string label;

    friend bool operator==(const UserClass&, const UserClass&) = default;
};

/// Cell rectangle and node positions, all in meters.
struct Geometry {
    double cell_width = 5000.0;
    double cell_height = 5000.0;
    std::vector<Point> bs_positions;
    std::vector<Point> mt_positions;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Rule for choosing each terminal's serving BS: smallest distance, largest
/// path loss x shadowing, or largest total link gain including fading.
enum class Association { nearest, large_scale, strongest };

struct ChannelSettings {
    bool shadowing = true;
    double shadow_var_db = 6.0;  // dB-domain variance
    bool fading = true;
    double rice_los = 0.6;    // specular amplitude
    double rice_scale = 0.4;  // diffuse scale per quadrature component
    double min_distance = 1.0;  // m
    Association association = Association::strongest;

    friend bool operator==(const ChannelSettings&, const ChannelSettings&) = default;
};

enum class AlphaMode { fixed, adaptive_diff, adaptive_tanh };
enum class CirTargetMode { spreading_factor, shannon };

struct SolverSettings {
    AlphaMode alpha_mode = AlphaMode::fixed;
    double alpha_fixed = 0.1;
    double alpha_min = 0.1;
    double alpha_max = 0.95;
    std::size_t max_iterations = 1000;
    std::optional<double> convergence_tolerance;  // off unless set
    CirTargetMode cir_target_mode = CirTargetMode::spreading_factor;
    std::optional<double> p0_dbm;  // initial power override; P_min otherwise

    friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

/// Full experiment description. `class_of_user` and `geometry.mt_positions`
/// may be empty, in which case each Monte Carlo trial draws them.
struct Scenario {
    RadioConstants radio;
    std::vector<UserClass> classes;
    std::size_t num_users = 0;
    std::vector<std::size_t> class_of_user;  // 0-based class index per user
    Geometry geometry;
    std::uint64_t rng_seed = 1;
    double error_half_width = 0.0;
    bool error_per_iteration = true;
    SolverSettings solver;
    ChannelSettings channel;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// -----------------------------------------------------------------------------
// Defaults and validation
// -----------------------------------------------------------------------------

[[nodiscard]] inline std::vector<UserClass> default_classes(double chip_rate = 3.84e6) {
    return {{1, chip_rate / 128.0, "voice"},
            {2, chip_rate / 32.0, "data"},
            {3, chip_rate / 16.0, "video"}};
}

/// Four base stations at the centers of the cell's quadrants.
[[nodiscard]] inline std::vector<Point> default_bs_positions(double width, double height) {
    return {{0.25 * width, 0.25 * height},
            {0.75 * width, 0.25 * height},
            {0.25 * width, 0.75 * height},
            {0.75 * width, 0.75 * height}};
}

[[nodiscard]] inline Scenario default_scenario(std::size_t num_users) {
    Scenario s;
    s.classes = default_classes(s.radio.chip_rate);
    s.num_users = num_users;
    s.geometry.bs_positions = default_bs_positions(s.geometry.cell_width, s.geometry.cell_height);
    return s;
}

inline void validate(const RadioConstants& r) {
    if (!(r.chip_rate > 0.0)) throw ValidationError("chip_rate", "must be > 0");
    if (!(r.noise_power > 0.0)) throw ValidationError("noise_dbm", "noise power must be > 0");
    if (!(r.p_min > 0.0)) throw ValidationError("pmin_dbm", "must be > 0 W");
    if (!(r.p_min < r.p_max)) throw ValidationError("pmax_dbm", "P_min must be < P_max");
    if (!(r.target_snr > 0.0)) throw ValidationError("target_snr_db", "must be finite");
}

inline void validate(const SolverSettings& s) {
    if (!(s.alpha_fixed > 0.0 && s.alpha_fixed <= 1.0))
        throw ValidationError("alpha", "must lie in (0, 1]");
    if (!(s.alpha_min > 0.0 && s.alpha_min <= 1.0))
        throw ValidationError("alpha_min", "must lie in (0, 1]");
    if (!(s.alpha_max > 0.0 && s.alpha_max <= 1.0))
        throw ValidationError("alpha_max", "must lie in (0, 1]");
    if (s.alpha_min > s.alpha_max) throw ValidationError("alpha_min", "must be <= alpha_max");
    if (s.max_iterations < 1 || s.max_iterations > 1'000'000)
        throw ValidationError("max_iter", "must lie in [1, 1e6]");
    if (s.convergence_tolerance && !(*s.convergence_tolerance > 0.0))
        throw ValidationError("tol", "must be > 0");
}

inline void validate(const Scenario& s) {
    validate(s.radio);
    validate(s.solver);
    if (s.num_users < 1) throw ValidationError("K", "need at least one user");
    if (s.classes.empty()) throw ValidationError("rates_bps", "need at least one user class");
    for (std::size_t l = 0; l < s.classes.size(); ++l) {
        const auto& c = s.classes[l];
        if (c.class_id != l + 1) throw ValidationError("rates_bps", "class ids must be 1..L");
        if (!(c.min_rate > 0.0 && c.min_rate < s.radio.chip_rate))
            throw ValidationError("rates_bps", "class rates must lie in (0, chip_rate)");
        if (l > 0 && !(c.min_rate > s.classes[l - 1].min_rate))
            throw ValidationError("rates_bps", "class rates must be strictly ascending");
    }
    if (!s.class_of_user.empty()) {
        if (s.class_of_user.size() != s.num_users)
            throw ValidationError("class_of_user", "length must equal K");
        for (std::size_t c : s.class_of_user)
            if (c >= s.classes.size()) throw ValidationError("class_of_user", "class out of range");
        if (!std::is_sorted(s.class_of_user.begin(), s.class_of_user.end()))
            throw ValidationError("class_of_user", "users must be indexed by ascending class rate");
    }
    const auto& g = s.geometry;
    if (!(g.cell_width > 0.0 && g.cell_height > 0.0))
        throw ValidationError("cell_km", "cell dimensions must be > 0");
    if (g.bs_positions.empty()) throw ValidationError("bs_positions", "need at least one BS");
    auto inside = [&](const Point& p) {
        return p.x >= 0.0 && p.x <= g.cell_width && p.y >= 0.0 && p.y <= g.cell_height;
    };
    for (const auto& p : g.bs_positions)
        if (!inside(p)) throw ValidationError("bs_positions", "BS outside the cell");
    if (!g.mt_positions.empty()) {
        if (g.mt_positions.size() != s.num_users)
            throw ValidationError("mt_positions", "length must equal K");
        for (const auto& p : g.mt_positions)
            if (!inside(p)) throw ValidationError("mt_positions", "terminal outside the cell");
    }
    if (!(s.error_half_width >= 0.0 && s.error_half_width < 1.0))
        throw ValidationError("delta", "error half width must lie in [0, 1)");
    const auto& ch = s.channel;
    if (!(ch.shadow_var_db >= 0.0)) throw ValidationError("shadow_var_db", "must be >= 0");
    if (!(ch.rice_los >= 0.0 && ch.rice_scale >= 0.0))
        throw ValidationError("rice_los", "Rician parameters must be >= 0");
    if (ch.fading && !(ch.rice_los > 0.0 || ch.rice_scale > 0.0))
        throw ValidationError("rice_los", "Rician parameters cannot both be zero");
    if (!(ch.min_distance > 0.0)) throw ValidationError("min_distance", "must be > 0");
}

// -----------------------------------------------------------------------------
// Placement and rate assignment
// -----------------------------------------------------------------------------

/// Stable permutation ordering users by ascending class (equivalently, rate).
[[nodiscard]] inline std::vector<std::size_t> rate_order(const std::vector<std::size_t>& class_of_user) {
    std::vector<std::size_t> order(class_of_user.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return class_of_user[a] < class_of_user[b];
    });
    return order;
}

/// K terminals i.i.d. uniform over the rectangle; BS positions copied as given.
[[nodiscard]] inline Geometry place_uniform(std::size_t num_users, double cell_width,
                                            double cell_height, std::vector<Point> bs_positions,
                                            Rng& rng) {
    if (num_users < 1) throw ValidationError("K", "need at least one user");
    if (!(cell_width > 0.0 && cell_height > 0.0))
        throw ValidationError("cell_km", "cell dimensions must be > 0");
    Geometry g;
    g.cell_width = cell_width;
    g.cell_height = cell_height;
    g.bs_positions = bs_positions.empty() ? default_bs_positions(cell_width, cell_height)
                                          : std::move(bs_positions);
    std::uniform_real_distribution<double> ux(0.0, cell_width);
    std::uniform_real_distribution<double> uy(0.0, cell_height);
    g.mt_positions.reserve(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        const double x = ux(rng);
        const double y = uy(rng);
        g.mt_positions.push_back({x, y});
    }
    return g;
}

/// Each user gets a class uniformly at random; the result is already
/// re-indexed in ascending rate order (0-based class indices).
[[nodiscard]] inline std::vector<std::size_t> assign_rates_uniform(std::size_t num_classes,
                                                                   std::size_t num_users, Rng& rng) {
    if (num_classes < 1) throw ValidationError("L", "need at least one user class");
    std::uniform_int_distribution<std::size_t> pick(0, num_classes - 1);
    std::vector<std::size_t> cls(num_users);
    for (auto& c : cls) c = pick(rng);
    std::stable_sort(cls.begin(), cls.end());
    return cls;
}

// -----------------------------------------------------------------------------
// Scenario file format
// -----------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(const std::string& key, std::string_view text) {
    const std::string s(trim(text));
    if (s.empty()) throw ParseError(key, "empty number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ParseError(key, "not a finite number: '" + s + "'");
    return v;
}

inline std::uint64_t parse_uint(const std::string& key, std::string_view text) {
    const std::string s(trim(text));
    if (s.empty() || s.front() == '-') throw ParseError(key, "not a non-negative integer: '" + s + "'");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError(key, "not a non-negative integer: '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& key, std::string_view text) {
    const auto s = trim(text);
    if (s == "true" || s == "on" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "off" || s == "0" || s == "no") return false;
    throw ParseError(key, "expected on/off");
}

inline std::vector<double> parse_list(const std::string& key, std::string_view text) {
    std::vector<double> out;
    for (auto item : split(text, ',')) out.push_back(parse_double(key, item));
    return out;
}

/// "x y; x y; ..." in kilometers -> meters.
inline std::vector<Point> parse_points_km(const std::string& key, std::string_view text) {
    std::vector<Point> out;
    for (auto item : split(text, ';')) {
        if (item.empty()) continue;
        std::istringstream is{std::string(item)};
        std::string xs, ys, extra;
        if (!(is >> xs >> ys) || (is >> extra)) throw ParseError(key, "expected 'x y' pairs in km");
        out.push_back({1000.0 * parse_double(key, xs), 1000.0 * parse_double(key, ys)});
    }
    return out;
}

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Kilometer value whose parse (x1000) reproduces `meters` bit-exactly.
inline double km_for_meters(double meters) {
    double km = meters / 1000.0;
    if (km * 1000.0 == meters) return km;
    double up = km, down = km;
    for (int i = 0; i < 8; ++i) {
        up = std::nextafter(up, INFINITY);
        down = std::nextafter(down, -INFINITY);
        if (up * 1000.0 == meters) return up;
        if (down * 1000.0 == meters) return down;
    }
    return km;
}

inline std::string fmt_points_km(const std::vector<Point>& pts) {
    std::string out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += "; ";
        out += fmt_double(km_for_meters(pts[i].x)) + " " + fmt_double(km_for_meters(pts[i].y));
    }
    return out;
}

inline const char* to_string(AlphaMode m) {
    switch (m) {
        case AlphaMode::fixed: return "fixed";
        case AlphaMode::adaptive_diff: return "adaptive_diff";
        case AlphaMode::adaptive_tanh: return "adaptive_tanh";
    }
    return "fixed";
}

inline const char* to_string(CirTargetMode m) {
    return m == CirTargetMode::shannon ? "shannon" : "spreading_factor";
}

}  // namespace detail

[[nodiscard]] inline const char* to_string(AlphaMode m) { return detail::to_string(m); }

[[nodiscard]] inline const char* to_string(Association a) {
    switch (a) {
        case Association::nearest: return "nearest";
        case Association::large_scale: return "large_scale";
        case Association::strongest: return "strongest";
    }
    return "strongest";
}

[[nodiscard]] inline Association parse_association(std::string_view s) {
    if (s == "nearest") return Association::nearest;
    if (s == "large_scale") return Association::large_scale;
    if (s == "strongest") return Association::strongest;
    throw ParseError("association", "expected nearest, large_scale or strongest");
}
[[nodiscard]] inline const char* to_string(CirTargetMode m) { return detail::to_string(m); }

[[nodiscard]] inline AlphaMode parse_alpha_mode(std::string_view s) {
    if (s == "fixed") return AlphaMode::fixed;
    if (s == "adaptive_diff" || s == "diff") return AlphaMode::adaptive_diff;
    if (s == "adaptive_tanh" || s == "tanh") return AlphaMode::adaptive_tanh;
    throw ParseError("alpha_mode", "expected fixed, adaptive_diff or adaptive_tanh");
}

[[nodiscard]] inline CirTargetMode parse_cir_target_mode(std::string_view s) {
    if (s == "spreading_factor") return CirTargetMode::spreading_factor;
    if (s == "shannon") return CirTargetMode::shannon;
    throw ParseError("cir_target_mode", "expected spreading_factor or shannon");
}

/// Parses scenario text. Omitted keys take the default radio/cell values;
/// unknown or repeated keys are errors. The result is validated.
[[nodiscard]] inline Scenario parse_scenario(std::string_view text) {
    using namespace detail;
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError("", "line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key)) throw ParseError(key, "duplicate key");
        kv.emplace(std::move(key), std::string(trim(line.substr(eq + 1))));
    }

    static const std::vector<std::string_view> known = {
        "K",          "L",          "rates_bps",     "class_labels",  "class_of_user",
        "chip_rate",  "target_snr_db", "noise_dbm",  "pmax_dbm",      "pmin_dbm",
        "cell_km",    "bs_positions", "mt_positions", "seed",         "delta",
        "error_per_iteration", "alpha_mode", "alpha", "alpha_min",    "alpha_max",
        "max_iter",   "tol",        "cir_target_mode", "p0_dbm",     "shadowing",
        "shadow_var_db", "fading",  "rice_los",      "rice_scale",    "min_distance_m",
        "association"};
    for (const auto& [k, v] : kv)
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ParseError(k, "unknown key");

    auto get = [&](std::string_view k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    Scenario s;

    const double chip_rate = get("chip_rate") ? parse_double("chip_rate", *get("chip_rate")) : 3.84e6;
    const double snr_db = get("target_snr_db") ? parse_double("target_snr_db", *get("target_snr_db")) : 4.0;
    const double noise_dbm = get("noise_dbm") ? parse_double("noise_dbm", *get("noise_dbm")) : -63.0;
    const double pmax_dbm = get("pmax_dbm") ? parse_double("pmax_dbm", *get("pmax_dbm")) : 20.0;
    // Default P_min is the dBm-domain sum SNR_min + P_n.
    const double pmin_dbm = get("pmin_dbm") ? parse_double("pmin_dbm", *get("pmin_dbm")) : snr_db + noise_dbm;
    s.radio = RadioConstants::from_db(chip_rate, snr_db, noise_dbm, pmax_dbm, pmin_dbm);

    if (const auto* v = get("rates_bps")) {
        const auto rates = parse_list("rates_bps", *v);
        for (std::size_t l = 0; l < rates.size(); ++l)
            s.classes.push_back({l + 1, rates[l], "class" + std::to_string(l + 1)});
    } else {
        s.classes = default_classes(chip_rate);
    }
    if (const auto* v = get("L")) {
        if (parse_uint("L", *v) != s.classes.size())
            throw ValidationError("L", "does not match the number of class rates (give rates_bps)");
    }
    if (const auto* v = get("class_labels")) {
        const auto labels = split(*v, ',');
        if (labels.size() != s.classes.size())
            throw ValidationError("class_labels", "need one label per class");
        for (std::size_t l = 0; l < labels.size(); ++l) s.classes[l].label = std::string(labels[l]);
    }

    std::vector<std::size_t> explicit_classes;
    if (const auto* v = get("class_of_user")) {
        for (auto item : split(*v, ',')) {
            const auto c = parse_uint("class_of_user", item);
            if (c < 1 || c > s.classes.size())
                throw ValidationError("class_of_user", "class id out of range 1..L");
            explicit_classes.push_back(static_cast<std::size_t>(c - 1));
        }
    }

    double width = 5000.0, height = 5000.0;
    if (const auto* v = get("cell_km")) {
        const auto dims = parse_list("cell_km", *v);
        if (dims.size() == 1) {
            width = height = 1000.0 * dims[0];
        } else if (dims.size() == 2) {
            width = 1000.0 * dims[0];
            height = 1000.0 * dims[1];
        } else {
            throw ParseError("cell_km", "expected 'side' or 'width, height'");
        }
    }
    s.geometry.cell_width = width;
    s.geometry.cell_height = height;
    s.geometry.bs_positions = get("bs_positions") ? parse_points_km("bs_positions", *get("bs_positions"))
                                                  : default_bs_positions(width, height);
    if (const auto* v = get("mt_positions")) s.geometry.mt_positions = parse_points_km("mt_positions", *v);

    if (const auto* v = get("K")) {
        s.num_users = static_cast<std::size_t>(parse_uint("K", *v));
    } else if (!explicit_classes.empty()) {
        s.num_users = explicit_classes.size();
    } else if (!s.geometry.mt_positions.empty()) {
        s.num_users = s.geometry.mt_positions.size();
    } else {
        throw ValidationError("K", "number of users is required");
    }
    if (!explicit_classes.empty() && explicit_classes.size() != s.num_users)
        throw ValidationError("class_of_user", "length must equal K");
    if (!s.geometry.mt_positions.empty() && s.geometry.mt_positions.size() != s.num_users)
        throw ValidationError("mt_positions", "length must equal K");

    // Users are indexed by ascending class rate; positions follow their users.
    if (!explicit_classes.empty()) {
        const auto order = rate_order(explicit_classes);
        s.class_of_user.resize(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) s.class_of_user[i] = explicit_classes[order[i]];
        if (!s.geometry.mt_positions.empty()) {
            std::vector<Point> sorted(order.size());
            for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = s.geometry.mt_positions[order[i]];
            s.geometry.mt_positions = std::move(sorted);
        }
    }

    if (const auto* v = get("seed")) s.rng_seed = parse_uint("seed", *v);
    if (const auto* v = get("delta")) s.error_half_width = parse_double("delta", *v);
    if (const auto* v = get("error_per_iteration")) s.error_per_iteration = parse_bool("error_per_iteration", *v);

    auto& sol = s.solver;
    if (const auto* v = get("alpha_mode")) sol.alpha_mode = parse_alpha_mode(*v);
    if (const auto* v = get("alpha")) sol.alpha_fixed = parse_double("alpha", *v);
    if (const auto* v = get("alpha_min")) sol.alpha_min = parse_double("alpha_min", *v);
    if (const auto* v = get("alpha_max")) sol.alpha_max = parse_double("alpha_max", *v);
    if (const auto* v = get("max_iter")) sol.max_iterations = static_cast<std::size_t>(parse_uint("max_iter", *v));
    if (const auto* v = get("tol")) {
        if (*v != "off") sol.convergence_tolerance = parse_double("tol", *v);
    }
    if (const auto* v = get("cir_target_mode")) sol.cir_target_mode = parse_cir_target_mode(*v);
    if (const auto* v = get("p0_dbm")) sol.p0_dbm = parse_double("p0_dbm", *v);

    auto& ch = s.channel;
    if (const auto* v = get("shadowing")) ch.shadowing = parse_bool("shadowing", *v);
    if (const auto* v = get("shadow_var_db")) ch.shadow_var_db = parse_double("shadow_var_db", *v);
    if (const auto* v = get("fading")) ch.fading = parse_bool("fading", *v);
    if (const auto* v = get("rice_los")) ch.rice_los = parse_double("rice_los", *v);
    if (const auto* v = get("rice_scale")) ch.rice_scale = parse_double("rice_scale", *v);
    if (const auto* v = get("min_distance_m")) ch.min_distance = parse_double("min_distance_m", *v);
    if (const auto* v = get("association")) ch.association = parse_association(*v);

    validate(s);
    return s;
}

[[nodiscard]] inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("", "cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

/// Writes every key explicitly, full precision; `parse_scenario` of the
/// result compares equal to `s`.
[[nodiscard]] inline std::string serialize(const Scenario& s) {
    using detail::fmt_double;
    std::ostringstream o;
    o << "K = " << s.num_users << "\n";
    o << "L = " << s.classes.size() << "\n";
    o << "rates_bps = ";
    for (std::size_t l = 0; l < s.classes.size(); ++l) o << (l ? ", " : "") << fmt_double(s.classes[l].min_rate);
    o << "\nclass_labels = ";
    for (std::size_t l = 0; l < s.classes.size(); ++l) o << (l ? ", " : "") << s.classes[l].label;
    o << "\n";
    if (!s.class_of_user.empty()) {
        o << "class_of_user = ";
        for (std::size_t i = 0; i < s.class_of_user.size(); ++i) o << (i ? ", " : "") << s.class_of_user[i] + 1;
        o << "\n";
    }
    o << "chip_rate = " << fmt_double(s.radio.chip_rate) << "\n";
    o << "target_snr_db = " << fmt_double(s.radio.target_snr_db) << "\n";
    o << "noise_dbm = " << fmt_double(s.radio.noise_dbm) << "\n";
    o << "pmax_dbm = " << fmt_double(s.radio.p_max_dbm) << "\n";
    o << "pmin_dbm = " << fmt_double(s.radio.p_min_dbm) << "\n";
    o << "cell_km = " << fmt_double(detail::km_for_meters(s.geometry.cell_width)) << ", "
      << fmt_double(detail::km_for_meters(s.geometry.cell_height)) << "\n";
    o << "bs_positions = " << detail::fmt_points_km(s.geometry.bs_positions) << "\n";
    if (!s.geometry.mt_positions.empty())
        o << "mt_positions = " << detail::fmt_points_km(s.geometry.mt_positions) << "\n";
    o << "seed = " << s.rng_seed << "\n";
    o << "delta = " << fmt_double(s.error_half_width) << "\n";
    o << "error_per_iteration = " << (s.error_per_iteration ? "on" : "off") << "\n";
    o << "alpha_mode = " << to_string(s.solver.alpha_mode) << "\n";
    o << "alpha = " << fmt_double(s.solver.alpha_fixed) << "\n";
    o << "alpha_min = " << fmt_double(s.solver.alpha_min) << "\n";
    o << "alpha_max = " << fmt_double(s.solver.alpha_max) << "\n";
    o << "max_iter = " << s.solver.max_iterations << "\n";
    o << "tol = " << (s.solver.convergence_tolerance ? fmt_double(*s.solver.convergence_tolerance) : "off") << "\n";
    o << "cir_target_mode = " << to_string(s.solver.cir_target_mode) << "\n";
    if (s.solver.p0_dbm) o << "p0_dbm = " << fmt_double(*s.solver.p0_dbm) << "\n";
    o << "shadowing = " << (s.channel.shadowing ? "on" : "off") << "\n";
    o << "shadow_var_db = " << fmt_double(s.channel.shadow_var_db) << "\n";
    o << "fading = " << (s.channel.fading ? "on" : "off") << "\n";
    o << "rice_los = " << fmt_double(s.channel.rice_los) << "\n";
    o << "rice_scale = " << fmt_double(s.channel.rice_scale) << "\n";
    o << "min_distance_m = " << fmt_double(s.channel.min_distance) << "\n";
    o << "association = " << to_string(s.channel.association) << "\n";
    return o.str();
}

}  // namespace vpr
