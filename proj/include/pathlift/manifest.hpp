#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pathlift/errors.hpp"
#include "pathlift/manifold.hpp"
#include "pathlift/metric.hpp"
#include "pathlift/solver.hpp"
#include "pathlift/speed.hpp"

namespace pathlift {

/// One run description: problem + solver settings + batch/output info.
/// Parsed from a flat key=value manifest ('#' starts a comment) and/or
/// command-line overrides.
struct RunManifest {
    std::string manifold_text = "flat";
    std::string speed_text = "const:c=1";
    int dim = 0; // 0: infer from goal
    std::optional<std::vector<double>> start;
    std::optional<std::vector<double>> goal;
    std::vector<std::vector<double>> starts; // explicit batch start list
    std::optional<double> horizon;
    double dt = 0.1;
    std::optional<int> steps;

    double sigma = 1.0;
    double tau = 0.0; // <= 0: automatic
    double kappa = 1.0;
    double tol = 1e-3;
    long max_iters = 40000;
    long stage_switch = 2000;
    long anneal_period = 1000;
    double eta0 = 0.025;
    double b0 = 50.0;
    double b_max = 5000.0;
    int gd_steps = 1;
    double noise_std = 0.31622776601683794;
    std::uint64_t seed = 0;

    int count = 0; // batch: number of sampled starts
    std::optional<std::vector<double>> box_lo;
    std::optional<std::vector<double>> box_hi;
    int workers = 0; // 0: hardware concurrency
    std::string out_dir = "pathlift_out";
    bool raw = false; // trajectory files in internal (goal-first) order
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ManifestError("key '" + key + "': bad number '" + v + "'");
    }
}

inline long to_long(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ManifestError("key '" + key + "': bad integer '" + v + "'");
    }
}

inline std::vector<std::vector<double>> parse_point_list(const std::string& v,
                                                         const std::string& key) {
    std::vector<std::vector<double>> pts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (!item.empty()) pts.push_back(parse_comma_floats(item, "key '" + key + "'"));
    }
    if (pts.empty()) throw ManifestError("key '" + key + "': empty point list");
    return pts;
}

} // namespace detail

/// Apply one manifest assignment. Shared by the file parser and the CLI
/// override path so both use the same key grammar.
inline void manifest_set(RunManifest& m, const std::string& key, const std::string& value) {
    using detail::to_double;
    using detail::to_long;
    if (key == "manifold") m.manifold_text = value;
    else if (key == "speed") m.speed_text = value;
    else if (key == "dim") m.dim = static_cast<int>(to_long(value, key));
    else if (key == "start") m.start = detail::parse_comma_floats(value, "key 'start'");
    else if (key == "goal") m.goal = detail::parse_comma_floats(value, "key 'goal'");
    else if (key == "starts") m.starts = detail::parse_point_list(value, key);
    else if (key == "horizon") m.horizon = to_double(value, key);
    else if (key == "dt") m.dt = to_double(value, key);
    else if (key == "steps") m.steps = static_cast<int>(to_long(value, key));
    else if (key == "sigma") m.sigma = to_double(value, key);
    else if (key == "tau") m.tau = to_double(value, key);
    else if (key == "kappa") m.kappa = to_double(value, key);
    else if (key == "tol") m.tol = to_double(value, key);
    else if (key == "max_iters") m.max_iters = to_long(value, key);
    else if (key == "stage_switch") m.stage_switch = to_long(value, key);
    else if (key == "anneal_period") m.anneal_period = to_long(value, key);
    else if (key == "eta0") m.eta0 = to_double(value, key);
    else if (key == "b0") m.b0 = to_double(value, key);
    else if (key == "b_max") m.b_max = to_double(value, key);
    else if (key == "gd_steps") m.gd_steps = static_cast<int>(to_long(value, key));
    else if (key == "noise_std") m.noise_std = to_double(value, key);
    else if (key == "seed") m.seed = static_cast<std::uint64_t>(to_long(value, key));
    else if (key == "count") m.count = static_cast<int>(to_long(value, key));
    else if (key == "box_lo") m.box_lo = detail::parse_comma_floats(value, "key 'box_lo'");
    else if (key == "box_hi") m.box_hi = detail::parse_comma_floats(value, "key 'box_hi'");
    else if (key == "workers") m.workers = static_cast<int>(to_long(value, key));
    else if (key == "out") m.out_dir = value;
    else if (key == "raw") m.raw = value == "1" || value == "true";
    else throw ManifestError("unknown key '" + key + "'");
}

inline RunManifest parse_manifest(std::istream& in) {
    RunManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ManifestError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                                line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            manifest_set(m, key, value);
        } catch (const ManifestError& e) {
            throw ManifestError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return m;
}

inline RunManifest parse_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest '" + path + "'");
    return parse_manifest(in);
}

/// Problem + config + any advisory warnings, ready for solve_path.
struct BuiltProblem {
    ProblemSpec spec;
    SolverConfig config;
    std::vector<std::string> warnings;
};

namespace detail {

inline Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double default_horizon(const ProblemSpec& spec, double dt, std::vector<std::string>& warnings) {
    const int samples = 200;
    Matrix polyline(spec.start.size(), samples + 1);
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double s = static_cast<double>(i) / samples;
        polyline.col(i) = spec.start + s * (spec.goal - spec.start);
        vmin = std::min(vmin, spec.speed.value(polyline.col(i), 0.0));
    }
    const double arc = manifold_arclength(spec.manifold, polyline);
    double t = vmin > 0.0 ? 1.5 * arc / vmin : 1.0;
    if (!(t > 0.0)) t = dt; // start == goal
    t = std::ceil(t / dt) * dt;
    warnings.push_back("horizon not given; defaulting to " + std::to_string(t) +
                       " (1.5x straight-segment arc length / min speed)");
    return t;
}

} // namespace detail

/// Resolve the manifest into a concrete problem. `start_override` serves
/// batch runs, which substitute sampled start points one at a time.
inline BuiltProblem build_problem(const RunManifest& m,
                                  const std::optional<Vector>& start_override = std::nullopt) {
    BuiltProblem b;
    if (!m.goal) throw ManifestError("missing required key 'goal'");

    int dim = m.dim;
    if (dim == 0) dim = static_cast<int>(m.goal->size());
    if (static_cast<int>(m.goal->size()) != dim)
        throw ManifestError("key 'goal' has " + std::to_string(m.goal->size()) +
                            " components; dimension is " + std::to_string(dim));

    b.spec.goal = detail::to_vector(*m.goal);
    if (start_override) {
        if (start_override->size() != dim) throw ManifestError("start override dimension mismatch");
        b.spec.start = *start_override;
    } else {
        if (!m.start) throw ManifestError("missing required key 'start'");
        if (static_cast<int>(m.start->size()) != dim)
            throw ManifestError("key 'start' has " + std::to_string(m.start->size()) +
                                " components; dimension is " + std::to_string(dim));
        b.spec.start = detail::to_vector(*m.start);
    }

    b.spec.manifold = parse_manifold(m.manifold_text, dim);
    b.spec.speed = parse_speed(m.speed_text);

    b.spec.horizon = m.horizon ? *m.horizon : detail::default_horizon(b.spec, m.dt, b.warnings);
    if (!(b.spec.horizon > 0.0)) throw ManifestError("key 'horizon' must be positive");

    b.config.time_steps =
        m.steps ? *m.steps : std::max(1, static_cast<int>(std::lround(b.spec.horizon / m.dt)));
    b.config.sigma = m.sigma;
    b.config.tau = m.tau;
    b.config.kappa = m.kappa;
    b.config.tolerance = m.tol;
    b.config.max_iterations = m.max_iters;
    b.config.stage_switch = m.stage_switch;
    b.config.anneal_period = m.anneal_period;
    b.config.eta0 = m.eta0;
    b.config.sharpness0 = m.b0;
    b.config.sharpness_max = m.b_max;
    b.config.gd_steps = m.gd_steps;
    b.config.noise_std = m.noise_std;
    b.config.seed = m.seed;

    for (const auto& w : problem_warnings(b.spec)) b.warnings.push_back(w);
    return b;
}

/// Parsed trajectory file contents; costates carry the written zero row.
struct TrajectoryFile {
    std::vector<double> times;
    Matrix states;   // n x rows
    Matrix costates; // n x rows
    std::vector<double> heights;
};

/// Write one path as CSV, header `t,x1..xn,z,p1..pn`, full round-trip
/// precision. Default order is time-forward (query point to goal); raw
/// order keeps the internal goal-first indexing. Either way exactly one
/// row (the goal end) carries a zero costate.
inline void write_trajectory_csv(std::ostream& out, const PathSolution& sol,
                                 const ProblemSpec& spec, const SolverConfig& config,
                                 bool raw = false) {
    const int steps = config.time_steps;
    const auto n = spec.start.size();
    const double dt = spec.horizon / steps;

    out << "t";
    for (Eigen::Index d = 0; d < n; ++d) out << ",x" << d + 1;
    out << ",z";
    for (Eigen::Index d = 0; d < n; ++d) out << ",p" << d + 1;
    out << "\n";
    out << std::setprecision(17);

    for (int row = 0; row <= steps; ++row) {
        const int j = raw ? row : steps - row; // internal column index
        out << row * dt;
        for (Eigen::Index d = 0; d < n; ++d) out << "," << sol.states(d, j);
        out << "," << spec.manifold.value(sol.states.col(j));
        for (Eigen::Index d = 0; d < n; ++d) out << "," << (j >= 1 ? sol.costates(d, j - 1) : 0.0);
        out << "\n";
    }
}

inline TrajectoryFile read_trajectory_csv(std::istream& in) {
    TrajectoryFile tf;
    std::string line;
    if (!std::getline(in, line)) throw ManifestError("trajectory file: missing header");
    const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
    const Eigen::Index n = (cols - 2) / 2;
    if (cols != 2 * n + 2) throw ManifestError("trajectory file: malformed header");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(detail::to_double(cell, "trajectory cell"));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ManifestError("trajectory file: row with " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(cols));
        rows.push_back(std::move(row));
    }
    const auto count = static_cast<Eigen::Index>(rows.size());
    tf.states.resize(n, count);
    tf.costates.resize(n, count);
    for (Eigen::Index r = 0; r < count; ++r) {
        tf.times.push_back(rows[r][0]);
        for (Eigen::Index d = 0; d < n; ++d) tf.states(d, r) = rows[r][1 + d];
        tf.heights.push_back(rows[r][1 + n]);
        for (Eigen::Index d = 0; d < n; ++d) tf.costates(d, r) = rows[r][2 + n + d];
    }
    return tf;
}

struct SummaryRow {
    int path_id = 0;
    double u = 0.0;
    long iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "path_id,u,iterations,converged,seconds\n" << std::setprecision(17);
    for (const auto& r : rows)
        out << r.path_id << "," << r.u << "," << r.iterations << "," << (r.converged ? 1 : 0)
            << "," << r.seconds << "\n";
}

struct ScalingRow {
    int dim = 0;
    double mean_s = 0.0;
    double std_s = 0.0;
};

inline void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
    out << "dim,mean_s,std_s\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.dim << "," << r.mean_s << "," << r.std_s << "\n";
}

} // namespace pathlift
