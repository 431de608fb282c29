#include "gaussmiss/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gaussmiss {

namespace {

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r") == std::string::npos;
}

// Reads exactly `n` numbers from `text`; false on anything else.
bool read_numbers(const std::string& text, std::size_t n, std::vector<double>& out) {
    std::istringstream in(text);
    out.clear();
    double v;
    while (in >> v) out.push_back(v);
    if (!in.eof()) return false;
    return out.size() == n;
}

void check_writable(const std::string& path, const char* what) {
    if (path.empty()) return;
    namespace fs = std::filesystem;
    const fs::path p(path);
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    if (!fs::is_directory(dir)) {
        throw std::runtime_error(std::string(what) + ": directory does not exist: " + dir.string());
    }
    if (fs::is_directory(p)) throw std::runtime_error(std::string(what) + ": is a directory: " + path);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

Side override_side(const ObstacleSet& obstacles, const OddHarmonicSeries& z) {
    std::optional<Side> side;
    for (std::size_t i = 0; i < obstacles.points.size(); ++i) {
        const SideResult r = side_of_graph_curve(obstacles.points[i], z);
        if (r.side == Side::on || (side && *side != r.side)) {
            throw SeparationFitError("series override does not separate the obstacles (obstacle " +
                                         std::to_string(i) + ")",
                                     i, r.margin);
        }
        side = r.side;
    }
    return side.value_or(Side::above);
}

}  // namespace

void validate(const RunConfig& c) {
    if (c.epsilon.has_value() != c.delta.has_value()) {
        throw std::invalid_argument("--epsilon and --delta must be given together");
    }
    if (c.epsilon) ExtensionParams(*c.epsilon, *c.delta);
    for (const Grid& g : {c.grid, c.export_grid}) {
        if (g.n_theta < kMinGridResolution || g.n_t < kMinGridResolution) {
            throw std::invalid_argument("grid resolution must be at least 16 per axis");
        }
    }
    if (!(c.margin_target > 0.0)) throw std::invalid_argument("--margin must be positive");
    if (c.max_degree < 1) throw std::invalid_argument("--max-degree must be at least 1");
    if (!std::isfinite(c.target_radius)) throw std::invalid_argument("--target-radius must be finite");
}

std::vector<UnitVector> parse_obstacles(std::istream& in) {
    std::vector<UnitVector> out;
    std::string line;
    std::vector<double> nums;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        std::string body = strip_comment(line);
        if (blank(body)) continue;
        const auto start = body.find_first_not_of(" \t");
        bool ok;
        if (body.compare(start, 7, "lonlat:") == 0) {
            ok = read_numbers(body.substr(start + 7), 2, nums);
            if (ok) out.push_back(from_degrees(nums[0], nums[1]));
        } else {
            ok = read_numbers(body, 3, nums);
            if (ok) {
                try {
                    out.emplace_back(nums[0], nums[1], nums[2]);
                } catch (const DegenerateInput&) {
                    ok = false;
                }
            }
        }
        if (!ok) {
            throw std::runtime_error("obstacle file line " + std::to_string(lineno) +
                                     ": expected 'x y z' or 'lonlat: lon lat', got '" + line + "'");
        }
    }
    return out;
}

std::vector<UnitVector> load_obstacles(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read obstacle file: " + path);
    return parse_obstacles(f);
}

std::vector<HarmonicTerm> parse_series(const std::string& text) {
    std::string s = text;
    for (char& ch : s) {
        if (ch == ',') ch = ' ';
    }
    std::istringstream in(s);
    std::vector<HarmonicTerm> out;
    std::string tok;
    while (in >> tok) {
        HarmonicTerm t{};
        char c1 = 0, c2 = 0;
        std::istringstream ts(tok);
        if (!(ts >> t.k >> c1 >> t.a >> c2 >> t.b) || c1 != ':' || c2 != ':' || !ts.eof()) {
            throw std::invalid_argument("series term '" + tok + "' is not of the form k:a:b");
        }
        out.push_back(t);
    }
    return out;
}

RunResult run_pipeline(const std::vector<UnitVector>& raw, const RunConfig& config) {
    RunResult r;
    if (!config.series.empty()) {
        r.obstacles = choose_pole(raw, config.seed);
        r.series = OddHarmonicSeries(config.series);
        r.side = override_side(r.obstacles, r.series);
    } else {
        PoleAndFit pf =
            select_for_certification(raw, config.seed, config.margin_target, config.max_degree, config.grid);
        r.obstacles = std::move(pf.obstacles);
        r.series = std::move(pf.fit.series);
        r.side = pf.fit.side;
    }
    const Frame frame(r.series, r.side);
    if (config.epsilon) {
        r.params = ExtensionParams(*config.epsilon, *config.delta);
        r.report = verify_extension(r.obstacles, frame, r.params, config.grid);
    } else {
        try {
            TuneResult t = auto_tune(r.obstacles, frame, config.target_radius, config.grid);
            r.params = t.params;
            r.report = std::move(t.report);
        } catch (const CertificationError& e) {
            r.report = e.report;
            r.report.notes.push_back(e.what());
            r.params = ExtensionParams(r.report.epsilon, r.report.delta);
        }
    }
    return r;
}

std::string report_json(const RunResult& r) {
    using nlohmann::json;
    const VerificationReport& rep = r.report;
    json series = json::array();
    for (const auto& t : r.series.terms()) series.push_back({t.k, t.a, t.b});
    const Eigen::Vector3d p = r.obstacles.rotation.transpose() * r.obstacles.pole.xyz();
    json j;
    j["v"] = 1;
    j["params"] = {{"epsilon", r.params.epsilon}, {"delta", r.params.figure8.delta()}};
    j["grid"] = {{"n_theta", rep.grid.n_theta}, {"n_t", rep.grid.n_t}};
    j["sigma_min"] = finite_or_null(rep.sigma_min);
    j["avoidance_margin"] = finite_or_null(rep.avoidance_margin);
    j["certified_radius"] = finite_or_null(rep.certified_radius);
    j["lipschitz"] = finite_or_null(rep.lipschitz_estimate);
    j["alpha"] = finite_or_null(rep.alpha);
    j["ell_delta"] = finite_or_null(rep.ell_delta);
    j["degree"] = finite_or_null(rep.degree_estimate);
    j["pass"] = rep.pass;
    j["series"] = series;
    j["side"] = r.side == Side::below ? "below" : "above";
    j["pole"] = {p.x(), p.y(), p.z()};
    j["obstacles"] = r.obstacles.raw.size();
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j.dump(2) + "\n";
}

namespace {

struct SurfaceSample {
    Eigen::Vector3d point;
    Eigen::Vector3d normal;
};

template <class Fn>
void for_each_sample(const RunResult& r, const Grid& grid, Fn&& fn) {
    const Frame frame(r.series, r.side);
    const ParametricImmersion surface = extend(base_circle(), frame, r.params);
    const Eigen::Matrix3d back = r.obstacles.rotation.transpose();
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j < grid.n_t; ++j) {
            const Vec u = params2(grid.h_theta() * i, grid.h_t() * j);
            const Vec x = surface(u);
            const Vec n = normal_from_jacobian(surface.jacobian(u), frame.orientation());
            fn(SurfaceSample{back * Eigen::Vector3d(x[0], x[1], x[2]),
                             back * Eigen::Vector3d(n[0], n[1], n[2])});
        }
    }
}

}  // namespace

void write_obj(std::ostream& out, const RunResult& r, const Grid& grid) {
    std::vector<SurfaceSample> samples;
    samples.reserve(static_cast<std::size_t>(grid.n_theta) * grid.n_t);
    for_each_sample(r, grid, [&](const SurfaceSample& s) { samples.push_back(s); });
    out << "# gauss-map-avoiding torus, " << grid.n_theta << "x" << grid.n_t << "\n";
    for (const auto& s : samples) {
        out << "v " << fmt(s.point.x()) << ' ' << fmt(s.point.y()) << ' ' << fmt(s.point.z()) << '\n';
    }
    for (const auto& s : samples) {
        out << "vn " << fmt(s.normal.x()) << ' ' << fmt(s.normal.y()) << ' ' << fmt(s.normal.z())
            << '\n';
    }
    auto id = [&](int i, int j) {
        return (i % grid.n_theta) * grid.n_t + (j % grid.n_t) + 1;
    };
    for (int i = 0; i < grid.n_theta; ++i) {
        for (int j = 0; j < grid.n_t; ++j) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            out << "f " << a << "//" << a << ' ' << b << "//" << b << ' ' << c << "//" << c << ' ' << d
                << "//" << d << '\n';
        }
    }
}

void write_gauss_cloud(std::ostream& out, const RunResult& r, const Grid& grid) {
    const std::size_t n = static_cast<std::size_t>(grid.n_theta) * grid.n_t + r.obstacles.raw.size();
    out << "ply\nformat ascii 1.0\nelement vertex " << n
        << "\nproperty float x\nproperty float y\nproperty float z\nproperty uchar obstacle\n"
           "end_header\n";
    for_each_sample(r, grid, [&](const SurfaceSample& s) {
        out << fmt(s.normal.x()) << ' ' << fmt(s.normal.y()) << ' ' << fmt(s.normal.z()) << " 0\n";
    });
    for (const auto& x : r.obstacles.raw) {
        out << fmt(x[0]) << ' ' << fmt(x[1]) << ' ' << fmt(x[2]) << " 1\n";
    }
}

int run_construct(const RunConfig& config, std::ostream& log, std::ostream& out) {
    std::vector<UnitVector> raw;
    try {
        validate(config);
        check_writable(config.report_path, "--report");
        check_writable(config.mesh_path, "--mesh");
        check_writable(config.cloud_path, "--gauss-cloud");
        if (config.command == Command::export_mesh && config.mesh_path.empty()) {
            throw std::invalid_argument("export-mesh needs --mesh");
        }
        raw = config.points_path.empty() ? canonical_tetrahedron() : load_obstacles(config.points_path);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::io;
    }

    RunResult result;
    int code = exit_code::ok;
    try {
        result = run_pipeline(raw, config);
        if (!result.report.pass) code = exit_code::certification;
    } catch (const AntipodalPairError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::antipodal;
    } catch (const SeparationError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::fit;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::certification;
    }

    try {
        const std::string json = report_json(result);
        if (config.report_path.empty()) {
            out << json;
        } else {
            open_out(config.report_path) << json;
        }
        if (code == exit_code::ok || config.command == Command::export_mesh) {
            if (!config.mesh_path.empty()) {
                std::ofstream f = open_out(config.mesh_path);
                write_obj(f, result, config.export_grid);
            }
            if (!config.cloud_path.empty()) {
                std::ofstream f = open_out(config.cloud_path);
                write_gauss_cloud(f, result, config.export_grid);
            }
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::io;
    }
    log << (result.report.pass ? "pass" : "FAIL") << ": epsilon " << result.params.epsilon
        << ", delta " << result.params.figure8.delta() << ", certified radius "
        << result.report.certified_radius << '\n';
    return code;
}

ParametricImmersion parse_spin_program(std::istream& in) {
    std::optional<ParametricImmersion> map;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        std::istringstream ls(strip_comment(line));
        std::string word;
        if (!(ls >> word)) continue;
        auto fail = [&](const std::string& why) {
            return std::runtime_error("spin program line " + std::to_string(lineno) + ": " + why);
        };
        std::vector<double> nums;
        double v;
        while (ls >> v) nums.push_back(v);
        if (!ls.eof()) throw fail("expected numbers after '" + word + "'");
        if (word == "point" || word == "circle") {
            if (map) throw fail("only one profile is allowed");
            const std::size_t skip = word == "circle" ? 1 : 0;
            if (nums.size() < skip + 1 || nums.size() - skip > kMaxDim) throw fail("bad coordinate count");
            Vec c(static_cast<int>(nums.size() - skip));
            for (std::size_t i = skip; i < nums.size(); ++i) c[static_cast<int>(i - skip)] = nums[i];
            map = word == "point" ? constant_point(c) : planar_circle(nums[0], c);
        } else if (word == "spin") {
            if (!map) throw fail("spin before a profile");
            if (nums.size() > 1) throw fail("spin takes at most one axis index");
            const int axis = nums.empty() ? -1 : static_cast<int>(nums[0]);
            if (!nums.empty() && (nums[0] != axis || axis < 0)) throw fail("bad axis index");
            map = spin(*map, axis);
        } else {
            throw fail("unknown directive '" + word + "'");
        }
    }
    if (!map) throw std::runtime_error("spin program: no profile");
    return *map;
}

int run_spin(const RunConfig& config, std::ostream& log, std::ostream& out) {
    std::optional<ParametricImmersion> map;
    try {
        validate(config);
        check_writable(config.report_path, "--report");
        std::ifstream f(config.spin_path);
        if (!f) throw std::runtime_error("cannot read spin program: " + config.spin_path);
        map = parse_spin_program(f);
    } catch (const GeometryError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::certification;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::io;
    }
    nlohmann::json j;
    j["v"] = 1;
    j["domain_dim"] = map->domain_dim();
    j["ambient_dim"] = map->ambient_dim();
    j["grid"] = {{"n_theta", config.grid.n_theta}, {"n_t", config.grid.n_t}};
    bool pass = true;
    if (map->domain_dim() >= 1 && map->domain_dim() <= 2) {
        const double sigma = immersion_check(*map, config.grid);
        j["sigma_min"] = sigma;
        pass = sigma > 0.0;
        if (map->domain_dim() == 2 && map->ambient_dim() == 3) {
            const double deg = degree_check(*map, 1.0, config.grid);
            j["degree"] = deg;
            pass = pass && std::abs(deg) < kDegreeTolerance;
        }
    }
    j["pass"] = pass;
    try {
        const std::string text = j.dump(2) + "\n";
        if (config.report_path.empty()) {
            out << text;
        } else {
            open_out(config.report_path) << text;
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::io;
    }
    return pass ? exit_code::ok : exit_code::certification;
}

int run_figure_eight_info(double delta, std::optional<double> arc, std::ostream& out) {
    const FigureEightParams fig(delta);
    nlohmann::json j;
    j["delta"] = delta;
    j["ell_delta"] = figure_eight::spherical_image_length(fig);
    j["max_normal_angle"] = kPi / 2.0 + std::atan(2.0 * delta);
    if (arc) {
        j["arc"] = *arc;
        j["max_delta_for_arc"] = figure_eight::max_delta_for_arc(*arc);
    }
    out << j.dump(2) << '\n';
    return exit_code::ok;
}

}  // namespace gaussmiss
