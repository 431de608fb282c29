#include "gaussmiss/verify.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace gaussmiss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Rows of theta per tile; fixed so sums do not depend on the thread count.
constexpr int kTileRows = 8;

std::atomic<unsigned> g_threads{0};

struct Sample {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    double sigma = 0.0;
    bool ok = false;
};

using SampleFn = std::function<Sample(double, double)>;

struct TileStats {
    double sigma_min = kInf;
    double margin = kInf;
    double lipschitz = 0.0;
    double local_bound = kInf;
    double degree_sum = 0.0;
    bool rank_ok = true;
};

double smallest_singular_value(const Mat& j) {
    if (j.cols() == 1) return j.col(0).norm();
    if (j.cols() == 2) {
        const double a = j.col(0).squaredNorm();
        const double c = j.col(1).squaredNorm();
        const double b = j.col(0).dot(j.col(1));
        const double half = 0.5 * (a + c);
        const double disc = std::hypot(0.5 * (a - c), b);
        return std::sqrt(std::max(0.0, half - disc));
    }
    const Eigen::MatrixXd dense = j;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
    return svd.singularValues().minCoeff();
}

/// Signed area of the spherical triangle (a, b, c), positive when
/// counter-clockwise seen from outside the sphere.
double signed_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Vector3d& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

double min_distance(const Eigen::Vector3d& g, std::span<const Eigen::Vector3d> obstacles) {
    double d = kPi;
    for (const auto& x : obstacles) d = std::min(d, angle_between(g, x));
    return d;
}

template <typename Fn>
void run_tiles(int tiles, Fn&& fn) {
    unsigned n = grid_threads();
    n = std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(tiles)));
    if (n == 1) {
        for (int t = 0; t < tiles; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < tiles; t = next.fetch_add(1)) fn(t);
        });
    }
}

struct GridStats {
    double sigma_min = kInf;
    double margin = kPi;
    double lipschitz = 0.0;
    double local_bound = kInf;
    double degree = 0.0;
    bool rank_ok = true;
};

GridStats sample_grid(const SampleFn& sample, std::span<const Eigen::Vector3d> obstacles,
                      const Grid& grid) {
    const int nth = grid.n_theta;
    const int nt = grid.n_t;
    const double ht = grid.h_theta();
    const double htt = grid.h_t();
    const double diag = grid.diagonal();
    const int tiles = (nth + kTileRows - 1) / kTileRows;
    std::vector<TileStats> results(static_cast<std::size_t>(tiles));

    run_tiles(tiles, [&](int tile) {
        const int r0 = tile * kTileRows;
        const int r1 = std::min(r0 + kTileRows, nth);
        const int rows = r1 - r0 + 1;
        std::vector<Sample> s(static_cast<std::size_t>(rows) * nt);
        std::vector<double> dist(s.size(), kPi);
        TileStats st;
        for (int r = 0; r < rows; ++r) {
            const int i = (r0 + r) % nth;
            const double theta = ht * i;
            for (int j = 0; j < nt; ++j) {
                const std::size_t idx = static_cast<std::size_t>(r) * nt + j;
                s[idx] = sample(theta, htt * j);
                if (s[idx].ok) dist[idx] = min_distance(s[idx].g, obstacles);
                if (r + 1 == rows) continue;  // halo row belongs to the next tile
                st.sigma_min = std::min(st.sigma_min, s[idx].sigma);
                if (!s[idx].ok) {
                    st.rank_ok = false;
                    continue;
                }
                st.margin = std::min(st.margin, dist[idx]);
            }
        }
        if (st.rank_ok) {
            for (int r = 0; r + 1 < rows; ++r) {
                for (int j = 0; j < nt; ++j) {
                    const int j1 = (j + 1) % nt;
                    const auto at = [&](int rr, int jj) -> const Sample& {
                        return s[static_cast<std::size_t>(rr) * nt + jj];
                    };
                    const Sample& a = at(r, j);
                    const Sample& b = at(r + 1, j);
                    const Sample& c = at(r + 1, j1);
                    const Sample& d = at(r, j1);
                    if (!b.ok || !c.ok) {
                        st.rank_ok = false;
                        continue;
                    }
                    const double rate_theta =
                        std::max(angle_between(a.g, b.g), angle_between(d.g, c.g)) / ht;
                    const double rate_t =
                        std::max(angle_between(a.g, d.g), angle_between(b.g, c.g)) / htt;
                    const double cell_rate = std::hypot(rate_theta, rate_t);
                    st.lipschitz = std::max(st.lipschitz, cell_rate);
                    const auto dist_at = [&](int rr, int jj) {
                        return dist[static_cast<std::size_t>(rr) * nt + jj];
                    };
                    const double corner_min =
                        std::min({dist_at(r, j), dist_at(r + 1, j), dist_at(r + 1, j1), dist_at(r, j1)});
                    st.local_bound = std::min(st.local_bound, corner_min - cell_rate * diag / 2.0);
                    st.degree_sum += signed_triangle_area(a.g, b.g, c.g) +
                                     signed_triangle_area(a.g, c.g, d.g);
                }
            }
        }
        results[static_cast<std::size_t>(tile)] = st;
    });

    GridStats out;
    double degree_sum = 0.0;
    for (const auto& st : results) {
        out.sigma_min = std::min(out.sigma_min, st.sigma_min);
        out.margin = std::min(out.margin, st.margin);
        out.lipschitz = std::max(out.lipschitz, st.lipschitz);
        out.local_bound = std::min(out.local_bound, st.local_bound);
        out.rank_ok = out.rank_ok && st.rank_ok;
        degree_sum += st.degree_sum;
    }
    out.degree = degree_sum / (4.0 * kPi);
    return out;
}

SampleFn surface_sampler(const ParametricImmersion& surface, double orientation) {
    if (surface.domain_dim() != 2 || surface.ambient_dim() != 3) {
        throw std::invalid_argument("grid verification expects a surface in R^3");
    }
    return [&surface, orientation](double theta, double t) {
        Sample s;
        const Mat j = surface.jacobian(params2(theta, t));
        s.sigma = smallest_singular_value(j);
        const Eigen::Vector3d n = Eigen::Vector3d(j.col(0)).cross(Eigen::Vector3d(j.col(1)));
        const double norm = n.norm();
        if (norm >= kRankTolerance) {
            s.g = (orientation < 0.0 ? -1.0 : 1.0) * n / norm;
            s.ok = true;
        }
        return s;
    };
}

std::vector<Eigen::Vector3d> as_xyz(std::span<const UnitVector> pts) {
    std::vector<Eigen::Vector3d> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.xyz());
    return out;
}

void check_grid(const Grid& grid) {
    if (grid.n_theta < kMinGridResolution || grid.n_t < kMinGridResolution) {
        throw std::invalid_argument("grid resolution must be at least 16 in each direction");
    }
}

AvoidanceResult avoidance_from(const GridStats& st, const Grid& grid) {
    AvoidanceResult r;
    r.margin = st.margin;
    r.lipschitz = st.lipschitz;
    r.certified_radius = st.margin - st.lipschitz * grid.diagonal() / 2.0;
    r.local_bound = st.local_bound;
    return r;
}

}  // namespace

double Grid::diagonal() const { return std::hypot(h_theta(), h_t()); }

Grid parse_grid(const std::string& text) {
    Grid g;
    const auto x = text.find_first_of("xX");
    auto parse_int = [&](std::string_view sv) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec != std::errc{} || ptr != sv.data() + sv.size() || v <= 0) {
            throw std::invalid_argument("grid: cannot parse '" + text + "' (expected NxM)");
        }
        return v;
    };
    const std::string_view sv(text);
    if (x == std::string::npos) {
        g.n_theta = g.n_t = parse_int(sv);
    } else {
        g.n_theta = parse_int(sv.substr(0, x));
        g.n_t = parse_int(sv.substr(x + 1));
    }
    return g;
}

void set_grid_threads(unsigned threads) { g_threads = threads; }

unsigned grid_threads() {
    const unsigned n = g_threads.load();
    if (n != 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

double immersion_check(const ParametricImmersion& map, const Grid& grid) {
    check_grid(grid);
    const int k = map.domain_dim();
    if (k == 1) {
        double s = kInf;
        for (int i = 0; i < grid.n_theta; ++i) {
            Vec u(1);
            u << grid.h_theta() * i;
            s = std::min(s, smallest_singular_value(map.jacobian(u)));
        }
        return s;
    }
    if (k != 2) throw std::invalid_argument("immersion_check: expects one or two parameters");
    const int tiles = (grid.n_theta + kTileRows - 1) / kTileRows;
    std::vector<double> mins(static_cast<std::size_t>(tiles), kInf);
    run_tiles(tiles, [&](int tile) {
        double s = kInf;
        for (int i = tile * kTileRows; i < std::min((tile + 1) * kTileRows, grid.n_theta); ++i) {
            for (int j = 0; j < grid.n_t; ++j) {
                s = std::min(s, smallest_singular_value(
                                    map.jacobian(params2(grid.h_theta() * i, grid.h_t() * j))));
            }
        }
        mins[static_cast<std::size_t>(tile)] = s;
    });
    return *std::min_element(mins.begin(), mins.end());
}

AlphaResult alpha_margin(const ObstacleSet& obstacles, const Frame& frame, int n_theta) {
    if (n_theta < kMinGridResolution) throw std::invalid_argument("alpha_margin: n_theta must be >= 16");
    AlphaResult res{kPi, 0.0};
    std::vector<Eigen::Vector3d> at_poles;
    for (const auto& x : obstacles.points) {
        const LonLat ll = to_lonlat(x);
        if (ll.pole != PoleFlag::none) {
            at_poles.push_back(x.xyz());
            continue;
        }
        const double a = 2.0 * angle_between(frame.n1(ll.lon), x.xyz()) - kPi;
        if (a < res.alpha) res = {a, ll.lon};
    }
    if (!at_poles.empty()) {
        const double h = kTwoPi / n_theta;
        double rate = 0.0;
        double best = kInf;
        double best_theta = 0.0;
        for (int i = 0; i < n_theta; ++i) {
            const double theta = h * i;
            const Eigen::Vector3d n1 = frame.n1(theta);
            rate = std::max(rate, frame.dn1(theta).norm());
            for (const auto& p : at_poles) {
                const double a = 2.0 * angle_between(n1, p) - kPi;
                if (a < best) {
                    best = a;
                    best_theta = theta;
                }
            }
        }
        // Between samples the half-arc can shrink by at most rate * h / 2.
        best -= 2.0 * rate * h / 2.0;
        if (best < res.alpha) res = {best, best_theta};
    }
    return res;
}

AvoidanceResult avoidance_check(const ParametricImmersion& surface, double orientation,
                                std::span<const UnitVector> obstacles, const Grid& grid) {
    check_grid(grid);
    const auto xs = as_xyz(obstacles);
    const GridStats st = sample_grid(surface_sampler(surface, orientation), xs, grid);
    if (!st.rank_ok) throw RankDeficiency("avoidance_check: Gauss map undefined at a grid sample");
    return avoidance_from(st, grid);
}

AvoidanceResult avoidance_check(const std::function<Eigen::Vector3d(double, double)>& map,
                                std::span<const UnitVector> obstacles, const Grid& grid) {
    check_grid(grid);
    const auto xs = as_xyz(obstacles);
    const SampleFn fn = [&map](double theta, double t) {
        return Sample{map(theta, t), 1.0, true};
    };
    return avoidance_from(sample_grid(fn, xs, grid), grid);
}

double degree_check(const ParametricImmersion& surface, double orientation, const Grid& grid) {
    check_grid(grid);
    const GridStats st = sample_grid(surface_sampler(surface, orientation), {}, grid);
    if (!st.rank_ok) throw RankDeficiency("degree_check: Gauss map undefined at a grid sample");
    return st.degree;
}

double degree_check(const ParametricImmersion& surface, double orientation, const Grid& grid,
                    const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    if (surface.domain_dim() != 2 || surface.ambient_dim() != 3) {
        throw std::invalid_argument("degree_check: expects a surface in R^3");
    }
    const int nu = grid.n_theta;
    const int nv = grid.n_t;
    const double hu = (hi[0] - lo[0]) / nu;
    const double hv = (hi[1] - lo[1]) / nv;
    std::vector<Eigen::Vector3d> g(static_cast<std::size_t>(nu + 1) * (nv + 1));
    for (int i = 0; i <= nu; ++i) {
        for (int j = 0; j <= nv; ++j) {
            const Vec n = normal_from_jacobian(
                surface.jacobian(params2(lo[0] + hu * i, lo[1] + hv * j)), orientation);
            g[static_cast<std::size_t>(i) * (nv + 1) + j] = Eigen::Vector3d(n[0], n[1], n[2]);
        }
    }
    double sum = 0.0;
    const auto at = [&](int i, int j) -> const Eigen::Vector3d& {
        return g[static_cast<std::size_t>(i) * (nv + 1) + j];
    };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            sum += signed_triangle_area(at(i, j), at(i + 1, j), at(i + 1, j + 1)) +
                   signed_triangle_area(at(i, j), at(i + 1, j + 1), at(i, j + 1));
        }
    }
    return sum / (4.0 * kPi);
}

VerificationReport verify_extension(const ObstacleSet& obstacles, const Frame& frame,
                                    const ExtensionParams& params, const Grid& grid) {
    check_grid(grid);
    VerificationReport rep;
    rep.grid = grid;
    rep.epsilon = params.epsilon;
    rep.delta = params.figure8.delta();
    rep.ell_delta = figure_eight::spherical_image_length(params.figure8);
    rep.alpha = alpha_margin(obstacles, frame, grid.n_theta).alpha;

    const ParametricImmersion surface = extend(base_circle(), frame, params);
    const auto xs = as_xyz(obstacles.points);
    const GridStats st = sample_grid(surface_sampler(surface, frame.orientation()), xs, grid);
    rep.sigma_min = st.sigma_min;
    if (!st.rank_ok) {
        rep.sigma_min = 0.0;
        rep.avoidance_margin = 0.0;
        rep.certified_radius = 0.0;
        rep.degree_estimate = 0.0;
        rep.notes.push_back("Gauss map undefined at a grid sample (rank deficiency)");
        rep.pass = false;
        return rep;
    }
    const AvoidanceResult av = avoidance_from(st, grid);
    rep.avoidance_margin = av.margin;
    rep.lipschitz_estimate = av.lipschitz;
    rep.certified_radius = av.certified_radius;
    rep.local_bound = av.local_bound;
    rep.degree_estimate = st.degree;

    if (!(rep.sigma_min > 0.0)) rep.notes.push_back("jacobian rank failure on the grid");
    if (!(rep.certified_radius > 0.0)) rep.notes.push_back("certified radius is not positive");
    if (!(std::abs(rep.degree_estimate) < kDegreeTolerance)) rep.notes.push_back("degree is not zero");
    if (!(rep.alpha > 0.0)) rep.notes.push_back("frame does not satisfy Condition 1 margin");
    rep.pass = rep.sigma_min > 0.0 && rep.certified_radius > 0.0 &&
               std::abs(rep.degree_estimate) < kDegreeTolerance;
    return rep;
}

TuneResult auto_tune(const ObstacleSet& obstacles, const Frame& frame, double target_radius,
                     const Grid& grid) {
    const AlphaResult a = alpha_margin(obstacles, frame, grid.n_theta);
    if (!a.ok()) {
        throw std::invalid_argument("auto_tune: frame does not satisfy Condition 1 margin (alpha = " +
                                    std::to_string(a.alpha) + ")");
    }
    VerificationReport best;
    bool have_best = false;
    double prev_delta = 0.0;
    for (double safety : kDeltaSafetyLadder) {
        const double delta =
            std::min(figure_eight::max_delta_for_arc(safety * a.alpha), kMaxTunedDelta);
        if (delta == prev_delta) continue;
        prev_delta = delta;
        double prev_cert = -std::numeric_limits<double>::infinity();
        for (double eps = 0.125; eps >= kMinTunedEpsilon; eps /= 2.0) {
            const ExtensionParams params(eps, delta);
            VerificationReport rep = verify_extension(obstacles, frame, params, grid);
            if (rep.pass && rep.certified_radius >= target_radius) return {params, rep};
            if (!have_best || rep.certified_radius > best.certified_radius) {
                best = rep;
                have_best = true;
            }
            // The epsilon defect has been absorbed; smaller epsilon only adds work.
            if (rep.sigma_min > 0.0 && rep.certified_radius < prev_cert + kTuneStall) break;
            prev_cert = rep.certified_radius;
        }
    }
    throw CertificationError("auto_tune: cannot certify at this resolution", best);
}

double forecast_radius(const ObstacleSet& obstacles, const Frame& frame, const Grid& grid) {
    const AlphaResult a = alpha_margin(obstacles, frame, kForecastGrid.n_theta);
    if (!a.ok()) return -kInf;
    const auto xs = as_xyz(obstacles.points);
    double best = -kInf;
    double prev_delta = 0.0;
    for (double safety : kDeltaSafetyLadder) {
        const double delta =
            std::min(figure_eight::max_delta_for_arc(safety * a.alpha), kMaxTunedDelta);
        if (delta == prev_delta) continue;
        prev_delta = delta;
        const FigureEightParams fig(delta);
        const SampleFn fn = [&](double theta, double t) {
            return Sample{projected_gauss_at(frame, fig, theta, t), 1.0, true};
        };
        const GridStats st = sample_grid(fn, xs, kForecastGrid);
        best = std::max(best, st.margin - st.lipschitz * grid.diagonal() / 2.0);
    }
    return best;
}

PoleAndFit select_for_certification(std::span<const UnitVector> raw, std::uint64_t seed,
                                    double margin_target, int max_degree, const Grid& grid) {
    PoleAndFit pick = select_pole_and_fit(raw, seed, margin_target, max_degree);
    double best = forecast_radius(pick.obstacles, Frame(pick.fit.series, pick.fit.side), grid);
    for (const auto& stage : kPoleSearchStages) {
        if (best >= kForecastAccept) break;
        for (PoleAndFit& c : pole_fit_candidates(raw, seed, margin_target, max_degree, stage.draws,
                                                 stage.min_clearance)) {
            const double f = forecast_radius(c.obstacles, Frame(c.fit.series, c.fit.side), grid);
            if (f > best + 1e-9) {
                best = f;
                pick = std::move(c);
            }
        }
    }
    return pick;
}

}  // namespace gaussmiss
