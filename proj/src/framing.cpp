#include "gaussmiss/framing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace gaussmiss {

namespace {

// An obstacle within this of -candidate is treated as sitting at -p.
constexpr double kCoincident = 1e-9;

double circular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return d > kPi ? kTwoPi - d : d;
}

Eigen::Matrix3d rotation_taking(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
    const Eigen::Vector3d axis = from.cross(to);
    const double s = axis.norm();
    const double c = from.dot(to);
    if (s < 1e-15) {
        // from == to here: align_to_pole never asks for a half turn.
        return Eigen::Matrix3d::Identity();
    }
    return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

}  // namespace

double pole_clearance(const UnitVector& candidate, std::span<const UnitVector> raw) {
    double clearance = kPi;
    std::vector<const UnitVector*> others;
    others.reserve(raw.size());
    for (const auto& x : raw) {
        clearance = std::min(clearance, angular_distance(candidate, x));
        const double to_antipode = angular_distance(candidate, -x);
        if (to_antipode < kCoincident) continue;  // x == -p is allowed
        clearance = std::min(clearance, to_antipode);
        others.push_back(&x);
    }
    for (std::size_t i = 0; i < others.size(); ++i) {
        for (std::size_t j = i + 1; j < others.size(); ++j) {
            const Eigen::Vector3d n = others[i]->xyz().cross(others[j]->xyz());
            const double nn = n.norm();
            if (nn < 1e-12) continue;  // coincident points: no circle
            const double d = std::asin(std::min(1.0, std::abs(candidate.xyz().dot(n)) / nn));
            clearance = std::min(clearance, d);
        }
    }
    return clearance;
}

ObstacleSet align_to_pole(std::span<const UnitVector> raw, const UnitVector& pole) {
    const Eigen::Vector3d p = pole.xyz();
    const Eigen::Vector3d target(0.0, 0.0, p.z() > 0.0 ? 1.0 : -1.0);
    ObstacleSet set;
    set.rotation = rotation_taking(p, target);
    set.pole = UnitVector(target.x(), target.y(), target.z());
    set.raw.assign(raw.begin(), raw.end());
    set.points.reserve(raw.size());
    for (const auto& x : raw) {
        const Eigen::Vector3d y = set.rotation * x.xyz();
        set.points.emplace_back(y.x(), y.y(), y.z());
    }
    return set;
}

ObstacleSet choose_pole(std::span<const UnitVector> raw, std::uint64_t seed) {
    for (const auto& x : raw) {
        if (x.dim() != 3) throw std::invalid_argument("choose_pole: obstacles must lie on S^2");
    }
    if (auto pair = has_antipodal_pair(raw, kAntipodalTolerance)) {
        std::ostringstream msg;
        msg << "obstacle set contains an antipodal pair (points " << pair->first << " and "
            << pair->second << ")";
        throw AntipodalPairError(msg.str(), pair->first, pair->second);
    }

    std::optional<UnitVector> best;
    double best_clearance = -1.0;
    auto consider = [&](const UnitVector& c) {
        const double cl = pole_clearance(c, raw);
        if (cl > best_clearance) {
            best_clearance = cl;
            best = c;
        }
        return cl >= kPreferredClearance;
    };

    bool done = consider(UnitVector(0.0, 0.0, -1.0)) || consider(UnitVector(0.0, 0.0, 1.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; !done && i < kMaxPoleCandidates; ++i) {
        const double x = normal(rng);
        const double y = normal(rng);
        const double z = normal(rng);
        if (x * x + y * y + z * z < 1e-12) continue;
        done = consider(UnitVector(x, y, z));
    }
    if (!best || best_clearance < kPoleRejectDistance) {
        std::ostringstream msg;
        msg << "choose_pole: no admissible pole among " << kMaxPoleCandidates + 2
            << " candidates (best clearance " << best_clearance << " rad)";
        throw GeometryError(msg.str());
    }
    return align_to_pole(raw, *best);
}

namespace {

struct Constraint {
    double lon;
    double lat;
    double tanlat;
    std::size_t index;
};

/// Latitude midline between the obstacles (which must stay above) and their
/// antipodes (which must stay below), using Lipschitz cones of slope `slope`.
class Midline {
  public:
    Midline(std::span<const Constraint> cs, double slope) : cs_(cs), slope_(slope) {}

    double upper(double theta) const {
        double u = kPi / 2.0;
        for (const auto& c : cs_) u = std::min(u, c.lat + slope_ * circular_distance(theta, c.lon));
        return u;
    }
    double lower(double theta) const {
        double l = -kPi / 2.0;
        for (const auto& c : cs_) {
            l = std::max(l, -c.lat - slope_ * circular_distance(theta, c.lon + kPi));
        }
        return l;
    }
    double operator()(double theta) const {
        return std::clamp(0.5 * (upper(theta) + lower(theta)), -kMaxLat, kMaxLat);
    }

    static constexpr double kMaxLat = 1.4;

  private:
    std::span<const Constraint> cs_;
    double slope_;
};

struct Candidate {
    OddHarmonicSeries series;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_gap = std::numeric_limits<double>::infinity();
    double clearance = kPi;
    std::size_t worst_index = 0;
};

constexpr int kSamples = 720;
constexpr double kTikhonov = 1e-8;

OddHarmonicSeries least_squares_odd(std::span<const double> thetas, std::span<const double> values,
                                    int degree) {
    const int nfreq = (degree + 1) / 2;
    const auto rows = static_cast<Eigen::Index>(thetas.size());
    Eigen::MatrixXd a(rows, 2 * nfreq);
    Eigen::VectorXd y(rows);
    const double w = 1.0 / std::sqrt(static_cast<double>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (int f = 0; f < nfreq; ++f) {
            const int k = 2 * f + 1;
            a(r, 2 * f) = w * std::cos(k * thetas[r]);
            a(r, 2 * f + 1) = w * std::sin(k * thetas[r]);
        }
        y[r] = w * values[r];
    }
    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal().array() += kTikhonov;
    const Eigen::VectorXd c = normal.ldlt().solve(a.transpose() * y);
    std::vector<HarmonicTerm> terms;
    for (int f = 0; f < nfreq; ++f) terms.push_back({2 * f + 1, c[2 * f], c[2 * f + 1]});
    return OddHarmonicSeries(std::move(terms));
}

Candidate score(const OddHarmonicSeries& z, std::span<const Constraint> cs) {
    Candidate out{z};
    for (const auto& c : cs) {
        const double zc = z(c.lon);
        const double m = c.tanlat - zc;
        const double gap = c.lat - std::atan(zc);
        if (m < out.worst_margin) {
            out.worst_margin = m;
            out.worst_index = c.index;
        }
        out.worst_gap = std::min(out.worst_gap, gap);
    }
    return out;
}

// Angular distance from the constraint points to the sampled graph curve.
// By oddness this is also the distance from their antipodes.
double curve_clearance(const OddHarmonicSeries& z, std::span<const Constraint> cs) {
    static constexpr int kCurveSamples = 1440;
    std::vector<Eigen::Vector3d> curve(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) {
        const double th = kTwoPi * i / kCurveSamples;
        curve[i] = Eigen::Vector3d(std::cos(th), std::sin(th), z(th)).normalized();
    }
    double best = kPi;
    for (const auto& c : cs) {
        const Eigen::Vector3d x = from_lonlat(c.lon, c.tanlat).xyz();
        double cos_max = -1.0;
        for (const auto& p : curve) cos_max = std::max(cos_max, p.dot(x));
        best = std::min(best, std::acos(std::clamp(cos_max, -1.0, 1.0)));
    }
    return best;
}

/// Fit with every constraint required above the curve. Every cone slope and
/// degree is tried; among fits meeting the tanlat margin the one farthest
/// from the constraints on the sphere wins, lower slope and degree on ties.
Candidate fit_above(std::span<const Constraint> cs, double margin_target, int max_degree) {
    static constexpr double kSlopes[] = {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0};

    std::optional<Candidate> chosen;
    Candidate worst_seen;
    worst_seen.worst_margin = -std::numeric_limits<double>::infinity();
    std::vector<double> thetas(kSamples);
    std::vector<double> targets(kSamples);
    for (double slope : kSlopes) {
        const Midline mid(cs, slope);
        for (int i = 0; i < kSamples; ++i) {
            thetas[i] = kTwoPi * i / kSamples;
            targets[i] = std::tan(mid(thetas[i]));
        }
        for (int degree = 1; degree <= max_degree; degree += 2) {
            Candidate c = score(least_squares_odd(thetas, targets, degree), cs);
            if (c.worst_margin > worst_seen.worst_margin) worst_seen = c;
            if (c.worst_margin < margin_target) continue;
            c.clearance = curve_clearance(c.series, cs);
            if (!chosen || c.clearance > chosen->clearance + 1e-9) chosen = c;
        }
    }
    if (!chosen) {
        std::ostringstream msg;
        msg << "separating fit: no odd series up to degree " << max_degree
            << " reaches margin " << margin_target << " (worst obstacle " << worst_seen.worst_index
            << ", margin " << worst_seen.worst_margin << ")";
        throw SeparationFitError(msg.str(), worst_seen.worst_index, worst_seen.worst_margin);
    }
    return *chosen;
}

double sampled_sup(const OddHarmonicSeries& z) {
    double s = 0.0;
    for (int i = 0; i < 4096; ++i) s = std::max(s, std::abs(z(kTwoPi * i / 4096)));
    return s;
}

}  // namespace

SeparatingFit fit_separating_series(const ObstacleSet& obstacles, double margin_target,
                                    int max_degree) {
    if (!(margin_target > 0.0)) {
        throw std::invalid_argument("separating fit: margin_target must be positive");
    }
    if (max_degree < 1) throw std::invalid_argument("separating fit: max_degree must be >= 1");
    if (std::abs(std::abs(obstacles.pole[2]) - 1.0) > 1e-12) {
        throw std::invalid_argument("separating fit: obstacle set is not aligned to a pole");
    }

    bool north = false;
    bool south = false;
    std::vector<Constraint> above;
    for (std::size_t i = 0; i < obstacles.points.size(); ++i) {
        const LonLat ll = to_lonlat(obstacles.points[i]);
        if (ll.pole == PoleFlag::north) {
            north = true;
        } else if (ll.pole == PoleFlag::south) {
            south = true;
        } else {
            above.push_back({ll.lon, std::atan(ll.tanlat), ll.tanlat, i});
        }
    }
    if (north && south) {
        throw SeparationFitError("separating fit: obstacles at both poles cannot be separated",
                                 0, 0.0);
    }

    // Obstacles below z are obstacles above -z.
    std::vector<Constraint> below = above;
    for (auto& c : below) {
        c.lat = -c.lat;
        c.tanlat = -c.tanlat;
    }

    if (above.empty()) {
        const double inf = std::numeric_limits<double>::infinity();
        return {OddHarmonicSeries::zero(), south ? Side::below : Side::above, inf, inf, kPi};
    }

    std::optional<SeparatingFit> best;
    double best_sup = std::numeric_limits<double>::infinity();
    std::optional<SeparationFitError> failure;
    auto attempt = [&](std::span<const Constraint> cs, Side side) {
        try {
            Candidate c = fit_above(cs, margin_target, max_degree);
            OddHarmonicSeries z = side == Side::above ? c.series : c.series.negated();
            const double sup = sampled_sup(z);
            if (sup < best_sup) {
                best_sup = sup;
                best = SeparatingFit{std::move(z), side, c.worst_margin, c.worst_gap, c.clearance};
            }
        } catch (const SeparationFitError& e) {
            if (!failure) failure = e;
        }
    };
    if (!south) attempt(above, Side::above);
    if (!north) attempt(below, Side::below);
    if (!best) throw *failure;
    return *best;
}

namespace {

// Centre of the hemisphere that contains the obstacles with the widest
// margin, searched over a Fibonacci lattice.
UnitVector widest_hemisphere_centre(std::span<const UnitVector> raw) {
    constexpr int kLattice = 4000;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    Eigen::Vector3d best(0.0, 0.0, 1.0);
    double best_score = -2.0;
    for (int i = 0; i < kLattice; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / kLattice;
        const double r = std::sqrt(1.0 - z * z);
        const Eigen::Vector3d c(r * std::cos(golden * i), r * std::sin(golden * i), z);
        double score = 2.0;
        for (const auto& x : raw) score = std::min(score, c.dot(x.xyz()));
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return UnitVector(best.x(), best.y(), best.z());
}

}  // namespace

std::vector<PoleAndFit> pole_fit_candidates(std::span<const UnitVector> raw, std::uint64_t seed,
                                            double margin_target, int max_degree, int random_draws,
                                            double min_clearance) {
    const ObstacleSet first = choose_pole(raw, seed);
    std::vector<UnitVector> poles;
    if (!raw.empty()) {
        poles.push_back(-widest_hemisphere_centre(raw));
        std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < 1000 && static_cast<int>(poles.size()) <= random_draws; ++i) {
            const double x = normal(rng), y = normal(rng), z = normal(rng);
            if (x * x + y * y + z * z < 1e-12) continue;
            poles.emplace_back(x, y, z);
        }
    }

    std::vector<PoleAndFit> out;
    std::optional<SeparationFitError> failure;
    auto attempt = [&](const ObstacleSet& obstacles) {
        try {
            out.push_back(PoleAndFit{obstacles, fit_separating_series(obstacles, margin_target, max_degree)});
        } catch (const SeparationFitError& e) {
            if (!failure) failure = e;
        }
    };
    attempt(first);
    for (const auto& c : poles) {
        if (pole_clearance(c, raw) < min_clearance) continue;
        attempt(align_to_pole(raw, c));
    }
    if (out.empty()) throw *failure;
    return out;
}

PoleAndFit select_pole_and_fit(std::span<const UnitVector> raw, std::uint64_t seed,
                               double margin_target, int max_degree) {
    std::vector<PoleAndFit> all =
        pole_fit_candidates(raw, seed, margin_target, max_degree, kPoleSearchCandidates - 1);
    std::size_t best = 0;
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i].fit.clearance > all[best].fit.clearance + 1e-9) best = i;
    }
    return std::move(all[best]);
}

Frame::Frame(OddHarmonicSeries z, Side obstacle_side)
    : z_(std::move(z)), sign_(obstacle_side == Side::below ? -1.0 : 1.0) {
    if (obstacle_side == Side::on) throw std::invalid_argument("frame: obstacle side must be above or below");
}

Eigen::Vector3d Frame::base(double theta) { return {std::cos(theta), std::sin(theta), 0.0}; }
Eigen::Vector3d Frame::base_d(double theta) { return {-std::sin(theta), std::cos(theta), 0.0}; }
Eigen::Vector3d Frame::base_dd(double theta) { return {-std::cos(theta), -std::sin(theta), 0.0}; }

Eigen::Vector3d Frame::n2(double theta) const {
    const double z = z_(theta);
    return Eigen::Vector3d(std::cos(theta), std::sin(theta), z) / std::sqrt(1.0 + z * z);
}

Eigen::Vector3d Frame::n1(double theta) const { return sign_ * base_d(theta).cross(n2(theta)); }

Eigen::Vector3d Frame::dn2(double theta) const {
    const double z = z_(theta);
    const double dz = z_.derivative(theta);
    const double s2 = 1.0 + z * z;
    const double s = std::sqrt(s2);
    const Eigen::Vector3d v(std::cos(theta), std::sin(theta), z);
    const Eigen::Vector3d dv(-std::sin(theta), std::cos(theta), dz);
    return dv / s - v * (z * dz) / (s2 * s);
}

Eigen::Vector3d Frame::dn1(double theta) const {
    return sign_ * (base_dd(theta).cross(n2(theta)) + base_d(theta).cross(dn2(theta)));
}

Frame build_frame(const OddHarmonicSeries& z, Side obstacle_side) { return Frame(z, obstacle_side); }

std::vector<UnitVector> canonical_tetrahedron() {
    const double lat = std::asin(-1.0 / 3.0);
    std::vector<UnitVector> pts{UnitVector(0.0, 0.0, 1.0)};
    for (double lon : {kPi / 3.0, kPi, 5.0 * kPi / 3.0}) {
        pts.emplace_back(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
    }
    return pts;
}

}  // namespace gaussmiss
