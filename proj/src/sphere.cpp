#include "gaussmiss/sphere.hpp"

#include <cmath>
#include <limits>

namespace gaussmiss {

namespace {

constexpr double kMinNorm = 1e-12;

double wrap_two_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod can return 2pi - tiny -> keep in [0, 2pi)
    return r >= kTwoPi ? 0.0 : r;
}

}  // namespace

UnitVector::UnitVector(const Vec& v) {
    const double n = v.norm();
    if (!(n > kMinNorm) || !std::isfinite(n)) {
        throw DegenerateInput("unit vector: cannot normalize a near-zero or non-finite vector");
    }
    coords_ = v / n;
}

UnitVector::UnitVector(double x, double y, double z) : UnitVector(Vec(Eigen::Vector3d(x, y, z))) {}

UnitVector UnitVector::axis(int dim, int i, double sign) {
    Vec v = Vec::Zero(dim);
    v[i] = sign >= 0.0 ? 1.0 : -1.0;
    return UnitVector(v, Trusted{});
}

UnitVector UnitVector::operator-() const { return UnitVector(Vec(-coords_), Trusted{}); }

Eigen::Vector3d UnitVector::xyz() const {
    if (coords_.size() != 3) throw std::logic_error("unit vector: xyz() needs a point of S^2");
    return Eigen::Vector3d(coords_[0], coords_[1], coords_[2]);
}

GreatCircle::GreatCircle(const UnitVector& b1, const UnitVector& b2) : b1_(b1), b2_(b2) {
    if (b1.dim() != b2.dim()) throw std::invalid_argument("great circle: dimension mismatch");
    if (std::abs(b1.dot(b2)) >= 1e-12) throw DegenerateInput("great circle: basis is not orthogonal");
}

Vec GreatCircle::at(double phi) const {
    return std::cos(phi) * b1_.coords() + std::sin(phi) * b2_.coords();
}

double GreatCircle::distance_to(const UnitVector& x) const {
    const double c1 = x.dot(b1_);
    const double c2 = x.dot(b2_);
    // x = c1 b1 + c2 b2 + r, |r| = sin(distance)
    const double in_plane = std::hypot(c1, c2);
    const double off = (x.coords() - c1 * b1_.coords() - c2 * b2_.coords()).norm();
    return std::atan2(off, in_plane);
}

double angular_distance(const UnitVector& a, const UnitVector& b) {
    return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

std::optional<std::pair<std::size_t, std::size_t>> has_antipodal_pair(
    std::span<const UnitVector> points, double tol) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (angular_distance(points[i], -points[j]) < tol) return std::pair{i, j};
        }
    }
    return std::nullopt;
}

LonLat to_lonlat(const Eigen::Vector3d& x) {
    LonLat ll;
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 < kPoleTolerance) {
        ll.pole = x[2] > 0.0 ? PoleFlag::north : PoleFlag::south;
        return ll;
    }
    ll.lon = wrap_two_pi(std::atan2(x[1], x[0]));
    ll.tanlat = x[2] / std::sqrt(r2);
    return ll;
}

LonLat to_lonlat(const UnitVector& x) { return to_lonlat(x.xyz()); }

UnitVector from_lonlat(double lon, double tanlat) {
    return UnitVector(std::cos(lon), std::sin(lon), tanlat);
}

UnitVector from_degrees(double lon_deg, double lat_deg) {
    const double lon = lon_deg * kPi / 180.0;
    const double lat = lat_deg * kPi / 180.0;
    return UnitVector(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
}

SideResult side_of_graph_curve(const UnitVector& x, const OddHarmonicSeries& z, double tol) {
    const LonLat ll = to_lonlat(x);
    if (ll.pole == PoleFlag::north) return {Side::above, std::numeric_limits<double>::infinity()};
    if (ll.pole == PoleFlag::south) return {Side::below, -std::numeric_limits<double>::infinity()};
    const double m = ll.tanlat - z(ll.lon);
    if (std::abs(m) < tol) return {Side::on, m};
    return {m > 0.0 ? Side::above : Side::below, m};
}

GreatCircle great_circle_through(const UnitVector& p, const UnitVector& u) {
    const Vec r = u.coords() - u.dot(p) * p.coords();
    if (r.norm() < 1e-10) {
        throw DegenerateInput("great circle: direction is parallel to the pole");
    }
    // Second Gram-Schmidt pass keeps |b1.b2| at rounding level.
    UnitVector b2(r);
    const Vec r2 = b2.coords() - b2.dot(p) * p.coords();
    return GreatCircle(p, UnitVector(r2));
}

}  // namespace gaussmiss
