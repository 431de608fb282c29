#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gaussmiss/odd_series.hpp"
#include "gaussmiss/types.hpp"

namespace gaussmiss {

/// A point of S^n stored as a unit (n+1)-vector.
class UnitVector {
  public:
    /// Normalizes; throws DegenerateInput for near-zero input.
    explicit UnitVector(const Vec& v);
    UnitVector(double x, double y, double z);

    static UnitVector axis(int dim, int i, double sign = 1.0);

    const Vec& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[i]; }
    double dot(const UnitVector& o) const { return coords_.dot(o.coords_); }
    UnitVector operator-() const;

    /// Requires dim() == 3.
    Eigen::Vector3d xyz() const;

  private:
    struct Trusted {};
    UnitVector(const Vec& v, Trusted) : coords_(v) {}
    Vec coords_;
};

enum class PoleFlag { none, north, south };

/// Longitude and tangent of latitude of a point of S^2. lon and tanlat are
/// meaningful only when pole == PoleFlag::none.
struct LonLat {
    double lon = 0.0;
    double tanlat = 0.0;
    PoleFlag pole = PoleFlag::none;
};

inline constexpr double kPoleTolerance = 1e-14;

/// Great circle phi |-> cos(phi) b1 + sin(phi) b2.
class GreatCircle {
  public:
    GreatCircle(const UnitVector& b1, const UnitVector& b2);

    const UnitVector& b1() const { return b1_; }
    const UnitVector& b2() const { return b2_; }
    Vec at(double phi) const;
    /// Angular distance from x to the nearest point of the circle.
    double distance_to(const UnitVector& x) const;

  private:
    UnitVector b1_;
    UnitVector b2_;
};

double angular_distance(const UnitVector& a, const UnitVector& b);

/// Angle between raw 3-vectors assumed unit. Uses atan2 so it stays accurate
/// near 0 and pi, where acos loses about half the digits.
inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Indices (i, j), i < j, of the first pair with xi within tol of -xj.
std::optional<std::pair<std::size_t, std::size_t>> has_antipodal_pair(
    std::span<const UnitVector> points, double tol);

LonLat to_lonlat(const UnitVector& x);
LonLat to_lonlat(const Eigen::Vector3d& x);
/// Inverse of to_lonlat off the poles.
UnitVector from_lonlat(double lon, double tanlat);
/// Latitude/longitude in degrees, as used by obstacle files.
UnitVector from_degrees(double lon_deg, double lat_deg);

enum class Side { above, below, on };

struct SideResult {
    Side side = Side::on;
    /// tanlat(x) - z(lon(x)); +inf at the north pole, -inf at the south pole.
    double margin = 0.0;
};

/// Classifies x against the graph tanlat = z(lon). |margin| < tol is "on".
SideResult side_of_graph_curve(const UnitVector& x, const OddHarmonicSeries& z,
                               double tol = 1e-12);

/// Throws DegenerateInput when u is (anti)parallel to p.
GreatCircle great_circle_through(const UnitVector& p, const UnitVector& u);

}  // namespace gaussmiss
