#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gaussmiss/odd_series.hpp"
#include "gaussmiss/sphere.hpp"

namespace gaussmiss {

/// Obstacle points after the rigid motion that puts the chosen pole on the
/// z-axis. points[i] == rotation * raw[i].
struct ObstacleSet {
    std::vector<UnitVector> points;
    std::vector<UnitVector> raw;
    UnitVector pole{0.0, 0.0, -1.0};
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

inline constexpr double kAntipodalTolerance = 1e-6;
inline constexpr double kPoleRejectDistance = 1e-3;

/// Distance from a candidate pole to everything that disqualifies it: the
/// obstacles, their antipodes (an obstacle sitting exactly at -candidate is
/// allowed) and the great circles through pairs of obstacles other than
/// -candidate.
double pole_clearance(const UnitVector& candidate, std::span<const UnitVector> raw);

/// Applies the smallest rotation taking `pole` to the nearer of +-e3.
ObstacleSet align_to_pole(std::span<const UnitVector> raw, const UnitVector& pole);

/// Tries -e3, +e3, then up to 1e5 seeded random candidates. Stops at the
/// first candidate with clearance >= kPreferredClearance, otherwise keeps the
/// best admissible one. Throws AntipodalPairError for antipodal input and
/// GeometryError when nothing clears kPoleRejectDistance.
ObstacleSet choose_pole(std::span<const UnitVector> raw, std::uint64_t seed);

inline constexpr double kPreferredClearance = 0.1;
inline constexpr int kMaxPoleCandidates = 100000;

struct SeparatingFit {
    OddHarmonicSeries series;
    /// Side of the graph curve tanlat = z(lon) holding the obstacles.
    Side side = Side::above;
    /// Smallest |tanlat(x) - z(lon(x))| over non-pole obstacles (+inf if none).
    double worst_margin = 0.0;
    /// Same, measured as a latitude difference in radians.
    double worst_gap = 0.0;
    /// Sampled angular distance from the non-pole obstacles to the curve.
    double clearance = 0.0;
};

class SeparationFitError : public SeparationError {
  public:
    SeparationFitError(const std::string& what, std::size_t worst_index, double worst_margin)
        : SeparationError(what), worst_index(worst_index), worst_margin(worst_margin) {}
    std::size_t worst_index;
    double worst_margin;
};

/// Fits an odd harmonic height function whose graph separates the obstacles
/// from their antipodes with tanlat margin >= margin_target. Throws
/// std::invalid_argument for margin_target <= 0 or max_degree < 1 and
/// SeparationFitError when no degree up to max_degree reaches the margin.
SeparatingFit fit_separating_series(const ObstacleSet& obstacles, double margin_target,
                                    int max_degree);

struct PoleAndFit {
    ObstacleSet obstacles;
    SeparatingFit fit;
};

inline constexpr int kPoleSearchCandidates = 24;

/// Fits from choose_pole(raw, seed), from the antipode of the centre of the
/// widest hemisphere around the obstacles, and from `random_draws` seeded
/// random directions whose pole_clearance is >= min_clearance. Returns the
/// successful fits in that order. Throws like choose_pole, or the first
/// SeparationFitError if no fit succeeds.
std::vector<PoleAndFit> pole_fit_candidates(std::span<const UnitVector> raw, std::uint64_t seed,
                                            double margin_target, int max_degree, int random_draws,
                                            double min_clearance = kPreferredClearance);

/// The pole_fit_candidates entry with the largest clearance (earlier entries
/// win ties), using kPoleSearchCandidates - 1 random draws.
PoleAndFit select_pole_and_fit(std::span<const UnitVector> raw, std::uint64_t seed,
                               double margin_target, int max_degree);

/// Orthonormal normal frame along the unit circle f(theta) = (cos, sin, 0):
///   N2 = (cos, sin, z) / sqrt(1 + z^2),   N1 = s * f' x N2.
/// s = +1 when the obstacles lie above the graph of z; s = -1 mirrors N1 so
/// the semicircle centred at N1 still avoids obstacles lying below it.
class Frame {
  public:
    explicit Frame(OddHarmonicSeries z, Side obstacle_side = Side::above);

    const OddHarmonicSeries& series() const { return z_; }
    double orientation() const { return sign_; }
    Side obstacle_side() const { return sign_ > 0 ? Side::above : Side::below; }
    /// The pole contained in every obstacle-free semicircle.
    Eigen::Vector3d free_pole() const { return {0.0, 0.0, -sign_}; }

    static Eigen::Vector3d base(double theta);
    static Eigen::Vector3d base_d(double theta);
    static Eigen::Vector3d base_dd(double theta);

    Eigen::Vector3d n1(double theta) const;
    Eigen::Vector3d n2(double theta) const;
    Eigen::Vector3d dn1(double theta) const;
    Eigen::Vector3d dn2(double theta) const;

  private:
    OddHarmonicSeries z_;
    double sign_;
};

Frame build_frame(const OddHarmonicSeries& z, Side obstacle_side = Side::above);

/// Vertices of a regular tetrahedron with one vertex at the north pole and the
/// others at latitude asin(-1/3), longitudes pi/3, pi, 5pi/3. z = cos(3 theta)
/// separates this orientation.
std::vector<UnitVector> canonical_tetrahedron();

}  // namespace gaussmiss
