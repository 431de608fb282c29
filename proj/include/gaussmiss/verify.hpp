#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gaussmiss/framing.hpp"
#include "gaussmiss/immersion.hpp"

namespace gaussmiss {

/// Periodic sample grid on [0, 2pi)^2: theta_i = 2 pi i / n_theta, t_j = 2 pi j / n_t.
struct Grid {
    int n_theta = 1024;
    int n_t = 1024;

    double h_theta() const { return kTwoPi / n_theta; }
    double h_t() const { return kTwoPi / n_t; }
    double diagonal() const;
};

/// Parses "NxM" (or a single "N" for a square grid).
Grid parse_grid(const std::string& text);

inline constexpr Grid kVerificationGrid{1024, 1024};
inline constexpr Grid kQuickGrid{256, 256};
inline constexpr int kMinGridResolution = 16;
inline constexpr double kDegreeTolerance = 0.01;
inline constexpr double kDeltaSafety = 0.9;
/// Safety factors tried in order by auto_tune; the first is kDeltaSafety.
inline constexpr double kDeltaSafetyLadder[] = {kDeltaSafety, 0.7, 0.5, 0.35, 0.25};
/// auto_tune stops halving epsilon once the certified radius improves by less.
inline constexpr double kTuneStall = 1e-4;
inline constexpr double kMaxTunedDelta = 0.125;
inline constexpr double kMinTunedEpsilon = 1e-6;

/// Worker threads used by grid passes; 0 means hardware concurrency. Results
/// do not depend on this value: tiles have a fixed size and are merged in
/// tile order.
void set_grid_threads(unsigned threads);
unsigned grid_threads();

struct VerificationReport {
    Grid grid;
    double epsilon = 0.0;
    double delta = 0.0;
    double sigma_min = 0.0;
    /// Min angle between sampled Gauss map values and obstacles (pi if none).
    double avoidance_margin = 0.0;
    double alpha = 0.0;
    double ell_delta = 0.0;
    double degree_estimate = 0.0;
    /// Largest finite-difference rate of the Gauss map, radians per radian.
    double lipschitz_estimate = 0.0;
    /// avoidance_margin - lipschitz_estimate * diagonal / 2.
    double certified_radius = 0.0;
    double local_bound = 0.0;
    bool pass = false;
    std::vector<std::string> notes;
};

/// Minimum over the grid of the smallest singular value of the jacobian.
/// 1-parameter maps use n_theta samples; 2-parameter maps the full grid.
/// Throws std::invalid_argument for resolutions below 16.
double immersion_check(const ParametricImmersion& map, const Grid& grid);

struct AlphaResult {
    double alpha = 0.0;
    /// Parameter theta where the minimum is attained.
    double theta = 0.0;
    bool ok() const { return alpha > 0.0; }
};

/// Uniform margin alpha with g(theta) >= pi + alpha, where g(theta) is the
/// length of the longest obstacle-free arc of the normal circle C_theta
/// centred at N1(theta). Off-pole obstacles meet C_theta only at
/// theta = lon(x) (mod pi) and are evaluated there exactly; pole obstacles
/// lie on every C_theta and are sampled on n_theta points with a Lipschitz
/// correction.
AlphaResult alpha_margin(const ObstacleSet& obstacles, const Frame& frame, int n_theta);

struct AvoidanceResult {
    double margin = 0.0;
    double lipschitz = 0.0;
    double certified_radius = 0.0;
    double local_bound = 0.0;
};

/// Samples the (oriented) Gauss map of `surface` on the grid. Throws
/// RankDeficiency if the jacobian degenerates at a sample.
AvoidanceResult avoidance_check(const ParametricImmersion& surface, double orientation,
                                std::span<const UnitVector> obstacles, const Grid& grid);

/// Same certification applied to an arbitrary sphere-valued map of (theta, t).
AvoidanceResult avoidance_check(const std::function<Eigen::Vector3d(double, double)>& map,
                                std::span<const UnitVector> obstacles, const Grid& grid);

/// (1/4pi) * sum of signed spherical areas of the Gauss images of the grid
/// cells (two oriented triangles per cell). Requires ambient dimension 3.
double degree_check(const ParametricImmersion& surface, double orientation, const Grid& grid);

/// Non-periodic variant over the box [lo, hi] with grid.n_theta x grid.n_t cells.
double degree_check(const ParametricImmersion& surface, double orientation, const Grid& grid,
                    const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);

/// Full certification of extend(base_circle(), frame, params).
VerificationReport verify_extension(const ObstacleSet& obstacles, const Frame& frame,
                                    const ExtensionParams& params, const Grid& grid);

class CertificationError : public GeometryError {
  public:
    CertificationError(const std::string& what, VerificationReport report)
        : GeometryError(what), report(std::move(report)) {}
    VerificationReport report;
};

struct TuneResult {
    ExtensionParams params;
    VerificationReport report;
};

/// delta = min(max_delta_for_arc(s * alpha), 1/8) for s in kDeltaSafetyLadder;
/// for each delta, epsilon is halved from 1/8 until the report passes with
/// certified_radius >= target_radius, epsilon drops below 1e-6, or the
/// certified radius stalls. Returns the first passing parameters. Throws
/// std::invalid_argument when alpha <= 0 and CertificationError (carrying the
/// best report seen) when every delta fails.
TuneResult auto_tune(const ObstacleSet& obstacles, const Frame& frame, double target_radius,
                     const Grid& grid);

inline constexpr Grid kForecastGrid{128, 128};
inline constexpr double kForecastAccept = 0.01;
/// Widening stages of select_for_certification: random draws and the pole
/// clearance they must have.
inline constexpr struct {
    int draws;
    double min_clearance;
} kPoleSearchStages[] = {{96, kPreferredClearance}, {400, 0.05}};

/// Certified radius to expect on `grid` as epsilon -> 0. For each delta of
/// the auto_tune ladder the projected Gauss map is sampled on kForecastGrid;
/// the result is the best margin - lipschitz * grid.diagonal() / 2.
/// -infinity when alpha <= 0.
double forecast_radius(const ObstacleSet& obstacles, const Frame& frame, const Grid& grid);

/// select_pole_and_fit, unless its forecast on `grid` is below
/// kForecastAccept. Then each stage of kPoleSearchStages ranks its
/// candidates by forecast until the best one reaches kForecastAccept.
/// Earlier candidates win ties; the clearance pick is kept if nothing beats it.
PoleAndFit select_for_certification(std::span<const UnitVector> raw, std::uint64_t seed,
                                    double margin_target, int max_degree, const Grid& grid);

}  // namespace gaussmiss
