#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gaussmiss/framing.hpp"
#include "gaussmiss/immersion.hpp"
#include "gaussmiss/verify.hpp"

namespace gaussmiss {

enum class Command { construct, verify, spin, figure_eight_info, export_mesh };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int antipodal = 2;
inline constexpr int fit = 3;
inline constexpr int certification = 4;
}  // namespace exit_code

struct RunConfig {
    Command command = Command::construct;
    /// Empty means the canonical tetrahedron.
    std::string points_path;
    std::optional<double> epsilon;
    std::optional<double> delta;
    Grid grid = kVerificationGrid;
    std::uint64_t seed = 0;
    std::string mesh_path;
    std::string cloud_path;
    std::string report_path;
    /// Sampling of the exported mesh and Gauss cloud.
    Grid export_grid{256, 256};
    double margin_target = 0.1;
    int max_degree = 15;
    double target_radius = 0.0;
    /// Replaces the fitted height function when non-empty.
    std::vector<HarmonicTerm> series;
    std::string spin_path;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const RunConfig& config);

/// One obstacle per line: "x y z" (normalized on read) or
/// "lonlat: lon_deg lat_deg". '#' starts a comment. Throws
/// std::runtime_error naming the line on malformed input.
std::vector<UnitVector> parse_obstacles(std::istream& in);
std::vector<UnitVector> load_obstacles(const std::string& path);

/// "k:a:b" terms separated by commas or whitespace.
std::vector<HarmonicTerm> parse_series(const std::string& text);

struct RunResult {
    ObstacleSet obstacles;
    OddHarmonicSeries series;
    Side side = Side::above;
    ExtensionParams params{0.125, 0.125};
    VerificationReport report;
};

/// select_for_certification (or choose_pole with an override series) -> frame -> auto_tune or the given
/// parameters -> verification. An auto_tune failure is returned as a failing
/// report; other errors propagate.
RunResult run_pipeline(const std::vector<UnitVector>& raw, const RunConfig& config);

std::string report_json(const RunResult& result);

/// Quad grid of the surface in the input coordinates, per-vertex Gauss map
/// normals, both seams welded.
void write_obj(std::ostream& out, const RunResult& result, const Grid& grid);

/// ASCII PLY of Gauss map samples followed by the obstacles; the `obstacle`
/// column is 1 for obstacle rows.
void write_gauss_cloud(std::ostream& out, const RunResult& result, const Grid& grid);

/// construct / verify / export-mesh. Writes the requested artifacts and
/// returns one of the exit codes above. Diagnostics go to `log`.
int run_construct(const RunConfig& config, std::ostream& log, std::ostream& out);

/// Profile description for the spin command, one directive per line:
///   point c1 ... cm        constant map
///   circle r c1 ... cm     planar_circle(r, c)
///   spin [axis]            spin about coordinate `axis` (0-based, default last)
/// The first directive must be a profile.
ParametricImmersion parse_spin_program(std::istream& in);

int run_spin(const RunConfig& config, std::ostream& log, std::ostream& out);

int run_figure_eight_info(double delta, std::optional<double> arc, std::ostream& out);

}  // namespace gaussmiss
