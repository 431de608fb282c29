#pragma once

#include <Eigen/Dense>

namespace gaussmiss {

/// Amplitude of the planar figure eight t |-> (cos t, delta sin 2t).
class FigureEightParams {
  public:
    /// Throws std::invalid_argument unless 0 < delta <= 1.
    explicit FigureEightParams(double delta);
    double delta() const { return delta_; }

  private:
    double delta_;
};

namespace figure_eight {

Eigen::Vector2d eval(const FigureEightParams& p, double t);
/// (-sin t, 2 delta cos 2t); never zero.
Eigen::Vector2d derivative(const FigureEightParams& p, double t);
Eigen::Vector2d second_derivative(const FigureEightParams& p, double t);

/// Angle of the unit normal (tangent rotated by -pi/2), lifted continuously
/// with normal_angle(0) == 0. The normal vector (2 delta cos 2t, sin t) never
/// crosses the negative x-axis, so the principal atan2 branch is already the
/// continuous lift.
double normal_angle(const FigureEightParams& p, double t);
/// d/dt of normal_angle.
double normal_angle_rate(const FigureEightParams& p, double t);

/// Total angular extent of the normal image: pi + 2 atan(2 delta). The
/// extremes of normal_angle sit at the inflection points cos t = 0.
double spherical_image_length(const FigureEightParams& p);

/// Largest delta with spherical_image_length <= pi + alpha, i.e.
/// tan(alpha/2)/2, capped at the admissible maximum delta = 1.
/// Throws std::invalid_argument for alpha <= 0.
double max_delta_for_arc(double alpha);

}  // namespace figure_eight
}  // namespace gaussmiss
