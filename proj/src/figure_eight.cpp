#include "gaussmiss/figure_eight.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gaussmiss/types.hpp"

namespace gaussmiss {

FigureEightParams::FigureEightParams(double delta) : delta_(delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("figure eight: delta must lie in (0, 1], got " +
                                    std::to_string(delta));
    }
}

namespace figure_eight {

Eigen::Vector2d eval(const FigureEightParams& p, double t) {
    return {std::cos(t), p.delta() * std::sin(2.0 * t)};
}

Eigen::Vector2d derivative(const FigureEightParams& p, double t) {
    return {-std::sin(t), 2.0 * p.delta() * std::cos(2.0 * t)};
}

Eigen::Vector2d second_derivative(const FigureEightParams& p, double t) {
    return {-std::cos(t), -4.0 * p.delta() * std::sin(2.0 * t)};
}

double normal_angle(const FigureEightParams& p, double t) {
    // normal = (y', -x') of the tangent (x', y')
    return std::atan2(std::sin(t), 2.0 * p.delta() * std::cos(2.0 * t));
}

double normal_angle_rate(const FigureEightParams& p, double t) {
    // d/dt atan2(v, u) = (u v' - v u') / (u^2 + v^2) with u = 2d cos 2t, v = sin t
    const double d = p.delta();
    const double u = 2.0 * d * std::cos(2.0 * t);
    const double v = std::sin(t);
    const double du = -4.0 * d * std::sin(2.0 * t);
    const double dv = std::cos(t);
    return (u * dv - v * du) / (u * u + v * v);
}

double spherical_image_length(const FigureEightParams& p) {
    return kPi + 2.0 * std::atan(2.0 * p.delta());
}

double max_delta_for_arc(double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("figure eight: no admissible delta for arc budget alpha <= 0");
    }
    // tan(alpha/2)/2 exceeds 1 (or turns negative) once alpha >= 2 atan 2.
    if (alpha >= 2.0 * std::atan(2.0)) return 1.0;
    return std::tan(0.5 * alpha) / 2.0;
}

}  // namespace figure_eight
}  // namespace gaussmiss
