#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gaussmiss {

/// Largest ambient dimension handled by the dynamic-size evaluators. Vectors
/// and jacobians live on the stack up to this size.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input that collapses a construction (zero vector, parallel directions).
class DegenerateInput : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

class AntipodalPairError : public GeometryError {
  public:
    AntipodalPairError(const std::string& what, std::size_t i, std::size_t j)
        : GeometryError(what), first(i), second(j) {}
    std::size_t first;
    std::size_t second;
};

class SeparationError : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

/// Jacobian without full rank where an immersion was expected.
class RankDeficiency : public GeometryError {
  public:
    using GeometryError::GeometryError;
};

}  // namespace gaussmiss
