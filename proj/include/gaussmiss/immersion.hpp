#pragma once

#include <functional>

#include "gaussmiss/figure_eight.hpp"
#include "gaussmiss/framing.hpp"
#include "gaussmiss/sphere.hpp"
#include "gaussmiss/types.hpp"

namespace gaussmiss {

/// Smooth map from the k-torus (every parameter 2pi-periodic) into R^m with
/// an analytic jacobian. Evaluators are immutable and safe to share.
class ParametricImmersion {
  public:
    using Evaluator = std::function<Vec(const Vec&)>;
    using Jacobian = std::function<Mat(const Vec&)>;

    ParametricImmersion(int domain_dim, int ambient_dim, Evaluator eval, Jacobian jac);

    int domain_dim() const { return k_; }
    int ambient_dim() const { return m_; }
    Vec operator()(const Vec& u) const { return eval_(u); }
    /// m x k matrix of partial derivatives, columns in parameter order.
    Mat jacobian(const Vec& u) const { return jac_(u); }

  private:
    int k_;
    int m_;
    Evaluator eval_;
    Jacobian jac_;
};

/// f(theta) = (cos theta, sin theta, 0).
ParametricImmersion base_circle();

/// Constant map from the 0-torus (a point).
ParametricImmersion constant_point(const Vec& p);

/// Circle of radius r in the plane of the first and last coordinates,
/// centred at `center` (dimension >= 2).
ParametricImmersion planar_circle(double radius, const Vec& center);

/// Rotates f0 about the subspace where coordinate `axis` of f0 and the new
/// coordinate vanish (axis < 0 means the last coordinate, m - 1):
///   f1(q, t) = (..., cos t * f0_axis, ..., -sin t * f0_axis).
/// The new parameter t is appended last. Throws GeometryError naming the
/// offending sample when |f0_axis| <= 1e-6 on a check grid of
/// `check_resolution` points per axis.
ParametricImmersion spin(const ParametricImmersion& f0, int axis = -1, int check_resolution = 64);

struct ExtensionParams {
    /// Throws std::invalid_argument unless 0 < epsilon <= 1.
    ExtensionParams(double epsilon, double delta);

    double epsilon;
    FigureEightParams figure8;
};

/// F(theta, t) = f(theta) + eps * (E1(t) N1(theta) + E2(t) N2(theta)).
ParametricImmersion extend(const ParametricImmersion& f, const Frame& frame,
                           const ExtensionParams& params);

/// Generalized cross product of the m-1 columns of `columns` (m x (m-1)):
/// component i is det[c_1 ... c_{m-1} | e_i]. For m = 3 this is c1 x c2.
Vec generalized_cross(const Mat& columns);

inline constexpr double kRankTolerance = 1e-10;

/// Normalized generalized cross product, times `orientation` (+-1). Throws
/// RankDeficiency when the cross product norm is below kRankTolerance.
Vec normal_from_jacobian(const Mat& jacobian, double orientation = 1.0);

using SphereMap = std::function<UnitVector(const Vec&)>;

/// Gauss map of a hypersurface (domain_dim == ambient_dim - 1).
SphereMap gauss_map(const ParametricImmersion& surface, double orientation = 1.0);

/// cos(nu(t)) N1(theta) + sin(nu(t)) N2(theta): the limit of the Gauss map
/// of extend() as epsilon -> 0.
Eigen::Vector3d projected_gauss_at(const Frame& frame, const FigureEightParams& fig, double theta,
                                   double t);
SphereMap projected_gauss(const Frame& frame, const ExtensionParams& params);

/// Sample point of a periodic parameter domain.
inline Vec params2(double a, double b) {
    Vec u(2);
    u << a, b;
    return u;
}

}  // namespace gaussmiss
