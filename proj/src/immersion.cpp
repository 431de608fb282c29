#include "gaussmiss/immersion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gaussmiss {

ParametricImmersion::ParametricImmersion(int domain_dim, int ambient_dim, Evaluator eval,
                                         Jacobian jac)
    : k_(domain_dim), m_(ambient_dim), eval_(std::move(eval)), jac_(std::move(jac)) {
    if (k_ < 0 || m_ < 1 || k_ > kMaxDim || m_ > kMaxDim) {
        throw std::invalid_argument("parametric immersion: unsupported dimensions");
    }
}

ParametricImmersion base_circle() {
    return ParametricImmersion(
        1, 3,
        [](const Vec& u) -> Vec { return Vec(Eigen::Vector3d(std::cos(u[0]), std::sin(u[0]), 0.0)); },
        [](const Vec& u) -> Mat {
            Mat j(3, 1);
            j << -std::sin(u[0]), std::cos(u[0]), 0.0;
            return j;
        });
}

ParametricImmersion constant_point(const Vec& p) {
    const int m = static_cast<int>(p.size());
    return ParametricImmersion(
        0, m, [p](const Vec&) -> Vec { return p; },
        [m](const Vec&) -> Mat { return Mat::Zero(m, 0); });
}

ParametricImmersion planar_circle(double radius, const Vec& center) {
    const int m = static_cast<int>(center.size());
    if (m < 2) throw std::invalid_argument("planar circle: needs at least two coordinates");
    return ParametricImmersion(
        1, m,
        [radius, center, m](const Vec& u) -> Vec {
            Vec p = center;
            p[0] += radius * std::cos(u[0]);
            p[m - 1] += radius * std::sin(u[0]);
            return p;
        },
        [radius, m](const Vec& u) -> Mat {
            Mat j = Mat::Zero(m, 1);
            j(0, 0) = -radius * std::sin(u[0]);
            j(m - 1, 0) = radius * std::cos(u[0]);
            return j;
        });
}

namespace {

constexpr double kAxisClearance = 1e-6;

void check_spin_precondition(const ParametricImmersion& f0, int axis, int resolution) {
    const int k = f0.domain_dim();
    // Keep the check grid below ~1e6 samples.
    int res = std::max(resolution, 1);
    while (k > 0 && std::pow(static_cast<double>(res), k) > 1e6) res /= 2;
    long total = 1;
    for (int i = 0; i < k; ++i) total *= res;
    Vec u(k);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int a = 0; a < k; ++a) {
            u[a] = kTwoPi * static_cast<double>(rem % res) / res;
            rem /= res;
        }
        const double c = f0(u)[axis];
        if (!(std::abs(c) > kAxisClearance)) {
            std::ostringstream msg;
            msg << "spin: profile meets the rotation axis at sample (";
            for (int a = 0; a < k; ++a) msg << (a ? ", " : "") << u[a];
            msg << "), coordinate " << axis << " = " << c;
            throw GeometryError(msg.str());
        }
    }
}

}  // namespace

ParametricImmersion spin(const ParametricImmersion& f0, int axis, int check_resolution) {
    const int k = f0.domain_dim();
    const int m = f0.ambient_dim();
    if (k + 1 > kMaxDim || m + 1 > kMaxDim) throw std::invalid_argument("spin: dimension limit reached");
    if (axis < 0) axis = m - 1;
    if (axis >= m) throw std::invalid_argument("spin: axis index out of range");
    check_spin_precondition(f0, axis, check_resolution);

    auto eval = [f0, k, m, axis](const Vec& u) -> Vec {
        const Vec p = f0(u.head(k));
        const double t = u[k];
        Vec out(m + 1);
        out.head(m) = p;
        out[axis] = std::cos(t) * p[axis];
        out[m] = -std::sin(t) * p[axis];
        return out;
    };
    auto jac = [f0, k, m, axis](const Vec& u) -> Mat {
        const Vec q = u.head(k);
        const Vec p = f0(q);
        const Mat j0 = f0.jacobian(q);
        const double c = std::cos(u[k]);
        const double s = std::sin(u[k]);
        Mat j = Mat::Zero(m + 1, k + 1);
        j.topLeftCorner(m, k) = j0;
        for (int a = 0; a < k; ++a) {
            j(axis, a) = c * j0(axis, a);
            j(m, a) = -s * j0(axis, a);
        }
        j(axis, k) = -s * p[axis];
        j(m, k) = -c * p[axis];
        return j;
    };
    return ParametricImmersion(k + 1, m + 1, std::move(eval), std::move(jac));
}

ExtensionParams::ExtensionParams(double eps, double delta) : epsilon(eps), figure8(delta) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("extension: epsilon must lie in (0, 1], got " + std::to_string(eps));
    }
}

ParametricImmersion extend(const ParametricImmersion& f, const Frame& frame,
                           const ExtensionParams& params) {
    if (f.domain_dim() != 1 || f.ambient_dim() != 3) {
        throw std::invalid_argument("extend: base must be a closed curve in R^3");
    }
    const double eps = params.epsilon;
    const FigureEightParams fig = params.figure8;
    auto eval = [f, frame, eps, fig](const Vec& u) -> Vec {
        const double theta = u[0];
        const Eigen::Vector2d e = figure_eight::eval(fig, u[1]);
        Vec base = f(u.head(1));
        const Eigen::Vector3d off = eps * (e[0] * frame.n1(theta) + e[1] * frame.n2(theta));
        base += Vec(off);
        return base;
    };
    auto jac = [f, frame, eps, fig](const Vec& u) -> Mat {
        const double theta = u[0];
        const Eigen::Vector2d e = figure_eight::eval(fig, u[1]);
        const Eigen::Vector2d de = figure_eight::derivative(fig, u[1]);
        const Mat jf = f.jacobian(u.head(1));
        const Eigen::Vector3d n1 = frame.n1(theta);
        const Eigen::Vector3d n2 = frame.n2(theta);
        const Eigen::Vector3d d_theta =
            Eigen::Vector3d(jf(0, 0), jf(1, 0), jf(2, 0)) +
            eps * (e[0] * frame.dn1(theta) + e[1] * frame.dn2(theta));
        const Eigen::Vector3d d_t = eps * (de[0] * n1 + de[1] * n2);
        Mat j(3, 2);
        j.col(0) = d_theta;
        j.col(1) = d_t;
        return j;
    };
    return ParametricImmersion(2, 3, std::move(eval), std::move(jac));
}

Vec generalized_cross(const Mat& columns) {
    const auto m = columns.rows();
    if (columns.cols() != m - 1) throw std::invalid_argument("generalized cross: need m-1 columns");
    if (m == 3) {
        const Eigen::Vector3d a = columns.col(0);
        const Eigen::Vector3d b = columns.col(1);
        return Vec(a.cross(b));
    }
    Vec out(m);
    Mat full(m, m);
    full.leftCols(m - 1) = columns;
    for (Eigen::Index i = 0; i < m; ++i) {
        full.col(m - 1).setZero();
        full(i, m - 1) = 1.0;
        out[i] = full.determinant();
    }
    return out;
}

Vec normal_from_jacobian(const Mat& jacobian, double orientation) {
    const Vec n = generalized_cross(jacobian);
    const double norm = n.norm();
    if (!(norm >= kRankTolerance)) {
        throw RankDeficiency("gauss map: jacobian is rank deficient (cross product norm " +
                             std::to_string(norm) + ")");
    }
    return (orientation < 0.0 ? -1.0 : 1.0) * n / norm;
}

SphereMap gauss_map(const ParametricImmersion& surface, double orientation) {
    if (surface.domain_dim() != surface.ambient_dim() - 1) {
        throw std::invalid_argument("gauss map: surface must have codimension one");
    }
    return [surface, orientation](const Vec& u) {
        return UnitVector(normal_from_jacobian(surface.jacobian(u), orientation));
    };
}

Eigen::Vector3d projected_gauss_at(const Frame& frame, const FigureEightParams& fig, double theta,
                                   double t) {
    const double nu = figure_eight::normal_angle(fig, t);
    return std::cos(nu) * frame.n1(theta) + std::sin(nu) * frame.n2(theta);
}

SphereMap projected_gauss(const Frame& frame, const ExtensionParams& params) {
    const FigureEightParams fig = params.figure8;
    return [frame, fig](const Vec& u) {
        return UnitVector(Vec(projected_gauss_at(frame, fig, u[0], u[1])));
    };
}

}  // namespace gaussmiss
