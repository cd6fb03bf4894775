#pragma once

#include "cdm/core.hpp"
#include "cdm/raster.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace cdm {

/// Geometric ellipse. `theta` is the angle of the major axis from +x (column
/// axis), radians in [0, pi). Because rows grow downward a positive angle
/// turns clockwise on screen.
template <typename Scalar>
struct EllipseParams {
    Eigen::Matrix<Scalar, 2, 1> center = Eigen::Matrix<Scalar, 2, 1>::Zero();
    Scalar a = 0;  // semi-major
    Scalar b = 0;  // semi-minor
    Scalar theta = 0;
    bool circle = false;
};

template <typename Scalar>
struct FitQuality {
    Scalar rms_residual = 0;  // algebraic distance, unit-norm conic, normalized frame
    int point_count = 0;
};

template <typename Scalar>
struct EllipseFit {
    EllipseParams<Scalar> params;
    FitQuality<Scalar> quality;
};

using Ellipse = EllipseParams<double>;

namespace detail {

template <typename Scalar>
Scalar wrap_half_turn(Scalar t) {
    const Scalar pi = static_cast<Scalar>(kPi);
    t = std::fmod(t, pi);
    if (t < 0) t += pi;
    if (t >= pi) t -= pi;
    return t;
}

}  // namespace detail

/// Geometric parameters of the conic
///   A x^2 + B xy + C y^2 + D x + E y + F = 0.
/// Throws "degenerate fit" if it is not a real ellipse.
template <typename Scalar>
EllipseParams<Scalar> conic_to_ellipse(const Eigen::Matrix<Scalar, 6, 1>& conic) {
    using Vec2s = Eigen::Matrix<Scalar, 2, 1>;
    using Mat2s = Eigen::Matrix<Scalar, 2, 2>;
    const Scalar A = conic(0), B = conic(1), C = conic(2), D = conic(3), E = conic(4), F = conic(5);

    Mat2s Q;
    Q << A, B / 2, B / 2, C;
    if (Q.determinant() <= 0) throw Error("degenerate fit: conic is not an ellipse");

    const Vec2s center = -Q.ldlt().solve(Vec2s(D, E)) / 2;
    Scalar f0 = F + (D * center.x() + E * center.y()) / 2;

    Eigen::SelfAdjointEigenSolver<Mat2s> eig(Q);
    Vec2s lambda = eig.eigenvalues();
    Mat2s vecs = eig.eigenvectors();
    if (lambda(1) < 0) {
        // Negative definite: flip the sign of the whole conic.
        lambda = -lambda.reverse().eval();
        vecs = vecs.rowwise().reverse().eval();
        f0 = -f0;
    }
    if (!(f0 < 0)) throw Error("degenerate fit: imaginary ellipse");

    EllipseParams<Scalar> e;
    e.center = center;
    e.a = std::sqrt(-f0 / lambda(0));
    e.b = std::sqrt(-f0 / lambda(1));
    e.theta = detail::wrap_half_turn(std::atan2(vecs(1, 0), vecs(0, 0)));
    if (e.a - e.b <= static_cast<Scalar>(1e-6) * e.a) {
        e.circle = true;
        e.theta = 0;
    }
    return e;
}

/// Implicit coefficients (A..F) of an ellipse, scaled so that F is the value
/// at the center minus one: A x^2 + ... + F = 0 on the boundary.
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> ellipse_to_conic(const EllipseParams<Scalar>& e) {
    const Scalar c = std::cos(e.theta), s = std::sin(e.theta);
    const Scalar ia = 1 / (e.a * e.a), ib = 1 / (e.b * e.b);
    const Scalar A = c * c * ia + s * s * ib;
    const Scalar B = 2 * c * s * (ia - ib);
    const Scalar C = s * s * ia + c * c * ib;
    const Scalar x0 = e.center.x(), y0 = e.center.y();
    Eigen::Matrix<Scalar, 6, 1> out;
    out << A, B, C, -2 * A * x0 - B * y0, -B * x0 - 2 * C * y0, A * x0 * x0 + B * x0 * y0 + C * y0 * y0 - 1;
    return out;
}

/// Direct least-squares ellipse fit with the ellipse-specific constraint
/// 4AC - B^2 = 1, solved through the reduced 3x3 eigenproblem on mean-centred,
/// unit-RMS-radius coordinates (Halir & Flusser's stable formulation of
/// Fitzgibbon's fit). `points` is an n x 2 expression of (x, y) rows.
template <typename Derived>
EllipseFit<typename Derived::Scalar> fit_ellipse(const Eigen::MatrixBase<Derived>& points) {
    using Scalar = typename Derived::Scalar;
    using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
    using Vec3s = Eigen::Matrix<Scalar, 3, 1>;
    using MatX3 = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;
    static_assert(Derived::ColsAtCompileTime == 2 || Derived::ColsAtCompileTime == Eigen::Dynamic,
                  "points must be an n x 2 matrix");

    const Eigen::Index n = points.rows();
    if (points.cols() != 2) throw Error("points must be an n x 2 matrix");
    if (n < 6) throw InsufficientData("insufficient points: need at least 6, got " + std::to_string(n));

    const Eigen::Matrix<Scalar, 1, 2> mean = points.colwise().mean();
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 2> centred = points.rowwise() - mean;
    const Scalar scale = std::sqrt(centred.squaredNorm() / static_cast<Scalar>(n));
    if (!(scale > 0) || !std::isfinite(scale)) throw Error("degenerate fit: coincident points");
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 2> p = centred / scale;

    const auto x = p.col(0).array();
    const auto y = p.col(1).array();
    MatX3 D1(n, 3), D2(n, 3);
    D1.col(0) = x.square();
    D1.col(1) = x * y;
    D1.col(2) = y.square();
    D2.col(0) = x;
    D2.col(1) = y;
    D2.col(2).setOnes();

    const Mat3 S1 = D1.transpose() * D1;
    const Mat3 S2 = D1.transpose() * D2;
    const Mat3 S3 = D2.transpose() * D2;

    Eigen::FullPivLU<Mat3> lu(S3);
    lu.setThreshold(static_cast<Scalar>(1e-10));
    if (lu.rank() < 3) throw Error("degenerate fit: points are collinear");
    const Mat3 T = -lu.solve(S2.transpose());
    const Mat3 M = S1 + S2 * T;

    // Premultiply by the inverse of the 3x3 constraint block.
    Mat3 Mc;
    Mc.row(0) = M.row(2) / 2;
    Mc.row(1) = -M.row(1);
    Mc.row(2) = M.row(0) / 2;

    Eigen::EigenSolver<Mat3> es(Mc);
    int best = -1;
    Scalar best_cond = 0;
    for (int k = 0; k < 3; ++k) {
        const auto v = es.eigenvectors().col(k);
        const Vec3s vr = v.real();
        if (v.imag().norm() > static_cast<Scalar>(1e-8) * vr.norm()) continue;
        const Scalar cond = 4 * vr(0) * vr(2) - vr(1) * vr(1);
        if (cond > best_cond) {
            best_cond = cond;
            best = k;
        }
    }
    if (best < 0) throw Error("degenerate fit: no elliptical solution");

    const Vec3s a1 = es.eigenvectors().col(best).real();
    const Vec3s a2 = T * a1;
    Eigen::Matrix<Scalar, 6, 1> conic;
    conic << a1, a2;
    conic.normalize();

    EllipseFit<Scalar> out;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residual = D1 * conic.template head<3>() + D2 * conic.template tail<3>();
    out.quality.rms_residual = std::sqrt(residual.squaredNorm() / static_cast<Scalar>(n));
    out.quality.point_count = static_cast<int>(n);

    EllipseParams<Scalar> e = conic_to_ellipse<Scalar>(conic);
    e.center = mean.transpose() + scale * e.center;
    e.a *= scale;
    e.b *= scale;
    out.params = e;
    return out;
}

/// Convenience overload for point lists.
EllipseFit<double> fit_ellipse(const std::vector<Vec2>& points);

/// Boundary samples used for contour-based fitting: the midpoint of every
/// pixel edge between a contour pixel and a 4-neighbour outside the region.
/// Membership of non-contour pixels comes from an even-odd test against the
/// contour polygon.
std::vector<Vec2> contour_edge_points(const Contour& contour);

/// Fit to a traced outer contour (see contour_edge_points).
EllipseFit<double> ellipse_from_contour(const Contour& contour);

/// Foreground where the pixel centre satisfies the ellipse interior inequality.
BinaryMask rasterize_ellipse(const Ellipse& e, int width, int height);

/// True when (x, y) lies inside or on the ellipse.
bool ellipse_contains(const Ellipse& e, double x, double y);

/// Axis-aligned half extents (half-width, half-height) of the ellipse.
Vec2 ellipse_half_extents(const Ellipse& e);

}  // namespace cdm
