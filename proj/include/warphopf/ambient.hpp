#ifndef WARPHOPF_AMBIENT_HPP
#define WARPHOPF_AMBIENT_HPP

#include "warphopf/types.hpp"
#include "warphopf/warp.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>

namespace warphopf
{
/// u(r) and its first two derivatives.
struct RadialSample
{
    double u   = 1.0;
    double du  = 0.0;
    double d2u = 0.0;
};

/// The conformally flat metric <.,.>_F = |dx|^2 / F(x)^2 with radial F(x) = u(|x|).
///
/// Besides the profile u, the factor carries the arc-length reparameterization
/// t = G(r), G'(r) = 1/u(r), that turns the metric into dt^2 + h(t)^2 dw^2 with
/// h(t) = r/u(r). Factors built from a warping model keep a handle on it.
class RadialConformalFactor
{
public:
    using Profile = std::function< RadialSample(double) >;

    class Impl;

    /// u(r) = a + c r^2/(4a): flat (c = 0), round (c > 0) and Poincare-ball (c < 0) models
    /// of the space form of curvature c; r ~ a t near the origin.
    static RadialConformalFactor space_form(double c, double a);

    /// Arbitrary positive profile on a bounded annulus; G is tabulated by quadrature of 1/u,
    /// normalized by G(annulus.lo) = 0.
    static RadialConformalFactor from_profile(Profile profile, Interval annulus);

    /// Throws std::domain_error outside the annulus.
    [[nodiscard]] RadialSample operator()(double r) const;
    [[nodiscard]] Interval     annulus() const;
    [[nodiscard]] double       G(double r) const;
    [[nodiscard]] double       G_inv(double t) const;

    /// Warping model this factor was derived from, if any.
    [[nodiscard]] const WarpingModel* warping() const;

private:
    explicit RadialConformalFactor(std::shared_ptr< const Impl > impl) : impl_(std::move(impl)) {}
    friend RadialConformalFactor radial_from_warp(const WarpingModel&, double);

    std::shared_ptr< const Impl > impl_;
};

RadialConformalFactor flat_profile();          // u = 1
RadialConformalFactor round_ball_profile();    // u = 1 + r^2/4, curvature +1
RadialConformalFactor poincare_ball_profile(); // u = (1 - r^2)/2 on the unit ball, curvature -1

/// Inverts dr/u(r) = dt, r/u(r) = h(t): r(t) = r_anchor exp(int dt/h). Space forms use the closed
/// form with r ~ r_anchor t at the pole; other models integrate from the left endpoint, where
/// r = r_anchor. Throws std::domain_error when 1/h is not integrable at the left endpoint.
RadialConformalFactor radial_from_warp(const WarpingModel& model, double r_anchor);

/// h(t) = G^-1(t)/u(G^-1(t)), with G re-derived by quadrature of 1/u from the profile alone.
/// Unbounded annuli are cut at r_max.
WarpingModel warp_from_radial(const RadialConformalFactor& factor, double r_max = 100.0);

/// Everything the point kernels need about F at one point.
struct AmbientPoint
{
    Vec3         x;
    double       r = 0.0;
    RadialSample s;
    double       F = 1.0;
    Vec3         grad_F;     // Euclidean gradient of F
    Mat3         hess_F;     // Euclidean Hessian of F
    Vec3         grad_log_F; // f_i = d_i log F
};

/// Throws std::domain_error when |x| is outside the annulus (the origin is rejected unless
/// the annulus contains it).
AmbientPoint ambient_at(const RadialConformalFactor& factor, const Vec3& x);

/// Bilinear (not Hermitian) Euclidean product; the complexified metric is bdot/F^2.
template < typename A, typename B >
auto bdot(const Eigen::MatrixBase< A >& a, const Eigen::MatrixBase< B >& b)
{
    return (a.array() * b.array()).sum();
}

template < typename Scalar >
Scalar metric(const AmbientPoint& p, const Vector3< Scalar >& a, const Vector3< Scalar >& b)
{
    return bdot(a, b) / (p.F * p.F);
}

/// Gamma(A, B)^k = Gamma^k_ij A^i B^j with Gamma^k_ij = -(d_ik f_j + d_jk f_i - d_ij f_k).
template < typename Scalar >
Vector3< Scalar > connection_term(const AmbientPoint& p, const Vector3< Scalar >& a, const Vector3< Scalar >& b)
{
    const Vector3< Scalar > f  = p.grad_log_F.cast< Scalar >();
    const Scalar            fa = bdot(f, a);
    const Scalar            fb = bdot(f, b);
    const Scalar            ab = bdot(a, b);
    return -(a * fb + b * fa - f * ab);
}

/// Euclidean Hessian of F(x) = u(|x|) applied to (a, b):
/// (u'/r)(a.b) + (1/r^2)(u'' - u'/r)(x.a)(x.b).
template < typename Scalar >
Scalar hess_radial(const AmbientPoint& p, const Vector3< Scalar >& a, const Vector3< Scalar >& b)
{
    if (p.r == 0.0)
        return p.s.d2u * bdot(a, b);
    const Vector3< Scalar > x     = p.x.cast< Scalar >();
    const double            slope = p.s.du / p.r;
    return slope * bdot(a, b) + (p.s.d2u - slope) / (p.r * p.r) * bdot(x, a) * bdot(x, b);
}

/// Curvature tensor R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z of <.,.>_F, from the conformal
/// change formula with phi = -log F over the flat metric. The classical statement of that
/// formula uses the opposite sign convention; it is negated here.
template < typename Scalar >
Vector3< Scalar > riemann(const AmbientPoint& p, const Vector3< Scalar >& X, const Vector3< Scalar >& Y,
                          const Vector3< Scalar >& Z)
{
    using V                  = Vector3< Scalar >;
    const V           gphi   = (-p.grad_F / p.F).cast< Scalar >();
    const Mat3        hphi_r = -p.hess_F / p.F + p.grad_F * p.grad_F.transpose() / (p.F * p.F);
    const auto        hphi   = hphi_r.cast< Scalar >();
    const Scalar      gg     = bdot(gphi, gphi);
    auto              A      = [&](const V& a, const V& b) {
        return Scalar(bdot(a, (hphi * b).eval())) - bdot(a, gphi) * bdot(b, gphi) + bdot(a, b) * gg;
    };
    const V classical = A(Y, Z) * X - A(X, Z) * Y + bdot(Y, Z) * (hphi * X - bdot(X, gphi) * gphi).eval() -
                        bdot(X, Z) * (hphi * Y - bdot(Y, gphi) * gphi).eval();
    return -classical;
}

/// Christoffel symbols: gamma[k](i, j) = Gamma^k_ij, from the closed-form table in f = log F.
using Christoffel = std::array< Mat3, 3 >;
Christoffel christoffel(const RadialConformalFactor& factor, const Vec3& x);

/// Levi-Civita connection in the orthonormal frame E_i = F e_i:
/// D_{E_i} E_j = sum_k conn[k](i, j) E_k, with conn[k](i, j) = d_ij F_k - d_ik F_j.
using FrameConnection = std::array< Mat3, 3 >;
FrameConnection frame_connection(const RadialConformalFactor& factor, const Vec3& x);

Vec3 riemann(const RadialConformalFactor& factor, const Vec3& x, const Vec3& X, const Vec3& Y, const Vec3& Z);

/// Brute-force curvature: coordinate formula with central finite differences of christoffel().
Vec3 riemann_oracle(const RadialConformalFactor& factor, const Vec3& x, const Vec3& X, const Vec3& Y, const Vec3& Z,
                    std::optional< double > step = std::nullopt);

/// Sectional curvature <R(A,B)B,A>_F / (|A|_F^2 |B|_F^2 - <A,B>_F^2). Throws on a degenerate span.
double sectional(const RadialConformalFactor& factor, const Vec3& x, const Vec3& a, const Vec3& b);
double sectional(const AmbientPoint& p, const Vec3& a, const Vec3& b);

double hess_radial(const RadialConformalFactor& factor, const Vec3& x, const Vec3& a, const Vec3& b);
} // namespace warphopf

#endif // WARPHOPF_AMBIENT_HPP
