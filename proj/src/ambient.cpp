#include "warphopf/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace warphopf
{
class RadialConformalFactor::Impl
{
public:
    virtual ~Impl() = default;

    [[nodiscard]] virtual RadialSample profile(double r) const = 0;
    [[nodiscard]] virtual double       G(double r) const       = 0;
    [[nodiscard]] virtual double       G_inv(double t) const   = 0;

    Interval                      annulus;
    std::optional< WarpingModel > model;
};

namespace
{
constexpr double gl3_nodes[3]   = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double gl3_weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

template < typename Fn >
double gauss_legendre3(Fn&& f, double a, double b)
{
    const double mid  = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double       sum  = 0.0;
    for (int k = 0; k < 3; ++k)
        sum += gl3_weights[k] * f(mid + half * gl3_nodes[k]);
    return half * sum;
}

/// Monotone increasing curve y(x) tabulated with slopes, evaluated by cubic Hermite
/// interpolation and inverted by safeguarded Newton inside the bracketing cell.
class HermiteCurve
{
public:
    void push(double x, double y, double dy)
    {
        x_.push_back(x);
        y_.push_back(y);
        dy_.push_back(dy);
    }

    [[nodiscard]] double front_x() const { return x_.front(); }
    [[nodiscard]] double back_x() const { return x_.back(); }
    [[nodiscard]] double front_y() const { return y_.front(); }
    [[nodiscard]] double back_y() const { return y_.back(); }

    [[nodiscard]] double eval(double x) const
    {
        const auto i = cell(x_, x);
        return cubic(i, x).first;
    }

    [[nodiscard]] double inverse(double y) const
    {
        const auto   i  = cell(y_, y);
        double       lo = x_[i];
        double       hi = x_[i + 1];
        double       x  = lo + (hi - lo) * (y - y_[i]) / (y_[i + 1] - y_[i]);
        for (int it = 0; it < 60; ++it)
        {
            const auto [val, slope] = cubic(i, x);
            const double err        = val - y;
            if (err > 0.0)
                hi = x;
            else
                lo = x;
            double next = x - err / slope;
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)))
                return next;
            x = next;
        }
        return x;
    }

private:
    static std::size_t cell(const std::vector< double >& grid, double v)
    {
        const auto it = std::upper_bound(grid.begin(), grid.end(), v);
        const auto i  = static_cast< std::size_t >(std::max< std::ptrdiff_t >(it - grid.begin() - 1, 0));
        return std::min(i, grid.size() - 2);
    }

    [[nodiscard]] std::pair< double, double > cubic(std::size_t i, double x) const
    {
        const double h   = x_[i + 1] - x_[i];
        const double s   = (x - x_[i]) / h;
        const double s2  = s * s;
        const double s3  = s2 * s;
        const double val = (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * dy_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
                           (s3 - s2) * h * dy_[i + 1];
        const double der = ((6 * s2 - 6 * s) * y_[i] + (-6 * s2 + 6 * s) * y_[i + 1]) / h + (3 * s2 - 4 * s + 1) * dy_[i] +
                           (3 * s2 - 2 * s) * dy_[i + 1];
        return {val, der};
    }

    std::vector< double > x_, y_, dy_;
};

class SpaceFormImpl final : public RadialConformalFactor::Impl
{
public:
    SpaceFormImpl(double c, double a) : c_(c), a_(a), k_(std::sqrt(std::abs(c)))
    {
        annulus.lo = 0.0;
        // The ideal boundary r = 2a/k, where u vanishes, is excluded.
        annulus.hi = c < 0.0 ? std::nextafter(2.0 * a / k_, 0.0) : std::numeric_limits< double >::infinity();
        model      = make_space_form(c);
    }

    [[nodiscard]] RadialSample profile(double r) const override
    {
        return {a_ + c_ * r * r / (4.0 * a_), c_ * r / (2.0 * a_), c_ / (2.0 * a_)};
    }

    [[nodiscard]] double G(double r) const override
    {
        if (c_ > 0.0)
            return 2.0 / k_ * std::atan(k_ * r / (2.0 * a_));
        if (c_ < 0.0)
            return 2.0 / k_ * std::atanh(k_ * r / (2.0 * a_));
        return r / a_;
    }

    [[nodiscard]] double G_inv(double t) const override
    {
        if (c_ > 0.0)
            return 2.0 * a_ / k_ * std::tan(k_ * t / 2.0);
        if (c_ < 0.0)
            return 2.0 * a_ / k_ * std::tanh(k_ * t / 2.0);
        return a_ * t;
    }

private:
    double c_, a_, k_;
};

/// Factor induced by a warping model with h(t_min) > 0: log r(t) = log r_anchor + int_{t_min}^t ds/h(s).
class WarpedImpl final : public RadialConformalFactor::Impl
{
public:
    WarpedImpl(const WarpingModel& m, double r_anchor)
    {
        model          = m;
        const auto dom = m.domain();
        if (!dom.bounded())
            throw std::invalid_argument("radial_from_warp: numeric models need a bounded domain");
        std::vector< double > ts;
        if (m.ode_defined())
            for (const auto& n : m.nodes())
                ts.push_back(n.t);
        else
        {
            constexpr int cells = 20000;
            for (int i = 0; i <= cells; ++i)
                ts.push_back(dom.lo + (dom.hi - dom.lo) * i / cells);
        }
        auto   inv_h  = [&](double t) { return 1.0 / m.eval(t).h; };
        double lambda = std::log(r_anchor);
        curve_.push(ts.front(), lambda, inv_h(ts.front()));
        for (std::size_t i = 1; i < ts.size(); ++i)
        {
            lambda += gauss_legendre3(inv_h, ts[i - 1], ts[i]);
            curve_.push(ts[i], lambda, inv_h(ts[i]));
        }
        annulus = {std::exp(curve_.front_y()), std::exp(curve_.back_y())};
        annulus.lo = r_anchor;
    }

    [[nodiscard]] RadialSample profile(double r) const override
    {
        const auto   s  = model->eval(G(r));
        const double u  = r / s.h;
        const double du = (1.0 - s.dh) / s.h;
        return {u, du, (-s.d2h / s.h - (1.0 - s.dh) * s.dh / (s.h * s.h)) / u};
    }

    [[nodiscard]] double G(double r) const override
    {
        return std::clamp(curve_.inverse(std::log(r)), curve_.front_x(), curve_.back_x());
    }

    [[nodiscard]] double G_inv(double t) const override { return std::exp(curve_.eval(t)); }

private:
    HermiteCurve curve_;
};

/// Factor defined directly by a profile u(r); G(r) = int_{lo}^r ds/u(s).
class ProfileImpl final : public RadialConformalFactor::Impl
{
public:
    ProfileImpl(RadialConformalFactor::Profile p, Interval ann) : profile_(std::move(p))
    {
        if (!ann.bounded() || !(ann.hi > ann.lo))
            throw std::invalid_argument("from_profile: annulus must be bounded and non-empty");
        annulus            = ann;
        const double base  = (ann.hi - ann.lo) / 4096.0;
        auto         inv_u = [&](double r) { return 1.0 / profile_(r).u; };
        double       r     = ann.lo;
        double       g     = 0.0;
        curve_.push(r, g, inv_u(r));
        while (r < ann.hi)
        {
            const auto s = profile_(r);
            if (!(s.u > 0.0))
                throw std::domain_error("from_profile: u must be positive on the annulus (r = " + std::to_string(r) + ")");
            double step = base;
            if (s.du != 0.0)
                step = std::max(base / 64.0, std::min(step, 0.02 * s.u / std::abs(s.du)));
            const double next = std::min(ann.hi, r + step);
            g += gauss_legendre3(inv_u, r, next);
            r = next;
            curve_.push(r, g, inv_u(r));
        }
    }

    [[nodiscard]] RadialSample profile(double r) const override { return profile_(r); }
    [[nodiscard]] double       G(double r) const override { return curve_.eval(r); }
    [[nodiscard]] double       G_inv(double t) const override
    {
        return std::clamp(curve_.inverse(t), curve_.front_x(), curve_.back_x());
    }

private:
    RadialConformalFactor::Profile profile_;
    HermiteCurve                   curve_;
};
} // namespace

RadialConformalFactor RadialConformalFactor::space_form(double c, double a)
{
    if (!(a > 0.0))
        throw std::invalid_argument("space_form: gauge a must be positive");
    return RadialConformalFactor(std::make_shared< SpaceFormImpl >(c, a));
}

RadialConformalFactor RadialConformalFactor::from_profile(Profile profile, Interval annulus)
{
    return RadialConformalFactor(std::make_shared< ProfileImpl >(std::move(profile), annulus));
}

RadialSample RadialConformalFactor::operator()(double r) const
{
    if (!impl_->annulus.contains(r))
        throw std::domain_error("radius " + std::to_string(r) + " outside the annulus [" + std::to_string(impl_->annulus.lo) +
                                ", " + std::to_string(impl_->annulus.hi) + "]");
    return impl_->profile(r);
}

Interval RadialConformalFactor::annulus() const
{
    return impl_->annulus;
}

double RadialConformalFactor::G(double r) const
{
    if (!impl_->annulus.contains(r))
        throw std::domain_error("G: radius outside the annulus");
    return impl_->G(r);
}

double RadialConformalFactor::G_inv(double t) const
{
    return impl_->G_inv(t);
}

const WarpingModel* RadialConformalFactor::warping() const
{
    return impl_->model ? &*impl_->model : nullptr;
}

RadialConformalFactor flat_profile()
{
    return RadialConformalFactor::space_form(0.0, 1.0);
}

RadialConformalFactor round_ball_profile()
{
    return RadialConformalFactor::space_form(1.0, 1.0);
}

RadialConformalFactor poincare_ball_profile()
{
    return RadialConformalFactor::space_form(-1.0, 0.5);
}

RadialConformalFactor radial_from_warp(const WarpingModel& model, double r_anchor)
{
    if (!(r_anchor > 0.0))
        throw std::invalid_argument("radial_from_warp: r_anchor must be positive");
    switch (model.kind())
    {
    case WarpKind::euclidean:
    case WarpKind::sphere:
    case WarpKind::hyperbolic:
        return RadialConformalFactor::space_form(model.params().c, r_anchor);
    default:
        break;
    }
    if (!(model.eval(model.domain().lo).h > 0.0))
        throw std::domain_error("radial_from_warp: h vanishes at the left endpoint, int dt/h diverges");
    return RadialConformalFactor(std::make_shared< WarpedImpl >(model, r_anchor));
}

WarpingModel warp_from_radial(const RadialConformalFactor& factor, double r_max)
{
    Interval ann = factor.annulus();
    if (!std::isfinite(ann.hi))
        ann.hi = std::max(r_max, ann.lo + 1.0);
    if (!(factor(ann.hi).u > 0.0))
        ann.hi = ann.lo + (ann.hi - ann.lo) * (1.0 - 1e-6);
    auto rebuilt = RadialConformalFactor::from_profile([factor](double r) { return factor(r); }, ann);
    const double t_hi = rebuilt.G(ann.hi);
    return WarpingModel::custom(
        [rebuilt](double t) {
            const double r   = rebuilt.G_inv(t);
            const auto   s   = rebuilt(r);
            const double h   = r / s.u;
            const double dh  = 1.0 - s.du * h;
            const double d2h = -h * s.d2u * s.u - s.du * dh;
            return WarpSample{h, dh, d2h};
        },
        {0.0, t_hi}, ann.lo / factor(ann.lo).u);
}

AmbientPoint ambient_at(const RadialConformalFactor& factor, const Vec3& x)
{
    AmbientPoint p;
    p.x = x;
    p.r = x.norm();
    p.s = factor(p.r);
    if (!(p.s.u > 0.0))
        throw std::domain_error("ambient_at: conformal factor must be positive");
    p.F = p.s.u;
    if (p.r > 0.0)
    {
        const double slope = p.s.du / p.r;
        p.grad_F           = slope * x;
        p.hess_F           = slope * Mat3::Identity() + (p.s.d2u - slope) / (p.r * p.r) * x * x.transpose();
    }
    else
    {
        p.grad_F.setZero();
        p.hess_F = p.s.d2u * Mat3::Identity();
    }
    p.grad_log_F = p.grad_F / p.F;
    return p;
}

Christoffel christoffel(const RadialConformalFactor& factor, const Vec3& x)
{
    const auto  p = ambient_at(factor, x);
    const Vec3& f = p.grad_log_F;
    Christoffel gamma;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                gamma[k](i, j) = -((i == k ? f(j) : 0.0) + (j == k ? f(i) : 0.0) - (i == j ? f(k) : 0.0));
    return gamma;
}

FrameConnection frame_connection(const RadialConformalFactor& factor, const Vec3& x)
{
    const auto      p = ambient_at(factor, x);
    FrameConnection conn;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                conn[k](i, j) = (i == j ? p.grad_F(k) : 0.0) - (i == k ? p.grad_F(j) : 0.0);
    return conn;
}

Vec3 riemann(const RadialConformalFactor& factor, const Vec3& x, const Vec3& X, const Vec3& Y, const Vec3& Z)
{
    return riemann< double >(ambient_at(factor, x), X, Y, Z);
}

namespace
{
Vec3 contract(const Christoffel& g, const Vec3& a, const Vec3& b)
{
    return {a.dot(g[0] * b), a.dot(g[1] * b), a.dot(g[2] * b)};
}
} // namespace

Vec3 riemann_oracle(const RadialConformalFactor& factor, const Vec3& x, const Vec3& X, const Vec3& Y, const Vec3& Z,
                    std::optional< double > step)
{
    const double h = step.value_or(1e-5 * std::max(1.0, x.norm()));
    // dgamma[m] = d/dx_m of the Christoffel table.
    std::array< Christoffel, 3 > dgamma;
    for (int m = 0; m < 3; ++m)
    {
        const Vec3 e  = Vec3::Unit(m) * h;
        const auto up = christoffel(factor, x + e);
        const auto dn = christoffel(factor, x - e);
        for (int k = 0; k < 3; ++k)
            dgamma[m][k] = (up[k] - dn[k]) / (2.0 * h);
    }
    auto directional = [&](const Vec3& dir) {
        Christoffel d;
        for (int k = 0; k < 3; ++k)
            d[k] = dir(0) * dgamma[0][k] + dir(1) * dgamma[1][k] + dir(2) * dgamma[2][k];
        return d;
    };
    const auto g = christoffel(factor, x);
    // R(X,Y)Z = (D_X Gamma)(Y,Z) - (D_Y Gamma)(X,Z) + Gamma(X, Gamma(Y,Z)) - Gamma(Y, Gamma(X,Z)).
    return contract(directional(X), Y, Z) - contract(directional(Y), X, Z) + contract(g, X, contract(g, Y, Z)) -
           contract(g, Y, contract(g, X, Z));
}

double sectional(const AmbientPoint& p, const Vec3& a, const Vec3& b)
{
    const double aa  = metric< double >(p, a, a);
    const double bb  = metric< double >(p, b, b);
    const double ab  = metric< double >(p, a, b);
    const double den = aa * bb - ab * ab;
    if (!(den > 1e-14 * aa * bb))
        throw std::invalid_argument("sectional: degenerate span");
    const Vec3 r = riemann< double >(p, a, b, b);
    return metric< double >(p, r, a) / den;
}

double sectional(const RadialConformalFactor& factor, const Vec3& x, const Vec3& a, const Vec3& b)
{
    return sectional(ambient_at(factor, x), a, b);
}

double hess_radial(const RadialConformalFactor& factor, const Vec3& x, const Vec3& a, const Vec3& b)
{
    return hess_radial< double >(ambient_at(factor, x), a, b);
}
} // namespace warphopf
