#include "warphopf/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace warphopf
{
namespace
{
// Second derivative of h as a function of h alone, obtained by differentiating h'^2 = rhs(h).
double regularized_rhs(WarpKind kind, const WarpParams& p, double h)
{
    switch (kind)
    {
    case WarpKind::dss:
        return p.m / (2.0 * h * h) - p.c * h;
    case WarpKind::rn:
        return p.m / (2.0 * h * h) - p.q * p.q / (h * h * h);
    default:
        throw std::logic_error("regularized_rhs: not an ODE-defined warping function");
    }
}

double bisect(const std::function< double(double) >& f, double lo, double hi, double rel_tol = 1e-13)
{
    double flo = f(lo);
    if (flo == 0.0)
        return lo;
    for (int it = 0; it < 400 && (hi - lo) > rel_tol * std::max(std::abs(lo), std::abs(hi)); ++it)
    {
        const double mid  = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0)
            return mid;
        if ((fmid < 0.0) == (flo < 0.0))
        {
            lo  = mid;
            flo = fmid;
        }
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct OdeTable
{
    std::vector< WarpNode > nodes;
    double                  dt = 0.0;
};

// Classic RK4 on y = (h, h'), y' = (h', f(h)).
OdeTable integrate(WarpKind kind, const WarpParams& p, double s0, double dt, double t_end, double h_end)
{
    OdeTable table;
    table.dt   = dt;
    auto f     = [&](double h) { return regularized_rhs(kind, p, h); };
    double h   = s0;
    double dh  = 0.0;
    double t   = 0.0;
    table.nodes.push_back({t, h, dh});
    auto rk4 = [&](double h0, double v0, double k) {
        const double k1h = v0;
        const double k1v = f(h0);
        const double k2h = v0 + 0.5 * k * k1v;
        const double k2v = f(h0 + 0.5 * k * k1h);
        const double k3h = v0 + 0.5 * k * k2v;
        const double k3v = f(h0 + 0.5 * k * k2h);
        const double k4h = v0 + k * k3v;
        const double k4v = f(h0 + k * k3h);
        return std::pair{h0 + k / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h),
                         v0 + k / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    };
    const auto max_steps = static_cast< std::size_t >(std::ceil(t_end / dt)) + 1;
    for (std::size_t step = 0; step < max_steps; ++step)
    {
        auto [hn, dhn] = rk4(h, dh, dt);
        // Past the second root of the positivity polynomial h' turns negative.
        if (dhn < 0.0 && step > 0)
            break;
        double tn = static_cast< double >(step + 1) * dt;
        if (hn > h_end)
        {
            // Shorten the last step so the table ends exactly at h_end.
            const double k = bisect([&](double s) { return rk4(h, dh, s).first - h_end; }, 0.0, dt, 1e-15);
            std::tie(hn, dhn) = rk4(h, dh, k);
            hn = h_end;
            tn = t + k;
        }
        h  = hn;
        dh = dhn;
        t  = tn;
        table.nodes.push_back({t, h, dh});
        if (h >= h_end || t >= t_end * (1.0 - 1e-14))
            break;
    }
    return table;
}

double hermite(double y0, double d0, double y1, double d1, double dt, double s)
{
    const double s2  = s * s;
    const double s3  = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1;
}

WarpingModel::Evaluator make_dense_evaluator(WarpKind kind, WarpParams p, std::shared_ptr< const std::vector< WarpNode > > nodes,
                                             double dt)
{
    return [kind, p, nodes, dt](double t) {
        const auto& n   = *nodes;
        const auto  idx = std::clamp< std::ptrdiff_t >(static_cast< std::ptrdiff_t >(std::floor((t - n.front().t) / dt)), 0,
                                                      static_cast< std::ptrdiff_t >(n.size()) - 2);
        const auto& a   = n[static_cast< std::size_t >(idx)];
        const auto& b   = n[static_cast< std::size_t >(idx) + 1];
        const double step = b.t - a.t;
        const double s    = (t - a.t) / step;
        const double fa   = regularized_rhs(kind, p, a.h);
        const double fb   = regularized_rhs(kind, p, b.h);
        WarpSample out;
        out.h   = hermite(a.h, a.dh, b.h, b.dh, step, s);
        out.dh  = hermite(a.dh, fa, b.dh, fb, step, s);
        out.d2h = regularized_rhs(kind, p, out.h);
        return out;
    };
}
} // namespace

std::string to_string(WarpKind kind)
{
    switch (kind)
    {
    case WarpKind::euclidean:
        return "euclidean";
    case WarpKind::sphere:
        return "sphere";
    case WarpKind::hyperbolic:
        return "hyperbolic";
    case WarpKind::dss:
        return "dss";
    case WarpKind::rn:
        return "rn";
    case WarpKind::custom:
        return "custom";
    }
    return "custom";
}

WarpingModel WarpingModel::custom(Evaluator eval, Interval domain, double s0, WarpKind kind, WarpParams params)
{
    if (!eval)
        throw std::invalid_argument("WarpingModel::custom: empty evaluator");
    WarpingModel model;
    model.kind_   = kind;
    model.params_ = params;
    model.s0_     = s0;
    model.domain_ = domain;
    model.eval_   = std::move(eval);
    return model;
}

WarpSample WarpingModel::eval(double t) const
{
    if (!domain_.contains(t))
        throw std::domain_error("WarpingModel::eval: t = " + std::to_string(t) + " outside [" + std::to_string(domain_.lo) +
                                ", " + std::to_string(domain_.hi) + "]");
    return eval_(t);
}

double WarpingModel::t_at_h(double h) const
{
    double lo = domain_.lo;
    double hi = domain_.hi;
    if (kind_ == WarpKind::sphere)
        hi = 0.5 * std::numbers::pi / std::sqrt(params_.c);
    if (!std::isfinite(hi))
    {
        hi = std::max(1.0, lo + 1.0);
        while (eval(hi).h < h)
            hi = lo + 2.0 * (hi - lo);
    }
    if (h < eval(lo).h || h > eval(hi).h)
        throw std::domain_error("WarpingModel::t_at_h: value " + std::to_string(h) + " not attained on the domain");
    return bisect([&](double t) { return eval(t).h - h; }, lo, hi, 1e-15);
}

WarpingModel make_space_form(double c)
{
    WarpParams p;
    p.c = c;
    if (c > 0.0)
    {
        const double k = std::sqrt(c);
        return WarpingModel::custom(
            [k](double t) {
                return WarpSample{std::sin(k * t) / k, std::cos(k * t), -k * std::sin(k * t)};
            },
            {0.0, std::numbers::pi / k}, 0.0, WarpKind::sphere, p);
    }
    if (c < 0.0)
    {
        const double k = std::sqrt(-c);
        return WarpingModel::custom(
            [k](double t) {
                return WarpSample{std::sinh(k * t) / k, std::cosh(k * t), k * std::sinh(k * t)};
            },
            {0.0, std::numeric_limits< double >::infinity()}, 0.0, WarpKind::hyperbolic, p);
    }
    return WarpingModel::custom([](double t) { return WarpSample{t, 1.0, 0.0}; },
                                {0.0, std::numeric_limits< double >::infinity()}, 0.0, WarpKind::euclidean, p);
}

PositivityWindow dss_positivity_window(double m, double c)
{
    if (!(m > 0.0))
        throw std::invalid_argument("dss: mass m must be positive");
    if (c > 0.0 && c * m * m >= 4.0 / 27.0)
        throw std::invalid_argument("dss: c m^2 must be below 4/27 when c > 0");
    // 1 - m/r - c r^2 > 0  <=>  g(r) = r - m - c r^3 > 0 for r > 0.
    auto g = [m, c](double r) { return r - m - c * r * r * r; };
    PositivityWindow w;
    if (c == 0.0)
    {
        w.s0 = m;
        w.s1 = std::numeric_limits< double >::infinity();
    }
    else if (c < 0.0)
    {
        w.s0 = bisect(g, 0.0, m);
        w.s1 = std::numeric_limits< double >::infinity();
    }
    else
    {
        const double peak = 1.0 / std::sqrt(3.0 * c);
        double       far  = 2.0 * peak;
        while (g(far) > 0.0)
            far *= 2.0;
        w.s0 = bisect(g, 0.0, peak);
        w.s1 = bisect(g, peak, far);
    }
    return w;
}

double rn_horizon(double m, double q)
{
    if (!(q > 0.0) || !(m > 2.0 * q))
        throw std::invalid_argument("rn: requires m > 2q > 0");
    // Larger root written without the cancellation of 2q^2/(m - sqrt(m^2 - 4q^2)).
    return 0.5 * (m + std::sqrt(m * m - 4.0 * q * q));
}

namespace detail
{
struct OdeResult
{
    std::vector< WarpNode > nodes;
    double                  dt = 0.0;
};

OdeResult solve_conserving(WarpKind kind, const WarpParams& p, double s0, const OdeOptions& options)
{
    const double t_end = options.t_max.value_or(std::numeric_limits< double >::infinity());
    const double h_end = options.t_max ? std::numeric_limits< double >::infinity() : options.h_max_factor * s0;
    double       dt    = options.step_fraction * s0;
    if (options.t_max)
    {
        if (!(*options.t_max > 0.0))
            throw std::invalid_argument("OdeOptions: t_max must be positive");
        dt = *options.t_max / std::ceil(*options.t_max / dt);
    }
    for (int attempt = 0; attempt < 8; ++attempt)
    {
        auto table = integrate(kind, p, s0, dt, std::isfinite(t_end) ? t_end : 1e12, h_end);
        double worst = 0.0;
        for (const auto& n : table.nodes)
        {
            const double rhs = kind == WarpKind::dss ? 1.0 - p.m / n.h - p.c * n.h * n.h
                                                     : 1.0 - p.m / n.h + p.q * p.q / (n.h * n.h);
            worst = std::max(worst, std::abs(n.dh * n.dh - rhs));
        }
        if (worst < options.conservation_tol && table.nodes.size() >= 2)
            return {std::move(table.nodes), table.dt};
        dt *= 0.5;
    }
    throw std::runtime_error("ODE integration could not meet the conservation tolerance");
}
} // namespace detail

WarpingModel make_dss(double m, double c, const OdeOptions& options)
{
    const auto window = dss_positivity_window(m, c);
    WarpParams p;
    p.m = m;
    p.c = c;
    auto solution = detail::solve_conserving(WarpKind::dss, p, window.s0, options);
    WarpingModel model;
    model.kind_   = WarpKind::dss;
    model.params_ = p;
    model.s0_     = window.s0;
    auto nodes    = std::make_shared< const std::vector< WarpNode > >(std::move(solution.nodes));
    model.domain_ = {nodes->front().t, nodes->back().t};
    model.eval_   = make_dense_evaluator(WarpKind::dss, p, nodes, solution.dt);
    model.nodes_  = nodes;
    return model;
}

WarpingModel make_rn(double m, double q, const OdeOptions& options)
{
    const double s0 = rn_horizon(m, q);
    WarpParams   p;
    p.m = m;
    p.q = q;
    auto solution = detail::solve_conserving(WarpKind::rn, p, s0, options);
    WarpingModel model;
    model.kind_   = WarpKind::rn;
    model.params_ = p;
    model.s0_     = s0;
    auto nodes    = std::make_shared< const std::vector< WarpNode > >(std::move(solution.nodes));
    model.domain_ = {nodes->front().t, nodes->back().t};
    model.eval_   = make_dense_evaluator(WarpKind::rn, p, nodes, solution.dt);
    model.nodes_  = nodes;
    return model;
}

double first_order_rhs(const WarpingModel& model, double h)
{
    const auto& p = model.params();
    switch (model.kind())
    {
    case WarpKind::dss:
        return 1.0 - p.m / h - p.c * h * h;
    case WarpKind::rn:
        return 1.0 - p.m / h + p.q * p.q / (h * h);
    default:
        throw std::invalid_argument("first_order_rhs: model is not ODE-defined");
    }
}

double conservation_residual(const WarpingModel& model, const WarpNode& node)
{
    return std::abs(node.dh * node.dh - first_order_rhs(model, node.h));
}

double max_conservation_residual(const WarpingModel& model)
{
    double worst = 0.0;
    for (const auto& n : model.nodes())
        worst = std::max(worst, conservation_residual(model, n));
    return worst;
}

SectionalPair curvatures(const WarpingModel& model, double t)
{
    const auto s = model.eval(t);
    if (!(s.h > 0.0))
        throw std::domain_error("curvatures: h(t) must be positive");
    return {(1.0 - s.dh * s.dh) / (s.h * s.h), -s.d2h / s.h};
}

double radicand_ambient(const WarpingModel& model, double t, double nu)
{
    const auto k = curvatures(model, t);
    return k.tangential - (1.0 - nu * nu) * (k.tangential - k.radial);
}

double radicand_closed_form(const WarpingModel& model, double t, double nu)
{
    const auto&  p  = model.params();
    const double h  = model.eval(t).h;
    const double h3 = h * h * h;
    switch (model.kind())
    {
    case WarpKind::dss:
        return p.c + p.m * (3.0 * nu * nu - 1.0) / (2.0 * h3);
    case WarpKind::rn:
        return p.m * (3.0 * nu * nu - 1.0) / (2.0 * h3) + p.q * p.q * (1.0 - 2.0 * nu * nu) / (h3 * h);
    case WarpKind::euclidean:
    case WarpKind::sphere:
    case WarpKind::hyperbolic:
        return p.c;
    case WarpKind::custom:
        break;
    }
    throw std::invalid_argument("radicand_closed_form: no closed form for custom models");
}

SmoothnessReport check_origin_smoothness(const WarpingModel& model, double tol)
{
    const auto dom = model.domain();
    if (!std::isfinite(dom.lo))
        throw std::invalid_argument("check_origin_smoothness: domain has no finite left endpoint");
    const double span  = std::isfinite(dom.hi) ? dom.hi - dom.lo : 1.0;
    const double delta = 1e-4 * std::min(1.0, span);
    const auto   a     = model.eval(dom.lo);
    const auto   b     = model.eval(dom.lo + delta);
    const auto   c     = model.eval(dom.lo + 2.0 * delta);
    SmoothnessReport rep;
    rep.h0      = a.h;
    rep.dh0     = a.dh;
    rep.d2h0_fd = (-3.0 * a.dh + 4.0 * b.dh - c.dh) / (2.0 * delta);
    rep.smooth_pole = std::abs(rep.h0) < tol && std::abs(rep.dh0 - 1.0) < tol && std::abs(rep.d2h0_fd) < tol;
    return rep;
}
} // namespace warphopf
