#include "warphopf/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace warphopf
{
std::string to_string(IdentityId id)
{
    return "I" + std::to_string(static_cast< int >(id) + 1);
}

IdentityId parse_identity(const std::string& name)
{
    for (int k = 0; k < 10; ++k)
        if (name == "I" + std::to_string(k + 1))
            return static_cast< IdentityId >(k);
    throw std::invalid_argument("unknown identity id '" + name + "'");
}

bool requires_conformal(IdentityId id)
{
    return id != IdentityId::I7 && id != IdentityId::I10;
}

namespace
{
constexpr double nan = std::numeric_limits< double >::quiet_NaN();

struct NodeValue
{
    double residual  = 0.0;
    double magnitude = 0.0;
};

// Evaluates fn on every owned node of every chart (in parallel) and returns the values in
// lattice order, so that reductions do not depend on the thread count.
template < typename T, typename Fn >
std::vector< std::vector< std::pair< std::size_t, T > > > owned_map(const ImmersionGrid& grid, int band, Fn&& fn)
{
    std::vector< std::vector< std::pair< std::size_t, T > > > out(grid.charts.size());
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const auto& geom = grid.charts[c].geometry();
        const int   n    = geom.n;
        std::vector< std::vector< std::pair< std::size_t, T > > > rows(static_cast< std::size_t >(n));
        parallel_for(static_cast< std::size_t >(n), [&](std::size_t jb, std::size_t je) {
            for (auto j = static_cast< int >(jb); j < static_cast< int >(je); ++j)
                for (int i = 0; i < n; ++i)
                    if (owned(grid, c, i, j, band))
                        rows[static_cast< std::size_t >(j)].emplace_back(geom.index(i, j), fn(c, i, j));
        });
        for (auto& row : rows)
            for (auto& v : row)
                out[c].push_back(std::move(v));
    }
    return out;
}

int identity_band(IdentityId id)
{
    switch (id)
    {
    case IdentityId::I1: return 4;
    case IdentityId::I2:
    case IdentityId::I3:
    case IdentityId::I9: return 6;
    case IdentityId::I7: return 0;
    default: return 2;
    }
}

double fnorm(const AmbientPoint& ap, const Vec3c& v)
{
    return v.norm() / ap.F;
}

cplx curvature_normal(const AmbientPoint& ap, const Vec3c& xz, const Vec3& NF)
{
    // <R(X_z, X_zb) X_z, N_F> in the convention of the Hopf derivative formula (opposite to riemann()).
    const Vec3c R = -riemann< cplx >(ap, xz, xz.conjugate(), xz);
    return metric< cplx >(ap, R, NF.cast< cplx >());
}

double kdiff(const WarpingModel& model, double t)
{
    const auto k = curvatures(model, t);
    return k.tangential - k.radial;
}

struct ChartDerivatives
{
    Lattice< Vec3c > NF_z;
    Lattice< cplx >  alpha_z, r_z, t_z, H_z, P_zb;
};
} // namespace

ResidualReport evaluate_identity(const ImmersionGrid& grid, const ShapeField& field, const RadialConformalFactor& ambient,
                                 const WarpingModel& model, IdentityId id)
{
    if (requires_conformal(id) && !grid.conformal)
        throw UnsupportedIdentity("identity " + to_string(id) + " requires conformal charts");

    std::vector< ChartDerivatives > d(grid.charts.size());
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const auto& f = field.charts[c];
        switch (id)
        {
        case IdentityId::I1:
            d[c].NF_z    = complex_derivative(f.NF).first;
            d[c].alpha_z = complex_derivative(f.alpha).first;
            break;
        case IdentityId::I3:
            d[c].H_z  = complex_derivative(f.H).first;
            d[c].P_zb = complex_derivative(f.P).second;
            break;
        case IdentityId::I5: d[c].r_z = complex_derivative(f.r).first; break;
        case IdentityId::I8: d[c].t_z = complex_derivative(f.t).first; break;
        case IdentityId::I9:
            d[c].H_z  = complex_derivative(f.H).first;
            d[c].P_zb = complex_derivative(f.P).second;
            d[c].t_z  = complex_derivative(f.t).first;
            break;
        default: break;
        }
    }

    auto node = [&](std::size_t c, int i, int j) -> NodeValue {
        const auto&  f     = field.charts[c];
        const auto&  dc    = d[c];
        const Vec3&  X     = grid.charts[c].X(i, j);
        const auto   ap    = ambient_at(ambient, X);
        const double alpha = f.alpha(i, j);
        switch (id)
        {
        case IdentityId::I1: {
            const Vec3c xz  = f.Xz(i, j);
            const Vec3c xzb = xz.conjugate();
            const Vec3c NF  = f.NF(i, j).cast< cplx >();
            const double H  = f.H(i, j);
            const cplx   P  = f.P(i, j);
            const Vec3c mixed = f.Xzzb(i, j) + connection_term< cplx >(ap, xzb, xz);
            const Vec3c pure  = f.Xzz(i, j) + connection_term< cplx >(ap, xz, xz);
            const Vec3c dN    = dc.NF_z(i, j) + connection_term< cplx >(ap, xz, NF);
            const double r1 = fnorm(ap, Vec3c(mixed - 0.5 * alpha * H * NF));
            const double r2 = fnorm(ap, Vec3c(pure - dc.alpha_z(i, j) / alpha * xz - P * NF));
            const double r3 = fnorm(ap, Vec3c(dN + H * xz + 2.0 * P / alpha * xzb));
            return {std::max({r1, r2, r3}), std::max({fnorm(ap, mixed), fnorm(ap, pure), fnorm(ap, dN)})};
        }
        case IdentityId::I2: {
            const double lhs = std::norm(f.p(i, j));
            const double H   = f.H(i, j);
            const double rhs = H * H - f.K(i, j) + f.KbarT(i, j);
            return {std::abs(lhs - rhs), std::max({lhs, H * H, std::abs(f.K(i, j)), std::abs(f.KbarT(i, j))})};
        }
        case IdentityId::I3: {
            const cplx lhs  = dc.P_zb(i, j);
            const cplx grad = 0.5 * alpha * dc.H_z(i, j);
            const cplx curv = curvature_normal(ap, f.Xz(i, j), f.NF(i, j));
            return {std::abs(lhs - grad - curv), std::max({std::abs(lhs), std::abs(grad), std::abs(curv)})};
        }
        case IdentityId::I4: {
            const Vec3c xz   = f.Xz(i, j);
            const cplx  curv = curvature_normal(ap, xz, f.NF(i, j));
            const cplx  hess = -alpha / (2.0 * ap.F) * hess_radial< cplx >(ap, xz, f.NF(i, j).cast< cplx >());
            return {std::abs(curv - hess), std::max(std::abs(curv), std::abs(hess))};
        }
        case IdentityId::I5: {
            const double u   = ap.s.u;
            const double lhs = 4.0 / (alpha * u * u) * std::norm(dc.r_z(i, j)) + f.nu(i, j) * f.nu(i, j);
            return {std::abs(lhs - 1.0), 1.0};
        }
        case IdentityId::I6: {
            const double a = f.KbarT_lemma(i, j);
            const double b = f.KbarT(i, j);
            return {std::abs(a - b), std::max(std::abs(a), std::abs(b))};
        }
        case IdentityId::I7: {
            const double r  = f.r(i, j);
            const auto   w  = model.eval(f.t(i, j));
            const double e1 = std::abs(r / ap.s.u - w.h);
            const double e2 = std::abs(ap.s.du - (1.0 - w.dh) / w.h);
            const double rhs3 = -w.d2h / w.h - (1.0 - w.dh) * w.dh / (w.h * w.h);
            const double e3 = std::abs(ap.s.d2u * ap.s.u - rhs3);
            return {std::max({e1, e2, e3}), std::max({w.h, std::abs(ap.s.du), std::abs(rhs3)})};
        }
        case IdentityId::I8: {
            const Vec3c  n    = (f.NF(i, j) / ap.F).cast< cplx >();
            const cplx   hess = hess_radial< cplx >(ap, f.Xz(i, j), n);
            const cplx   warp = -kdiff(model, f.t(i, j)) * f.nu(i, j) * dc.t_z(i, j);
            return {std::abs(hess - warp), std::max(std::abs(hess), std::abs(warp))};
        }
        case IdentityId::I9: {
            const cplx lhs = dc.P_zb(i, j);
            const cplx rhs = 0.5 * alpha * (dc.H_z(i, j) + kdiff(model, f.t(i, j)) * f.nu(i, j) * dc.t_z(i, j));
            return {std::abs(lhs - rhs), std::max(std::abs(lhs), std::abs(rhs))};
        }
        case IdentityId::I10: {
            const double a = radicand_ambient(model, f.t(i, j), f.nu(i, j));
            const double b = radicand_closed_form(model, f.t(i, j), f.nu(i, j));
            return {std::abs(a - b), std::max(std::abs(a), std::abs(b))};
        }
        }
        return {};
    };

    const auto values = owned_map< NodeValue >(grid, identity_band(id), node);

    ResidualReport rep;
    rep.id        = id;
    rep.grid_step = grid.spacing();
    double scale  = 0.0;
    for (const auto& chart : values)
        for (const auto& [idx, v] : chart)
        {
            scale = std::max(scale, v.magnitude);
            ++rep.node_count;
        }
    rep.scale       = scale;
    const double nz = std::max(1.0, scale);
    double       sq = 0.0;
    for (const auto& chart : values)
        for (const auto& [idx, v] : chart)
        {
            const double e   = v.residual / nz;
            rep.max_residual = std::max(rep.max_residual, e);
            sq += e * e;
        }
    if (rep.node_count > 0)
        rep.rms_residual = std::sqrt(sq / static_cast< double >(rep.node_count));
    return rep;
}

ResidualReport evaluate_identity(const ImmersionGrid& grid, const RadialConformalFactor& ambient,
                                 const WarpingModel& model, IdentityId id)
{
    if (requires_conformal(id) && !grid.conformal)
        throw UnsupportedIdentity("identity " + to_string(id) + " requires conformal charts");
    return evaluate_identity(grid, shape_field(grid, ambient), ambient, model, id);
}

ResidualReport evaluate_radicand_identity(const WarpingModel& model, double t_lo, double t_hi, int nt, int nnu)
{
    if (nt < 2 || nnu < 2 || !(t_hi > t_lo))
        throw std::invalid_argument("evaluate_radicand_identity: empty sample grid");
    std::vector< NodeValue > values;
    for (int k = 0; k < nt; ++k)
    {
        const double t = t_lo + (t_hi - t_lo) * k / (nt - 1);
        for (int l = 0; l < nnu; ++l)
        {
            const double nu = -1.0 + 2.0 * l / (nnu - 1);
            const double a  = radicand_ambient(model, t, nu);
            const double b  = radicand_closed_form(model, t, nu);
            values.push_back({std::abs(a - b), std::max(std::abs(a), std::abs(b))});
        }
    }
    ResidualReport rep;
    rep.id         = IdentityId::I10;
    rep.grid_step  = (t_hi - t_lo) / (nt - 1);
    rep.node_count = values.size();
    for (const auto& v : values)
        rep.scale = std::max(rep.scale, v.magnitude);
    const double nz = std::max(1.0, rep.scale);
    double       sq = 0.0;
    for (const auto& v : values)
    {
        rep.max_residual = std::max(rep.max_residual, v.residual / nz);
        sq += (v.residual / nz) * (v.residual / nz);
    }
    rep.rms_residual = std::sqrt(sq / static_cast< double >(values.size()));
    return rep;
}

double convergence_order(const ResidualReport& coarse, const ResidualReport& fine)
{
    if (!(coarse.grid_step > fine.grid_step) || fine.grid_step <= 0.0)
        throw std::invalid_argument("convergence_order: the second report must use the finer grid");
    return std::log(coarse.max_residual / fine.max_residual) / std::log(coarse.grid_step / fine.grid_step);
}

void attach_convergence_order(const ResidualReport& coarse, ResidualReport& fine)
{
    // An order fitted to rounding noise means nothing; such reports carry none.
    if (fine.max_residual > roundoff_floor)
        fine.convergence_order = convergence_order(coarse, fine);
    else
        fine.convergence_order.reset();
}

bool converges(const ResidualReport& coarse, const ResidualReport& fine, double min_order)
{
    if (fine.max_residual <= roundoff_floor)
        return true;
    return convergence_order(coarse, fine) >= min_order;
}

namespace
{
double max_abs_H(const ImmersionGrid& grid, const ShapeField& field, int band)
{
    double m = 0.0;
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const int n = grid.charts[c].geometry().n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (owned(grid, c, i, j, band))
                    m = std::max(m, std::abs(field.charts[c].H(i, j)));
    }
    return m;
}

// |grad s|^2 for the induced metric, from chart partials.
double gradient_norm2(const ChartFields& f, int i, int j, double su, double sv)
{
    const double E = f.E(i, j), F = f.Fm(i, j), G = f.G(i, j);
    return (G * su * su - 2.0 * F * su * sv + E * sv * sv) / (E * G - F * F);
}

FieldSummary summarize(const std::vector< double >& v)
{
    FieldSummary s;
    double       sq = 0.0;
    s.max           = -std::numeric_limits< double >::infinity();
    s.min           = std::numeric_limits< double >::infinity();
    for (double x : v)
    {
        if (std::isnan(x))
            continue;
        s.max = std::max(s.max, x);
        s.min = std::min(s.min, x);
        sq += x * x;
        ++s.count;
    }
    if (s.count == 0)
        return {nan, nan, nan, 0};
    s.rms = std::sqrt(sq / static_cast< double >(s.count));
    return s;
}
} // namespace

ETReport et_test(const ImmersionGrid& grid, const ShapeField& field, const RadialConformalFactor& ambient,
                 const WarpingModel& model, const ETOptions& options)
{
    (void)ambient;
    constexpr int band = 6;
    ETReport      rep;
    rep.p                 = options.p;
    const double lhs_zero = options.lhs_zero.value_or(1e-5 * (1.0 + max_abs_H(grid, field, band)));

    struct Node
    {
        double lhs, rad, f, weight;
    };
    std::vector< Lattice< double > > tu(grid.charts.size()), tv(grid.charts.size()), Hu(grid.charts.size()),
        Hv(grid.charts.size());
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const auto& f = field.charts[c];
        tu[c]         = derivative_u(f.t);
        tv[c]         = derivative_v(f.t);
        Hu[c]         = derivative_u(f.H);
        Hv[c]         = derivative_v(f.H);
        const auto& geom = grid.charts[c].geometry();
        rep.lhs.emplace_back(geom, band);
        rep.radicand.emplace_back(geom, band);
        rep.f_min.emplace_back(geom, band);
        for (auto* l : {&rep.lhs.back(), &rep.radicand.back(), &rep.f_min.back()})
            std::fill(l->values().begin(), l->values().end(), nan);
    }
    const double h2 = grid.spacing() * grid.spacing();

    const auto nodes = owned_map< Node >(grid, band, [&](std::size_t c, int i, int j) -> Node {
        const auto&  f   = field.charts[c];
        const double t   = f.t(i, j);
        const double nu  = f.nu(i, j);
        const auto   k   = curvatures(model, t);
        const double kd  = k.tangential - k.radial;
        const double a   = Hu[c](i, j) + kd * nu * tu[c](i, j);
        const double b   = Hv[c](i, j) + kd * nu * tv[c](i, j);
        const double lhs = std::sqrt(std::max(0.0, gradient_norm2(f, i, j, a, b)));
        const double H   = f.H(i, j);
        const double rad = H * H - f.K(i, j) + k.tangential - (1.0 - nu * nu) * kd;
        double       fm  = nan;
        if (rad > options.rad_floor)
            fm = lhs < lhs_zero ? 0.0 : lhs / std::sqrt(rad);
        return {lhs, rad, fm, f.area(i, j) * h2};
    });

    std::vector< double > all_lhs, all_rad, all_f;
    double                integral = 0.0;
    for (std::size_t c = 0; c < nodes.size(); ++c)
        for (const auto& [idx, v] : nodes[c])
        {
            rep.lhs[c].values()[idx]      = v.lhs;
            rep.radicand[c].values()[idx] = v.rad;
            rep.f_min[c].values()[idx]    = v.f;
            all_lhs.push_back(v.lhs);
            all_rad.push_back(v.rad);
            all_f.push_back(v.f);
            if (std::isnan(v.f))
            {
                ++rep.umbilic_nodes;
                continue;
            }
            rep.sup_f_min = std::max(rep.sup_f_min, v.f);
            integral += std::pow(v.f, rep.p) * v.weight;
        }
    rep.p_norm           = std::pow(integral, 1.0 / rep.p);
    rep.lhs_summary      = summarize(all_lhs);
    rep.radicand_summary = summarize(all_rad);
    rep.f_min_summary    = summarize(all_f);
    return rep;
}

Verdict classify(const ImmersionGrid& grid, const ShapeField& field, const WarpingModel& model, std::optional< double > tol)
{
    constexpr int band = 4;
    Verdict       v;
    v.tol = tol.value_or(1e-5 * (1.0 + max_abs_H(grid, field, band)));

    struct Node
    {
        double H, spread, dt, nu, kdiff, weight;
    };
    std::vector< Lattice< double > > tu, tv;
    for (const auto& f : field.charts)
    {
        tu.push_back(derivative_u(f.t));
        tv.push_back(derivative_v(f.t));
    }
    const double h2    = grid.spacing() * grid.spacing();
    const auto   nodes = owned_map< Node >(grid, band, [&](std::size_t c, int i, int j) -> Node {
        const auto&  f  = field.charts[c];
        const double dt = std::sqrt(std::max(0.0, gradient_norm2(f, i, j, tu[c](i, j), tv[c](i, j))));
        return {f.H(i, j), f.kappa1(i, j) - f.kappa2(i, j), dt, f.nu(i, j), kdiff(model, f.t(i, j)), f.area(i, j) * h2};
    });

    double Hmax = -std::numeric_limits< double >::infinity(), Hmin = std::numeric_limits< double >::infinity();
    double dtmax = 0.0, nu2min = std::numeric_limits< double >::infinity();
    double area = 0.0, d1 = 0.0, d2 = 0.0, dk = 0.0;
    for (const auto& chart : nodes)
        for (const auto& [idx, x] : chart)
        {
            Hmax           = std::max(Hmax, x.H);
            Hmin           = std::min(Hmin, x.H);
            v.kappa_spread = std::max(v.kappa_spread, x.spread);
            dtmax          = std::max(dtmax, x.dt);
            nu2min         = std::min(nu2min, x.nu * x.nu);
            area += x.weight;
            if (std::abs(x.nu) < v.tol)
                d1 += x.weight;
            if (x.dt < v.tol)
                d2 += x.weight;
            if (std::abs(x.kdiff) < v.tol)
                dk += x.weight;
        }
    v.umbilic             = 0.25 * v.kappa_spread * v.kappa_spread < v.tol * v.tol;
    v.cmc                 = Hmax - Hmin < v.tol;
    v.slice               = dtmax < v.tol && nu2min > 1.0 - v.tol;
    v.D1_fraction         = area > 0.0 ? d1 / area : 0.0;
    v.D2_fraction         = area > 0.0 ? d2 / area : 0.0;
    v.Kdiff_zero_fraction = area > 0.0 ? dk / area : 0.0;
    return v;
}

namespace
{
// Bilinear interpolation of p at a chart point; nullopt outside the valid region.
std::optional< cplx > sample_p(const Lattice< cplx >& p, cplx z)
{
    const auto&  g  = p.geometry();
    const double c0 = 0.5 * (g.n - 1);
    const double x  = (z - g.center).real() / g.spacing + c0;
    const double y  = (z - g.center).imag() / g.spacing + c0;
    const int    i  = static_cast< int >(std::floor(x));
    const int    j  = static_cast< int >(std::floor(y));
    if (!p.valid(i, j) || !p.valid(i + 1, j + 1))
        return std::nullopt;
    const double fx = x - i, fy = y - j;
    return (1 - fx) * (1 - fy) * p(i, j) + fx * (1 - fy) * p(i + 1, j) + (1 - fx) * fy * p(i, j + 1) +
           fx * fy * p(i + 1, j + 1);
}

std::optional< int > winding(const Lattice< cplx >& p, cplx z0, double radius)
{
    constexpr int samples = 16;
    std::array< double, samples > phase{};
    for (int k = 0; k < samples; ++k)
    {
        const double th = 2.0 * std::numbers::pi * k / samples;
        const auto   v  = sample_p(p, z0 + radius * std::polar(1.0, th));
        if (!v || std::abs(*v) == 0.0)
            return std::nullopt;
        phase[static_cast< std::size_t >(k)] = std::arg(*v);
    }
    double total = 0.0;
    for (int k = 0; k < samples; ++k)
    {
        double d = phase[static_cast< std::size_t >((k + 1) % samples)] - phase[static_cast< std::size_t >(k)];
        d        = std::remainder(d, 2.0 * std::numbers::pi);
        if (std::abs(d) > 0.9 * std::numbers::pi)
            return std::nullopt;
        total += d;
    }
    return static_cast< int >(std::lround(total / (2.0 * std::numbers::pi)));
}
} // namespace

HopfZeroReport hopf_zero_indices(const ImmersionGrid& grid, const ShapeField& field, std::optional< double > tol)
{
    constexpr int band = 4;
    HopfZeroReport rep;
    const double   threshold_tol = tol.value_or(1e-5 * (1.0 + max_abs_H(grid, field, band)));

    double pmax = 0.0;
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const int n = grid.charts[c].geometry().n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (owned(grid, c, i, j, band))
                    pmax = std::max(pmax, std::abs(field.charts[c].p(i, j)));
    }
    if (pmax < threshold_tol)
    {
        rep.degenerate = true;
        return rep;
    }

    const double step = grid.spacing();
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const auto& p    = field.charts[c].p;
        const auto& geom = grid.charts[c].geometry();
        const int   n    = geom.n;
        struct Candidate
        {
            int    i, j;
            double mag;
        };
        std::vector< Candidate > cands;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                if (!owned(grid, c, i, j, band) || !p.valid(i - 1, j - 1) || !p.valid(i + 1, j + 1))
                    continue;
                const double m = std::abs(p(i, j));
                if (m >= 0.1 * pmax)
                    continue;
                bool is_min = true;
                for (int dj = -1; dj <= 1 && is_min; ++dj)
                    for (int di = -1; di <= 1; ++di)
                        if ((di || dj) && std::abs(p(i + di, j + dj)) < m)
                        {
                            is_min = false;
                            break;
                        }
                if (is_min)
                    cands.push_back({i, j, m});
            }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.mag < b.mag; });
        std::vector< Candidate > kept;
        for (const auto& cd : cands)
        {
            const bool near = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
                return std::hypot(k.i - cd.i, k.j - cd.j) <= 4.0;
            });
            if (!near)
                kept.push_back(cd);
        }
        std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
            return std::pair(a.j, a.i) < std::pair(b.j, b.i);
        });
        for (const auto& cd : kept)
        {
            HopfZero zero;
            zero.chart    = grid.charts[c].id;
            zero.z        = geom.node(cd.i, cd.j);
            zero.position = grid.charts[c].X(cd.i, cd.j);
            std::optional< int > w;
            for (double factor : {3.0, 2.0, 4.0, 1.5, 6.0})
                if ((w = winding(p, zero.z, factor * step)))
                    break;
            if (!w)
            {
                zero.resolved    = false;
                rep.all_resolved = false;
                rep.zeros.push_back(zero);
                continue;
            }
            if (*w == 0)
                continue;
            zero.winding = *w;
            zero.index   = -0.5 * *w;
            rep.index_sum += zero.index;
            rep.zeros.push_back(zero);
        }
    }
    return rep;
}

void to_json(Json& j, const ResidualReport& r)
{
    j = Json{{"id", to_string(r.id)},         {"max_residual", r.max_residual}, {"rms_residual", r.rms_residual},
             {"scale", r.scale},              {"node_count", r.node_count},     {"grid_step", r.grid_step}};
    if (r.convergence_order)
        j["convergence_order"] = *r.convergence_order;
}

void to_json(Json& j, const FieldSummary& s)
{
    j = Json{{"max", s.max}, {"min", s.min}, {"rms", s.rms}, {"count", s.count}};
}

void to_json(Json& j, const ETReport& r)
{
    j = Json{{"LHS", r.lhs_summary},      {"radicand", r.radicand_summary}, {"f_min", r.f_min_summary},
             {"sup_f_min", r.sup_f_min},  {"p", r.p},                       {"p_norm", r.p_norm},
             {"umbilic_nodes", r.umbilic_nodes}};
}

void to_json(Json& j, const Verdict& v)
{
    j = Json{{"umbilic", v.umbilic},
             {"cmc", v.cmc},
             {"slice", v.slice},
             {"D1_fraction", v.D1_fraction},
             {"D2_fraction", v.D2_fraction},
             {"kappa_spread", v.kappa_spread},
             {"Kdiff_zero_fraction", v.Kdiff_zero_fraction},
             {"tol", v.tol}};
}

void to_json(Json& j, const HopfZero& z)
{
    j = Json{{"chart", z.chart},
             {"z", {z.z.real(), z.z.imag()}},
             {"position", {z.position(0), z.position(1), z.position(2)}},
             {"winding", z.winding},
             {"index", z.index},
             {"resolved", z.resolved}};
}

void to_json(Json& j, const HopfZeroReport& r)
{
    j = Json{{"degenerate", r.degenerate}, {"zeros", r.zeros}, {"index_sum", r.index_sum}, {"all_resolved", r.all_resolved}};
}
} // namespace warphopf
