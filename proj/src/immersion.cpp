#include "warphopf/immersion.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace warphopf
{
double spherical_mode(const std::string& mode, const Vec3& w)
{
    const double x = w(0), y = w(1), z = w(2);
    if (mode == "Y00")
        return 1.0;
    if (mode == "Y10")
        return z;
    if (mode == "Y11")
        return x;
    if (mode == "Y1m1")
        return y;
    if (mode == "Y20")
        return 0.5 * (3.0 * z * z - 1.0);
    if (mode == "Y21")
        return x * z;
    if (mode == "Y22")
        return x * x - y * y;
    if (mode == "Y30")
        return 0.5 * z * (5.0 * z * z - 3.0);
    throw std::invalid_argument("unknown spherical mode '" + mode + "'");
}

bool is_conformal(const SurfaceSpec& spec)
{
    return std::holds_alternative< SliceSurface >(spec) || std::holds_alternative< EuclideanSphere >(spec);
}

Vec3 stereographic(int chart, cplx z)
{
    const double x = z.real(), y = z.imag();
    const double s = 1.0 + x * x + y * y;
    if (chart == 0)
        return Vec3(2.0 * x, 2.0 * y, 2.0 - s) / s;
    return Vec3(2.0 * x, -2.0 * y, s - 2.0) / s;
}

namespace
{
struct Positioner
{
    const RadialConformalFactor& ambient;

    Vec3 operator()(const SliceSurface& s, const Vec3& w) const { return ambient.G_inv(s.t0) * w; }
    Vec3 operator()(const EuclideanSphere& s, const Vec3& w) const { return s.center + s.radius * w; }
    Vec3 operator()(const GraphSurface& s, const Vec3& w) const { return ambient.G_inv(s.rho(w)) * w; }
    Vec3 operator()(const PerturbedSlice& s, const Vec3& w) const
    {
        return ambient.G_inv(s.t0 + s.eps * spherical_mode(s.mode, w)) * w;
    }
    Vec3 operator()(const Ellipsoid& s, const Vec3& w) const { return s.semiaxes.cwiseProduct(w); }
};

Chart make_chart(const SurfaceSpec& spec, const RadialConformalFactor& ambient, int id, LatticeGeometry geom,
                 double owned_radius)
{
    if (const auto* g = std::get_if< GraphSurface >(&spec); g && !g->rho)
        throw std::invalid_argument("graph surface without a height function");
    Chart chart;
    chart.id           = id;
    chart.owned_radius = owned_radius;
    chart.X            = Lattice< Vec3 >(geom, 0);
    const auto ann     = ambient.annulus();
    const Positioner pos{ambient};
    for (int j = 0; j < geom.n; ++j)
        for (int i = 0; i < geom.n; ++i)
        {
            const Vec3 w = stereographic(id, geom.node(i, j));
            const Vec3 X = std::visit([&](const auto& s) { return pos(s, w); }, spec);
            const double r = X.norm();
            if (!std::isfinite(r) || !ann.contains(r) || (r == 0.0 && ann.lo == 0.0))
                throw std::domain_error("surface leaves the ambient annulus at chart " + std::to_string(id) + " node (" +
                                        std::to_string(i) + ", " + std::to_string(j) + "), |X| = " + std::to_string(r));
            chart.X(i, j) = X;
        }
    return chart;
}

template < typename Fn >
void for_valid(int n, int band, Fn&& fn)
{
    parallel_for(static_cast< std::size_t >(n), [&](std::size_t jb, std::size_t je) {
        for (auto j = static_cast< int >(jb); j < static_cast< int >(je); ++j)
        {
            if (j < band || j >= n - band)
                continue;
            for (int i = band; i < n - band; ++i)
                fn(i, j);
        }
    });
}

Vec3 re(const Vec3c& v)
{
    return v.real();
}
Vec3 im(const Vec3c& v)
{
    return v.imag();
}
} // namespace

ImmersionGrid build_surface(const SurfaceSpec& spec, const RadialConformalFactor& ambient, int n, double rho_chart)
{
    if (n <= 4 * max_band)
        throw std::invalid_argument("build_surface: grid size too small");
    if (!(rho_chart > 1.0))
        throw std::invalid_argument("build_surface: chart radius must exceed 1 so the charts overlap");
    const double half = rho_chart / (1.0 - 2.0 * max_band / static_cast< double >(n - 1));
    LatticeGeometry geom{0.0, 2.0 * half / (n - 1), n};
    ImmersionGrid   grid;
    grid.conformal = is_conformal(spec);
    grid.rho_chart = rho_chart;
    grid.charts.push_back(make_chart(spec, ambient, 0, geom, 1.0));
    grid.charts.push_back(make_chart(spec, ambient, 1, geom, 1.0));
    return grid;
}

ImmersionGrid build_patch(const SurfaceSpec& spec, const RadialConformalFactor& ambient, int chart, cplx center,
                          double spacing, int n)
{
    if (chart != 0 && chart != 1)
        throw std::invalid_argument("build_patch: chart id must be 0 or 1");
    ImmersionGrid grid;
    grid.conformal = is_conformal(spec);
    grid.charts.push_back(
        make_chart(spec, ambient, chart, {center, spacing, n}, std::numeric_limits< double >::infinity()));
    return grid;
}

bool owned(const ImmersionGrid& grid, std::size_t chart, int i, int j, int band)
{
    const auto& c = grid.charts[chart];
    const int   n = c.geometry().n;
    if (i < band || j < band || i >= n - band || j >= n - band)
        return false;
    return std::abs(c.geometry().node(i, j)) <= c.owned_radius;
}

ConformalityDefect conformality_defect(const ImmersionGrid& grid, const RadialConformalFactor& ambient)
{
    ConformalityDefect out;
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const auto& chart   = grid.charts[c];
        const auto  Xz      = complex_derivative(chart.X).first;
        const int   n       = chart.geometry().n;
        Lattice< cplx > mu(chart.geometry(), Xz.band());
        std::vector< char > degenerate(chart.geometry().size(), 0);
        for_valid(n, Xz.band(), [&](int i, int j) {
            const auto   ap  = ambient_at(ambient, chart.X(i, j));
            const Vec3   Xu  = 2.0 * re(Xz(i, j));
            const Vec3   Xv  = -2.0 * im(Xz(i, j));
            const double E   = metric< double >(ap, Xu, Xu);
            const double F   = metric< double >(ap, Xu, Xv);
            const double G   = metric< double >(ap, Xv, Xv);
            const double det = E * G - F * F;
            if (!(det > 0.0))
            {
                degenerate[chart.geometry().index(i, j)] = 1;
                mu(i, j) = cplx(std::numeric_limits< double >::quiet_NaN(), 0.0);
                return;
            }
            const double lambda = 0.25 * (E + G + 2.0 * std::sqrt(det));
            mu(i, j)             = cplx(E - G, 2.0 * F) / (4.0 * lambda);
        });
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                if (!mu.valid(i, j))
                    continue;
                if (degenerate[chart.geometry().index(i, j)])
                {
                    ++out.degenerate_nodes;
                    continue;
                }
                if (owned(grid, c, i, j, mu.band()))
                    out.max_abs = std::max(out.max_abs, std::abs(mu(i, j)));
            }
        out.mu.push_back(std::move(mu));
    }
    return out;
}

namespace
{
ChartFields chart_fields(const Chart& chart, bool conformal, const RadialConformalFactor& ambient)
{
    const auto geom = chart.geometry();
    const int  n    = geom.n;
    const double nan = std::numeric_limits< double >::quiet_NaN();

    ChartFields f;
    auto [Xz, Xzb_unused] = complex_derivative(chart.X);
    (void)Xzb_unused;
    auto [Xzz, Xzzb] = complex_derivative(Xz);
    f.Xz   = std::move(Xz);
    f.Xzz  = std::move(Xzz);
    f.Xzzb = std::move(Xzzb);

    const int b1 = f.Xz.band();
    const int b2 = f.Xzz.band();
    f.NF          = Lattice< Vec3 >(geom, b1);
    f.alpha       = Lattice< double >(geom, b1);
    f.area        = Lattice< double >(geom, b1);
    f.E           = Lattice< double >(geom, b1);
    f.Fm          = Lattice< double >(geom, b1);
    f.G           = Lattice< double >(geom, b1);
    f.nu          = Lattice< double >(geom, b1);
    f.KbarT       = Lattice< double >(geom, b1);
    f.KbarT_lemma = Lattice< double >(geom, b1);
    f.r           = Lattice< double >(geom, 0);
    f.t           = Lattice< double >(geom, 0);
    f.H           = Lattice< double >(geom, b2);
    f.K_ext       = Lattice< double >(geom, b2);
    f.kappa1      = Lattice< double >(geom, b2);
    f.kappa2      = Lattice< double >(geom, b2);
    f.P           = Lattice< cplx >(geom, b2);
    f.p           = Lattice< cplx >(geom, b2);

    for_valid(n, 0, [&](int i, int j) {
        f.r(i, j) = chart.X(i, j).norm();
        f.t(i, j) = ambient.G(f.r(i, j));
    });

    // First-order quantities.
    for_valid(n, b1, [&](int i, int j) {
        const auto  ap = ambient_at(ambient, chart.X(i, j));
        const Vec3c xz = f.Xz(i, j);
        const Vec3  Xu = 2.0 * re(xz);
        const Vec3  Xv = -2.0 * im(xz);
        const double E = metric< double >(ap, Xu, Xu);
        const double F = metric< double >(ap, Xu, Xv);
        const double G = metric< double >(ap, Xv, Xv);
        f.E(i, j)      = E;
        f.Fm(i, j)     = F;
        f.G(i, j)      = G;
        f.area(i, j)   = std::sqrt(E * G - F * F);
        f.alpha(i, j)  = 0.5 * (E + G);
        const Vec3 cross = Xu.cross(Xv);
        const Vec3 n_euc = cross / cross.norm();
        f.NF(i, j)       = ap.F * n_euc;
        f.nu(i, j)       = n_euc.dot(chart.X(i, j)) / ap.r;
        f.KbarT(i, j)    = sectional(ap, Xu, Xv);
        if (conformal)
        {
            const Vec3c xzb  = xz.conjugate();
            const double alpha = 2.0 * real_part(metric< cplx >(ap, xz, xzb));
            f.KbarT_lemma(i, j) =
                -ap.grad_F.squaredNorm() + 4.0 / (alpha * ap.F) * real_part(hess_radial< cplx >(ap, xz, xzb));
        }
        else
            f.KbarT_lemma(i, j) = nan;
    });

    // Second-order quantities.
    for_valid(n, b2, [&](int i, int j) {
        const auto  ap   = ambient_at(ambient, chart.X(i, j));
        const Vec3c xz   = f.Xz(i, j);
        const Vec3c xzb  = xz.conjugate();
        const Vec3c xzz  = f.Xzz(i, j);
        const Vec3c xzzb = f.Xzzb(i, j);
        const Vec3  NF   = f.NF(i, j);
        if (conformal)
        {
            const double alpha = f.alpha(i, j);
            const cplx   P     = metric< cplx >(ap, Vec3c(xzz + connection_term< cplx >(ap, xz, xz)), NF.cast< cplx >());
            const cplx   mix   = metric< cplx >(ap, Vec3c(xzzb + connection_term< cplx >(ap, xzb, xz)), NF.cast< cplx >());
            const double H     = 2.0 / alpha * mix.real();
            const cplx   p     = 2.0 * P / alpha;
            f.P(i, j)          = P;
            f.p(i, j)          = p;
            f.H(i, j)          = H;
            f.kappa1(i, j)     = H + std::abs(p);
            f.kappa2(i, j)     = H - std::abs(p);
            f.K_ext(i, j)      = H * H - std::norm(p);
            return;
        }
        const Vec3 Xu  = 2.0 * re(xz);
        const Vec3 Xv  = -2.0 * im(xz);
        const Vec3 Xuu = 2.0 * re(xzzb) + 2.0 * re(xzz);
        const Vec3 Xvv = 2.0 * re(xzzb) - 2.0 * re(xzz);
        const Vec3 Xuv = -2.0 * im(xzz);
        const double L  = metric< double >(ap, Vec3(Xuu + connection_term< double >(ap, Xu, Xu)), NF);
        const double M  = metric< double >(ap, Vec3(Xuv + connection_term< double >(ap, Xu, Xv)), NF);
        const double Nn = metric< double >(ap, Vec3(Xvv + connection_term< double >(ap, Xv, Xv)), NF);
        const double E = f.E(i, j), F = f.Fm(i, j), G = f.G(i, j);
        const double det  = E * G - F * F;
        const double H    = (E * Nn - 2.0 * F * M + G * L) / (2.0 * det);
        const double Kext = (L * Nn - M * M) / det;
        const double disc = std::sqrt(std::max(0.0, H * H - Kext));
        f.H(i, j)         = H;
        f.K_ext(i, j)     = Kext;
        f.kappa1(i, j)    = H + disc;
        f.kappa2(i, j)    = H - disc;
        f.P(i, j)         = cplx(nan, nan);
        // Gram-Schmidt frame e1 = Xu/|Xu|, e2 ~ Xv - <Xv,e1> e1.
        const double ratio = F / E;
        const double g2    = G - F * ratio;
        const double a11   = L / E;
        const double a12   = (M - ratio * L) / std::sqrt(E * g2);
        const double a22   = (Nn - 2.0 * ratio * M + ratio * ratio * L) / g2;
        f.p(i, j)          = cplx(0.5 * (a11 - a22), -a12);
    });

    // Gaussian curvature of the induced metric.
    if (conformal)
    {
        Lattice< double > log_alpha(geom, b1);
        for_valid(n, b1, [&](int i, int j) { log_alpha(i, j) = std::log(f.alpha(i, j)); });
        const auto la_z   = complex_derivative(log_alpha).first;
        const auto la_zzb = complex_derivative(la_z).second;
        f.K = Lattice< double >(geom, la_zzb.band());
        for_valid(n, la_zzb.band(), [&](int i, int j) { f.K(i, j) = -2.0 * la_zzb(i, j).real() / f.alpha(i, j); });
    }
    else
    {
        const auto Eu = derivative_u(f.E), Ev = derivative_v(f.E);
        const auto Fu = derivative_u(f.Fm), Fv = derivative_v(f.Fm);
        const auto Gu = derivative_u(f.G), Gv = derivative_v(f.G);
        const auto Evv = derivative_v(Ev);
        const auto Guu = derivative_u(Gu);
        const auto Fuv = derivative_v(Fu);
        f.K = Lattice< double >(geom, Evv.band());
        for_valid(n, Evv.band(), [&](int i, int j) {
            const double E = f.E(i, j), F = f.Fm(i, j), G = f.G(i, j);
            Mat3         m1;
            m1 << -0.5 * Evv(i, j) + Fuv(i, j) - 0.5 * Guu(i, j), 0.5 * Eu(i, j), Fu(i, j) - 0.5 * Ev(i, j),
                Fv(i, j) - 0.5 * Gu(i, j), E, F, 0.5 * Gv(i, j), F, G;
            Mat3 m2;
            m2 << 0.0, 0.5 * Ev(i, j), 0.5 * Gu(i, j), 0.5 * Ev(i, j), E, F, 0.5 * Gu(i, j), F, G;
            const double det = E * G - F * F;
            f.K(i, j)        = (m1.determinant() - m2.determinant()) / (det * det);
        });
    }
    return f;
}
} // namespace

ShapeField shape_field(const ImmersionGrid& grid, const RadialConformalFactor& ambient)
{
    ShapeField out;
    out.conformal = grid.conformal;
    for (const auto& chart : grid.charts)
        out.charts.push_back(chart_fields(chart, grid.conformal, ambient));
    return out;
}

void write_csv(std::ostream& os, const ImmersionGrid& grid, const ShapeField& field)
{
    os << "chart,i,j,z_re,z_im,X1,X2,X3,alpha,H,K,nu,kappa1,kappa2,P_re,P_im\n";
    const auto old_precision = os.precision(17);
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const auto& chart = grid.charts[c];
        const auto& f     = field.charts[c];
        const int   n     = chart.geometry().n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                if (!owned(grid, c, i, j, f.K.band()))
                    continue;
                const cplx  z = chart.geometry().node(i, j);
                const Vec3& X = chart.X(i, j);
                os << chart.id << ',' << i << ',' << j << ',' << z.real() << ',' << z.imag() << ',' << X(0) << ',' << X(1)
                   << ',' << X(2) << ',' << f.alpha(i, j) << ',' << f.H(i, j) << ',' << f.K(i, j) << ',' << f.nu(i, j) << ','
                   << f.kappa1(i, j) << ',' << f.kappa2(i, j) << ',' << f.P(i, j).real() << ',' << f.P(i, j).imag() << '\n';
            }
    }
    os.precision(old_precision);
}
} // namespace warphopf
