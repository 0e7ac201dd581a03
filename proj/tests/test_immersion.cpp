#include "warphopf/immersion.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace warphopf;

namespace
{
template < typename Fn >
void for_owned(const ImmersionGrid& grid, int band, Fn&& fn)
{
    for (std::size_t c = 0; c < grid.charts.size(); ++c)
    {
        const int n = grid.charts[c].geometry().n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (owned(grid, c, i, j, band))
                    fn(c, i, j);
    }
}

struct DssSetup
{
    WarpingModel          model  = make_dss(2.0, 0.0);
    RadialConformalFactor factor = radial_from_warp(model, 0.5);
    double                t0     = model.t_at_h(3.0);
};
} // namespace

TEST(Stereographic, Poles)
{
    EXPECT_LT((stereographic(0, 0.0) - Vec3(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT((stereographic(1, 0.0) - Vec3(0, 0, -1)).norm(), 1e-15);
}

TEST(Stereographic, ChartTransition)
{
    for (cplx z : {cplx(1.1, 0.3), cplx(-0.4, 0.9), cplx(0.2, -1.15)})
    {
        EXPECT_LT((stereographic(0, z) - stereographic(1, 1.0 / z)).norm(), 1e-15);
        EXPECT_NEAR(stereographic(0, z).norm(), 1.0, 1e-15);
    }
}

TEST(SphericalModes, Values)
{
    const Vec3 w(0.6, 0.0, 0.8);
    EXPECT_DOUBLE_EQ(spherical_mode("Y10", w), 0.8);
    EXPECT_NEAR(spherical_mode("Y20", w), 0.5 * (3 * 0.64 - 1), 1e-15);
    EXPECT_THROW((void)spherical_mode("Y99", w), std::invalid_argument);
}

TEST(BuildSurface, SliceRadius)
{
    DssSetup   s;
    const auto grid = build_surface(SliceSurface{s.t0}, s.factor, 64);
    const double r0 = s.factor.G_inv(s.t0);
    ASSERT_EQ(grid.charts.size(), 2u);
    EXPECT_TRUE(grid.conformal);
    for (const auto& chart : grid.charts)
        for (const auto& X : chart.X.values())
            EXPECT_NEAR(X.norm(), r0, 1e-12);
}

TEST(BuildSurface, CenteredSphereIsSlice)
{
    DssSetup   s;
    const auto a = build_surface(EuclideanSphere{Vec3::Zero(), 2.0}, s.factor, 48);
    const auto b = build_surface(SliceSurface{s.factor.G(2.0)}, s.factor, 48);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t k = 0; k < a.charts[c].X.values().size(); ++k)
            EXPECT_LT((a.charts[c].X.values()[k] - b.charts[c].X.values()[k]).norm(), 1e-12);
}

TEST(BuildSurface, ZeroPerturbationIsSlice)
{
    DssSetup   s;
    const auto a = build_surface(PerturbedSlice{s.t0, 0.0, "Y30"}, s.factor, 40);
    const auto b = build_surface(SliceSurface{s.t0}, s.factor, 40);
    EXPECT_FALSE(a.conformal);
    for (std::size_t c = 0; c < 2; ++c)
        EXPECT_EQ(a.charts[c].X.values(), b.charts[c].X.values());
}

TEST(BuildSurface, EveryOwnedNodeValidAtWidestBand)
{
    const auto grid = build_surface(Ellipsoid{}, flat_profile(), 40);
    const auto& chart = grid.charts[0];
    for (int j = 0; j < 40; ++j)
        for (int i = 0; i < 40; ++i)
            if (std::abs(chart.geometry().node(i, j)) <= 1.2)
                EXPECT_TRUE(i >= max_band && j >= max_band && i < 40 - max_band && j < 40 - max_band);
}

TEST(BuildSurface, RejectsEscapingImage)
{
    DssSetup s;
    try
    {
        (void)build_surface(EuclideanSphere{Vec3(0.3, 0, 0), 0.5}, s.factor, 40);
        FAIL() << "expected a domain error";
    }
    catch (const std::domain_error& e)
    {
        EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
    }
    EXPECT_THROW((void)build_surface(SliceSurface{1.0}, flat_profile(), 16), std::invalid_argument);
}

TEST(ConformalityDefect, SliceIsConformal)
{
    DssSetup   s;
    // The defect is measured with the same stencils as the geometry, so it decays like n^-4.
    const auto d = conformality_defect(build_surface(SliceSurface{s.t0}, s.factor, 384), s.factor);
    EXPECT_LT(d.max_abs, 1e-8);
    EXPECT_EQ(d.degenerate_nodes, 0u);
}

TEST(ConformalityDefect, GraphIsNot)
{
    DssSetup   s;
    const auto d = conformality_defect(build_surface(PerturbedSlice{s.t0, 0.1, "Y20"}, s.factor, 64), s.factor);
    EXPECT_GT(d.max_abs, 1e-4);
    EXPECT_LT(d.max_abs, 1.0);
}

TEST(ConformalityDefect, ScaleInvariantInFlatSpace)
{
    const auto a = conformality_defect(build_surface(Ellipsoid{Vec3(1.0, 1.2, 1.5)}, flat_profile(), 48), flat_profile());
    const auto b = conformality_defect(build_surface(Ellipsoid{Vec3(3.0, 3.6, 4.5)}, flat_profile(), 48), flat_profile());
    EXPECT_GT(a.max_abs, 0.0);
    EXPECT_NEAR(a.max_abs, b.max_abs, 1e-12);
}

TEST(ShapeField, RoundSphereInFlatSpace)
{
    const auto grid  = build_surface(EuclideanSphere{Vec3::Zero(), 2.0}, flat_profile(), 512);
    const auto field = shape_field(grid, flat_profile());
    double     eh = 0.0, ek = 0.0, en = 0.0;
    for_owned(grid, max_band, [&](std::size_t c, int i, int j) {
        const auto& f = field.charts[c];
        eh            = std::max(eh, std::abs(std::abs(f.H(i, j)) - 0.5));
        ek            = std::max(ek, std::abs(f.K(i, j) - 0.25));
        en            = std::max(en, std::abs(f.nu(i, j) * f.nu(i, j) - 1.0));
    });
    EXPECT_LT(eh, 1e-8);
    EXPECT_LT(ek, 1e-8);
    EXPECT_LT(en, 1e-12);
}

TEST(ShapeField, DssSlice)
{
    DssSetup   s;
    const auto grid  = build_surface(SliceSurface{s.t0}, s.factor, 192);
    const auto field = shape_field(grid, s.factor);
    const auto w     = s.model.eval(s.t0);
    for_owned(grid, max_band, [&](std::size_t c, int i, int j) {
        const auto& f = field.charts[c];
        EXPECT_NEAR(f.nu(i, j) * f.nu(i, j), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(f.H(i, j)), w.dh / w.h, 1e-6);
    });
}

TEST(ShapeField, OffCenterSphereInPoincareBall)
{
    const auto ball  = poincare_ball_profile();
    const auto grid  = build_surface(EuclideanSphere{Vec3(0.15, -0.1, 0.05), 0.5}, ball, 256);
    const auto field = shape_field(grid, ball);
    double     hmin = 1e300, hmax = -1e300, pmax = 0.0;
    for_owned(grid, max_band, [&](std::size_t c, int i, int j) {
        const auto& f = field.charts[c];
        hmin          = std::min(hmin, f.H(i, j));
        hmax          = std::max(hmax, f.H(i, j));
        pmax          = std::max(pmax, std::abs(f.P(i, j)));
        EXPECT_NEAR(f.kappa1(i, j), f.kappa2(i, j), 1e-6);
    });
    EXPECT_LT(hmax - hmin, 1e-6);
    EXPECT_LT(pmax, 1e-6);
}

TEST(ShapeField, Invariants)
{
    DssSetup s;
    for (const SurfaceSpec& spec : {SurfaceSpec{PerturbedSlice{s.t0, 0.1, "Y21"}}, SurfaceSpec{EuclideanSphere{Vec3(0.2, 0.1, -0.1), 1.5}}})
    {
        const auto grid  = build_surface(spec, s.factor, 192);
        const auto field = shape_field(grid, s.factor);
        for_owned(grid, max_band, [&](std::size_t c, int i, int j) {
            const auto& f  = field.charts[c];
            const auto  ap = ambient_at(s.factor, grid.charts[c].X(i, j));
            EXPECT_NEAR(metric< double >(ap, f.NF(i, j), f.NF(i, j)), 1.0, 1e-10);
            EXPECT_NEAR(f.H(i, j), 0.5 * (f.kappa1(i, j) + f.kappa2(i, j)), 1e-10);
            EXPECT_NEAR(f.K_ext(i, j), f.kappa1(i, j) * f.kappa2(i, j), 1e-10);
            EXPECT_GE(f.kappa1(i, j), f.kappa2(i, j));
            EXPECT_LE(std::abs(f.nu(i, j)), 1.0 + 1e-10);
            const double H = f.H(i, j);
            EXPECT_GE(H * H - f.K(i, j) + f.KbarT(i, j), -1e-6);
        });
    }
}

TEST(ShapeField, EllipsoidAgainstClosedForm)
{
    const Vec3 ax(1.0, 1.2, 1.5);
    const auto grid  = build_surface(Ellipsoid{ax}, flat_profile(), 384);
    const auto field = shape_field(grid, flat_profile());
    EXPECT_FALSE(field.conformal);
    const double abc = ax.prod();
    for_owned(grid, max_band, [&](std::size_t c, int i, int j) {
        const Vec3   X = grid.charts[c].X(i, j);
        const double s = (X.array() / ax.array().square()).square().sum();
        const double K = 1.0 / (abc * abc * s * s);
        const double H = (X.squaredNorm() - ax.squaredNorm()) / (2.0 * abc * abc * std::pow(s, 1.5));
        const auto&  f = field.charts[c];
        EXPECT_NEAR(f.K(i, j), K, 1e-6);
        EXPECT_NEAR(f.K_ext(i, j), K, 1e-6);
        EXPECT_NEAR(std::abs(f.H(i, j)), std::abs(H), 1e-6);
        EXPECT_NEAR(std::norm(f.p(i, j)), f.H(i, j) * f.H(i, j) - f.K_ext(i, j), 1e-10);
        EXPECT_TRUE(std::isnan(f.P(i, j).real()));
    });
}

TEST(ShapeField, ChartConsistencyOnOverlap)
{
    DssSetup                   s;
    const cplx                 zp = std::polar(1.1, 0.7);
    const std::vector< SurfaceSpec > specs{SliceSurface{s.t0}, EuclideanSphere{Vec3(0.2, 0.1, -0.1), 1.5},
                                           PerturbedSlice{s.t0, 0.05, "Y22"}};
    for (const auto& spec : specs)
    {
        const auto north = build_patch(spec, s.factor, 0, zp, 4e-3, 21);
        const auto south = build_patch(spec, s.factor, 1, 1.0 / zp, 4e-3, 21);
        const auto fn    = shape_field(north, s.factor).charts[0];
        const auto fs    = shape_field(south, s.factor).charts[0];
        const int  m     = 10;
        EXPECT_LT((north.charts[0].X(m, m) - south.charts[0].X(m, m)).norm(), 1e-12);
        EXPECT_NEAR(fn.H(m, m), fs.H(m, m), 1e-6);
        EXPECT_NEAR(fn.K(m, m), fs.K(m, m), 1e-6);
        EXPECT_NEAR(fn.nu(m, m), fs.nu(m, m), 1e-6);
        EXPECT_NEAR(fn.kappa1(m, m), fs.kappa1(m, m), 1e-6);
        EXPECT_NEAR(fn.kappa2(m, m), fs.kappa2(m, m), 1e-6);
        EXPECT_NEAR(fn.KbarT(m, m), fs.KbarT(m, m), 1e-6);
        EXPECT_NEAR(std::norm(fn.p(m, m)), std::norm(fs.p(m, m)), 1e-6);
    }
}

TEST(ShapeField, TangentPlaneCurvatureTwoWays)
{
    DssSetup   s;
    const auto grid  = build_surface(EuclideanSphere{Vec3(0.2, 0.1, -0.1), 1.5}, s.factor, 64);
    const auto field = shape_field(grid, s.factor);
    for_owned(grid, max_band, [&](std::size_t c, int i, int j) {
        EXPECT_NEAR(field.charts[c].KbarT_lemma(i, j), field.charts[c].KbarT(i, j), 1e-6);
    });
}

TEST(ComplexDerivative, Polynomials)
{
    LatticeGeometry   geom{cplx(0.1, -0.2), 0.05, 21};
    Lattice< cplx >   z(geom), zz(geom);
    Lattice< double > r2(geom);
    for (int j = 0; j < 21; ++j)
        for (int i = 0; i < 21; ++i)
        {
            z(i, j)  = geom.node(i, j);
            r2(i, j) = std::norm(geom.node(i, j));
        }
    const auto [dz, dzb]   = complex_derivative(z);
    const auto [rz, rzb]   = complex_derivative(r2);
    EXPECT_EQ(dz.band(), 2);
    for (int j = 2; j < 19; ++j)
        for (int i = 2; i < 19; ++i)
        {
            EXPECT_NEAR(std::abs(dz(i, j) - 1.0), 0.0, 1e-13);
            EXPECT_NEAR(std::abs(dzb(i, j)), 0.0, 1e-13);
            EXPECT_NEAR(std::abs(rz(i, j) - std::conj(geom.node(i, j))), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(rzb(i, j) - geom.node(i, j)), 0.0, 1e-12);
        }
    EXPECT_FALSE(dz.valid(1, 5));
}

TEST(ComplexDerivative, FourthOrderOnExp)
{
    auto err = [](double h) {
        LatticeGeometry geom{cplx(0.3, 0.2), h, 9};
        Lattice< cplx > f(geom);
        for (int j = 0; j < 9; ++j)
            for (int i = 0; i < 9; ++i)
                f(i, j) = std::exp(geom.node(i, j));
        const auto [dz, dzb] = complex_derivative(f);
        return std::abs(dz(4, 4) - std::exp(cplx(0.3, 0.2))) + std::abs(dzb(4, 4));
    };
    const double ratio = err(0.1) / err(0.05);
    EXPECT_NEAR(ratio, 16.0, 1.0);
}

TEST(Csv, ColumnsAndRows)
{
    const auto grid  = build_surface(EuclideanSphere{Vec3::Zero(), 1.0}, flat_profile(), 40);
    const auto field = shape_field(grid, flat_profile());
    std::ostringstream out;
    write_csv(out, grid, field);
    std::istringstream in(out.str());
    std::string        line;
    std::getline(in, line);
    EXPECT_EQ(line, "chart,i,j,z_re,z_im,X1,X2,X3,alpha,H,K,nu,kappa1,kappa2,P_re,P_im");
    std::size_t rows = 0, owned_count = 0;
    while (std::getline(in, line))
        ++rows;
    for_owned(grid, max_band, [&](std::size_t, int, int) { ++owned_count; });
    EXPECT_EQ(rows, owned_count);
    EXPECT_GT(rows, 0u);
}
