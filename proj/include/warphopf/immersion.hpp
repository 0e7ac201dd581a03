#ifndef WARPHOPF_IMMERSION_HPP
#define WARPHOPF_IMMERSION_HPP

#include "warphopf/ambient.hpp"
#include "warphopf/lattice.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace warphopf
{
// ---- surface catalog -------------------------------------------------------------------

/// {t0} x S^2.
struct SliceSurface
{
    double t0 = 1.0;
};

/// Euclidean round sphere center + R w.
struct EuclideanSphere
{
    Vec3   center = Vec3::Zero();
    double radius = 1.0;
};

/// Radial graph X = r(rho(w)) w over the unit sphere, rho giving the warped coordinate t.
struct GraphSurface
{
    std::function< double(const Vec3&) > rho;
};

/// Graph with rho(w) = t0 + eps * Y_mode(w).
struct PerturbedSlice
{
    double      t0   = 1.0;
    double      eps  = 0.0;
    std::string mode = "Y20";
};

/// Ellipsoid (a w1, b w2, c w3).
struct Ellipsoid
{
    Vec3 semiaxes = Vec3::Ones();
};

using SurfaceSpec = std::variant< SliceSurface, EuclideanSphere, GraphSurface, PerturbedSlice, Ellipsoid >;

/// Unnormalized real spherical harmonics by name: Y00, Y10, Y11, Y1m1, Y20, Y21, Y22, Y30.
double spherical_mode(const std::string& mode, const Vec3& w);

/// Whether the stereographic charts of this catalog entry are conformal for <.,.>_F.
bool is_conformal(const SurfaceSpec& spec);

/// Unit-sphere point of stereographic chart `chart` (0: z = 0 at the north pole, 1: w = 1/z).
Vec3 stereographic(int chart, cplx z);

// ---- grids -------------------------------------------------------------------------------

struct Chart
{
    int             id = 0;
    Lattice< Vec3 > X;
    /// Nodes with |z| <= owned_radius are this chart's share of the sphere.
    double owned_radius = 1.0;

    [[nodiscard]] const LatticeGeometry& geometry() const { return X.geometry(); }
};

struct ImmersionGrid
{
    std::vector< Chart > charts;
    bool                 conformal   = true;
    double               rho_chart   = 1.2;
    [[nodiscard]] double spacing() const { return charts.front().geometry().spacing; }
};

/// Widest stencil band used by any derived field (third-order compositions of the
/// fourth-order first-derivative stencil).
inline constexpr int max_band = 6;

/// Two stereographic charts, each an n x n lattice wide enough that every node with
/// |z| <= rho_chart stays valid for all derived fields.
ImmersionGrid build_surface(const SurfaceSpec& spec, const RadialConformalFactor& ambient, int n, double rho_chart = 1.2);

/// Single-chart lattice around an arbitrary chart point; every valid node is owned.
ImmersionGrid build_patch(const SurfaceSpec& spec, const RadialConformalFactor& ambient, int chart, cplx center,
                          double spacing, int n);

/// Induced first fundamental form and Beltrami coefficient mu = (E - G + 2iF)/(4 lambda),
/// lambda = (E + G + 2 sqrt(EG - F^2))/4.
struct ConformalityDefect
{
    std::vector< Lattice< cplx > > mu;
    double                         max_abs           = 0.0; // over owned nodes
    std::size_t                    degenerate_nodes  = 0;
};
ConformalityDefect conformality_defect(const ImmersionGrid& grid, const RadialConformalFactor& ambient);

// ---- shape field --------------------------------------------------------------------------

/// Per-chart geometric fields. Scalars are valid where the lattice band allows.
struct ChartFields
{
    Lattice< Vec3c > Xz, Xzz, Xzzb;
    Lattice< Vec3 >  NF; // unit normal for <.,.>_F, Euclidean components
    Lattice< double > alpha;  // conformal factor (E + G)/2; equals alpha on conformal charts
    Lattice< double > area;   // sqrt(EG - F^2)
    Lattice< double > E, Fm, G;
    Lattice< double > H, K, K_ext, kappa1, kappa2, nu;
    Lattice< double > KbarT;        // sectional curvature of the tangent plane
    Lattice< double > KbarT_lemma;  // -|grad F|^2 + 4/(alpha F) Hess F(Xz, Xzb); conformal charts only
    Lattice< double > r, t;
    Lattice< cplx >   P; // <D_{Xz} Xz, N_F>_F; conformal charts only
    Lattice< cplx >   p; // trace-free second fundamental form in an orthonormal frame; 2P/alpha on conformal charts
};

struct ShapeField
{
    std::vector< ChartFields > charts;
    bool                       conformal = true;
};

ShapeField shape_field(const ImmersionGrid& grid, const RadialConformalFactor& ambient);

/// Whether node (i, j) of chart c counts towards chart-free statistics.
bool owned(const ImmersionGrid& grid, std::size_t chart, int i, int j, int band);

/// One row per owned node: chart,i,j,z_re,z_im,X1,X2,X3,alpha,H,K,nu,kappa1,kappa2,P_re,P_im.
void write_csv(std::ostream& os, const ImmersionGrid& grid, const ShapeField& field);
} // namespace warphopf

#endif // WARPHOPF_IMMERSION_HPP
