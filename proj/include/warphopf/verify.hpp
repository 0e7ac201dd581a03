#ifndef WARPHOPF_VERIFY_HPP
#define WARPHOPF_VERIFY_HPP

#include "warphopf/ambient.hpp"
#include "warphopf/immersion.hpp"
#include "warphopf/warp.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace warphopf
{
using Json = nlohmann::ordered_json;

enum class IdentityId
{
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    I8,
    I9,
    I10
};

std::string to_string(IdentityId id);
/// Throws std::invalid_argument for unknown ids.
IdentityId parse_identity(const std::string& name);
/// I1-I6, I8 and I9 need conformal charts.
bool requires_conformal(IdentityId id);

/// Raised when a conformal-only identity is requested on a non-conformal grid.
class UnsupportedIdentity : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ResidualReport
{
    IdentityId            id         = IdentityId::I1;
    double                max_residual = 0.0;
    double                rms_residual = 0.0;
    double                scale        = 1.0; // residuals are divided by max(1, scale)
    std::size_t           node_count   = 0;
    double                grid_step    = 0.0;
    std::optional< double > convergence_order;
};

/// Pointwise |LHS - RHS| over owned nodes. `model` is the warping function of `ambient`.
ResidualReport evaluate_identity(const ImmersionGrid& grid, const ShapeField& field, const RadialConformalFactor& ambient,
                                 const WarpingModel& model, IdentityId id);
ResidualReport evaluate_identity(const ImmersionGrid& grid, const RadialConformalFactor& ambient,
                                 const WarpingModel& model, IdentityId id);

/// I10 needs no surface: ambient radicand against its closed form on an nt x nnu grid of
/// (t, nu) in [t_lo, t_hi] x [-1, 1].
ResidualReport evaluate_radicand_identity(const WarpingModel& model, double t_lo, double t_hi, int nt = 100, int nnu = 21);

/// log(e_coarse/e_fine)/log(step_coarse/step_fine).
double convergence_order(const ResidualReport& coarse, const ResidualReport& fine);

/// Sets fine.convergence_order from the pair, or clears it when fine sits at the roundoff floor.
void attach_convergence_order(const ResidualReport& coarse, ResidualReport& fine);

/// Residuals at or below this level are roundoff: no further decay can be measured.
inline constexpr double roundoff_floor = 1e-10;

/// Order requirement, passed trivially when the finer residual already sits at the roundoff floor.
bool converges(const ResidualReport& coarse, const ResidualReport& fine, double min_order);

struct FieldSummary
{
    double      max = 0.0;
    double      min = 0.0;
    double      rms = 0.0;
    std::size_t count = 0;
};

struct ETReport
{
    std::vector< Lattice< double > > lhs;      // |dH + (K_tan - K_rad) nu dt|
    std::vector< Lattice< double > > radicand; // H^2 - K + K_tan - (1 - nu^2)(K_tan - K_rad)
    std::vector< Lattice< double > > f_min;    // NaN at umbilic (excluded) nodes
    double      sup_f_min = 0.0;
    double      p         = 4.0;
    double      p_norm    = 0.0;
    std::size_t umbilic_nodes = 0;
    FieldSummary lhs_summary, radicand_summary, f_min_summary;
};

struct ETOptions
{
    double rad_floor = 1e-12;
    double p         = 4.0;
    /// LHS values below this count as exact zeros (f_min = 0); default 1e-5 (1 + max|H|).
    std::optional< double > lhs_zero;
};

ETReport et_test(const ImmersionGrid& grid, const ShapeField& field, const RadialConformalFactor& ambient,
                 const WarpingModel& model, const ETOptions& options = {});

struct Verdict
{
    bool   umbilic      = false;
    bool   cmc          = false;
    bool   slice        = false;
    double D1_fraction  = 0.0; // area fraction with nu = 0
    double D2_fraction  = 0.0; // area fraction with dt = 0
    double kappa_spread = 0.0; // max (kappa1 - kappa2)
    double Kdiff_zero_fraction = 0.0; // area fraction with K_tan = K_rad
    double tol          = 0.0;
};

/// tol defaults to 1e-5 (1 + max|H|).
Verdict classify(const ImmersionGrid& grid, const ShapeField& field, const WarpingModel& model,
                 std::optional< double > tol = std::nullopt);

struct HopfZero
{
    int    chart = 0;
    cplx   z;
    Vec3   position;
    int    winding = 0;
    double index   = 0.0; // -winding/2
    bool   resolved = true;
};

struct HopfZeroReport
{
    bool                    degenerate = false; // |p| below tolerance everywhere (umbilic surface)
    std::vector< HopfZero > zeros;
    double                  index_sum = 0.0;
    bool                    all_resolved = true;
};

/// Zeros of the normalized Hopf differential p. Non-conformal charts use the orthonormal-frame
/// value of p, whose winding around a zero equals that of the Hopf differential.
HopfZeroReport hopf_zero_indices(const ImmersionGrid& grid, const ShapeField& field, std::optional< double > tol = std::nullopt);

void to_json(Json& j, const ResidualReport& r);
void to_json(Json& j, const FieldSummary& s);
void to_json(Json& j, const ETReport& r);
void to_json(Json& j, const Verdict& v);
void to_json(Json& j, const HopfZero& z);
void to_json(Json& j, const HopfZeroReport& r);
} // namespace warphopf

#endif // WARPHOPF_VERIFY_HPP
