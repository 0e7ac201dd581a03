#ifndef WARPHOPF_WARP_HPP
#define WARPHOPF_WARP_HPP

#include "warphopf/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace warphopf
{
enum class WarpKind
{
    euclidean,
    sphere,
    hyperbolic,
    dss,
    rn,
    custom
};

std::string to_string(WarpKind kind);

/// h(t) with its first two derivatives.
struct WarpSample
{
    double h   = 0.0;
    double dh  = 0.0;
    double d2h = 0.0;
};

/// One stored integrator node.
struct WarpNode
{
    double t  = 0.0;
    double h  = 0.0;
    double dh = 0.0;
};

struct WarpParams
{
    double m = 0.0;
    double c = 0.0;
    double q = 0.0;
};

/// Options for the ODE-defined warping functions.
struct OdeOptions
{
    /// Explicit truncation of the t-domain. Defaults to the t where h = h_max_factor * s0.
    std::optional< double > t_max;
    double                  h_max_factor     = 50.0;
    double                  conservation_tol = 1e-8;
    /// Initial step as a fraction of s0; halved until the conservation tolerance holds.
    double step_fraction = 2e-3;
};

/// Warping function h of the metric dt^2 + h(t)^2 dw^2, immutable after construction.
///
/// Closed-form models (space forms, custom evaluators) evaluate directly. ODE models
/// (de Sitter-Schwarzschild, Reissner-Nordstrom) integrate the regularized second-order
/// equation h'' = f(h) with classic RK4 and evaluate between nodes by cubic Hermite
/// interpolation of (h, h') and of (h', h''), with h'' = f(h) recomputed from the
/// interpolated h.
class WarpingModel
{
public:
    using Evaluator = std::function< WarpSample(double) >;

    /// Closed-form or externally supplied model.
    static WarpingModel custom(Evaluator eval, Interval domain, double s0, WarpKind kind = WarpKind::custom,
                               WarpParams params = {});

    [[nodiscard]] WarpKind          kind() const { return kind_; }
    [[nodiscard]] const WarpParams& params() const { return params_; }
    [[nodiscard]] double            s0() const { return s0_; }
    [[nodiscard]] Interval          domain() const { return domain_; }
    [[nodiscard]] bool              ode_defined() const { return !nodes_->empty(); }

    /// Throws std::domain_error when t lies outside the domain.
    [[nodiscard]] WarpSample eval(double t) const;

    /// Integrator nodes; empty for closed-form models.
    [[nodiscard]] std::span< const WarpNode > nodes() const { return *nodes_; }

    /// Inverse of h on a monotone stretch starting at the left endpoint.
    [[nodiscard]] double t_at_h(double h) const;

private:
    friend WarpingModel make_dss(double, double, const OdeOptions&);
    friend WarpingModel make_rn(double, double, const OdeOptions&);

    WarpingModel() = default;

    WarpKind                                        kind_ = WarpKind::custom;
    WarpParams                                      params_;
    double                                          s0_ = 0.0;
    Interval                                        domain_;
    Evaluator                                       eval_;
    std::shared_ptr< const std::vector< WarpNode > > nodes_ = std::make_shared< std::vector< WarpNode > >();
};

/// h(t) = sin(sqrt(c) t)/sqrt(c), t, or sinh(sqrt(-c) t)/sqrt(-c).
WarpingModel make_space_form(double c);

/// de Sitter-Schwarzschild: h' = sqrt(1 - m/h - c h^2), h(0) = s0, h'(0) = 0.
WarpingModel make_dss(double m, double c, const OdeOptions& options = {});

/// Reissner-Nordstrom: h' = sqrt(1 - m/h + q^2/h^2), h(0) = s0, h'(0) = 0.
WarpingModel make_rn(double m, double q, const OdeOptions& options = {});

/// Roots of 1 - m/r - c r^2 bounding the positivity window (s1 = inf when c <= 0).
struct PositivityWindow
{
    double s0 = 0.0;
    double s1 = 0.0;
};
PositivityWindow dss_positivity_window(double m, double c);

/// Larger root of 1 - m/r + q^2/r^2.
double rn_horizon(double m, double q);

/// Right-hand side of the squared first-order relation h'^2 = rhs(h) for dss/rn models.
double first_order_rhs(const WarpingModel& model, double h);

/// |h'^2 - rhs(h)| at one node.
double conservation_residual(const WarpingModel& model, const WarpNode& node);

/// Maximum conservation residual over all stored nodes (0 for closed-form models).
double max_conservation_residual(const WarpingModel& model);

struct SectionalPair
{
    double tangential = 0.0; // K_tan
    double radial     = 0.0; // K_rad
};

/// K_tan = (1 - h'^2)/h^2, K_rad = -h''/h.
SectionalPair curvatures(const WarpingModel& model, double t);

/// K_tan - (1 - nu^2)(K_tan - K_rad): the ambient part of the rigidity radicand.
double radicand_ambient(const WarpingModel& model, double t, double nu);

/// Closed forms of the ambient radicand for dss (c + m(3nu^2-1)/(2h^3)), rn
/// (additional q^2(1-2nu^2)/h^4) and space forms (c).
double radicand_closed_form(const WarpingModel& model, double t, double nu);

struct SmoothnessReport
{
    double h0       = 0.0;
    double dh0      = 0.0;
    double d2h0_fd  = 0.0;
    bool   smooth_pole = false;
};

/// Inspects the left endpoint: a smooth pole needs h = 0, h' = 1 and h'' = 0 there.
SmoothnessReport check_origin_smoothness(const WarpingModel& model, double tol = 1e-6);
} // namespace warphopf

#endif // WARPHOPF_WARP_HPP
