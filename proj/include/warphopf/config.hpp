#ifndef WARPHOPF_CONFIG_HPP
#define WARPHOPF_CONFIG_HPP

#include "warphopf/verify.hpp"

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace warphopf
{
/// Malformed or out-of-range configuration.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ManifoldConfig
{
    std::string             type = "space_form"; // space_form | dss | rn
    double                  c    = 0.0;
    double                  m    = 0.0;
    double                  q    = 0.0;
    std::optional< double > a;        // space_form: u = a + c r^2/(4a), default 1
    std::optional< double > r_anchor; // dss/rn: Euclidean radius of the horizon, default s0/4
    std::optional< double > t_max;    // dss/rn: domain truncation

    bool operator==(const ManifoldConfig&) const = default;
};

struct SurfaceConfig
{
    std::string                   type = "slice"; // slice | euclidean_sphere | graph | perturbed_slice | ellipsoid
    std::optional< double >       t0;
    std::optional< double >       h0; // alternative to t0: the slice where h = h0
    std::array< double, 3 >       center{0.0, 0.0, 0.0};
    double                        R    = 1.0;
    double                        eps  = 0.0;
    std::string                   mode = "Y20";
    std::map< std::string, double > modes; // graph: t = t0 + sum coeff * Y_mode
    std::array< double, 3 >       semiaxes{1.0, 1.0, 1.0};
    int                           grid_n    = 128;
    double                        rho_chart = 1.2;

    bool operator==(const SurfaceConfig&) const = default;
};

struct ToleranceConfig
{
    std::optional< double > umbilic_tol; // default 1e-5 (1 + max|H|)
    double                  rad_floor    = 1e-12;
    double                  p_norm       = 4.0;
    double                  identity_tol = 1e-5;
    double                  min_order    = 3.5;

    bool operator==(const ToleranceConfig&) const = default;
};

struct OutputConfig
{
    std::string                  report_path;
    std::optional< std::string > csv_path;
    bool                         convergence_pair = false;
    bool                         timings          = false;

    bool operator==(const OutputConfig&) const = default;
};

/// Expected verdicts; any field left unset is not checked.
struct ExpectConfig
{
    std::optional< bool >   umbilic;
    std::optional< bool >   cmc;
    std::optional< bool >   slice;
    std::optional< bool >   f_min_zero;
    std::optional< double > index_sum;

    bool operator==(const ExpectConfig&) const = default;
};

struct RunConfig
{
    ManifoldConfig             manifold;
    SurfaceConfig              surface;
    std::vector< std::string > checks;
    ToleranceConfig            tolerances;
    OutputConfig               output;
    ExpectConfig               expect;
    std::optional< int >       threads;

    bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw ConfigError.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);

/// Normalized form of the config; parse_config(echo(c)) == c.
Json echo(const RunConfig& config);

struct Ambient
{
    WarpingModel          model;
    RadialConformalFactor factor;
};
Ambient build_ambient(const ManifoldConfig& manifold);
SurfaceSpec build_spec(const SurfaceConfig& surface, const WarpingModel& model);

enum ExitCode
{
    exit_pass      = 0,
    exit_config    = 1,
    exit_tolerance = 2
};

struct RunResult
{
    int  exit_code = exit_pass;
    Json report;
};

/// Runs every requested check and writes the report (and CSV when requested). Configuration,
/// ambient and unsupported-identity errors give exit_config with an "error" report.
RunResult run(const RunConfig& config, const std::optional< std::string >& csv_override = std::nullopt);
} // namespace warphopf

#endif // WARPHOPF_CONFIG_HPP
