#include "warphopf/config.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

namespace warphopf
{
namespace
{
void require_keys(const Json& j, const std::string& where, const std::set< std::string >& allowed)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

template < typename T >
T get(const Json& j, const std::string& where, const std::string& key)
{
    if (!j.contains(key))
        throw ConfigError(where + ": missing key '" + key + "'");
    try
    {
        if constexpr (std::is_same_v< T, double >)
        {
            if (!j.at(key).is_number())
                throw ConfigError(where + "." + key + ": expected a number");
        }
        else if constexpr (std::is_same_v< T, int >)
        {
            if (!j.at(key).is_number_integer())
                throw ConfigError(where + "." + key + ": expected an integer");
        }
        else if constexpr (std::is_same_v< T, bool >)
        {
            if (!j.at(key).is_boolean())
                throw ConfigError(where + "." + key + ": expected a boolean");
        }
        else if constexpr (std::is_same_v< T, std::string >)
        {
            if (!j.at(key).is_string())
                throw ConfigError(where + "." + key + ": expected a string");
        }
        return j.at(key).get< T >();
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template < typename T >
std::optional< T > get_optional(const Json& j, const std::string& where, const std::string& key)
{
    if (!j.contains(key))
        return std::nullopt;
    return get< T >(j, where, key);
}

std::array< double, 3 > get_vec3(const Json& j, const std::string& where, const std::string& key)
{
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); }))
        throw ConfigError(where + "." + key + ": expected an array of 3 numbers");
    return {v[0].get< double >(), v[1].get< double >(), v[2].get< double >()};
}

void require_finite(double x, const std::string& what)
{
    if (!std::isfinite(x))
        throw ConfigError(what + " must be finite");
}

ManifoldConfig parse_manifold(const Json& j)
{
    const std::string w = "manifold";
    if (!j.is_object())
        throw ConfigError(w + ": expected an object");
    ManifoldConfig m;
    m.type = get< std::string >(j, w, "type");
    if (m.type == "space_form")
    {
        require_keys(j, w, {"type", "c", "a"});
        m.c = get< double >(j, w, "c");
        m.a = get_optional< double >(j, w, "a");
        if (m.a && !(*m.a > 0.0))
            throw ConfigError("manifold.a must be positive");
    }
    else if (m.type == "dss" || m.type == "rn")
    {
        const std::string param = m.type == "dss" ? "c" : "q";
        require_keys(j, w, {"type", "m", param, "r_anchor", "t_max"});
        m.m = get< double >(j, w, "m");
        (m.type == "dss" ? m.c : m.q) = get< double >(j, w, param);
        m.r_anchor = get_optional< double >(j, w, "r_anchor");
        m.t_max    = get_optional< double >(j, w, "t_max");
        if (m.r_anchor && !(*m.r_anchor > 0.0))
            throw ConfigError("manifold.r_anchor must be positive");
    }
    else
        throw ConfigError("manifold.type must be one of space_form, dss, rn");
    for (double x : {m.c, m.m, m.q})
        require_finite(x, "manifold parameters");
    return m;
}

SurfaceConfig parse_surface(const Json& j)
{
    const std::string w = "surface";
    if (!j.is_object())
        throw ConfigError(w + ": expected an object");
    SurfaceConfig s;
    s.type = get< std::string >(j, w, "type");
    std::set< std::string > keys{"type", "grid_n", "rho_chart"};
    if (s.type == "slice")
        keys.insert({"t0", "h0"});
    else if (s.type == "euclidean_sphere")
        keys.insert({"center", "R"});
    else if (s.type == "perturbed_slice")
        keys.insert({"t0", "h0", "eps", "mode"});
    else if (s.type == "graph")
        keys.insert({"t0", "h0", "modes"});
    else if (s.type == "ellipsoid")
        keys.insert({"semiaxes"});
    else
        throw ConfigError("surface.type must be one of slice, euclidean_sphere, graph, perturbed_slice, ellipsoid");
    require_keys(j, w, keys);

    s.grid_n = get< int >(j, w, "grid_n");
    if (s.grid_n < 32 || s.grid_n > 2048)
        throw ConfigError("surface.grid_n must lie in [32, 2048]");
    if (j.contains("rho_chart"))
        s.rho_chart = get< double >(j, w, "rho_chart");
    if (!(s.rho_chart > 1.0) || !std::isfinite(s.rho_chart))
        throw ConfigError("surface.rho_chart must exceed 1");

    if (keys.count("t0"))
    {
        s.t0 = get_optional< double >(j, w, "t0");
        s.h0 = get_optional< double >(j, w, "h0");
        if (s.t0.has_value() == s.h0.has_value())
            throw ConfigError("surface: exactly one of t0, h0 is required");
    }
    if (s.type == "euclidean_sphere")
    {
        if (j.contains("center"))
            s.center = get_vec3(j, w, "center");
        s.R = get< double >(j, w, "R");
        if (!(s.R > 0.0))
            throw ConfigError("surface.R must be positive");
    }
    if (s.type == "perturbed_slice")
    {
        s.eps = get< double >(j, w, "eps");
        if (j.contains("mode"))
            s.mode = get< std::string >(j, w, "mode");
        try
        {
            (void)spherical_mode(s.mode, Vec3::UnitZ());
        }
        catch (const std::invalid_argument& e)
        {
            throw ConfigError(std::string("surface.mode: ") + e.what());
        }
    }
    if (s.type == "graph")
    {
        if (j.contains("modes"))
        {
            const auto& modes = j.at("modes");
            if (!modes.is_object())
                throw ConfigError("surface.modes: expected an object of mode -> coefficient");
            for (const auto& [name, coeff] : modes.items())
            {
                if (!coeff.is_number())
                    throw ConfigError("surface.modes." + name + ": expected a number");
                try
                {
                    (void)spherical_mode(name, Vec3::UnitZ());
                }
                catch (const std::invalid_argument& e)
                {
                    throw ConfigError(std::string("surface.modes: ") + e.what());
                }
                s.modes[name] = coeff.get< double >();
            }
        }
    }
    if (s.type == "ellipsoid")
    {
        s.semiaxes = get_vec3(j, w, "semiaxes");
        for (double a : s.semiaxes)
            if (!(a > 0.0))
                throw ConfigError("surface.semiaxes must be positive");
    }
    return s;
}

const std::set< std::string > non_identity_checks{"et_test", "classify", "zero_index"};

std::vector< std::string > parse_checks(const Json& j)
{
    if (!j.is_array())
        throw ConfigError("checks: expected an array");
    std::vector< std::string > out;
    for (const auto& c : j)
    {
        if (!c.is_string())
            throw ConfigError("checks: expected strings");
        const auto name = c.get< std::string >();
        if (!non_identity_checks.count(name))
        {
            try
            {
                (void)parse_identity(name);
            }
            catch (const std::invalid_argument& e)
            {
                throw ConfigError(std::string("checks: ") + e.what());
            }
        }
        if (std::find(out.begin(), out.end(), name) != out.end())
            throw ConfigError("checks: duplicate entry '" + name + "'");
        out.push_back(name);
    }
    return out;
}

ToleranceConfig parse_tolerances(const Json& j)
{
    const std::string w = "tolerances";
    require_keys(j, w, {"umbilic_tol", "rad_floor", "p_norm", "identity_tol", "min_order"});
    ToleranceConfig t;
    t.umbilic_tol = get_optional< double >(j, w, "umbilic_tol");
    if (auto v = get_optional< double >(j, w, "rad_floor"))
        t.rad_floor = *v;
    if (auto v = get_optional< double >(j, w, "p_norm"))
        t.p_norm = *v;
    if (auto v = get_optional< double >(j, w, "identity_tol"))
        t.identity_tol = *v;
    if (auto v = get_optional< double >(j, w, "min_order"))
        t.min_order = *v;
    if (!(t.p_norm > 2.0) || !std::isfinite(t.p_norm))
        throw ConfigError("tolerances.p_norm must exceed 2");
    if ((t.umbilic_tol && !(*t.umbilic_tol > 0.0)) || !(t.identity_tol > 0.0) || !(t.rad_floor >= 0.0))
        throw ConfigError("tolerances must be positive");
    return t;
}

OutputConfig parse_output(const Json& j)
{
    const std::string w = "output";
    require_keys(j, w, {"report_path", "csv_path", "convergence_pair", "timings"});
    OutputConfig o;
    o.report_path = get< std::string >(j, w, "report_path");
    o.csv_path    = get_optional< std::string >(j, w, "csv_path");
    if (auto v = get_optional< bool >(j, w, "convergence_pair"))
        o.convergence_pair = *v;
    if (auto v = get_optional< bool >(j, w, "timings"))
        o.timings = *v;
    return o;
}

ExpectConfig parse_expect(const Json& j)
{
    const std::string w = "expect";
    require_keys(j, w, {"umbilic", "cmc", "slice", "f_min_zero", "index_sum"});
    ExpectConfig e;
    e.umbilic    = get_optional< bool >(j, w, "umbilic");
    e.cmc        = get_optional< bool >(j, w, "cmc");
    e.slice      = get_optional< bool >(j, w, "slice");
    e.f_min_zero = get_optional< bool >(j, w, "f_min_zero");
    e.index_sum  = get_optional< double >(j, w, "index_sum");
    return e;
}
} // namespace

RunConfig parse_config(const Json& j)
{
    require_keys(j, "config", {"manifold", "surface", "checks", "tolerances", "output", "expect", "threads"});
    RunConfig c;
    if (!j.contains("manifold") || !j.contains("surface") || !j.contains("checks") || !j.contains("output"))
        throw ConfigError("config: manifold, surface, checks and output are required");
    c.manifold = parse_manifold(j.at("manifold"));
    c.surface  = parse_surface(j.at("surface"));
    c.checks   = parse_checks(j.at("checks"));
    if (j.contains("tolerances"))
        c.tolerances = parse_tolerances(j.at("tolerances"));
    c.output = parse_output(j.at("output"));
    if (j.contains("expect"))
        c.expect = parse_expect(j.at("expect"));
    c.threads = get_optional< int >(j, "config", "threads");
    if (c.threads && *c.threads < 1)
        throw ConfigError("threads must be at least 1");
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    Json j;
    try
    {
        j = Json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

Json echo(const RunConfig& c)
{
    Json m{{"type", c.manifold.type}};
    if (c.manifold.type == "space_form")
    {
        m["c"] = c.manifold.c;
        if (c.manifold.a)
            m["a"] = *c.manifold.a;
    }
    else
    {
        m["m"] = c.manifold.m;
        if (c.manifold.type == "dss")
            m["c"] = c.manifold.c;
        else
            m["q"] = c.manifold.q;
        if (c.manifold.r_anchor)
            m["r_anchor"] = *c.manifold.r_anchor;
        if (c.manifold.t_max)
            m["t_max"] = *c.manifold.t_max;
    }

    const auto& s = c.surface;
    Json        sj{{"type", s.type}};
    if (s.t0)
        sj["t0"] = *s.t0;
    if (s.h0)
        sj["h0"] = *s.h0;
    if (s.type == "euclidean_sphere")
    {
        sj["center"] = s.center;
        sj["R"]      = s.R;
    }
    if (s.type == "perturbed_slice")
    {
        sj["eps"]  = s.eps;
        sj["mode"] = s.mode;
    }
    if (s.type == "graph")
    {
        Json modes = Json::object();
        for (const auto& [name, coeff] : s.modes)
            modes[name] = coeff;
        sj["modes"] = modes;
    }
    if (s.type == "ellipsoid")
        sj["semiaxes"] = s.semiaxes;
    sj["grid_n"]    = s.grid_n;
    sj["rho_chart"] = s.rho_chart;

    Json t{{"rad_floor", c.tolerances.rad_floor},
           {"p_norm", c.tolerances.p_norm},
           {"identity_tol", c.tolerances.identity_tol},
           {"min_order", c.tolerances.min_order}};
    if (c.tolerances.umbilic_tol)
        t["umbilic_tol"] = *c.tolerances.umbilic_tol;

    Json o{{"report_path", c.output.report_path},
           {"convergence_pair", c.output.convergence_pair},
           {"timings", c.output.timings}};
    if (c.output.csv_path)
        o["csv_path"] = *c.output.csv_path;

    Json e = Json::object();
    if (c.expect.umbilic)
        e["umbilic"] = *c.expect.umbilic;
    if (c.expect.cmc)
        e["cmc"] = *c.expect.cmc;
    if (c.expect.slice)
        e["slice"] = *c.expect.slice;
    if (c.expect.f_min_zero)
        e["f_min_zero"] = *c.expect.f_min_zero;
    if (c.expect.index_sum)
        e["index_sum"] = *c.expect.index_sum;

    Json out{{"manifold", m}, {"surface", sj}, {"checks", c.checks}, {"tolerances", t}, {"output", o}, {"expect", e}};
    if (c.threads)
        out["threads"] = *c.threads;
    return out;
}

Ambient build_ambient(const ManifoldConfig& m)
{
    try
    {
        if (m.type == "space_form")
            return {make_space_form(m.c), RadialConformalFactor::space_form(m.c, m.a.value_or(1.0))};
        OdeOptions opt;
        opt.t_max  = m.t_max;
        auto model = m.type == "dss" ? make_dss(m.m, m.c, opt) : make_rn(m.m, m.q, opt);
        auto factor = radial_from_warp(model, m.r_anchor.value_or(model.s0() / 4.0));
        return {std::move(model), std::move(factor)};
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("manifold: ") + e.what());
    }
    catch (const std::domain_error& e)
    {
        throw ConfigError(std::string("manifold: ") + e.what());
    }
}

SurfaceSpec build_spec(const SurfaceConfig& s, const WarpingModel& model)
{
    auto t0 = [&]() {
        if (s.t0)
            return *s.t0;
        try
        {
            return model.t_at_h(*s.h0);
        }
        catch (const std::exception& e)
        {
            throw ConfigError(std::string("surface.h0: ") + e.what());
        }
    };
    if (s.type == "slice")
        return SliceSurface{t0()};
    if (s.type == "euclidean_sphere")
        return EuclideanSphere{Vec3(s.center[0], s.center[1], s.center[2]), s.R};
    if (s.type == "perturbed_slice")
        return PerturbedSlice{t0(), s.eps, s.mode};
    if (s.type == "graph")
    {
        const double base  = t0();
        const auto   modes = s.modes;
        return GraphSurface{[base, modes](const Vec3& w) {
            double t = base;
            for (const auto& [name, coeff] : modes)
                t += coeff * spherical_mode(name, w);
            return t;
        }};
    }
    return Ellipsoid{Vec3(s.semiaxes[0], s.semiaxes[1], s.semiaxes[2])};
}

namespace
{
struct Timer
{
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration< double >(std::chrono::steady_clock::now() - start).count();
    }
};

void write_report(const std::string& path, const Json& report)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write report '" + path + "'");
    out << report.dump(2) << '\n';
}
} // namespace

RunResult run(const RunConfig& config, const std::optional< std::string >& csv_override)
{
    RunResult result;
    Json&     report = result.report;
    report["config"] = echo(config);
    Json results     = Json::object();
    Json failures    = Json::array();
    Json times       = Json::object();

    try
    {
        Timer      setup;
        const auto ambient = build_ambient(config.manifold);
        const auto spec    = build_spec(config.surface, ambient.model);
        auto       make    = [&](int n) {
            try
            {
                return build_surface(spec, ambient.factor, n, config.surface.rho_chart);
            }
            catch (const std::domain_error& e)
            {
                throw ConfigError(std::string("surface: ") + e.what());
            }
        };
        const auto grid  = make(config.surface.grid_n);
        const auto field = shape_field(grid, ambient.factor);
        times["setup"]   = setup.seconds();

        std::optional< ImmersionGrid > fine_grid;
        std::optional< ShapeField >    fine_field;
        if (config.output.convergence_pair &&
            std::any_of(config.checks.begin(), config.checks.end(), [](const std::string& c) { return !non_identity_checks.count(c); }))
        {
            Timer fine;
            fine_grid.emplace(make(2 * config.surface.grid_n));
            fine_field.emplace(shape_field(*fine_grid, ambient.factor));
            times["setup_fine"] = fine.seconds();
        }

        const double umbilic_tol = config.tolerances.umbilic_tol.value_or(
            1e-5 * (1.0 + [&] {
                double m = 0.0;
                for (std::size_t c = 0; c < grid.charts.size(); ++c)
                    for (int j = 0; j < grid.charts[c].geometry().n; ++j)
                        for (int i = 0; i < grid.charts[c].geometry().n; ++i)
                            if (owned(grid, c, i, j, 4))
                                m = std::max(m, std::abs(field.charts[c].H(i, j)));
                return m;
            }()));

        for (const auto& check : config.checks)
        {
            Timer timer;
            if (check == "et_test")
            {
                ETOptions opt;
                opt.rad_floor = config.tolerances.rad_floor;
                opt.p         = config.tolerances.p_norm;
                opt.lhs_zero  = umbilic_tol;
                const auto et = et_test(grid, field, ambient.factor, ambient.model, opt);
                results[check] = et;
                if (config.expect.f_min_zero && (et.sup_f_min == 0.0) != *config.expect.f_min_zero)
                    failures.push_back("et_test: f_min_zero expectation not met");
            }
            else if (check == "classify")
            {
                const auto v   = classify(grid, field, ambient.model, umbilic_tol);
                results[check] = v;
                if (config.expect.umbilic && v.umbilic != *config.expect.umbilic)
                    failures.push_back("classify: umbilic expectation not met");
                if (config.expect.cmc && v.cmc != *config.expect.cmc)
                    failures.push_back("classify: cmc expectation not met");
                if (config.expect.slice && v.slice != *config.expect.slice)
                    failures.push_back("classify: slice expectation not met");
            }
            else if (check == "zero_index")
            {
                const auto z   = hopf_zero_indices(grid, field, umbilic_tol);
                results[check] = z;
                if (config.expect.index_sum && (z.degenerate || z.index_sum != *config.expect.index_sum))
                    failures.push_back("zero_index: index_sum expectation not met");
            }
            else
            {
                const auto id = parse_identity(check);
                auto       r  = evaluate_identity(grid, field, ambient.factor, ambient.model, id);
                if (r.max_residual >= config.tolerances.identity_tol)
                    failures.push_back(check + ": max residual above tolerance");
                if (fine_grid)
                {
                    const auto f = evaluate_identity(*fine_grid, *fine_field, ambient.factor, ambient.model, id);
                    if (f.max_residual > roundoff_floor)
                        r.convergence_order = convergence_order(r, f);
                    if (!converges(r, f, config.tolerances.min_order))
                        failures.push_back(check + ": convergence order below minimum");
                }
                results[check] = r;
            }
            times[check] = timer.seconds();
        }

        const auto csv_path = csv_override ? csv_override : config.output.csv_path;
        if (csv_path)
        {
            std::ofstream out(*csv_path);
            if (!out)
                throw ConfigError("cannot write CSV '" + *csv_path + "'");
            write_csv(out, grid, field);
        }
        report["results"]  = results;
        report["failures"] = failures;
        report["status"]   = failures.empty() ? "pass" : "fail";
        if (config.output.timings)
            report["wall_times"] = times;
        result.exit_code = failures.empty() ? exit_pass : exit_tolerance;
    }
    catch (const std::exception& e)
    {
        report["results"] = results;
        report["error"]   = e.what();
        report["status"]  = "error";
        result.exit_code  = exit_config;
    }

    try
    {
        write_report(config.output.report_path, report);
    }
    catch (const ConfigError& e)
    {
        report["error"]  = e.what();
        report["status"] = "error";
        result.exit_code = exit_config;
    }
    return result;
}
} // namespace warphopf
