// Acceptance criteria 1-9: one PASS/FAIL line each.
//
// Exit status is 0 when the failing criteria are exactly those named with --known-failure,
// so a criterion that is recorded as unattainable keeps printing FAIL without hiding regressions.

#include "warphopf/config.hpp"
#include "warphopf/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

using namespace warphopf;

namespace
{
struct Outcome
{
    bool        pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct CatalogEntry
{
    std::string           name;
    SurfaceSpec           spec;
    RadialConformalFactor factor;
    WarpingModel          model;
};

// Conformal catalog: slices in dss/rn, centered and off-center spheres in the three space-form profiles,
// plus an off-center sphere in dss where the warped terms of I8/I9 are active.
std::vector< CatalogEntry > conformal_catalog()
{
    const auto dss  = make_dss(2.0, 0.0);
    const auto fdss = radial_from_warp(dss, 0.5);
    const auto rn   = make_rn(2.0, 0.5);
    const auto frn  = radial_from_warp(rn, rn.s0() / 4.0);
    const auto flat = flat_profile();
    const auto rnd  = round_ball_profile();
    const auto ball = poincare_ball_profile();
    return {
        {"dss slice h=3", SliceSurface{dss.t_at_h(3.0)}, fdss, dss},
        {"rn slice h=3", SliceSurface{rn.t_at_h(3.0)}, frn, rn},
        {"flat sphere", EuclideanSphere{Vec3::Zero(), 1.0}, flat, make_space_form(0.0)},
        {"flat off-center sphere", EuclideanSphere{Vec3(0.2, 0.1, -0.1), 1.0}, flat, make_space_form(0.0)},
        {"round sphere", EuclideanSphere{Vec3::Zero(), 1.0}, rnd, make_space_form(1.0)},
        {"round off-center sphere", EuclideanSphere{Vec3(0.2, 0.1, -0.1), 0.8}, rnd, make_space_form(1.0)},
        {"ball sphere", EuclideanSphere{Vec3::Zero(), 0.5}, ball, make_space_form(-1.0)},
        {"ball off-center sphere", EuclideanSphere{Vec3(0.15, -0.1, 0.05), 0.5}, ball, make_space_form(-1.0)},
        {"dss off-center sphere", EuclideanSphere{Vec3(0.2, 0.1, -0.1), 1.5}, fdss, dss},
    };
}

constexpr IdentityId identity_suite[] = {IdentityId::I1, IdentityId::I2, IdentityId::I3, IdentityId::I4, IdentityId::I5,
                                         IdentityId::I6, IdentityId::I7, IdentityId::I8, IdentityId::I9};

Outcome space_form_curvature()
{
    double worst = 0.0;
    for (double c : {-1.0, 0.0, 1.0})
    {
        const auto   m  = make_space_form(c);
        const auto   d  = m.domain();
        const double hi = std::isfinite(d.hi) ? d.hi : 10.0;
        for (int k = 1; k <= 50; ++k)
        {
            const auto K = curvatures(m, d.lo + (hi - d.lo) * k / 51.0);
            worst        = std::max({worst, std::abs(K.tangential - c), std::abs(K.radial - c)});
        }
    }
    return {worst < 1e-9, fmt("max |K - c| = %.2e over 3 x 50 samples (tol 1e-9)", worst)};
}

Outcome ode_conservation()
{
    const double dss = max_conservation_residual(make_dss(2.0, 0.0));
    const double rn  = max_conservation_residual(make_rn(2.0, 0.5));
    const double m = 2.0, q = 0.5;
    const double closed = 2.0 * q * q / (m - std::sqrt(m * m - 4.0 * q * q));
    const double s0err  = std::abs(make_rn(m, q).s0() - closed);
    return {dss < 1e-8 && rn < 1e-8 && s0err < 1e-12,
            fmt("residual dss %.2e, rn %.2e (tol 1e-8); |s0 - closed form| = %.2e (tol 1e-12)", dss, rn, s0err)};
}

Outcome radicand_identities()
{
    double worst = 0.0;
    for (const auto& m : {make_dss(2.0, 0.0), make_dss(1.0, 0.1), make_dss(1.0, -0.1), make_rn(2.0, 0.5)})
    {
        const auto d = m.domain();
        worst        = std::max(worst, evaluate_radicand_identity(m, d.lo + 1e-3, d.hi, 100, 21).max_residual);
    }
    return {worst < 1e-9, fmt("max residual %.2e on 100 x 21 (t, nu) grids, 4 models (tol 1e-9)", worst)};
}

Outcome curvature_vs_brute_force()
{
    const auto dss = make_dss(2.0, 0.0);
    const auto rn  = make_rn(2.0, 0.5);
    struct P
    {
        RadialConformalFactor f;
        double                lo, hi;
    };
    const std::vector< P > profiles{{round_ball_profile(), 0.1, 3.0},
                                    {poincare_ball_profile(), 0.1, 0.9},
                                    {radial_from_warp(dss, 0.5), 0.6, 5.0},
                                    {radial_from_warp(rn, rn.s0() / 4.0), 0.6, 5.0}};
    std::mt19937                             rng(7);
    std::normal_distribution< double >       g;
    double                                   worst = 0.0, sect = 0.0;
    for (std::size_t k = 0; k < profiles.size(); ++k)
    {
        std::uniform_real_distribution< double > radius(profiles[k].lo, profiles[k].hi);
        for (int n = 0; n < 100; ++n)
        {
            const Vec3 x = radius(rng) * Vec3(g(rng), g(rng), g(rng)).normalized();
            const Vec3 X(g(rng), g(rng), g(rng)), Y(g(rng), g(rng), g(rng)), Z(g(rng), g(rng), g(rng));
            const Vec3 a = riemann(profiles[k].f, x, X, Y, Z);
            worst        = std::max(worst, (a - riemann_oracle(profiles[k].f, x, X, Y, Z)).norm() / std::max(1.0, a.norm()));
            if (k < 2)
                sect = std::max(sect, std::abs(sectional(profiles[k].f, x, X, Y) - (k == 0 ? 1.0 : -1.0)));
        }
    }
    return {worst < 1e-6 && sect < 1e-8,
            fmt("max relative deviation %.2e on 4 x 100 inputs (tol 1e-6); |sectional -+ 1| = %.2e (tol 1e-8)", worst, sect)};
}

struct SuiteResult
{
    std::vector< double > residuals; // n and 2n, in catalog x identity order
    double                worst     = 0.0;
    double                min_order = std::numeric_limits< double >::infinity();
    bool                  ok        = true;
    std::string           first_failure;
};

SuiteResult identity_suite_run(int n)
{
    SuiteResult out;
    for (const auto& e : conformal_catalog())
    {
        const auto coarse_grid = build_surface(e.spec, e.factor, n);
        const auto fine_grid   = build_surface(e.spec, e.factor, 2 * n);
        const auto coarse      = shape_field(coarse_grid, e.factor);
        const auto fine        = shape_field(fine_grid, e.factor);
        for (auto id : identity_suite)
        {
            const auto a = evaluate_identity(coarse_grid, coarse, e.factor, e.model, id);
            const auto b = evaluate_identity(fine_grid, fine, e.factor, e.model, id);
            out.residuals.push_back(a.max_residual);
            out.residuals.push_back(b.max_residual);
            out.worst = std::max(out.worst, a.max_residual);
            if (b.max_residual > roundoff_floor)
                out.min_order = std::min(out.min_order, convergence_order(a, b));
            if ((a.max_residual >= 1e-5 || !converges(a, b, 3.5)) && out.ok)
            {
                out.ok            = false;
                out.first_failure = e.name + " " + to_string(id);
            }
        }
    }
    return out;
}

Outcome identity_suite_criterion(const SuiteResult& r, double seconds)
{
    std::string d = fmt("9 surfaces x I1-I9: max residual %.2e at n=128 (tol 1e-5), min order %.2f at n=128/256 (tol 3.5), "
                        "%.1f s (limit 300 s)",
                        r.worst, r.min_order, seconds);
    if (!r.ok)
        d += "; first failure: " + r.first_failure;
    return {r.ok && seconds <= 300.0, d};
}

Outcome rigidity()
{
    bool        ok = true;
    std::string bad;
    auto        expect = [&](const std::string& name, const Verdict& v, bool u, bool c, bool s) {
        if (v.umbilic != u || v.cmc != c || v.slice != s)
        {
            ok = false;
            bad += " " + name;
        }
    };
    for (const auto& e : conformal_catalog())
    {
        const bool is_slice = std::holds_alternative< SliceSurface >(e.spec);
        const bool space    = e.model.kind() != WarpKind::dss && e.model.kind() != WarpKind::rn;
        const auto* sphere  = std::get_if< EuclideanSphere >(&e.spec);
        if (!is_slice && !(space && sphere && sphere->center.norm() > 0.0))
            continue;
        const auto grid = build_surface(e.spec, e.factor, 128);
        expect(e.name, classify(grid, shape_field(grid, e.factor), e.model), true, true, is_slice);
    }
    const auto            dss = make_dss(2.0, 0.0);
    const auto            f   = radial_from_warp(dss, 0.5);
    std::vector< double > per_eps;
    for (double eps : {0.025, 0.05, 0.1})
    {
        const auto grid = build_surface(PerturbedSlice{dss.t_at_h(3.0), eps, "Y20"}, f, 128);
        const auto v    = classify(grid, shape_field(grid, f), dss);
        expect(fmt("eps=%g", eps), v, false, false, false);
        per_eps.push_back(v.kappa_spread / eps);
    }
    const double spread_ratio = *std::max_element(per_eps.begin(), per_eps.end()) / *std::min_element(per_eps.begin(), per_eps.end());
    ok = ok && spread_ratio < 1.05;
    return {ok, fmt("verdicts %s; kappa-spread/eps varies by factor %.4f over eps in {0.025, 0.05, 0.1} (tol 1.05)",
                    bad.empty() ? "as expected" : ("wrong for" + bad).c_str(), spread_ratio)};
}

Outcome et_evaluator()
{
    double cmc_sup = 0.0;
    for (const auto& e : conformal_catalog())
    {
        if (e.name == "dss off-center sphere")
            continue; // not CMC
        const auto grid = build_surface(e.spec, e.factor, 128);
        cmc_sup         = std::max(cmc_sup, et_test(grid, shape_field(grid, e.factor), e.factor, e.model).sup_f_min);
    }
    const auto dss = make_dss(2.0, 0.0);
    const auto f   = radial_from_warp(dss, 0.5);
    double     sup[2];
    for (int k = 0; k < 2; ++k)
    {
        const auto grid = build_surface(PerturbedSlice{dss.t_at_h(3.0), 0.05, "Y20"}, f, 128 << k);
        sup[k]          = et_test(grid, shape_field(grid, f), f, dss).sup_f_min;
    }
    const double rel = std::abs(sup[1] - sup[0]) / std::abs(sup[1]);
    return {cmc_sup == 0.0 && rel <= 5e-4,
            fmt("sup f_min on 8 CMC surfaces = %g (must be 0); perturbed eps=0.05: sup f_min %.6g (n=128, baseline), "
                "%.6g (n=256), relative change %.2e (tol 5e-4 for 3 digits)",
                cmc_sup, sup[0], sup[1], rel)};
}

Outcome hopf_topology()
{
    const auto f    = flat_profile();
    const auto grid = build_surface(Ellipsoid{Vec3(1.0, 1.2, 1.5)}, f, 128);
    const auto r    = hopf_zero_indices(grid, shape_field(grid, f));
    bool       ok   = !r.degenerate && r.all_resolved && r.zeros.size() == 4 && r.index_sum == 2.0;
    for (const auto& z : r.zeros)
        ok = ok && z.winding == -1 && z.index == 0.5;
    return {ok, fmt("%zu zeros, windings all -1: %s, index sum %g (expected 4, yes, 2)", r.zeros.size(),
                    std::all_of(r.zeros.begin(), r.zeros.end(), [](const HopfZero& z) { return z.winding == -1; }) ? "yes"
                                                                                                                   : "no",
                    r.index_sum)};
}

std::string report_bytes(const std::filesystem::path& path)
{
    RunConfig c;
    c.manifold.type      = "dss";
    c.manifold.m         = 2.0;
    c.manifold.r_anchor  = 0.5;
    c.surface.type       = "euclidean_sphere";
    c.surface.center     = {0.2, 0.1, -0.1};
    c.surface.R          = 1.5;
    c.surface.grid_n     = 128;
    c.checks             = {"I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8", "I9", "et_test", "classify", "zero_index"};
    c.output.report_path = path.string();
    c.output.convergence_pair = true;
    c.threads                 = 1;
    (void)run(c);
    std::ifstream      in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const SuiteResult& single)
{
    const int threads = std::max(2u, std::thread::hardware_concurrency());
    set_thread_count(threads);
    const auto multi = identity_suite_run(128);
    set_thread_count(1);
    double diff = 0.0;
    for (std::size_t k = 0; k < single.residuals.size(); ++k)
        diff = std::max(diff, std::abs(single.residuals[k] - multi.residuals[k]));

    const auto dir = std::filesystem::temp_directory_path() / "warphopf_acceptance";
    std::filesystem::create_directories(dir);
    const auto first = report_bytes(dir / "report.json");
    const bool same  = !first.empty() && first == report_bytes(dir / "report.json");
    return {diff <= 1e-12 && same, fmt("1 vs %d threads: max residual difference %.2e (tol 1e-12); threads=1 reports %s",
                                       threads, diff, same ? "byte-identical" : "differ")};
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App         app{"Acceptance criteria"};
    std::vector< int > known;
    app.add_option("--known-failure", known, "Criterion recorded as unattainable")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    set_thread_count(1);
    std::vector< std::pair< std::string, std::function< Outcome() > > > criteria;
    SuiteResult suite;
    criteria.emplace_back("space-form curvature", space_form_curvature);
    criteria.emplace_back("ODE conservation", ode_conservation);
    criteria.emplace_back("radicand identities", radicand_identities);
    criteria.emplace_back("curvature tensor vs brute force", curvature_vs_brute_force);
    criteria.emplace_back("identity suite", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        suite         = identity_suite_run(128);
        return identity_suite_criterion(suite, std::chrono::duration< double >(std::chrono::steady_clock::now() - t0).count());
    });
    criteria.emplace_back("rigidity sanity", rigidity);
    criteria.emplace_back("rigidity-test evaluator", et_evaluator);
    criteria.emplace_back("Hopf-zero topology", hopf_topology);
    criteria.emplace_back("determinism", [&] { return determinism(suite); });

    std::set< int > failed;
    for (std::size_t k = 0; k < criteria.size(); ++k)
    {
        Outcome o;
        try
        {
            o = criteria[k].second();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const int id = static_cast< int >(k) + 1;
        if (!o.pass)
            failed.insert(id);
        std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << ": " << o.detail
                  << std::endl;
    }
    const std::set< int > expected(known.begin(), known.end());
    if (failed != expected)
    {
        std::cout << "failing criteria differ from the declared known failures\n";
        return 1;
    }
    return 0;
}
