// Acceptance run over the reference configuration. One line per criterion;
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "vortexlab/asymptotics.hpp"
#include "vortexlab/euler.hpp"
#include "vortexlab/field.hpp"
#include "vortexlab/green.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/kirchhoff_routh.hpp"
#include "vortexlab/rearrangement.hpp"

namespace fs = std::filesystem;
using namespace vortexlab;

namespace {

constexpr double kPi = std::numbers::pi;

const char* kSweepConfig = R"(# reference sweep
[domain]
kind = unit_disk
[grid]
n = 256
overrides = 0.06:384
[vortex]
kappa1 = 1
kappa2 = -1
eps = 0.12, 0.10, 0.08, 0.06
p = 2
profile = patch
)";

const char* kSteadyConfig = R"([grid]
n = 256
[vortex]
kappa1 = 1
kappa2 = -1
eps = 0.1
)";

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | " << detail << std::endl;
}

std::string num(double v) { return format_number(v); }

double image_green(Point x, Point y) {
    const double r2 = y.x * y.x + y.y * y.y;
    const Point ystar{y.x / r2, y.y / r2};
    return std::log(distance(x, ystar) * std::sqrt(r2) / distance(x, y)) / (2.0 * kPi);
}

double image_robin(Point x) { return -std::log(1.0 - (x.x * x.x + x.y * x.y)) / (2.0 * kPi); }

const Check& need(const SweepVerdict& v, const char* name) {
    const Check* c = v.find(name);
    if (!c) throw std::runtime_error(std::string("verdict lacks check ") + name);
    return *c;
}

std::string describe(const Check& c) {
    return c.name + " value=" + num(c.value) + " threshold=" + num(c.threshold) + (c.pass ? "" : " (failed)");
}

void from_checks(int id, const std::string& what, const SweepVerdict& v, std::initializer_list<const char*> names) {
    bool pass = true;
    std::string detail;
    for (const char* n : names) {
        const Check& c = need(v, n);
        pass = pass && c.pass;
        if (!detail.empty()) detail += "; ";
        detail += describe(c);
    }
    report(id, pass, what, detail);
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[fs::relative(e.path(), dir).string()] = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return files;
}

void criterion_1(const PoissonSolver& s) {
    const Grid& g = s.grid();
    double worst_g = 0.0;
    for (const Point y : {Point{0.0, 0.0}, Point{0.3, 0.1}, Point{-0.5, 0.4}, Point{0.1, -0.8}, Point{0.85, 0.2}}) {
        const CellId cy = g.require_cell(y);
        const ScalarField col = green_function(s, cy);
        for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
            if (distance(g.center(c), g.center(cy)) < 4.0 * g.h()) continue;
            const double exact = image_green(g.center(c), g.center(cy));
            worst_g = std::max(worst_g, std::abs(col[c] - exact) / exact);
        }
    }
    double worst_h = 0.0;
    for (const double r : {0.0, 0.2, 0.4, 0.6, 0.7, 0.8}) {
        for (int k = 0; k < 4; ++k) {
            const double a = 0.3 + k * kPi / 2.0;
            const CellId c = g.require_cell({r * std::cos(a), r * std::sin(a)});
            if (norm(g.center(c)) > 0.8) continue;
            worst_h = std::max(worst_h, std::abs(robin(s, c) - image_robin(g.center(c))));
        }
    }
    report(1, worst_g <= 0.05 && worst_h <= 0.01, "Green and Robin against the disk image formulas (n=256)",
           "max relative G error=" + num(worst_g) + " threshold=0.05; max |H error|=" + num(worst_h) + " threshold=0.01");
}

void criterion_2(const PoissonSolver& s) {
    const Grid& g = s.grid();
    const double eps = 0.1;
    std::vector<CellId> cells;
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        if (norm(g.center(c)) < eps) cells.push_back(c);
    }
    ScalarField z(s.grid_ptr(), 0.0);
    for (const CellId c : cells) z[c] = 1.0 / (static_cast<double>(cells.size()) * g.cell_area());
    const double e = energy(s, z);
    const double exact = std::log(1.0 / eps) / (4.0 * kPi) + 1.0 / (16.0 * kPi);
    const double rel = std::abs(e - exact) / exact;
    report(2, rel <= 0.02, "centered patch energy (kappa=1, eps=0.1, n=256)",
           "E=" + num(e) + " exact=" + num(exact) + " relative error=" + num(rel) + " threshold=0.02");
}

void criteria_3_to_10(const cli::RunConfig& cfg) {
    SolverPool pool(cfg.domain, cfg.solver);
    SweepOptions o;
    o.spec = cfg.spec_for(cfg.eps.front());
    o.resolution = [&cfg](double e) { return cfg.resolution_for(e); };
    o.solver = cfg.solver;
    o.maximize.max_iterations = cfg.max_iterations;
    o.maximize.residual_tests = cfg.residual_tests;
    const auto records = run_sweep(pool, cfg.eps, o);
    const SweepVerdict v = evaluate_sweep(pool, records, cfg.kappa1, cfg.kappa2);
    for (const auto& r : records) {
        std::cout << "  record eps=" << num(r.eps1) << " n=" << r.n << " E=" << num(r.energy) << " I=" << num(r.interaction)
                  << " mu1=" << num(r.mu1) << " mu2=" << num(r.mu2) << " diam+/eps=" << num(r.diameter_positive / r.eps1)
                  << " delta+=" << num(r.profile_positive) << " iterations=" << r.iterations
                  << " converged=" << r.converged << std::endl;
    }
    from_checks(3, "energy slope of each core against -ln eps within 10% of kappa^2/(4 pi)", v,
                {"energy_slope_positive", "energy_slope_negative"});
    from_checks(4, "interaction positive and its log-slope within 5% of kappa1|kappa2|/(4 pi)", v,
                {"interaction_positive", "interaction_slope"});
    from_checks(5, "core diameter / eps within [1.8, 4]", v, {"core_size_max", "core_size_min"});
    from_checks(6, "center signature within 3h of the Kirchhoff-Routh minimum, improving with eps", v,
                {"center_distance", "center_trend"});
    from_checks(7, "multiplier spread after log correction <= 50% of kappa/(2 pi)", v,
                {"multiplier_spread_1", "multiplier_spread_2"});
    from_checks(8, "monotone map and mu1 > mu2 at every converged record", v, {"monotone_map", "multiplier_gap"});
    from_checks(9, "energy nondecreasing per iteration to 1e-12 relative", v, {"ascent"});
    from_checks(10, "profile distance <= 0.2 at the smallest eps and non-increasing", v,
                {"profile_smallest", "profile_trend"});
}

void criterion_11(const cli::RunConfig& cfg) {
    const RearrangementSpec spec = cfg.spec_for(0.1);
    double res[2] = {0.0, 0.0};
    bool converged = true;
    const int ns[2] = {128, 256};
    for (int i = 0; i < 2; ++i) {
        const PoissonSolver s(Grid::build(cfg.domain, ns[i]), cfg.solver);
        const SteadyState st = maximize(s, spec);
        converged = converged && st.converged;
        res[i] = st.residual;
    }
    const double ratio = res[1] / res[0];
    report(11, converged && ratio >= 0.35 && ratio <= 0.65, "steadiness residual halves from n=128 to n=256 (eps=0.1)",
           "residual128=" + num(res[0]) + " residual256=" + num(res[1]) + " ratio=" + num(ratio) +
               " accepted=[0.35, 0.65] converged=" + (converged ? "yes" : "no"));
}

void criterion_12() {
    const InequalitySummary hl = hardy_littlewood_suite(100, 1);
    const InequalitySummary rz = riesz_suite(100, 1, 1e-8);
    report(12, hl.instances == 100 && rz.instances == 100 && hl.violations == 0 && rz.violations == 0,
           "rearrangement inequality suites, 100 instances each",
           "hardy_littlewood violations=" + std::to_string(hl.violations) + " worst excess=" + num(hl.worst_excess) +
               "; riesz violations=" + std::to_string(rz.violations) + " worst excess=" + num(rz.worst_excess));
}

void criterion_13(const PoissonSolver& s) {
    const GradientMeasureSummary gm = gradient_measure_diagnostic(s, 20, 1);
    std::string detail = "growth=" + num(gm.growth) + " threshold=2; per radius:";
    for (std::size_t i = 0; i < gm.radii.size(); ++i) detail += " " + num(gm.radii[i]) + "->" + num(gm.max_ratio[i]);
    report(13, gm.growth <= 2.0, "gradient-measure ratio growth over a factor 16 in support area", detail);
}

void criterion_14(const PoissonSolver& s) {
    const KirchhoffRouth kr(s);
    const KRConfiguration cfg{{{0.3, 0.1}, {-0.2, -0.35}}, {1.0, -1.0}};
    auto drift = [&](double dt) {
        const PVTrajectory t = pv_evolve(kr, cfg, dt, 10.0);
        if (t.truncated) throw std::runtime_error("point-vortex run truncated: " + t.message);
        double d = 0.0;
        for (const double w : t.energies) d = std::max(d, std::abs(w - t.energies.front()));
        return d;
    };
    const double d_fine = drift(1e-3);
    const double d1 = drift(0.02);
    const double d2 = drift(0.01);
    const double ratio = d1 / d2;
    report(14, d_fine <= 1e-4 && ratio >= 12.0 && ratio <= 20.0, "point-vortex W conservation over T=10",
           "drift(dt=1e-3)=" + num(d_fine) + " threshold=1e-4; drift(0.02)/drift(0.01)=" + num(ratio) +
               " accepted=[12, 20]");
}

void criterion_15(const cli::RunConfig& cfg) {
    const double eps = 0.1;
    const PoissonSolver s(Grid::build(cfg.domain, 128), cfg.solver);
    const SteadyState st = maximize(s, cfg.spec_for(eps));
    const double t_end = 10.0 * turnover_time(eps, cfg.kappa1);
    const StabilityResult base = stability_experiment(s, st, 0.0, t_end, 2.0);
    const double drift = base.max_distance();
    const StabilityResult pert = stability_experiment(s, st, 0.02 * lp_norm(st.zeta, 2.0), t_end, 2.0);
    const double bound = 3.0 * pert.initial_distance() + drift;
    const bool ok = st.converged && !base.blown_up && !pert.blown_up && drift <= 0.05 && pert.max_distance() <= bound;
    report(15, ok, "Euler stability probe over 10 turnovers (n=128, eps=0.1)",
           "unperturbed drift=" + num(drift) + " threshold=0.05; perturbed sup d=" + num(pert.max_distance()) +
               " bound 3 d(0) + drift=" + num(bound) + " (d(0)=" + num(pert.initial_distance()) + ")");
}

void criterion_16(const fs::path& root, const cli::RunConfig& sweep, const cli::RunConfig& steady) {
    bool same = true;
    std::string detail;
    for (const auto& [name, cmd, cfg] : {std::tuple{"steady", cli::Command::steady, &steady},
                                         std::tuple{"sweep", cli::Command::sweep, &sweep}}) {
        std::ostringstream log;
        const fs::path a = root / name / "a";
        const fs::path b = root / name / "b";
        fs::remove_all(a);
        fs::remove_all(b);
        cli::run_config(cmd, *cfg, a, log);
        cli::run_config(cmd, *cfg, b, log);
        const auto fa = read_tree(a);
        const auto fb = read_tree(b);
        const bool eq = !fa.empty() && fa == fb;
        same = same && eq;
        if (!detail.empty()) detail += "; ";
        detail += std::string(name) + ": " + std::to_string(fa.size()) + " files " + (eq ? "identical" : "DIFFER");
    }
    report(16, same, "steady and sweep reruns are byte-identical", detail);
}

template <class F>
void timed(const char* label, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        f();
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "FAIL " << label << ": exception: " << e.what() << std::endl;
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::cout << "  (" << label << " took " << num(std::round(dt.count() * 10.0) / 10.0) << " s)" << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "vortexlab_acceptance";
    fs::create_directories(out);
    const cli::RunConfig sweep = cli::parse_config(kSweepConfig, cli::Command::sweep);
    const cli::RunConfig steady = cli::parse_config(kSteadyConfig, cli::Command::steady);

    const PoissonSolver disk256(Grid::build(DomainSpec::unit_disk(), 256));
    const PoissonSolver disk128(Grid::build(DomainSpec::unit_disk(), 128));

    timed("criterion 1", [&] { criterion_1(disk256); });
    timed("criterion 2", [&] { criterion_2(disk256); });
    timed("criteria 3-10", [&] { criteria_3_to_10(sweep); });
    timed("criterion 11", [&] { criterion_11(steady); });
    timed("criterion 12", [] { criterion_12(); });
    timed("criterion 13", [&] { criterion_13(disk128); });
    timed("criterion 14", [&] { criterion_14(disk128); });
    timed("criterion 15", [&] { criterion_15(steady); });
    timed("criterion 16", [&] { criterion_16(out, sweep, steady); });

    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
