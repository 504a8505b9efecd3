#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vortexlab/asymptotics.hpp"
#include "vortexlab/euler.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/kirchhoff_routh.hpp"

namespace vortexlab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

Provenance provenance(const RunConfig& cfg, std::vector<int> grid_n) {
    Provenance p;
    p.config_hash = fnv1a64(cfg.text + "\nseed=" + std::to_string(cfg.seed) + "\n");
    p.grid_n = std::move(grid_n);
    p.tolerance = cfg.solver.tolerance;
    p.max_refinements = cfg.solver.max_refinements;
    p.seed = cfg.seed;
    return p;
}

ordered_json provenance_json(const Provenance& prov) {
    return {{"config_hash", prov.hash_hex()},
            {"grid_n", prov.grid_n},
            {"tolerance", prov.tolerance},
            {"max_refinements", prov.max_refinements},
            {"seed", prov.seed}};
}

ordered_json number_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
    std::ostringstream os;
    writer(os);
    write_text(path, os.str());
}

MaximizeOptions maximize_options(const RunConfig& cfg) {
    MaximizeOptions o;
    o.max_iterations = cfg.max_iterations;
    o.residual_tests = cfg.residual_tests;
    o.residual_seed = cfg.seed;
    return o;
}

InitKind init_kind(const RunConfig& cfg) {
    return cfg.init == "random" ? InitKind::from_random(cfg.seed) : InitKind::from_kr();
}

double margin_for(const RunConfig& cfg, const Grid& grid) { return cfg.margin > 0.0 ? cfg.margin : 6.0 * grid.h(); }

int cmd_steady(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const double eps = cfg.eps.front();
    const int n = cfg.resolution_for(eps);
    const PoissonSolver solver(Grid::build(cfg.domain, n), cfg.solver);
    const RearrangementSpec spec = cfg.spec_for(eps);
    const SteadyState st = maximize(solver, spec, init_kind(cfg), maximize_options(cfg));
    const Provenance prov = provenance(cfg, {n});

    write_text(out / "steady.json", to_json(st, spec, prov));
    write_field_dump(out / "zeta.txt", st.zeta, prov);
    write_field_dump(out / "psi.txt", st.psi, prov);
    write_pgm(out / "zeta.pgm", st.zeta, prov);
    write_pgm(out / "psi.pgm", st.psi, prov);

    log << "steady: n=" << n << " eps=" << format_number(eps) << " iterations=" << st.iterations
        << " energy=" << format_number(st.energy) << " converged=" << (st.converged ? "yes" : "no") << '\n';
    if (!st.converged) {
        log << "flag: " << st.message << '\n';
        return kFlagged;
    }
    return kPass;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    SolverPool pool(cfg.domain, cfg.solver);
    SweepOptions options;
    options.spec = cfg.spec_for(cfg.eps.front());
    options.resolution = [&cfg](double e) { return cfg.resolution_for(e); };
    options.solver = cfg.solver;
    options.maximize = maximize_options(cfg);
    options.jobs = cfg.jobs;
    const auto records = run_sweep(pool, cfg.eps, options);
    const SweepVerdict verdict = evaluate_sweep(pool, records, cfg.kappa1, cfg.kappa2);

    std::vector<int> ns;
    for (const auto& r : records) ns.push_back(r.n);
    const Provenance prov = provenance(cfg, ns);
    write_stream(out / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, records, prov); });
    write_text(out / "verdict.json", to_json(verdict, prov));

    for (const auto& c : verdict.checks) {
        log << (c.pass ? "pass " : "FAIL ") << c.name << " value=" << format_number(c.value)
            << " threshold=" << format_number(c.threshold);
        if (!c.detail.empty()) log << " (" << c.detail << ')';
        log << '\n';
    }
    return verdict.all_pass() ? kPass : kFlagged;
}

int cmd_krmin(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const PoissonSolver solver(Grid::build(cfg.domain, cfg.n), cfg.solver);
    const double margin = margin_for(cfg, solver.grid());
    KRMinimizeOptions options;
    options.stride_cells = cfg.stride;
    const KRMinimum m = kr_minimize(solver, cfg.kappa1, cfg.kappa2, margin, options);
    write_text(out / "krmin.json", to_json(m, cfg.kappa1, cfg.kappa2, margin, provenance(cfg, {cfg.n})));
    log << "krmin: W=" << format_number(m.value) << " x1=(" << format_number(m.positive.x) << ", "
        << format_number(m.positive.y) << ") x2=(" << format_number(m.negative.x) << ", "
        << format_number(m.negative.y) << ")" << (m.degenerate ? " degenerate" : "") << '\n';
    return kPass;
}

int cmd_evolve_pv(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const PoissonSolver solver(Grid::build(cfg.domain, cfg.n), cfg.solver);
    const KirchhoffRouth kr(solver);
    KRConfiguration start{cfg.points, cfg.strengths};
    if (start.points.empty()) {
        KRMinimizeOptions ko;
        ko.stride_cells = cfg.stride;
        const KRMinimum m = kr_minimize(solver, cfg.kappa1, cfg.kappa2, margin_for(cfg, solver.grid()), ko);
        start.points = {m.positive, m.negative};
        start.strengths = {cfg.kappa1, cfg.kappa2};
    }
    PVOptions options;
    options.sample_every = cfg.sample_every;
    const PVTrajectory traj = pv_evolve(kr, start, cfg.dt, cfg.t_end, options);
    double drift = 0.0;
    for (const double w : traj.energies) drift = std::max(drift, std::abs(w - traj.energies.front()));

    const Provenance prov = provenance(cfg, {cfg.n});
    write_stream(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj, prov); });
    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["mode"] = "pv";
    j["dt"] = cfg.dt;
    j["t_end"] = cfg.t_end;
    j["W0"] = traj.energies.front();
    j["max_W_drift"] = drift;
    j["truncated"] = traj.truncated;
    j["message"] = traj.message;
    write_text(out / "evolve.json", j.dump(2) + "\n");

    log << "evolve pv: W0=" << format_number(traj.energies.front()) << " max|W-W0|=" << format_number(drift) << '\n';
    if (traj.truncated) {
        log << "flag: " << traj.message << '\n';
        return kFlagged;
    }
    return kPass;
}

ordered_json stability_json(const StabilityResult& r) {
    return {{"dt", r.dt},
            {"perturbation_norm", r.perturbation_norm},
            {"initial_distance", r.initial_distance()},
            {"max_distance", r.max_distance()},
            {"final_distance", r.series.empty() ? 0.0 : r.series.back().distance},
            {"blown_up", r.blown_up},
            {"message", r.message}};
}

int cmd_evolve_pde(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const double eps = cfg.eps.front();
    const int n = cfg.resolution_for(eps);
    const PoissonSolver solver(Grid::build(cfg.domain, n), cfg.solver);
    const RearrangementSpec spec = cfg.spec_for(eps);
    const SteadyState st = maximize(solver, spec, init_kind(cfg), maximize_options(cfg));
    const Provenance prov = provenance(cfg, {n});

    const double t_end = cfg.turnovers * turnover_time(eps, cfg.kappa1);
    StabilityOptions options;
    // dt applies to pde runs only when set explicitly; otherwise the CFL limit
    options.dt = cfg.document.find("evolve", "dt") ? cfg.dt : 0.0;
    options.sample_every = cfg.sample_every;
    options.seed = cfg.seed;

    const StabilityResult base = stability_experiment(solver, st, 0.0, t_end, cfg.p, options);
    const double drift = base.max_distance();
    ordered_json checks = ordered_json::array();
    bool pass = st.converged && !base.blown_up;
    const bool drift_ok = drift <= cfg.drift_limit;
    checks.push_back({{"name", "drift"}, {"pass", drift_ok}, {"value", drift}, {"threshold", cfg.drift_limit}});
    pass = pass && drift_ok;

    ordered_json j;
    j["provenance"] = provenance_json(prov);
    j["mode"] = "pde";
    j["eps"] = eps;
    j["turnover"] = turnover_time(eps, cfg.kappa1);
    j["t_end"] = t_end;
    j["steady_converged"] = st.converged;
    j["unperturbed"] = stability_json(base);

    if (cfg.delta0 > 0.0) {
        const double delta = cfg.delta0 * lp_norm(st.zeta, cfg.p);
        const StabilityResult pert = stability_experiment(solver, st, delta, t_end, cfg.p, options);
        const double bound = 3.0 * pert.initial_distance() + drift;
        const bool bounded = !pert.blown_up && pert.max_distance() <= bound;
        checks.push_back({{"name", "bounded_growth"}, {"pass", bounded}, {"value", pert.max_distance()}, {"threshold", bound}});
        pass = pass && bounded;
        j["perturbed"] = stability_json(pert);
        write_stream(out / "stability.csv", [&](std::ostream& os) { write_stability_csv(os, pert, prov); });
        write_stream(out / "stability_unperturbed.csv", [&](std::ostream& os) { write_stability_csv(os, base, prov); });
    } else {
        write_stream(out / "stability.csv", [&](std::ostream& os) { write_stability_csv(os, base, prov); });
    }
    j["checks"] = checks;
    j["pass"] = pass;
    write_text(out / "evolve.json", j.dump(2) + "\n");

    for (const auto& c : checks) {
        log << (c["pass"].get<bool>() ? "pass " : "FAIL ") << c["name"].get<std::string>()
            << " value=" << format_number(c["value"].get<double>())
            << " threshold=" << format_number(c["threshold"].get<double>()) << '\n';
    }
    if (!st.converged) log << "flag: " << st.message << '\n';
    if (base.blown_up) log << "flag: " << base.message << '\n';
    return pass ? kPass : kFlagged;
}

int cmd_diagnose(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const InequalitySummary hl = hardy_littlewood_suite(cfg.instances, cfg.seed);
    const InequalitySummary rz = riesz_suite(cfg.instances, cfg.seed);
    const PoissonSolver solver(Grid::build(cfg.domain, cfg.n), cfg.solver);
    const GradientMeasureSummary gm = gradient_measure_diagnostic(solver, cfg.samples, cfg.seed, cfg.p);

    auto suite = [](const InequalitySummary& s) {
        return ordered_json{{"instances", s.instances}, {"violations", s.violations}, {"worst_excess", s.worst_excess}};
    };
    ordered_json j;
    j["provenance"] = provenance_json(provenance(cfg, {cfg.n}));
    j["hardy_littlewood"] = suite(hl);
    j["riesz"] = suite(rz);
    ordered_json per_radius = ordered_json::array();
    for (std::size_t i = 0; i < gm.radii.size(); ++i) {
        per_radius.push_back({{"radius", gm.radii[i]}, {"max_ratio", gm.max_ratio[i]}});
    }
    j["gradient_measure"] = {{"scales", per_radius}, {"overall_max", gm.overall_max}, {"growth", number_json(gm.growth)}};
    const bool pass = hl.violations == 0 && rz.violations == 0 && gm.growth <= 2.0;
    j["pass"] = pass;
    write_text(out / "diagnose.json", j.dump(2) + "\n");

    log << "hardy_littlewood violations=" << hl.violations << "/" << hl.instances << '\n'
        << "riesz violations=" << rz.violations << "/" << rz.instances << '\n'
        << "gradient_measure growth=" << format_number(gm.growth) << " (limit 2)\n";
    return pass ? kPass : kFlagged;
}

}  // namespace

std::optional<Command> command_from_name(const std::string& name) {
    if (name == "steady") return Command::steady;
    if (name == "sweep") return Command::sweep;
    if (name == "krmin") return Command::krmin;
    if (name == "evolve") return Command::evolve;
    if (name == "diagnose") return Command::diagnose;
    return std::nullopt;
}

int run_config(Command command, const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    switch (command) {
        case Command::steady: return cmd_steady(cfg, out_dir, log);
        case Command::sweep: return cmd_sweep(cfg, out_dir, log);
        case Command::krmin: return cmd_krmin(cfg, out_dir, log);
        case Command::evolve: return cfg.mode == "pde" ? cmd_evolve_pde(cfg, out_dir, log) : cmd_evolve_pv(cfg, out_dir, log);
        case Command::diagnose: return cmd_diagnose(cfg, out_dir, log);
    }
    return kUsage;
}

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_config(inv.config_path, inv.command);
    } catch (const ConfigError& e) {
        err << format_error(inv.config_path, e) << '\n';
        return kUsage;
    }
    if (inv.seed) cfg.seed = *inv.seed;
    if (inv.jobs) {
        if (*inv.jobs < 1) {
            err << "--jobs must be at least 1\n";
            return kUsage;
        }
        cfg.jobs = *inv.jobs;
    }
    try {
        return run_config(inv.command, cfg, inv.out_dir, log);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace vortexlab::cli
