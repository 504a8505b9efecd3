#include "vortexlab/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace vortexlab {

const PoissonSolver& SolverPool::get(int n) {
    auto& slot = solvers_[n];
    if (!slot) slot = std::make_unique<PoissonSolver>(Grid::build(domain_, n), options_);
    return *slot;
}

void check_resolution(double eps, int n, double min_cells_per_radius) {
    if (eps * n < min_cells_per_radius - 1e-9) {
        std::ostringstream os;
        os << "eps = " << eps << " is under-resolved at n = " << n << ": the sweep needs eps/h >= "
           << min_cells_per_radius << " (n >= " << std::ceil(min_cells_per_radius / eps) << ")";
        throw AnalysisError(os.str());
    }
}

double profile_distance(const ScalarField& core, const std::vector<double>& prototype_values, double eps,
                        Point center, double p) {
    const PlaneGrid plane = aligned_plane(core.grid(), center, eps, 2.0);
    const PlaneField xi = rescale_profile(core, eps, center, plane);
    std::vector<double> scaled(prototype_values);
    for (auto& v : scaled) v *= eps * eps;
    const PlaneField rho = symmetric_decreasing_rearrangement(scaled, plane);
    std::vector<double> diff(plane.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = xi.values[k] - rho.values[k];
    const double denom = lp_norm(rho, p);
    if (denom == 0.0) throw AnalysisError("empty reference profile");
    return lp_norm(diff, plane.cell_area(), p) / denom;
}

SweepRecord make_record(const PoissonSolver& solver, const RearrangementSpec& spec, const SteadyState& state) {
    SweepRecord r;
    r.eps1 = spec.eps1;
    r.eps2 = spec.eps2;
    r.n = solver.grid().n();
    r.energy = state.energy;
    const ScalarField zp = positive_part(state.zeta);
    const ScalarField zm = negative_part(state.zeta);
    const ScalarField gp = solver.solve(zp);
    r.energy_positive = 0.5 * inner(zp, gp);
    r.interaction = inner(gp, zm);
    r.energy_negative = zm.values().empty() ? 0.0 : energy(solver, zm);
    r.mu1 = state.mu1;
    r.mu2 = state.mu2;
    r.diameter_positive = state.diameter_positive;
    r.diameter_negative = state.diameter_negative;
    r.center_positive = state.center_positive;
    r.center_negative = state.center_negative;
    const Prototype proto = make_prototype(spec, solver.grid());
    r.profile_positive = profile_distance(zp, proto.positive, spec.eps1, state.center_positive, spec.p);
    if (!spec.single_signed()) {
        r.profile_negative = profile_distance(zm, proto.negative, spec.eps2, state.center_negative, spec.p);
    }
    r.seed_energy = state.energies.front();
    if (state.seed_points.size() == 2) {
        r.has_kr = true;
        r.kr_positive = state.seed_points[0];
        r.kr_negative = state.seed_points[1];
    }
    r.residual = state.residual;
    r.iterations = state.iterations;
    r.converged = state.converged;
    for (std::size_t k = 1; k < state.energies.size(); ++k) {
        const double prev = state.energies[k - 1];
        if (state.energies[k] - prev < -1e-12 * std::max(1.0, std::abs(prev))) r.ascent = false;
    }
    r.monotone_violations = monotone_map_check(state.zeta, state.psi);
    r.message = state.message;
    return r;
}

std::vector<SweepRecord> run_sweep(SolverPool& pool, std::vector<double> eps_list, const SweepOptions& options) {
    if (eps_list.empty()) throw AnalysisError("empty eps list");
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    std::vector<int> resolution(eps_list.size());
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw AnalysisError("eps values must be positive");
        resolution[i] = options.resolution ? options.resolution(eps_list[i]) : 128;
        check_resolution(eps_list[i], resolution[i], options.min_cells_per_radius);
    }
    // Build every solver up front so workers only read shared state.
    std::vector<const PoissonSolver*> solvers;
    for (const int n : resolution) solvers.push_back(&pool.get(n));

    std::vector<SweepRecord> records(eps_list.size());
    std::vector<std::exception_ptr> errors(eps_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < eps_list.size(); i = next++) {
            try {
                RearrangementSpec spec = options.spec;
                spec.eps1 = eps_list[i];
                spec.eps2 = spec.single_signed() ? 0.0 : eps_list[i];
                const SteadyState st = maximize(*solvers[i], spec, InitKind::from_kr(), options.maximize);
                records[i] = make_record(*solvers[i], spec, st);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int jobs = std::clamp(options.jobs, 1, static_cast<int>(eps_list.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return records;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw AnalysisError("fit needs matching x and y");
    if (x.size() < 3) throw AnalysisError("insufficient points: a fit needs at least 3");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw AnalysisError("fit needs distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = x.size();
    return fit;
}

LinearFit fit_energy_slope(const std::vector<SweepRecord>& records, int sign) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        if (!r.converged) continue;
        x.push_back(-std::log(sign > 0 ? r.eps1 : r.eps2));
        y.push_back(sign > 0 ? r.energy_positive : r.energy_negative);
    }
    return fit_line(x, y);
}

InteractionSummary interaction_boundedness(const std::vector<SweepRecord>& records) {
    InteractionSummary s;
    std::vector<double> x, y;
    s.max_interaction = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        s.max_interaction = std::max(s.max_interaction, r.interaction);
        if (!(r.interaction > 0.0)) s.all_positive = false;
        x.push_back(-std::log(r.eps1));
        y.push_back(r.interaction);
    }
    s.fit = fit_line(x, y);
    return s;
}

CoreSizeSummary core_size_check(const std::vector<SweepRecord>& records) {
    CoreSizeSummary s;
    s.max_ratio = 0.0;
    s.min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        if (!r.converged) continue;
        const double a = r.diameter_positive / r.eps1;
        s.ratios_positive.push_back(a);
        s.max_ratio = std::max(s.max_ratio, a);
        s.min_ratio = std::min(s.min_ratio, a);
        if (r.eps2 > 0.0) {
            const double b = r.diameter_negative / r.eps2;
            s.ratios_negative.push_back(b);
            s.max_ratio = std::max(s.max_ratio, b);
            s.min_ratio = std::min(s.min_ratio, b);
        }
    }
    return s;
}

CenterSummary center_convergence_check(SolverPool& pool, const std::vector<SweepRecord>& records, double kappa1,
                                       double kappa2) {
    if (records.empty()) throw AnalysisError("no records");
    CenterSummary s;
    std::map<int, std::pair<Point, Point>> reference;
    for (const auto& r : records) {
        if (!reference.contains(r.n)) {
            if (r.has_kr) {
                reference[r.n] = {r.kr_positive, r.kr_negative};
            } else {
                const PoissonSolver& solver = pool.get(r.n);
                const KRMinimum m = kr_minimize(solver, kappa1, kappa2, 6.0 * solver.grid().h());
                reference[r.n] = {m.positive, m.negative};
            }
        }
        const auto& [xp, xm] = reference[r.n];
        s.distances.push_back(signature_distance(pair_signature(r.center_positive, r.center_negative),
                                                 pair_signature(xp, xm)));
    }
    const auto smallest = std::min_element(records.begin(), records.end(),
                                           [](const SweepRecord& a, const SweepRecord& b) { return a.eps1 < b.eps1; });
    std::tie(s.reference_positive, s.reference_negative) = reference[smallest->n];
    s.reference = pair_signature(s.reference_positive, s.reference_negative);
    s.h = 1.0 / smallest->n;
    return s;
}

MultiplierSummary multiplier_check(const std::vector<SweepRecord>& records, double kappa1, double kappa2) {
    MultiplierSummary s;
    for (const auto& r : records) {
        if (!r.converged) continue;
        s.d1.push_back(r.mu1 + kappa1 / (2.0 * std::numbers::pi) * std::log(r.eps1));
        // mirror image of d1 under zeta -> -zeta
        if (r.eps2 > 0.0) s.d2.push_back(r.mu2 + kappa2 / (2.0 * std::numbers::pi) * std::log(r.eps2));
    }
    auto spread = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    s.spread1 = spread(s.d1);
    s.spread2 = spread(s.d2);
    return s;
}

bool nonincreasing_within(const std::vector<double>& values, double tolerance, double floor) {
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > (1.0 + tolerance) * values[k - 1] && values[k] > floor) return false;
    }
    return true;
}

double gradient_measure_ratio(const PoissonSolver& solver, const ScalarField& f, double level, double p) {
    const Grid& g = solver.grid();
    const ScalarField gf = solver.solve(f);
    std::vector<double> u(g.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::max(gf.values()[k] - level, 0.0);
    double grad2 = 0.0;
    std::vector<double> source;
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        const double uc = u[static_cast<std::size_t>(c)];
        for (const Direction d : {Direction::east, Direction::north}) {
            const CellId nb = g.neighbor(c, d);
            const double un = nb == kNoCell ? 0.0 : u[static_cast<std::size_t>(nb)];
            grad2 += (un - uc) * (un - uc);
        }
        // faces towards the boundary on the other two sides
        for (const Direction d : {Direction::west, Direction::south}) {
            if (g.neighbor(c, d) == kNoCell) grad2 += uc * uc;
        }
        if (uc > 0.0) source.push_back(f[c]);
    }
    if (source.empty()) return 0.0;
    const double measure_u = static_cast<double>(source.size()) * g.cell_area();
    const double fp = lp_norm(source, g.cell_area(), p);
    if (fp == 0.0) return 0.0;
    return std::sqrt(grad2) / (fp * std::pow(measure_u, (p - 1.0) / p));
}

GradientMeasureSummary gradient_measure_diagnostic(const PoissonSolver& solver, int sample_count, std::uint64_t seed,
                                                   double p) {
    if (sample_count < 1) throw AnalysisError("sample_count must be positive");
    const Grid& g = solver.grid();
    GradientMeasureSummary s;
    s.radii = {0.2, 0.1, 0.05};
    std::mt19937_64 rng(seed);
    const auto [lo, hi] = g.domain().bounds();
    for (const double radius : s.radii) {
        std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), amp(0.5, 1.5), frac(0.1, 0.9);
        double best = 0.0;
        for (int k = 0; k < sample_count; ++k) {
            Point c;
            do {
                c = {ux(rng), uy(rng)};
            } while (!g.domain().contains(c) || g.domain().distance_to_boundary(c) < radius + 4.0 * g.h());
            ScalarField f(solver.grid_ptr(), 0.0);
            for (CellId q = 0; q < static_cast<CellId>(g.size()); ++q) {
                if (distance(g.center(q), c) < radius) f[q] = amp(rng);
            }
            const ScalarField gf = solver.solve(f);
            const double top = *std::max_element(gf.values().begin(), gf.values().end());
            const double level = frac(rng) * top;
            const double r = gradient_measure_ratio(solver, f, level, p);
            if (r == 0.0) continue;
            s.samples.push_back({radius, level, r});
            best = std::max(best, r);
        }
        s.max_ratio.push_back(best);
    }
    const auto [mn, mx] = std::minmax_element(s.max_ratio.begin(), s.max_ratio.end());
    s.overall_max = *mx;
    s.growth = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
    return s;
}

namespace {

/// Random nonnegative field supported on `count` random plane cells.
std::vector<double> random_plane_field(const PlaneGrid& plane, std::size_t count, std::mt19937_64& rng) {
    std::vector<double> v(plane.size(), 0.0);
    std::uniform_int_distribution<std::size_t> cell(0, plane.size() - 1);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (std::size_t k = 0; k < count; ++k) v[cell(rng)] = 1.0 - value(rng);
    return v;
}

}  // namespace

InequalitySummary hardy_littlewood_suite(int instances, std::uint64_t seed, double tol) {
    InequalitySummary s;
    s.worst_excess = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    const PlaneGrid plane = PlaneGrid::centered(1.0 / 32.0, 10);
    std::uniform_int_distribution<std::size_t> count(1, 120);
    for (int i = 0; i < instances; ++i) {
        const auto u = random_plane_field(plane, count(rng), rng);
        const auto v = random_plane_field(plane, count(rng), rng);
        const auto us = symmetric_decreasing_rearrangement(u, plane).values;
        const auto vs = symmetric_decreasing_rearrangement(v, plane).values;
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < plane.size(); ++k) {
            lhs += u[k] * v[k];
            rhs += us[k] * vs[k];
        }
        const double excess = (lhs - rhs) * plane.cell_area();
        s.worst_excess = std::max(s.worst_excess, excess);
        if (excess > tol) ++s.violations;
        ++s.instances;
    }
    return s;
}

InequalitySummary riesz_suite(int instances, std::uint64_t seed, double tol) {
    InequalitySummary s;
    s.worst_excess = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    const PlaneGrid plane = PlaneGrid::centered(1.0 / 32.0, 8);
    const double h = plane.spacing;
    auto kernel = [h](Point z) { return std::log(1.0 / std::max(norm(z), h)); };
    auto triple = [&](const std::vector<double>& u, const std::vector<double>& w) {
        double sum = 0.0;
        for (std::size_t a = 0; a < plane.size(); ++a) {
            if (u[a] == 0.0) continue;
            for (std::size_t b = 0; b < plane.size(); ++b) {
                if (w[b] == 0.0) continue;
                sum += u[a] * w[b] * kernel(plane.center(a) - plane.center(b));
            }
        }
        return sum * plane.cell_area() * plane.cell_area();
    };
    std::uniform_int_distribution<std::size_t> count(1, 40);
    for (int i = 0; i < instances; ++i) {
        const auto u = random_plane_field(plane, count(rng), rng);
        const auto w = random_plane_field(plane, count(rng), rng);
        const auto us = symmetric_decreasing_rearrangement(u, plane).values;
        const auto ws = symmetric_decreasing_rearrangement(w, plane).values;
        const double excess = triple(u, w) - triple(us, ws);
        s.worst_excess = std::max(s.worst_excess, excess);
        if (excess > tol) ++s.violations;
        ++s.instances;
    }
    return s;
}

}  // namespace vortexlab

namespace vortexlab {

bool SweepVerdict::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* SweepVerdict::find(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

SweepVerdict evaluate_sweep(SolverPool& pool, const std::vector<SweepRecord>& records, double kappa1, double kappa2) {
    if (records.empty()) throw AnalysisError("no records");
    SweepVerdict v;
    auto add = [&](std::string name, bool pass, double value, double threshold, std::string detail = {}) {
        v.checks.push_back({std::move(name), pass, value, threshold, std::move(detail)});
    };
    const bool pair = kappa2 != 0.0;
    const double pi = std::numbers::pi;

    std::size_t unconverged = 0;
    for (const auto& r : records) unconverged += r.converged ? 0 : 1;
    add("converged", unconverged == 0, static_cast<double>(unconverged), 0.0, "records without a fixed point");

    auto slope_check = [&](const std::string& name, int sign, double kappa) {
        const double target = kappa * kappa / (4.0 * pi);
        try {
            const LinearFit f = fit_energy_slope(records, sign);
            add(name, std::abs(f.slope - target) <= 0.1 * target, f.slope, target,
                "slope of E against -ln eps, within 10% of kappa^2/(4 pi)");
        } catch (const AnalysisError& e) {
            add(name, false, std::numeric_limits<double>::quiet_NaN(), target, "insufficient points");
        }
    };
    slope_check("energy_slope_positive", 1, kappa1);
    if (pair) slope_check("energy_slope_negative", -1, kappa2);

    if (pair) {
        const double scale = kappa1 * std::abs(kappa2) / (4.0 * pi);
        double min_i = std::numeric_limits<double>::infinity();
        for (const auto& r : records) min_i = std::min(min_i, r.interaction);
        add("interaction_positive", min_i > 0.0, min_i, 0.0, "smallest interaction");
        try {
            const InteractionSummary is = interaction_boundedness(records);
            add("interaction_slope", std::abs(is.fit.slope) <= 0.05 * scale, is.fit.slope, 0.05 * scale,
                "|slope of I against -ln eps| <= 5% of kappa1 |kappa2| / (4 pi)");
        } catch (const AnalysisError&) {
            add("interaction_slope", false, std::numeric_limits<double>::quiet_NaN(), 0.05 * scale,
                "insufficient points");
        }
    }

    const CoreSizeSummary cs = core_size_check(records);
    add("core_size_max", cs.max_ratio <= 4.0, cs.max_ratio, 4.0, "largest diam / eps");
    add("core_size_min", cs.min_ratio >= 1.8, cs.min_ratio, 1.8, "smallest diam / eps");
    add("core_size_trend", nonincreasing_within(cs.ratios_positive, 0.2) && nonincreasing_within(cs.ratios_negative, 0.2),
        cs.max_ratio, 0.2, "diam / eps non-increasing as eps decreases, 20% noise");

    if (pair) {
        v.centers = center_convergence_check(pool, records, kappa1, kappa2);
        const double last = v.centers.distances.back();
        add("center_distance", last <= 3.0 * v.centers.h, last, 3.0 * v.centers.h,
            "signature distance to the kr_minimize pair at the smallest eps");
        bool trend = true;
        for (std::size_t k = 1; k < records.size(); ++k) {
            const double d0 = v.centers.distances[k - 1];
            const double d1 = v.centers.distances[k];
            if (d1 > 1.2 * d0 && d1 > 1.0 / records[k].n) trend = false;
        }
        add("center_trend", trend, last, 0.2, "non-increasing within 20%, or below one cell");
    }

    v.multipliers = multiplier_check(records, kappa1, kappa2);
    add("multiplier_spread_1", v.multipliers.spread1 <= 0.5 * kappa1 / (2.0 * pi), v.multipliers.spread1,
        0.5 * kappa1 / (2.0 * pi), "spread of mu1 + (kappa1/2pi) ln eps1");
    if (pair) {
        add("multiplier_spread_2", v.multipliers.spread2 <= 0.5 * std::abs(kappa2) / (2.0 * pi), v.multipliers.spread2,
            0.5 * std::abs(kappa2) / (2.0 * pi), "spread of mu2 + (kappa2/2pi) ln eps2");
    }

    std::uint64_t violations = 0;
    bool gap = true;
    bool ascent = true;
    bool witness = true;
    double identity = 0.0;
    for (const auto& r : records) {
        violations += r.monotone_violations;
        if (pair && !(r.mu1 > r.mu2)) gap = false;
        ascent = ascent && r.ascent;
        if (r.energy < r.seed_energy - 1e-12 * std::abs(r.energy)) witness = false;
        const double rebuilt = r.energy_positive + r.energy_negative - r.interaction;
        identity = std::max(identity, std::abs(rebuilt - r.energy) / std::max(1e-300, std::abs(r.energy)));
    }
    add("monotone_map", violations == 0, static_cast<double>(violations), 0.0, "ordered pairs violating monotonicity");
    if (pair) add("multiplier_gap", gap, 0.0, 0.0, "mu1 > mu2 in every record");
    add("ascent", ascent, 0.0, 1e-12, "energy nondecreasing at every iteration");
    add("energy_witness", witness, 0.0, 0.0, "converged energy >= energy of the seeded placement");
    add("energy_identity", identity <= 1e-9, identity, 1e-9, "E = E+ + E- - I, relative error");

    std::vector<double> dp, dm;
    for (const auto& r : records) {
        dp.push_back(r.profile_positive);
        dm.push_back(r.profile_negative);
    }
    const double last_profile = pair ? std::max(dp.back(), dm.back()) : dp.back();
    add("profile_smallest", last_profile <= 0.2, last_profile, 0.2, "delta at the smallest eps");
    add("profile_trend", nonincreasing_within(dp, 0.2) && (!pair || nonincreasing_within(dm, 0.2)), last_profile, 0.2,
        "delta non-increasing as eps decreases, 20% noise");
    return v;
}

}  // namespace vortexlab
