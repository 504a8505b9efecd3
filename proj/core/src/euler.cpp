#include "vortexlab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace vortexlab {

double max_stable_dt(const PoissonSolver& solver, const ScalarField& omega) {
    const double vmax = velocity(solver.solve(omega)).max_magnitude();
    if (vmax == 0.0) return std::numeric_limits<double>::infinity();
    return kCfl * solver.grid().h() / vmax;
}

double sample_bilinear(const ScalarField& f, Point x) {
    const Grid& g = f.grid();
    const Point q = g.lattice_coords(x);
    const double fx = std::floor(q.x);
    const double fy = std::floor(q.y);
    const int i = static_cast<int>(fx);
    const int j = static_cast<int>(fy);
    const double a = q.x - fx;
    const double b = q.y - fy;
    auto value = [&](int ix, int iy) {
        const CellId c = g.at(ix, iy);
        return c == kNoCell ? 0.0 : f[c];
    };
    return (1.0 - a) * (1.0 - b) * value(i, j) + a * (1.0 - b) * value(i + 1, j) + (1.0 - a) * b * value(i, j + 1) +
           a * b * value(i + 1, j + 1);
}

EulerState step(const PoissonSolver& solver, const EulerState& state, double dt) {
    const Grid& g = solver.grid();
    const VectorField v = velocity(solver.solve(state.omega));
    const double vmax = v.max_magnitude();
    if (!(dt > 0.0)) throw EulerError("time step must be positive");
    if (dt * vmax > kCfl * g.h() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violated: dt = " << dt << " exceeds " << kCfl << " h / max|v|; use dt <= " << kCfl * g.h() / vmax;
        throw EulerError(os.str());
    }
    EulerState next{state.t + dt, ScalarField(state.omega.grid_ptr(), 0.0)};
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        next.omega[c] = sample_bilinear(state.omega, g.center(c) - v[c] * dt);
    }
    return next;
}

ScalarField rotate_field(const ScalarField& f, double angle) {
    const Grid& g = f.grid();
    ScalarField out(f.grid_ptr(), 0.0);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    for (CellId k = 0; k < static_cast<CellId>(g.size()); ++k) {
        const Point x = g.center(k);
        const Point src{c * x.x + s * x.y, -s * x.x + c * x.y};
        if (const auto cell = g.nearest_cell(src)) out[k] = f[*cell];
    }
    return out;
}

double turnover_time(double eps, double kappa) {
    return 4.0 * std::numbers::pi * std::numbers::pi * eps * eps / std::abs(kappa);
}

double StabilityResult::max_distance() const {
    double m = 0.0;
    for (const auto& s : series) m = std::max(m, s.distance);
    return m;
}

ScalarField perturbation(const SteadyState& steady, double delta0, double p, std::uint64_t seed) {
    const Grid& g = steady.zeta.grid();
    ScalarField bump(steady.zeta.grid_ptr(), 0.0);
    if (delta0 == 0.0) return bump;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double spread = 0.25 * steady.diameter_positive;
    const double r0 = spread * std::sqrt(unit(rng));
    const double a0 = 2.0 * std::numbers::pi * unit(rng);
    const Point center = steady.center_positive + Point{r0 * std::cos(a0), r0 * std::sin(a0)};
    const double radius = std::max(0.5 * steady.diameter_positive, 4.0 * g.h());
    for (CellId k = 0; k < static_cast<CellId>(g.size()); ++k) {
        const double s = distance(g.center(k), center) / radius;
        if (s < 1.0) bump[k] = std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    const double norm_p = lp_norm(bump, p);
    if (norm_p == 0.0) throw EulerError("perturbation bump misses the grid");
    bump *= delta0 / norm_p;
    return bump;
}

StabilityResult stability_experiment(const PoissonSolver& solver, const SteadyState& steady, double delta0, double t_end,
                                     double p, const StabilityOptions& options) {
    const ScalarField& zeta = steady.zeta;
    const double zeta_norm = lp_norm(zeta, p);
    if (zeta_norm == 0.0) throw EulerError("steady state is zero");
    if (delta0 < 0.0 || delta0 > 0.1 * zeta_norm) throw EulerError("perturbation must satisfy 0 <= delta0 <= 0.1 |zeta|_p");

    std::vector<ScalarField> references{zeta};
    if (solver.grid().domain().kind() == DomainKind::unit_disk) {
        for (int k = 1; k < options.rotations; ++k) {
            references.push_back(rotate_field(zeta, 2.0 * std::numbers::pi * k / options.rotations));
        }
    }
    auto orbit_distance = [&](const ScalarField& w) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& ref : references) best = std::min(best, lp_norm(w - ref, p));
        return best / zeta_norm;
    };

    StabilityResult result;
    EulerState state{0.0, zeta + perturbation(steady, delta0, p, options.seed)};
    result.perturbation_norm = delta0;
    result.dt = options.dt > 0.0 ? options.dt : max_stable_dt(solver, state.omega);
    double initial_max = 0.0;
    for (const double v : state.omega.values()) initial_max = std::max(initial_max, std::abs(v));

    auto record = [&] {
        double m = 0.0;
        for (const double v : state.omega.values()) m = std::max(m, std::abs(v));
        result.series.push_back({state.t, orbit_distance(state.omega), integral(state.omega), m});
        return m;
    };
    record();
    const auto steps = static_cast<long>(std::ceil(t_end / result.dt - 1e-9));
    for (long s = 1; s <= steps; ++s) {
        state = step(solver, state, result.dt);
        if (s % std::max(1, options.sample_every) == 0 || s == steps) {
            if (record() > 10.0 * initial_max) {
                result.blown_up = true;
                result.message = "evolution blow-up: max|omega| exceeds 10x its initial value";
                break;
            }
        }
    }
    return result;
}

}  // namespace vortexlab
