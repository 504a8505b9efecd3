#include "vortexlab/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "vortexlab/kirchhoff_routh.hpp"

namespace vortexlab {

void RearrangementSpec::validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw RearrangementError("p must lie in (1, inf)");
    if (!(eps1 > 0.0)) throw RearrangementError("eps1 must be positive");
    if (!(kappa1 > 0.0)) throw RearrangementError("kappa1 must be positive");
    if (single_signed()) {
        if (eps2 != 0.0) throw RearrangementError("single-signed class needs eps2 = 0 with kappa2 = 0");
    } else {
        if (!(kappa2 < 0.0)) throw RearrangementError("kappa2 must be negative");
        if (!(eps2 > 0.0)) throw RearrangementError("eps2 must be positive");
    }
    if (profile == ProfileKind::parabolic && !(gamma > 0.0)) throw RearrangementError("gamma must be positive");
}

double Prototype::kappa1() const {
    return std::accumulate(positive.begin(), positive.end(), 0.0) * cell_area;
}

double Prototype::kappa2() const {
    return -std::accumulate(negative.begin(), negative.end(), 0.0) * cell_area;
}

std::size_t core_cells(double eps, double h) {
    return static_cast<std::size_t>(std::llround(std::numbers::pi * eps * eps / (h * h)));
}

namespace {

std::vector<double> profile_values(std::size_t count, double mass, double cell_area, const RearrangementSpec& spec) {
    std::vector<double> v(count, 1.0);
    if (spec.profile == ProfileKind::parabolic) {
        for (std::size_t j = 0; j < count; ++j) {
            v[j] = std::pow(1.0 - static_cast<double>(j) / static_cast<double>(count), spec.gamma);
        }
    }
    const double total = std::accumulate(v.begin(), v.end(), 0.0) * cell_area;
    for (auto& x : v) x *= mass / total;
    return v;
}

}  // namespace

Prototype make_prototype(const RearrangementSpec& spec, const Grid& grid) {
    spec.validate();
    const double h = grid.h();
    const std::size_t n1 = core_cells(spec.eps1, h);
    const std::size_t n2 = spec.single_signed() ? 0 : core_cells(spec.eps2, h);
    if (n1 < 4 || (!spec.single_signed() && n2 < 4)) {
        std::ostringstream os;
        os << "core under-resolved (" << (n1 < 4 ? n1 : n2) << " cells < 4): refine grid or enlarge eps";
        throw RearrangementError(os.str());
    }
    if (n1 + n2 >= grid.size()) throw RearrangementError("cores do not fit: N1 + N2 must be below the cell count");
    Prototype proto;
    proto.cell_area = grid.cell_area();
    proto.positive = profile_values(n1, spec.kappa1, proto.cell_area, spec);
    if (n2 > 0) proto.negative = profile_values(n2, -spec.kappa2, proto.cell_area, spec);
    return proto;
}

double energy(const PoissonSolver& solver, const ScalarField& zeta) {
    return 0.5 * inner(zeta, solver.solve(zeta));
}

namespace {

/// Cells sorted by psi descending, ties by cell index.
std::vector<CellId> psi_order(const ScalarField& psi) {
    std::vector<CellId> order(psi.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](CellId a, CellId b) {
        if (psi[a] != psi[b]) return psi[a] > psi[b];
        return a < b;
    });
    return order;
}

}  // namespace

ScalarField best_response(const ScalarField& psi, const Prototype& prototype) {
    const std::size_t n1 = prototype.n_positive();
    const std::size_t n2 = prototype.n_negative();
    if (n1 + n2 > psi.size()) throw RearrangementError("prototype has more values than the grid has cells");
    const auto order = psi_order(psi);
    ScalarField out(psi.grid_ptr(), 0.0);
    for (std::size_t j = 0; j < n1; ++j) out[order[j]] = prototype.positive[j];
    for (std::size_t j = 0; j < n2; ++j) out[order[order.size() - 1 - j]] = -prototype.negative[j];
    return out;
}

bool in_class(const ScalarField& zeta, const Prototype& prototype) {
    std::vector<double> pos, neg;
    for (const double v : zeta.values()) {
        if (v > 0.0) pos.push_back(v);
        if (v < 0.0) neg.push_back(-v);
    }
    std::sort(pos.begin(), pos.end(), std::greater<>());
    std::sort(neg.begin(), neg.end(), std::greater<>());
    return pos == prototype.positive && neg == prototype.negative;
}

ScalarField place_prototype(const GridPtr& grid_ptr, const Prototype& prototype, Point positive, Point negative) {
    const Grid& grid = *grid_ptr;
    std::vector<double> values(grid.size(), 0.0);
    std::vector<char> used(grid.size(), 0);
    auto place = [&](Point c, const std::vector<double>& vals, double sign) {
        std::vector<std::pair<double, CellId>> cells;
        cells.reserve(grid.size());
        for (CellId k = 0; k < static_cast<CellId>(grid.size()); ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            const Point d = grid.center(k) - c;
            cells.emplace_back(d.x * d.x + d.y * d.y, k);
        }
        const std::size_t m = std::min(vals.size(), cells.size());
        std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(m), cells.end());
        for (std::size_t j = 0; j < m; ++j) {
            const auto k = static_cast<std::size_t>(cells[j].second);
            values[k] = sign * vals[j];
            used[k] = 1;
        }
    };
    place(positive, prototype.positive, 1.0);
    if (prototype.n_negative() > 0) place(negative, prototype.negative, -1.0);
    return ScalarField(grid_ptr, std::move(values));
}

ScalarField random_member(const GridPtr& grid, const Prototype& prototype, std::uint64_t seed) {
    std::vector<CellId> cells(grid->size());
    std::iota(cells.begin(), cells.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(cells.begin(), cells.end(), rng);
    ScalarField z(grid, 0.0);
    std::size_t k = 0;
    for (const double v : prototype.positive) z[cells[k++]] = v;
    for (const double v : prototype.negative) z[cells[k++]] = -v;
    return z;
}

std::pair<double, double> lagrange_multipliers(const ScalarField& zeta, const ScalarField& psi) {
    double mu1 = std::numeric_limits<double>::infinity();
    double mu2 = -std::numeric_limits<double>::infinity();
    for (CellId c = 0; c < static_cast<CellId>(zeta.size()); ++c) {
        if (zeta[c] > 0.0) mu1 = std::min(mu1, psi[c]);
        if (zeta[c] < 0.0) mu2 = std::max(mu2, psi[c]);
    }
    if (std::isinf(mu1)) throw RearrangementError("empty positive core");
    if (std::isinf(mu2)) mu2 = std::numeric_limits<double>::quiet_NaN();
    return {mu1, mu2};
}

std::uint64_t monotone_map_check(const ScalarField& zeta, const ScalarField& psi, double tol) {
    const std::size_t n = zeta.size();
    std::vector<std::size_t> by_psi(n);
    std::iota(by_psi.begin(), by_psi.end(), 0);
    std::sort(by_psi.begin(), by_psi.end(), [&](std::size_t a, std::size_t b) {
        return psi.values()[a] < psi.values()[b];
    });
    std::vector<double> levels(zeta.values().begin(), zeta.values().end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    // Fenwick tree over zeta ranks of cells whose psi is below the current one by more than tol.
    std::vector<std::uint64_t> tree(levels.size() + 1, 0);
    std::uint64_t inserted = 0;
    auto add = [&](double z) {
        auto r = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), z) - levels.begin()) + 1;
        for (; r < tree.size(); r += r & (~r + 1)) ++tree[r];
        ++inserted;
    };
    auto count_le = [&](double z) {
        auto r = static_cast<std::size_t>(std::upper_bound(levels.begin(), levels.end(), z) - levels.begin());
        std::uint64_t s = 0;
        for (; r > 0; r -= r & (~r + 1)) s += tree[r];
        return s;
    };
    std::uint64_t violations = 0;
    std::size_t lo = 0;
    for (const std::size_t i : by_psi) {
        const double pi = psi.values()[i];
        while (lo < n && psi.values()[by_psi[lo]] < pi - tol) add(zeta.values()[by_psi[lo++]]);
        violations += inserted - count_le(zeta.values()[i] + tol);
    }
    return violations;
}

double steadiness_residual(const PoissonSolver& solver, const ScalarField& zeta, int test_count, std::uint64_t seed) {
    if (test_count < 1) throw RearrangementError("test_count must be positive");
    const Grid& g = solver.grid();
    const ScalarField psi = solver.solve(zeta);
    const VectorField v = velocity(psi);
    const double vmax = v.max_magnitude();
    const double z1 = lp_norm(zeta, 1.0);
    if (vmax == 0.0 || z1 == 0.0) return 0.0;

    // phi(r) = exp(1 - 1/(1 - (r/R)^2)); |phi'| peaks at a fixed fraction of R.
    auto dphi = [](double s) {
        if (s >= 1.0) return 0.0;
        const double q = 1.0 - s * s;
        return std::exp(1.0 - 1.0 / q) * 2.0 * s / (q * q);
    };
    double peak = 0.0;
    for (int k = 1; k < 4000; ++k) peak = std::max(peak, dphi(k / 4000.0));

    const auto [lo, hi] = g.domain().bounds();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), ur(0.05, 0.3);
    double worst = 0.0;
    for (int t = 0; t < test_count; ++t) {
        Point c;
        double radius = ur(rng);
        for (int attempt = 0;; ++attempt) {
            c = {ux(rng), uy(rng)};
            if (g.domain().contains(c)) {
                const double d = g.domain().distance_to_boundary(c);
                if (d >= radius) break;
                if (attempt > 200 && d > 2.0 * g.h()) {
                    radius = d;
                    break;
                }
            }
        }
        double sum = 0.0;
        for (CellId k = 0; k < static_cast<CellId>(g.size()); ++k) {
            if (zeta[k] == 0.0) continue;
            const Point d = g.center(k) - c;
            const double r = norm(d);
            if (r >= radius || r == 0.0) continue;
            const double dr = -dphi(r / radius) / radius;  // d phi / d r
            const Point grad{dr * d.x / r, dr * d.y / r};
            const Point vel = v[k];
            sum += zeta[k] * (vel.x * grad.x + vel.y * grad.y);
        }
        sum *= g.cell_area();
        worst = std::max(worst, std::abs(sum) / (z1 * (peak / radius) * vmax));
    }
    return worst;
}

namespace {

double seed_margin(const Grid& g) { return 6.0 * g.h(); }

}  // namespace

SteadyState maximize(const PoissonSolver& solver, const RearrangementSpec& spec, const InitKind& init,
                     const MaximizeOptions& options) {
    const Grid& g = solver.grid();
    const Prototype proto = make_prototype(spec, g);

    SteadyState st;
    ScalarField zeta;
    switch (init.kind) {
        case InitKind::kr_seed: {
            if (spec.single_signed()) {
                const Point x = robin_minimize(solver, seed_margin(g));
                st.seed_points = {x};
                zeta = place_prototype(solver.grid_ptr(), proto, x, x);
            } else {
                const KRMinimum m = kr_minimize(solver, spec.kappa1, spec.kappa2, seed_margin(g));
                st.seed_points = {m.positive, m.negative};
                zeta = place_prototype(solver.grid_ptr(), proto, m.positive, m.negative);
            }
            break;
        }
        case InitKind::random:
            zeta = random_member(solver.grid_ptr(), proto, init.seed);
            break;
        case InitKind::given:
            if (!init.zeta || init.zeta->size() != g.size()) {
                throw RearrangementError("initial field does not match the grid");
            }
            if (!in_class(*init.zeta, proto)) throw RearrangementError("initial field is not in the rearrangement class");
            zeta = ScalarField(solver.grid_ptr(), std::vector<double>(init.zeta->values().begin(), init.zeta->values().end()));
            break;
    }

    ScalarField psi = solver.solve(zeta);
    st.energies.push_back(0.5 * inner(zeta, psi));
    for (st.iterations = 0; st.iterations < options.max_iterations;) {
        ScalarField next = best_response(psi, proto);
        if (next == zeta) {
            st.converged = true;
            break;
        }
        zeta = std::move(next);
        psi = solver.solve(zeta);
        st.energies.push_back(0.5 * inner(zeta, psi));
        ++st.iterations;
    }
    if (!st.converged) {
        std::ostringstream os;
        os << "non-converged: no fixed point after " << options.max_iterations << " iterations";
        st.message = os.str();
    }

    st.energy = st.energies.back();
    std::tie(st.mu1, st.mu2) = lagrange_multipliers(zeta, psi);
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        if (zeta[c] > 0.0) st.core_positive.push_back(c);
        if (zeta[c] < 0.0) st.core_negative.push_back(c);
    }
    st.center_positive = center_of_mass(positive_part(zeta));
    st.diameter_positive = support_diameter(positive_part(zeta));
    if (!st.core_negative.empty()) {
        st.center_negative = center_of_mass(negative_part(zeta));
        st.diameter_negative = support_diameter(negative_part(zeta));
    }
    st.residual = steadiness_residual(solver, zeta, options.residual_tests, options.residual_seed);
    st.zeta = std::move(zeta);
    st.psi = std::move(psi);
    return st;
}

}  // namespace vortexlab
