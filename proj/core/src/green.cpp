#include "vortexlab/green.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace vortexlab {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

struct PoissonSolver::Impl {
    SparseMatrix matrix;
    Eigen::SimplicialLDLT<SparseMatrix> factor;
};

PoissonSolver::PoissonSolver(GridPtr grid, SolverOptions options)
    : grid_(std::move(grid)), options_(options), impl_(std::make_unique<Impl>()) {
    const Grid& g = *grid_;
    const auto n = static_cast<Eigen::Index>(g.size());
    const double inv_h2 = 1.0 / (g.h() * g.h());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 5);
    for (CellId c = 0; c < static_cast<CellId>(n); ++c) {
        double diag = 0.0;
        for (const Direction d : kDirections) {
            const CellId nb = g.neighbor(c, d);
            if (nb != kNoCell) {
                diag += inv_h2;
                triplets.emplace_back(c, nb, -inv_h2);
            } else {
                diag += inv_h2 / g.boundary_fraction(c, d);
            }
        }
        triplets.emplace_back(c, c, diag);
    }
    impl_->matrix.resize(n, n);
    impl_->matrix.setFromTriplets(triplets.begin(), triplets.end());
    impl_->factor.compute(impl_->matrix);
    if (impl_->factor.info() != Eigen::Success) {
        throw SolverError("factorization of the Dirichlet Laplacian failed");
    }
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

std::vector<double> PoissonSolver::solve(std::span<const double> rhs) const {
    if (rhs.size() != grid_->size()) throw SolverError("right-hand side size does not match grid");
    const Eigen::Map<const Eigen::VectorXd> f(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const double f_norm = inf_norm(rhs);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(f.size());
    if (f_norm == 0.0) return std::vector<double>(rhs.size(), 0.0);
    u = impl_->factor.solve(f);
    double res = 0.0;
    for (int it = 0;; ++it) {
        const Eigen::VectorXd r = f - impl_->matrix * u;
        res = r.lpNorm<Eigen::Infinity>();
        if (res <= options_.tolerance * f_norm) break;
        if (it >= options_.max_refinements || !std::isfinite(res)) {
            std::ostringstream os;
            os << "Poisson solve did not reach tolerance: residual " << res << " vs "
               << options_.tolerance * f_norm;
            throw SolverError(os.str());
        }
        u += impl_->factor.solve(r);
    }
    return {u.data(), u.data() + u.size()};
}

ScalarField PoissonSolver::solve(const ScalarField& rhs) const {
    if (rhs.grid_ptr() != grid_) throw SolverError("right-hand side lives on a different grid");
    return ScalarField(grid_, solve(rhs.values()));
}

std::vector<double> PoissonSolver::apply(std::span<const double> u) const {
    const Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::VectorXd y = impl_->matrix * x;
    return {y.data(), y.data() + y.size()};
}

ScalarField PoissonSolver::apply(const ScalarField& u) const {
    return ScalarField(grid_, apply(u.values()));
}

ScalarField green_function(const PoissonSolver& solver, CellId y) {
    const Grid& g = solver.grid();
    if (y < 0 || static_cast<std::size_t>(y) >= g.size()) {
        throw GeometryError("green_function: source cell outside the grid");
    }
    ScalarField delta(solver.grid_ptr());
    delta[y] = 1.0 / g.cell_area();
    return solver.solve(delta);
}

double regular_part(const ScalarField& green_column, CellId x, CellId y) {
    if (x == y) throw GeometryError("regular_part needs distinct points; use robin() on the diagonal");
    const Grid& g = green_column.grid();
    const double r = distance(g.center(x), g.center(y));
    return -std::log(r) / kTwoPi - green_column[x];
}

double regular_part(const PoissonSolver& solver, CellId x, CellId y) {
    return regular_part(green_function(solver, y), x, y);
}

double robin(const ScalarField& green_column_at_x, CellId x) {
    const Grid& g = green_column_at_x.grid();
    if (g.domain().distance_to_boundary(g.center(x)) < 4.0 * g.h() - 1e-12) {
        throw GeometryError("robin near boundary unreliable");
    }
    static constexpr int kDx[4] = {2, -2, 0, 0};
    static constexpr int kDy[4] = {0, 0, 2, -2};
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        const CellId nb = g.at(g.ix(x) + kDx[k], g.iy(x) + kDy[k]);
        if (nb == kNoCell) throw GeometryError("robin near boundary unreliable");
        // G is symmetric, so G(x + 2h e, x) from the column at x gives h(x, x + 2h e).
        sum += regular_part(green_column_at_x, nb, x);
    }
    return 0.25 * sum;
}

double robin(const PoissonSolver& solver, CellId x) {
    const Grid& g = solver.grid();
    if (x < 0 || static_cast<std::size_t>(x) >= g.size()) throw GeometryError("robin: cell outside the grid");
    if (g.domain().distance_to_boundary(g.center(x)) < 4.0 * g.h() - 1e-12) {
        throw GeometryError("robin near boundary unreliable");
    }
    return robin(green_function(solver, x), x);
}

VectorField velocity(const ScalarField& psi) {
    const Grid& g = psi.grid();
    VectorField v(psi.grid_ptr());
    const double h = g.h();
    // Three-point derivative on a possibly uneven stencil (boundary at theta*h, value 0).
    auto derivative = [&](CellId c, Direction plus, Direction minus) {
        const CellId p = g.neighbor(c, plus);
        const CellId m = g.neighbor(c, minus);
        const double hp = p != kNoCell ? h : g.boundary_fraction(c, plus) * h;
        const double hm = m != kNoCell ? h : g.boundary_fraction(c, minus) * h;
        const double up = p != kNoCell ? psi[p] : 0.0;
        const double um = m != kNoCell ? psi[m] : 0.0;
        const double u0 = psi[c];
        return (hm * hm * (up - u0) + hp * hp * (u0 - um)) / (hp * hm * (hp + hm));
    };
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        const double d1 = derivative(c, Direction::east, Direction::west);
        const double d2 = derivative(c, Direction::north, Direction::south);
        v.set(c, {d2, -d1});
    }
    return v;
}

double lattice_potential(int mx, int my) {
    mx = std::abs(mx);
    my = std::abs(my);
    if (mx < my) std::swap(mx, my);
    if (mx == 0 && my == 0) return 0.0;

    static std::mutex mutex;
    static std::map<std::pair<int, int>, double> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find({mx, my}); it != cache.end()) return it->second;
    }
    // Integrating the lattice Fourier representation over one frequency
    // leaves a(x,y) = (2/pi) int_0^pi (1 - cos(x t) e^{-|y| s}) / sinh(s) dt
    // with cosh(s) = 2 - cos(t).
    const double x = mx;
    const double y = my;
    auto integrand = [x, y](double t) {
        if (t < 1e-12) return y;  // limit of the ratio as t -> 0 (x^2 term vanishes)
        const double s = std::acosh(2.0 - std::cos(t));
        return (1.0 - std::cos(x * t) * std::exp(-y * s)) / std::sinh(s);
    };
    double error = 0.0;
    const double value = (2.0 / std::numbers::pi) *
                         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                             integrand, 0.0, std::numbers::pi, 15, 1e-14, &error);
    std::lock_guard lock(mutex);
    cache.emplace(std::make_pair(mx, my), value);
    return value;
}

double free_lattice_green(int mx, int my, double h) {
    // a(m) ~ (2/pi) ln|m| + (2 gamma + ln 8)/pi, and (4u - sum of neighbours) a = -4 delta.
    static const double kOffset = (2.0 * std::numbers::egamma + std::log(8.0)) / (4.0 * std::numbers::pi);
    return -0.25 * lattice_potential(mx, my) + kOffset - std::log(h) / kTwoPi;
}

}  // namespace vortexlab
