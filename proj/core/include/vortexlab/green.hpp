#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "vortexlab/field.hpp"

namespace vortexlab {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    /// Required relative residual ||A u - f||_inf <= tolerance * ||f||_inf.
    double tolerance = 1e-10;
    int max_refinements = 4;
};

/// Factorized 5-point discretization of -Laplace with zero Dirichlet data.
/// Exterior neighbours are closed with the symmetric ghost-fluid rule: a face
/// that crosses the boundary at theta*h contributes 1/(theta h^2) to the
/// diagonal, which keeps the operator symmetric positive definite.
///
/// Read-only after construction; concurrent solve() calls are safe.
class PoissonSolver {
public:
    explicit PoissonSolver(GridPtr grid, SolverOptions options = {});
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const SolverOptions& options() const { return options_; }

    ScalarField solve(const ScalarField& rhs) const;
    std::vector<double> solve(std::span<const double> rhs) const;
    /// Applies the discrete operator -Laplace_h.
    ScalarField apply(const ScalarField& u) const;
    std::vector<double> apply(std::span<const double> u) const;

private:
    struct Impl;
    GridPtr grid_;
    SolverOptions options_;
    std::unique_ptr<Impl> impl_;
};

/// G(., y): the solve of a discrete delta of mass one at cell y.
ScalarField green_function(const PoissonSolver& solver, CellId y);

/// h(x,y) = -(1/2pi) ln|x-y| - G(x,y) for distinct cells.
double regular_part(const PoissonSolver& solver, CellId x, CellId y);
/// Same, reusing an already computed column G(., y).
double regular_part(const ScalarField& green_column, CellId x, CellId y);

/// Robin function H(x) = h(x,x), evaluated as the average of h(x, x + 2h e)
/// over the four lattice directions. Requires distance >= 4h to the boundary.
double robin(const PoissonSolver& solver, CellId x);
double robin(const ScalarField& green_column_at_x, CellId x);

/// v = (d psi / dx2, -d psi / dx1), second-order differences with the
/// boundary closure psi = 0.
VectorField velocity(const ScalarField& psi);

/// Potential kernel a(m) of the simple random walk on Z^2 (a(0)=0, a(1,0)=1).
double lattice_potential(int mx, int my);

/// Free-space fundamental solution of the 5-point operator with spacing h,
/// normalized so that it approaches -(1/2pi) ln|x| at large distances.
double free_lattice_green(int mx, int my, double h);

}  // namespace vortexlab
