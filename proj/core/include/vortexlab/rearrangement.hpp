#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexlab/green.hpp"

namespace vortexlab {

class RearrangementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProfileKind { patch, parabolic };

/// Parameters of the rearrangement class. kappa2 = 0 together with eps2 = 0
/// selects the single-signed class (no negative core).
struct RearrangementSpec {
    double eps1 = 0.1;
    double eps2 = 0.1;
    double kappa1 = 1.0;
    double kappa2 = -1.0;
    double p = 2.0;
    ProfileKind profile = ProfileKind::patch;
    double gamma = 1.0;  ///< exponent of the parabolic profile

    bool single_signed() const { return kappa2 == 0.0; }
    double p_conjugate() const { return p / (p - 1.0); }
    void validate() const;
};

/// Value multisets of the class. `negative` holds magnitudes, both sorted
/// descending.
struct Prototype {
    std::vector<double> positive;
    std::vector<double> negative;
    double cell_area = 0.0;

    std::size_t n_positive() const { return positive.size(); }
    std::size_t n_negative() const { return negative.size(); }
    /// Integral of the positive part.
    double kappa1() const;
    /// -(integral of the negative part).
    double kappa2() const;
};

/// Cell count round(pi eps^2 / h^2) of a core of radius eps.
std::size_t core_cells(double eps, double h);

Prototype make_prototype(const RearrangementSpec& spec, const Grid& grid);

/// E = 1/2 sum zeta (G zeta) h^2.
double energy(const PoissonSolver& solver, const ScalarField& zeta);

/// Exact maximizer of sum v psi h^2 over the class: the positive values go to
/// the top cells of psi and the negative values to the bottom cells, ordered
/// by (psi, cell index).
ScalarField best_response(const ScalarField& psi, const Prototype& prototype);

/// True when the sorted value multisets of zeta^+ and zeta^- equal the
/// prototype's.
bool in_class(const ScalarField& zeta, const Prototype& prototype);

struct InitKind {
    enum Kind { kr_seed, random, given } kind = kr_seed;
    std::uint64_t seed = 0;
    std::optional<ScalarField> zeta;

    static InitKind from_kr() { return {}; }
    static InitKind from_random(std::uint64_t seed) { return {random, seed, std::nullopt}; }
    static InitKind from_field(ScalarField z) { return {given, 0, std::move(z)}; }
};

struct MaximizeOptions {
    int max_iterations = 500;
    int residual_tests = 32;
    std::uint64_t residual_seed = 0;
};

struct SteadyState {
    ScalarField zeta;
    ScalarField psi;
    double energy = 0.0;
    double mu1 = 0.0;
    /// NaN for the single-signed class.
    double mu2 = 0.0;
    std::vector<CellId> core_positive;
    std::vector<CellId> core_negative;
    Point center_positive;
    Point center_negative;
    double diameter_positive = 0.0;
    double diameter_negative = 0.0;
    /// Energy of the initial field followed by the energy after every step.
    std::vector<double> energies;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
    /// Vortex positions used to place the kr_seed start.
    std::vector<Point> seed_points;
    std::string message;
};

/// Monotone ascent zeta <- best_response(G zeta) until the iterate repeats.
SteadyState maximize(const PoissonSolver& solver, const RearrangementSpec& spec, const InitKind& init = {},
                     const MaximizeOptions& options = {});

/// Places the prototype as symmetric-decreasing blobs around the given
/// centres (positive first, cells ordered by distance then index).
ScalarField place_prototype(const GridPtr& grid, const Prototype& prototype, Point positive, Point negative);
ScalarField random_member(const GridPtr& grid, const Prototype& prototype, std::uint64_t seed);

/// (min psi over V+, max psi over V-); throws on an empty positive core.
/// The second entry is NaN when V- is empty.
std::pair<double, double> lagrange_multipliers(const ScalarField& zeta, const ScalarField& psi);

/// Number of ordered pairs with psi_i > psi_j + tol but zeta_i < zeta_j - tol.
std::uint64_t monotone_map_check(const ScalarField& zeta, const ScalarField& psi, double tol = 1e-10);

/// Max over seeded bump tests phi of
/// |sum zeta (grad_perp psi . grad phi) h^2| / (|zeta|_1 |grad phi|_inf |grad psi|_inf).
double steadiness_residual(const PoissonSolver& solver, const ScalarField& zeta, int test_count = 32,
                           std::uint64_t seed = 0);

}  // namespace vortexlab
