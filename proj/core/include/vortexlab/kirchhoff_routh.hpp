#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "vortexlab/green.hpp"

namespace vortexlab {

/// Point vortices x_1..x_k with nonzero strengths kappa_1..kappa_k.
struct KRConfiguration {
    std::vector<Point> points;
    std::vector<double> strengths;

    std::size_t size() const { return points.size(); }
};

struct KRMinimum {
    Point positive;  ///< position of the kappa_1 vortex (positive in the usual ordering)
    Point negative;  ///< position of the kappa_2 vortex
    double value = 0.0;
    double gradient_norm = 0.0;
    int scan_resolution = 0;
    std::size_t scanned_pairs = 0;
    int starts = 0;
    int iterations = 0;
    /// More than one start reached the same value at a different location
    /// (e.g. the rotation orbit of minima in the disk).
    bool degenerate = false;
};

struct PVTrajectory {
    std::vector<double> times;
    std::vector<std::vector<Point>> positions;
    std::vector<double> energies;  ///< W along the path
    bool truncated = false;
    std::string message;
};

struct KROptions {
    /// Memory budget for cached Green columns.
    std::size_t cache_bytes = std::size_t{256} << 20;
};

/// Kirchhoff-Routh function evaluated from the numerical Green operator.
///
/// Every point vortex is smeared over the 6x6 cells under a tensor quintic
/// B-spline centred at its position. The pair term is the blob-blob Green
/// interaction and the self term is the blob-blob regular part, using the
/// free-space lattice kernel to cancel the lattice singularity exactly. The
/// result is C^4 in the positions, so the point-vortex flow conserves W to
/// time-integration accuracy.
class KirchhoffRouth {
public:
    explicit KirchhoffRouth(const PoissonSolver& solver, KROptions options = {});
    ~KirchhoffRouth();

    const PoissonSolver& solver() const { return solver_; }

    /// W = -sum_{i<j} k_i k_j G(x_i,x_j) + 1/2 sum_i k_i^2 H(x_i). Requires
    /// separations and boundary distances >= margin (default 4h).
    double value(const KRConfiguration& cfg) const;
    /// Central differences of value() with step 2h; needs margins >= 6h.
    std::vector<Point> gradient(const KRConfiguration& cfg) const;
    /// Exact gradient of the regularized W.
    std::vector<Point> model_gradient(const KRConfiguration& cfg) const;

    double green(Point x, Point y) const;
    double robin(Point x) const;

    /// Throws GeometryError when points are closer than `margin` to each other
    /// or to the boundary, or when a blob leaves the grid.
    void check_admissible(const KRConfiguration& cfg, double margin) const;
    bool admissible(const KRConfiguration& cfg, double margin) const;

    std::size_t cached_columns() const;

private:
    struct Impl;
    const PoissonSolver& solver_;
    std::unique_ptr<Impl> impl_;
};

double kr_value(const PoissonSolver& solver, const KRConfiguration& cfg);
std::vector<Point> kr_gradient(const PoissonSolver& solver, const KRConfiguration& cfg);

struct KRMinimizeOptions {
    /// Start lattice stride in fine cells; the scan runs on a grid of
    /// resolution max(32, n / stride_cells), capped at n.
    int stride_cells = 8;
    int max_starts = 4;
    int max_iterations = 200;
};

/// Global minimum of W for an opposite-signed pair (kappa_1 > 0 > kappa_2 or
/// the relabelled order): coarse scan of all
/// admissible pairs for starts, then backtracking gradient descent on the
/// full grid. Deterministic for a given grid.
KRMinimum kr_minimize(const PoissonSolver& solver, double kappa1, double kappa2, double margin,
                      const KRMinimizeOptions& options = {});

/// Minimum point of the Robin function over points at distance >= margin from
/// the boundary, found the same way as kr_minimize.
Point robin_minimize(const PoissonSolver& solver, double margin, const KRMinimizeOptions& options = {});

struct PVOptions {
    int sample_every = 10;
    /// Minimum separation / boundary distance, in cells.
    double margin_cells = 4.0;
};

/// Classical RK4 integration of k_i dx_i/dt = grad_perp_{x_i} W.
PVTrajectory pv_evolve(const KirchhoffRouth& kr, const KRConfiguration& cfg, double dt, double t_end,
                       const PVOptions& options = {});
PVTrajectory pv_evolve(const PoissonSolver& solver, const KRConfiguration& cfg, double dt, double t_end,
                       const PVOptions& options = {});

/// Orbit-invariant signature (|x1|, |x2|, |x1 - x2|) of a vortex pair.
struct PairSignature {
    double r1 = 0.0;
    double r2 = 0.0;
    double separation = 0.0;
};
PairSignature pair_signature(Point a, Point b);
double signature_distance(const PairSignature& a, const PairSignature& b);

}  // namespace vortexlab
