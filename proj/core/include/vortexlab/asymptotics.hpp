#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vortexlab/kirchhoff_routh.hpp"
#include "vortexlab/rearrangement.hpp"

namespace vortexlab {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepRecord {
    double eps1 = 0.0;
    double eps2 = 0.0;
    int n = 0;
    double energy = 0.0;
    double energy_positive = 0.0;  ///< E(zeta^+)
    double energy_negative = 0.0;  ///< E(zeta^-)
    double interaction = 0.0;      ///< sum zeta^+ G zeta^- h^2
    double mu1 = 0.0;
    double mu2 = 0.0;
    double diameter_positive = 0.0;
    double diameter_negative = 0.0;
    Point center_positive;
    Point center_negative;
    double profile_positive = 0.0;  ///< relative L^p distance of xi to rho
    double profile_negative = 0.0;
    double seed_energy = 0.0;  ///< energy of the initial placement
    /// kr_minimize positions on this grid when the run was kr-seeded.
    bool has_kr = false;
    Point kr_positive;
    Point kr_negative;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool ascent = true;  ///< every step nondecreasing to 1e-12 relative
    std::uint64_t monotone_violations = 0;
    std::string message;
};

/// Grid resolution per core radius; defaults to a fixed n.
using ResolutionSchedule = std::function<int(double eps)>;

struct SweepOptions {
    RearrangementSpec spec;  ///< eps1/eps2 are overridden per sweep point
    ResolutionSchedule resolution;
    double min_cells_per_radius = 8.0;
    SolverOptions solver;
    MaximizeOptions maximize;
    int jobs = 1;
};

/// Solvers keyed by resolution, built once and shared by the sweep and the
/// analysis functions.
class SolverPool {
public:
    SolverPool(DomainSpec domain, SolverOptions options) : domain_(std::move(domain)), options_(options) {}
    const PoissonSolver& get(int n);
    const DomainSpec& domain() const { return domain_; }

private:
    DomainSpec domain_;
    SolverOptions options_;
    std::map<int, std::unique_ptr<PoissonSolver>> solvers_;
};

/// Throws AnalysisError when a radius is below min_cells_per_radius cells.
void check_resolution(double eps, int n, double min_cells_per_radius);

/// One maximize run per eps (eps1 = eps2 = eps), records sorted by eps
/// descending. Deterministic for any number of jobs.
std::vector<SweepRecord> run_sweep(SolverPool& pool, std::vector<double> eps_list, const SweepOptions& options);

/// Fills the energy/interaction/profile fields of a record from a state.
SweepRecord make_record(const PoissonSolver& solver, const RearrangementSpec& spec, const SteadyState& state);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  ///< root mean square deviation
    std::size_t points = 0;
};

/// Least squares y = slope * x + intercept; throws with fewer than 3 points.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of E(zeta^+) (sign > 0) or E(zeta^-) against -ln eps over converged
/// records.
LinearFit fit_energy_slope(const std::vector<SweepRecord>& records, int sign);

struct InteractionSummary {
    double max_interaction = 0.0;
    LinearFit fit;  ///< interaction against -ln eps1
    bool all_positive = true;
};
InteractionSummary interaction_boundedness(const std::vector<SweepRecord>& records);

struct CoreSizeSummary {
    std::vector<double> ratios_positive;  ///< diam / eps per record
    std::vector<double> ratios_negative;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
};
CoreSizeSummary core_size_check(const std::vector<SweepRecord>& records);

struct CenterSummary {
    PairSignature reference;
    Point reference_positive;
    Point reference_negative;
    std::vector<double> distances;  ///< per record
    double h = 0.0;                 ///< spacing of the smallest-eps grid
};
/// Compares record signatures with kr_minimize on the grid of each record.
CenterSummary center_convergence_check(SolverPool& pool, const std::vector<SweepRecord>& records, double kappa1,
                                       double kappa2);

struct MultiplierSummary {
    std::vector<double> d1;  ///< mu1 + (kappa1/2pi) ln eps1
    std::vector<double> d2;  ///< mu2 + (kappa2/2pi) ln eps2
    double spread1 = 0.0;
    double spread2 = 0.0;
};
MultiplierSummary multiplier_check(const std::vector<SweepRecord>& records, double kappa1, double kappa2);

/// delta = |xi - rho|_p / |rho|_p with xi = eps^2 f(eps x + center) on the
/// aligned plane of radius 2 and rho the rearranged prototype on that plane.
double profile_distance(const ScalarField& core, const std::vector<double>& prototype_values, double eps,
                        Point center, double p);

/// Values listed from the largest to the smallest eps. True when each value
/// is at most (1 + tolerance) times its predecessor or does not exceed
/// `floor`.
bool nonincreasing_within(const std::vector<double>& values, double tolerance, double floor = 0.0);

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct SweepVerdict {
    std::vector<Check> checks;
    CenterSummary centers;
    MultiplierSummary multipliers;
    bool all_pass() const;
    const Check* find(std::string_view name) const;
};

/// Every sweep check with its threshold. Fits with fewer than three converged
/// records fail with detail "insufficient points".
SweepVerdict evaluate_sweep(SolverPool& pool, const std::vector<SweepRecord>& records, double kappa1, double kappa2);

struct GradientMeasureSample {
    double support_radius = 0.0;
    double level = 0.0;
    double ratio = 0.0;
};
struct GradientMeasureSummary {
    std::vector<double> radii;
    std::vector<double> max_ratio;  ///< per radius
    std::vector<GradientMeasureSample> samples;
    double overall_max = 0.0;
    double growth = 0.0;  ///< max over scales / min over scales
};

/// r = |grad u|_2 / (|f 1_U|_p m(U)^(1/p')) for u = (G f - c)^+, U = {u > 0}.
/// Returns 0 for an empty U.
double gradient_measure_ratio(const PoissonSolver& solver, const ScalarField& f, double level, double p);

/// Random nonnegative f on disks of radius 0.05, 0.1 and 0.2 with random
/// levels c; sample_count samples per radius.
GradientMeasureSummary gradient_measure_diagnostic(const PoissonSolver& solver, int sample_count, std::uint64_t seed,
                                                   double p = 2.0);

struct InequalitySummary {
    int instances = 0;
    int violations = 0;
    double worst_excess = 0.0;  ///< max of lhs - rhs (negative when all hold)
};

/// sum u v h^2 <= sum u* v* h^2 for random nonnegative u, v.
InequalitySummary hardy_littlewood_suite(int instances, std::uint64_t seed, double tol = 1e-10);
/// sum_x sum_y u(x) k(x - y) w(y) with k(z) = ln(1/max(|z|, h)) on random
/// small supports, compared with the same sum for u*, w*.
InequalitySummary riesz_suite(int instances, std::uint64_t seed, double tol = 1e-8);

}  // namespace vortexlab
