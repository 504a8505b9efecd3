#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexlab/rearrangement.hpp"

namespace vortexlab {

class EulerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EulerState {
    double t = 0.0;
    ScalarField omega;
};

inline constexpr double kCfl = 0.5;

/// Largest dt allowed by the CFL bound for the velocity of omega.
double max_stable_dt(const PoissonSolver& solver, const ScalarField& omega);

/// Semi-Lagrangian step omega'(x) = omega(x - dt v(x)) with v = grad_perp G omega,
/// bilinear interpolation and zero extension outside the domain. Throws
/// EulerError when dt exceeds the CFL bound.
EulerState step(const PoissonSolver& solver, const EulerState& state, double dt);

/// Bilinear value of a grid field at an arbitrary point, zero outside.
double sample_bilinear(const ScalarField& f, Point x);

/// f rotated by `angle` about the origin, by nearest-cell lookup.
ScalarField rotate_field(const ScalarField& f, double angle);

/// Time for a fluid particle on the rim of a patch of radius eps and
/// circulation kappa to go once around: 4 pi^2 eps^2 / |kappa|.
double turnover_time(double eps, double kappa);

struct StabilityOptions {
    double dt = 0.0;  ///< 0 picks the CFL limit of the initial field
    int sample_every = 10;
    /// Rotations of the reference used for the orbit distance in the disk.
    int rotations = 36;
    std::uint64_t seed = 0;
};

struct StabilitySample {
    double t = 0.0;
    double distance = 0.0;  ///< |omega - zeta|_p / |zeta|_p, minimized over rotations in the disk
    double integral = 0.0;
    double max_abs = 0.0;
};

struct StabilityResult {
    std::vector<StabilitySample> series;
    double dt = 0.0;
    double perturbation_norm = 0.0;
    bool blown_up = false;
    std::string message;

    double initial_distance() const { return series.empty() ? 0.0 : series.front().distance; }
    double max_distance() const;
};

/// Seeded C-infinity bump near the positive core, scaled to L^p norm delta0.
ScalarField perturbation(const SteadyState& steady, double delta0, double p, std::uint64_t seed);

/// Evolves zeta + perturbation to time T and records the distance to zeta.
StabilityResult stability_experiment(const PoissonSolver& solver, const SteadyState& steady, double delta0, double t_end,
                                     double p, const StabilityOptions& options = {});

}  // namespace vortexlab
