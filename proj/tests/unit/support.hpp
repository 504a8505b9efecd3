#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "vortexlab/green.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

// One factorization per resolution for the whole test binary.
inline const vortexlab::PoissonSolver& disk_solver(int n) {
    static std::map<int, std::unique_ptr<vortexlab::PoissonSolver>> cache;
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<vortexlab::PoissonSolver>(
            vortexlab::Grid::build(vortexlab::DomainSpec::unit_disk(), n));
    }
    return *slot;
}

// Method of images in the unit disk.
inline double disk_green(vortexlab::Point x, vortexlab::Point y) {
    const double r2 = y.x * y.x + y.y * y.y;
    const vortexlab::Point ystar{y.x / r2, y.y / r2};
    return std::log(vortexlab::distance(x, ystar) * std::sqrt(r2) / vortexlab::distance(x, y)) / (2.0 * kPi);
}

inline double disk_robin(vortexlab::Point x) { return -std::log(1.0 - (x.x * x.x + x.y * x.y)) / (2.0 * kPi); }

// Stream function of a uniform patch of circulation kappa on B_eps(0).
inline double patch_stream(double r, double eps, double kappa = 1.0) {
    if (r >= eps) return kappa * std::log(1.0 / r) / (2.0 * kPi);
    return kappa * (std::log(1.0 / eps) / (2.0 * kPi) + (1.0 - r * r / (eps * eps)) / (4.0 * kPi));
}

inline vortexlab::ScalarField centered_patch(const vortexlab::GridPtr& grid, double eps, double kappa = 1.0) {
    vortexlab::ScalarField f(grid, 0.0);
    for (vortexlab::CellId c = 0; c < static_cast<vortexlab::CellId>(grid->size()); ++c) {
        if (vortexlab::norm(grid->center(c)) < eps) f[c] = kappa / (kPi * eps * eps);
    }
    return f;
}

}  // namespace testing
