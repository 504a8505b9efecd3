#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vortexlab/field.hpp"
#include "vortexlab/green.hpp"

using namespace vortexlab;
using testing::kPi;

TEST_SUITE("green") {

TEST_CASE("zero right-hand side") {
    const auto& s = testing::disk_solver(64);
    const ScalarField psi = s.solve(ScalarField(s.grid_ptr(), 0.0));
    for (const double v : psi.values()) REQUIRE(v == 0.0);
}

TEST_CASE("solve meets the residual tolerance") {
    const auto& s = testing::disk_solver(64);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ScalarField f(s.grid_ptr());
    for (auto& v : f.values()) v = unit(rng);
    const ScalarField r = s.apply(s.solve(f)) - f;
    double rmax = 0.0, fmax = 0.0;
    for (const double v : r.values()) rmax = std::max(rmax, std::abs(v));
    for (const double v : f.values()) fmax = std::max(fmax, std::abs(v));
    CHECK(rmax <= 1e-10 * fmax);
}

TEST_CASE("uniform patch in the disk") {
    const auto& s = testing::disk_solver(256);
    const double eps = 0.2;
    const ScalarField psi = s.solve(testing::centered_patch(s.grid_ptr(), eps));
    double err = 0.0, peak = 0.0;
    for (CellId c = 0; c < static_cast<CellId>(psi.size()); ++c) {
        const double exact = testing::patch_stream(norm(s.grid().center(c)), eps);
        err = std::max(err, std::abs(psi[c] - exact));
        peak = std::max(peak, std::abs(exact));
    }
    CHECK(err / peak <= 0.02);
}

TEST_CASE("sine eigenfunction converges at second order") {
    auto max_error = [](int n) {
        const PoissonSolver s(Grid::build(DomainSpec::rectangle(1.0, 1.0), n));
        ScalarField f(s.grid_ptr());
        for (CellId c = 0; c < static_cast<CellId>(f.size()); ++c) {
            const Point x = s.grid().center(c);
            f[c] = std::sin(kPi * x.x) * std::sin(kPi * x.y);
        }
        const ScalarField psi = s.solve(f);
        double e = 0.0;
        for (CellId c = 0; c < static_cast<CellId>(f.size()); ++c) e = std::max(e, std::abs(psi[c] - f[c] / (2 * kPi * kPi)));
        return e;
    };
    const double e32 = max_error(32);
    const double e64 = max_error(64);
    CHECK(e32 < 1e-3);
    CHECK(e32 / e64 > 3.5);
}

TEST_CASE("Green function against the image formula") {
    const auto& s = testing::disk_solver(128);
    const Grid& g = s.grid();
    for (const Point y : {Point{0.3, 0.1}, Point{-0.5, 0.4}, Point{0.1, -0.8}}) {
        const CellId cy = g.require_cell(y);
        const ScalarField col = green_function(s, cy);
        double worst = 0.0;
        for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
            REQUIRE(col[c] > 0.0);
            if (distance(g.center(c), g.center(cy)) < 4.0 * g.h()) continue;
            const double exact = testing::disk_green(g.center(c), g.center(cy));
            worst = std::max(worst, std::abs(col[c] - exact) / exact);
        }
        CHECK(worst <= 0.05);
    }
}

TEST_CASE("Green function symmetry and regular part") {
    const auto& s = testing::disk_solver(128);
    const Grid& g = s.grid();
    const CellId a = g.require_cell({0.35, -0.2});
    const CellId b = g.require_cell({-0.4, 0.45});
    const ScalarField ga = green_function(s, a);
    const ScalarField gb = green_function(s, b);
    CHECK(std::abs(ga[b] - gb[a]) <= 1e-8);

    const auto image_regular = [](Point x, Point y) {
        const double r2 = y.x * y.x + y.y * y.y;
        return -std::log(distance(x, {y.x / r2, y.y / r2}) * std::sqrt(r2)) / (2 * kPi);
    };
    const double hab = regular_part(s, a, b);
    const double exact = image_regular(g.center(a), g.center(b));
    CHECK(std::abs(hab - exact) <= 0.05 * std::abs(exact));
    CHECK(std::isfinite(hab));
    CHECK(regular_part(gb, a, b) == doctest::Approx(regular_part(ga, b, a)).epsilon(1e-8));
}

TEST_CASE("Robin function of the disk") {
    const auto& s = testing::disk_solver(256);
    const Grid& g = s.grid();
    double worst = 0.0;
    for (const double r : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        for (const double angle : {0.3, 2.0, 4.4}) {
            const CellId c = g.require_cell({r * std::cos(angle), r * std::sin(angle)});
            worst = std::max(worst, std::abs(robin(s, c) - testing::disk_robin(g.center(c))));
        }
    }
    CHECK(worst <= 0.01);
    CHECK(std::abs(robin(s, g.require_cell({0.0, 0.0}))) <= 0.01);
}

TEST_CASE("Robin ordering and minimum") {
    const auto& s = testing::disk_solver(64);
    const Grid& g = s.grid();
    const double h0 = robin(s, g.require_cell({1e-3, 1e-3}));
    const double h5 = robin(s, g.require_cell({0.5, 0.0}));
    const double h9 = robin(s, g.require_cell({0.9, 0.0}));
    CHECK(h9 > h5);
    CHECK(h5 > h0);

    CellId best = kNoCell;
    double best_value = 1e300;
    for (CellId c = 0; c < static_cast<CellId>(g.size()); ++c) {
        if (norm(g.center(c)) > 0.3) continue;
        const double v = robin(s, c);
        if (v < best_value) {
            best_value = v;
            best = c;
        }
    }
    CHECK(norm(g.center(best)) <= std::sqrt(2.0) * g.h());
}

TEST_CASE("velocity") {
    const auto sq = Grid::build(DomainSpec::rectangle(1.0, 1.0), 32);
    ScalarField lin(sq);
    for (CellId c = 0; c < static_cast<CellId>(lin.size()); ++c) lin[c] = sq->center(c).x;
    const VectorField v = velocity(lin);
    for (CellId c = 0; c < static_cast<CellId>(lin.size()); ++c) {
        if (sq->is_boundary(c)) continue;
        REQUIRE(std::abs(v[c].x) < 1e-12);
        REQUIRE(v[c].y == doctest::Approx(-1.0).epsilon(1e-12));
    }

    // constant stream function away from the boundary
    const auto disk = Grid::build(DomainSpec::unit_disk(), 64);
    ScalarField flat(disk, 2.0);
    const VectorField vf = velocity(flat);
    for (CellId c = 0; c < static_cast<CellId>(flat.size()); ++c) {
        if (!disk->is_boundary(c)) REQUIRE(vf[c].x == 0.0);
        if (!disk->is_boundary(c)) REQUIRE(vf[c].y == 0.0);
    }

    ScalarField radial(disk);
    for (CellId c = 0; c < static_cast<CellId>(radial.size()); ++c) {
        const Point x = disk->center(c);
        radial[c] = 1.0 - (x.x * x.x + x.y * x.y);
    }
    const VectorField vr = velocity(radial);
    for (CellId c = 0; c < static_cast<CellId>(radial.size()); ++c) {
        const Point x = disk->center(c);
        if (disk->is_boundary(c) || norm(x) > 0.9) continue;
        REQUIRE(std::abs(vr[c].x * x.x + vr[c].y * x.y) / norm(x) <= 1e-8);
    }
}

TEST_CASE("free lattice kernel") {
    CHECK(lattice_potential(0, 0) == 0.0);
    CHECK(lattice_potential(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lattice_potential(1, 1) == doctest::Approx(4.0 / kPi).epsilon(1e-12));
    // (4 a(0) - sum of neighbours) = -4, and a is harmonic elsewhere
    for (const auto& [mx, my] : {std::pair{0, 0}, std::pair{3, 1}, std::pair{7, 5}}) {
        const double lap = 4 * lattice_potential(mx, my) - lattice_potential(mx + 1, my) - lattice_potential(mx - 1, my) -
                           lattice_potential(mx, my + 1) - lattice_potential(mx, my - 1);
        CHECK(lap == doctest::Approx(mx == 0 && my == 0 ? -4.0 : 0.0).epsilon(1e-9));
    }
    const double h = 1.0 / 64;
    CHECK(free_lattice_green(40, 30, h) == doctest::Approx(-std::log(50 * h) / (2 * kPi)).epsilon(1e-4));
}

}
