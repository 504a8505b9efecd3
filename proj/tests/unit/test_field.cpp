#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vortexlab/field.hpp"

using namespace vortexlab;

TEST_SUITE("field") {

TEST_CASE("positive and negative parts") {
    const auto g = Grid::build(DomainSpec::rectangle(2.0, 1.0), 1);
    REQUIRE(g->size() == 2);
    ScalarField f(g, std::vector<double>{3.0, -1.0});
    CHECK(positive_part(f).values()[0] == 3.0);
    CHECK(positive_part(f).values()[1] == 0.0);
    CHECK(negative_part(f).values()[0] == 0.0);
    CHECK(negative_part(f).values()[1] == 1.0);

    const ScalarField m(g, -2.0);
    const ScalarField mp = positive_part(m);
    const ScalarField mn = negative_part(m);
    for (const double v : mp.values()) CHECK(v == 0.0);
    for (const double v : mn.values()) CHECK(v == 2.0);
    const ScalarField z(g, 0.0);
    CHECK(positive_part(z) == z);
    CHECK(negative_part(z) == z);
}

TEST_CASE("lp norms") {
    const auto sq = Grid::build(DomainSpec::rectangle(1.0, 1.0), 16);
    for (const double p : {1.0, 1.5, 2.0, 7.0}) CHECK(lp_norm(ScalarField(sq, 1.0), p) == doctest::Approx(1.0).epsilon(1e-13));
    const auto rect = Grid::build(DomainSpec::rectangle(2.0, 1.0), 8);
    CHECK(lp_norm(ScalarField(rect, 3.0), 2.0) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(lp_norm(ScalarField(sq, 1.0), 0.5), FieldError);

    const auto disk = Grid::build(DomainSpec::unit_disk(), 32);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    ScalarField f(disk);
    for (auto& v : f.values()) v = normal(rng);
    long double sum = 0.0L;
    for (const double v : f.values()) sum += static_cast<long double>(v) * v;
    const double naive = std::sqrt(static_cast<double>(sum) * disk->cell_area());
    CHECK(std::abs(lp_norm(f, 2.0) - naive) <= 1e-12 * naive);
}

TEST_CASE("center of mass") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 64);
    const Point c0 = center_of_mass(testing::centered_patch(g, 0.3));
    CHECK(std::abs(c0.x) < 1e-12);
    CHECK(std::abs(c0.y) < 1e-12);

    ScalarField one(g, 0.0);
    const CellId cell = g->require_cell({0.31, -0.2});
    one[cell] = 1.0;
    CHECK(center_of_mass(one) == g->center(cell));

    CHECK_THROWS_WITH_AS(center_of_mass(ScalarField(g, 0.0)), "empty vorticity", FieldError);
}

TEST_CASE("center of mass follows a lattice translation") {
    const auto g = Grid::build(DomainSpec::rectangle(1.0, 1.0), 32);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ScalarField f(g, 0.0);
    ScalarField shifted(g, 0.0);
    const int sx = 5, sy = 3;
    for (int iy = 4; iy < 12; ++iy) {
        for (int ix = 4; ix < 12; ++ix) {
            const double v = unit(rng);
            f[g->at(ix, iy)] = v;
            shifted[g->at(ix + sx, iy + sy)] = v;
        }
    }
    // oracle: weighted sum over the shifted index set
    double mx = 0.0, my = 0.0, m = 0.0;
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) {
        mx += shifted[c] * g->center(c).x;
        my += shifted[c] * g->center(c).y;
        m += shifted[c];
    }
    const Point a = center_of_mass(f) + Point{sx * g->h(), sy * g->h()};
    const Point b = center_of_mass(shifted);
    CHECK(b.x == doctest::Approx(mx / m).epsilon(1e-13));
    CHECK(b.y == doctest::Approx(my / m).epsilon(1e-13));
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
}

TEST_CASE("support diameter") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 64);
    CHECK(support_diameter(ScalarField(g, 0.0)) == 0.0);
    ScalarField two(g, 0.0);
    const CellId a = g->require_cell({-0.5, 0.1});
    const CellId b = g->require_cell({0.3, -0.4});
    two[a] = 1.0;
    two[b] = -2.0;
    CHECK(support_diameter(two) == doctest::Approx(distance(g->center(a), g->center(b))));
    two[b] = 0.0;
    CHECK(support_diameter(two) == 0.0);
    const double r = 0.25;
    CHECK(std::abs(support_diameter(testing::centered_patch(g, r)) - 2.0 * r) <= 2.0 * g->h());
}

TEST_CASE("symmetric decreasing rearrangement") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 64);
    const PlaneGrid plane = PlaneGrid::centered(g->h(), 40);

    ScalarField patch(g, 0.0);
    int count = 0;
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) {
        if (distance(g->center(c), {0.4, 0.2}) < 0.15) {
            patch[c] = 2.5;
            ++count;
        }
    }
    const PlaneField r = symmetric_decreasing_rearrangement(patch, plane);
    const auto order = plane.radial_order();
    for (std::size_t k = 0; k < order.size(); ++k) {
        REQUIRE(r.values[order[k]] == (static_cast<int>(k) < count ? 2.5 : 0.0));
    }

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ScalarField f(g, 0.0);
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) {
        if (norm(g->center(c)) < 0.3 && unit(rng) < 0.7) f[c] = unit(rng);
    }
    const PlaneField rf = symmetric_decreasing_rearrangement(f, plane);
    std::vector<double> in(f.values().begin(), f.values().end());
    std::vector<double> out = rf.values;
    std::erase(in, 0.0);
    std::erase(out, 0.0);
    std::sort(in.begin(), in.end());
    std::sort(out.begin(), out.end());
    CHECK(in == out);
    // values never increase outward
    for (std::size_t k = 1; k < order.size(); ++k) REQUIRE(rf.values[order[k]] <= rf.values[order[k - 1]]);
    // idempotent on radial decreasing data
    const PlaneField again = symmetric_decreasing_rearrangement(rf);
    CHECK(again.values == rf.values);
}

TEST_CASE("rescaled patch profile") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 128);
    const double eps = 0.15;
    const Point center{0.2, -0.1};
    ScalarField f(g, 0.0);
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) {
        if (distance(g->center(c), center) < eps) f[c] = 1.0 / (testing::kPi * eps * eps);
    }
    const PlaneField xi = rescale_profile(f, eps, center, 2.0);
    const double ring = 1.5 * g->h() / eps;
    for (std::size_t k = 0; k < xi.plane.size(); ++k) {
        const double r = norm(xi.plane.center(k));
        if (r < 1.0 - ring) REQUIRE(xi.values[k] == doctest::Approx(1.0 / testing::kPi));
        if (r > 1.0 + ring) REQUIRE(xi.values[k] == 0.0);
    }
    double mass = 0.0;
    for (const double v : xi.values) mass += v * xi.plane.cell_area();
    CHECK(std::abs(mass - integral(f)) / integral(f) < 0.02);
}

TEST_CASE("rescale with unit scale reproduces the field") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 32);
    ScalarField f(g, 0.0);
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) f[c] = 1.0 + g->center(c).x * g->center(c).x;
    const PlaneField xi = rescale_profile(f, 1.0, {0.0, 0.0}, 1.0);
    std::size_t matched = 0;
    for (std::size_t k = 0; k < xi.plane.size(); ++k) {
        const Point x = xi.plane.center(k);
        if (const auto c = g->nearest_cell(x); c && distance(g->center(*c), x) < 1e-12) {
            REQUIRE(xi.values[k] == f[*c]);
            ++matched;
        }
    }
    CHECK(matched == g->size());
}

}
