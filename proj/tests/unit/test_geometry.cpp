#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "vortexlab/geometry.hpp"

using namespace vortexlab;

TEST_SUITE("geometry") {

TEST_CASE("unit square at n=4 is a full 4x4 mask") {
    const auto g = Grid::build(DomainSpec::rectangle(1.0, 1.0), 4);
    CHECK(g->size() == 16);
    CHECK(g->size() * g->cell_area() == doctest::Approx(1.0).epsilon(1e-14));
    for (CellId c = 0; c < 16; ++c) CHECK(g->domain().contains(g->center(c)));
}

TEST_CASE("disk area converges to pi") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 64);
    const double area = g->size() * g->cell_area();
    CHECK(std::abs(area - testing::kPi) / testing::kPi < 0.05);
}

TEST_CASE("measure") {
    const auto sq = Grid::build(DomainSpec::rectangle(1.0, 1.0), 10);
    CHECK(measure(*sq, {}) == 0.0);
    std::vector<CellId> all(sq->size());
    std::iota(all.begin(), all.end(), 0);
    CHECK(measure(*sq, all) == doctest::Approx(1.0).epsilon(1e-12));

    const auto g = Grid::build(DomainSpec::unit_disk(), 128);
    std::vector<CellId> inner;
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) {
        if (norm(g->center(c)) < 0.5) inner.push_back(c);
    }
    const double expected = testing::kPi * 0.25;
    CHECK(std::abs(measure(*g, inner) - expected) / expected < 0.03);
}

TEST_CASE("invalid domains are rejected") {
    CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), GeometryError);
    CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS(DomainSpec::rectangle(-1.0, 1.0), GeometryError);
    CHECK_THROWS_AS(Grid::build(DomainSpec::unit_disk(), 0), GeometryError);
}

TEST_CASE("polygon membership and cell ordering") {
    const auto tri = DomainSpec::polygon({{0, 0}, {1, 0}, {0, 1}});
    CHECK(tri.contains({0.2, 0.2}));
    CHECK_FALSE(tri.contains({0.6, 0.6}));
    CHECK(tri.area() == doctest::Approx(0.5));
    const auto g = Grid::build(tri, 32);
    for (CellId c = 1; c < static_cast<CellId>(g->size()); ++c) {
        const bool ordered = g->iy(c - 1) < g->iy(c) || (g->iy(c - 1) == g->iy(c) && g->ix(c - 1) < g->ix(c));
        REQUIRE(ordered);
    }
    CHECK(std::abs(g->size() * g->cell_area() - 0.5) < 0.05);
}

TEST_CASE("boundary fractions of the disk") {
    const auto g = Grid::build(DomainSpec::unit_disk(), 32);
    for (CellId c = 0; c < static_cast<CellId>(g->size()); ++c) {
        for (const Direction d : kDirections) {
            const double theta = g->boundary_fraction(c, d);
            REQUIRE(theta > 0.0);
            REQUIRE(theta <= 1.0);
            if (g->neighbor(c, d) != kNoCell) REQUIRE(theta == 1.0);
        }
    }
    // the east crossing from the cell nearest (1,0) lands on the circle
    const CellId c = g->require_cell({1.0 - 0.6 * g->h(), 0.5 * g->h()});
    const double theta = g->boundary_fraction(c, Direction::east);
    const Point hit = g->center(c) + Point{theta * g->h(), 0.0};
    CHECK(norm(hit) == doctest::Approx(1.0).epsilon(1e-9));
}

}
