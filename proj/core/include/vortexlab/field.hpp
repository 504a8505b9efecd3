#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "vortexlab/geometry.hpp"

namespace vortexlab {

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One real value per interior cell of a grid.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double fill = 0.0);
    ScalarField(GridPtr grid, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](CellId c) const { return values_[static_cast<std::size_t>(c)]; }
    double& operator[](CellId c) { return values_[static_cast<std::size_t>(c)]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
    friend bool operator==(const ScalarField& a, const ScalarField& b) {
        return a.grid_ == b.grid_ && a.values_ == b.values_;
    }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Two components (u1, u2) per interior cell.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(GridPtr grid);

    const Grid& grid() const { return *grid_; }
    std::size_t size() const { return u1_.size(); }
    Point operator[](CellId c) const {
        return {u1_[static_cast<std::size_t>(c)], u2_[static_cast<std::size_t>(c)]};
    }
    void set(CellId c, Point v) {
        u1_[static_cast<std::size_t>(c)] = v.x;
        u2_[static_cast<std::size_t>(c)] = v.y;
    }
    std::span<const double> u1() const { return u1_; }
    std::span<const double> u2() const { return u2_; }
    double max_magnitude() const;

private:
    GridPtr grid_;
    std::vector<double> u1_;
    std::vector<double> u2_;
};

/// Square lattice in the whole plane used for radial profiles. Cell (i,j),
/// i,j in [-half, half], has centre offset + (i,j)*spacing.
struct PlaneGrid {
    double spacing = 1.0;
    Point offset;
    int half = 0;

    int width() const { return 2 * half + 1; }
    std::size_t size() const { return static_cast<std::size_t>(width()) * width(); }
    double cell_area() const { return spacing * spacing; }
    Point center(std::size_t k) const {
        const int i = static_cast<int>(k % static_cast<std::size_t>(width())) - half;
        const int j = static_cast<int>(k / static_cast<std::size_t>(width())) - half;
        return {offset.x + i * spacing, offset.y + j * spacing};
    }
    /// Cell indices ordered by distance of the centre from the origin, ties
    /// broken by row-major index.
    std::vector<std::size_t> radial_order() const;

    /// Plane grid centred on the origin with a cell centre at the origin.
    static PlaneGrid centered(double spacing, int half) { return {spacing, {0.0, 0.0}, half}; }
};

struct PlaneField {
    PlaneGrid plane;
    std::vector<double> values;
};

ScalarField positive_part(const ScalarField& f);
/// Returns f^- >= 0 with f = f^+ - f^-.
ScalarField negative_part(const ScalarField& f);

double lp_norm(std::span<const double> values, double cell_area, double p);
double lp_norm(const ScalarField& f, double p);
double lp_norm(const PlaneField& f, double p);
double integral(const ScalarField& f);
/// Sum f*g*h^2.
double inner(const ScalarField& f, const ScalarField& g);

/// Vorticity-weighted centroid of a nonnegative field; throws "empty vorticity"
/// when the integral vanishes.
Point center_of_mass(const ScalarField& f);

/// Largest distance between two cell centres with |f| > threshold.
double support_diameter(const ScalarField& f, double threshold = 0.0);
std::vector<CellId> support(const ScalarField& f, double threshold = 0.0);

/// Exact discrete bathtub rearrangement: values sorted descending are placed
/// on plane cells sorted by distance from the origin.
PlaneField symmetric_decreasing_rearrangement(std::span<const double> values, const PlaneGrid& plane);
PlaneField symmetric_decreasing_rearrangement(const ScalarField& f, const PlaneGrid& plane);
PlaneField symmetric_decreasing_rearrangement(const PlaneField& f);

/// Plane grid in rescaled coordinates x' = (x - center)/scale whose cell
/// centres coincide with the domain cell centres, covering B_radius(0).
PlaneGrid aligned_plane(const Grid& grid, Point center, double scale, double radius);

/// xi(x) = scale^2 f(scale*x + center) by nearest-cell lookup on `plane`
/// (given in rescaled coordinates); zero where the lookup leaves the domain.
PlaneField rescale_profile(const ScalarField& f, double scale, Point center, const PlaneGrid& plane);
/// Same with the plane from aligned_plane(f.grid(), center, scale, radius).
PlaneField rescale_profile(const ScalarField& f, double scale, Point center, double radius = 2.0);

/// Multiplies values by `value_scale` and the lattice spacing/offset by
/// `length_scale`.
PlaneField scale_plane_field(const PlaneField& f, double value_scale, double length_scale);

}  // namespace vortexlab
