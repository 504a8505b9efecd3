#include "vortexlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vortexlab {
namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (a.grid_ptr() != b.grid_ptr()) throw FieldError("fields live on different grids");
}

double cross3(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_ ? grid_->size() : 0, fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_ || values_.size() != grid_->size()) {
        throw FieldError("value count does not match grid cell count");
    }
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

VectorField::VectorField(GridPtr grid)
    : grid_(std::move(grid)), u1_(grid_->size(), 0.0), u2_(grid_->size(), 0.0) {}

double VectorField::max_magnitude() const {
    double m = 0.0;
    for (std::size_t i = 0; i < u1_.size(); ++i) m = std::max(m, std::hypot(u1_[i], u2_[i]));
    return m;
}

std::vector<std::size_t> PlaneGrid::radial_order() const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> r2(size());
    for (std::size_t k = 0; k < size(); ++k) {
        const Point c = center(k);
        r2[k] = c.x * c.x + c.y * c.y;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r2[a] < r2[b]; });
    return order;
}

ScalarField positive_part(const ScalarField& f) {
    ScalarField out(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.values()[i] = std::max(f.values()[i], 0.0);
    }
    return out;
}

ScalarField negative_part(const ScalarField& f) {
    ScalarField out(f.grid_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.values()[i] = std::max(-f.values()[i], 0.0);
    }
    return out;
}

double lp_norm(std::span<const double> values, double cell_area, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw FieldError("lp_norm requires 1 <= p < infinity");
    double s = 0.0;
    if (p == 1.0) {
        for (const double v : values) s += std::abs(v);
        return s * cell_area;
    }
    if (p == 2.0) {
        for (const double v : values) s += v * v;
        return std::sqrt(s * cell_area);
    }
    for (const double v : values) s += std::pow(std::abs(v), p);
    return std::pow(s * cell_area, 1.0 / p);
}

double lp_norm(const ScalarField& f, double p) { return lp_norm(f.values(), f.grid().cell_area(), p); }

double lp_norm(const PlaneField& f, double p) { return lp_norm(f.values, f.plane.cell_area(), p); }

double integral(const ScalarField& f) {
    double s = 0.0;
    for (const double v : f.values()) s += v;
    return s * f.grid().cell_area();
}

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f, g);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.values()[i] * g.values()[i];
    return s * f.grid().cell_area();
}

Point center_of_mass(const ScalarField& f) {
    const Grid& g = f.grid();
    double m = 0.0;
    Point first;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f.values()[i];
        if (v < 0.0) throw FieldError("center_of_mass expects a nonnegative field");
        m += v;
        const Point c = g.center(static_cast<CellId>(i));
        first.x += v * c.x;
        first.y += v * c.y;
    }
    if (!(m > 0.0)) throw FieldError("empty vorticity");
    return {first.x / m, first.y / m};
}

std::vector<CellId> support(const ScalarField& f, double threshold) {
    std::vector<CellId> cells;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(f.values()[i]) > threshold) cells.push_back(static_cast<CellId>(i));
    }
    return cells;
}

double support_diameter(const ScalarField& f, double threshold) {
    const auto cells = support(f, threshold);
    if (cells.size() < 2) return 0.0;
    // The diameter of a point set is attained on its convex hull.
    std::vector<Point> pts;
    pts.reserve(cells.size());
    for (const CellId c : cells) pts.push_back(f.grid().center(c));
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross3(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    if (hull.size() < 2) hull = {pts.front(), pts.back()};
    double d2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const double dx = hull[i].x - hull[j].x;
            const double dy = hull[i].y - hull[j].y;
            d2 = std::max(d2, dx * dx + dy * dy);
        }
    }
    return std::sqrt(d2);
}

PlaneField symmetric_decreasing_rearrangement(std::span<const double> values, const PlaneGrid& plane) {
    std::vector<double> positive;
    positive.reserve(values.size());
    for (const double v : values) {
        if (v < 0.0) throw FieldError("rearrangement expects nonnegative values");
        if (v > 0.0) positive.push_back(v);
    }
    if (positive.size() > plane.size()) throw FieldError("plane grid too small for the support");
    std::sort(positive.begin(), positive.end(), std::greater<>());
    PlaneField out{plane, std::vector<double>(plane.size(), 0.0)};
    const auto order = plane.radial_order();
    for (std::size_t k = 0; k < positive.size(); ++k) out.values[order[k]] = positive[k];
    return out;
}

PlaneField symmetric_decreasing_rearrangement(const ScalarField& f, const PlaneGrid& plane) {
    return symmetric_decreasing_rearrangement(f.values(), plane);
}

PlaneField symmetric_decreasing_rearrangement(const PlaneField& f) {
    return symmetric_decreasing_rearrangement(f.values, f.plane);
}

PlaneGrid aligned_plane(const Grid& grid, Point center, double scale, double radius) {
    if (!(scale > 0.0)) throw FieldError("rescale factor must be positive");
    const Point q = grid.lattice_coords(center);
    const Point anchor = grid.lattice_center(static_cast<int>(std::lround(q.x)),
                                             static_cast<int>(std::lround(q.y)));
    PlaneGrid plane;
    plane.spacing = grid.h() / scale;
    plane.offset = (anchor - center) * (1.0 / scale);
    plane.half = static_cast<int>(std::ceil(radius / plane.spacing)) + 1;
    return plane;
}

PlaneField rescale_profile(const ScalarField& f, double scale, Point center, const PlaneGrid& plane) {
    if (!(scale > 0.0)) throw FieldError("rescale factor must be positive");
    PlaneField out{plane, std::vector<double>(plane.size(), 0.0)};
    const double s2 = scale * scale;
    for (std::size_t k = 0; k < plane.size(); ++k) {
        const Point x = center + plane.center(k) * scale;
        if (const auto c = f.grid().nearest_cell(x)) out.values[k] = s2 * f[*c];
    }
    return out;
}

PlaneField rescale_profile(const ScalarField& f, double scale, Point center, double radius) {
    return rescale_profile(f, scale, center, aligned_plane(f.grid(), center, scale, radius));
}

PlaneField scale_plane_field(const PlaneField& f, double value_scale, double length_scale) {
    PlaneField out = f;
    out.plane.spacing *= length_scale;
    out.plane.offset *= length_scale;
    for (auto& v : out.values) v *= value_scale;
    return out;
}

}  // namespace vortexlab
