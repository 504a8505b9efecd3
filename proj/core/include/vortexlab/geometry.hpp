#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexlab {

struct Point {
    double x = 0.0;
    double y = 0.0;

    Point& operator+=(const Point& o) { x += o.x; y += o.y; return *this; }
    Point& operator-=(const Point& o) { x -= o.x; y -= o.y; return *this; }
    Point& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(Point a, double s) { return a *= s; }
    friend Point operator*(double s, Point a) { return a *= s; }
    friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(const Point& p) { return std::hypot(p.x, p.y); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

/// Thrown for invalid domains, grids and out-of-range cell queries.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DomainKind { unit_disk, rectangle, polygon };

/// Bounded, simply connected planar region. Rectangles occupy [0,w]x[0,h];
/// the unit disk is centred at the origin.
class DomainSpec {
public:
    static DomainSpec unit_disk();
    static DomainSpec rectangle(double width, double height);
    /// Vertices of a simple closed polygon (either orientation). Throws on
    /// self-intersection or vanishing area.
    static DomainSpec polygon(std::vector<Point> vertices);

    DomainKind kind() const { return kind_; }
    double width() const { return width_; }
    double height() const { return height_; }
    const std::vector<Point>& vertices() const { return vertices_; }

    /// Strict interior membership.
    bool contains(const Point& p) const;
    double distance_to_boundary(const Point& p) const;
    /// Lower-left and upper-right corners of the bounding box.
    std::pair<Point, Point> bounds() const;
    /// Exact area of the continuum region.
    double area() const;
    std::string describe() const;

private:
    DomainKind kind_ = DomainKind::unit_disk;
    double width_ = 0.0;
    double height_ = 0.0;
    std::vector<Point> vertices_;
};

using CellId = std::int32_t;
inline constexpr CellId kNoCell = -1;

enum class Direction : int { east = 0, west = 1, north = 2, south = 3 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::east, Direction::west,
                                                        Direction::north, Direction::south};

/// Masked uniform Cartesian grid. A lattice cell belongs to the grid when its
/// centre lies strictly inside the domain. Interior cells are numbered
/// row-major by (iy, ix); that order is the tie-break order used everywhere.
class Grid {
public:
    static std::shared_ptr<const Grid> build(const DomainSpec& spec, int n);

    const DomainSpec& domain() const { return spec_; }
    int n() const { return n_; }
    double h() const { return h_; }
    double cell_area() const { return h_ * h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    /// Centre of lattice cell (0,0) is origin() + (h/2, h/2).
    Point origin() const { return origin_; }
    std::size_t size() const { return centers_.size(); }

    Point center(CellId c) const { return centers_[static_cast<std::size_t>(c)]; }
    int ix(CellId c) const { return ix_[static_cast<std::size_t>(c)]; }
    int iy(CellId c) const { return iy_[static_cast<std::size_t>(c)]; }
    Point lattice_center(int ix, int iy) const {
        return {origin_.x + (ix + 0.5) * h_, origin_.y + (iy + 0.5) * h_};
    }
    /// Cell at lattice index, or kNoCell when outside the box or the domain.
    CellId at(int ix, int iy) const;
    CellId neighbor(CellId c, Direction d) const;
    bool is_boundary(CellId c) const { return boundary_[static_cast<std::size_t>(c)] != 0; }
    /// Fraction of h from the cell centre to the domain boundary along d; 1
    /// when the neighbour is interior.
    double boundary_fraction(CellId c, Direction d) const {
        return theta_[4 * static_cast<std::size_t>(c) + static_cast<std::size_t>(d)];
    }
    /// Continuous lattice coordinates: cell (ix,iy) has centre (ix, iy).
    Point lattice_coords(const Point& p) const {
        return {(p.x - origin_.x) / h_ - 0.5, (p.y - origin_.y) / h_ - 0.5};
    }
    std::optional<CellId> nearest_cell(const Point& p) const;
    CellId require_cell(const Point& p) const;

private:
    Grid() = default;

    DomainSpec spec_;
    int n_ = 0;
    double h_ = 0.0;
    int nx_ = 0;
    int ny_ = 0;
    Point origin_;
    std::vector<Point> centers_;
    std::vector<int> ix_;
    std::vector<int> iy_;
    std::vector<CellId> lookup_;
    std::vector<std::uint8_t> boundary_;
    std::vector<double> theta_;
};

using GridPtr = std::shared_ptr<const Grid>;

double measure(const Grid& grid, std::span<const CellId> cells);

}  // namespace vortexlab
