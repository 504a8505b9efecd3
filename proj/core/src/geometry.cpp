#include "vortexlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vortexlab {
namespace {

double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }

double segment_distance(const Point& p, const Point& a, const Point& b) {
    const Point ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = len2 > 0.0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

int orientation(const Point& a, const Point& b, const Point& c) {
    const double v = cross(b - a, c - a);
    if (std::abs(v) < 1e-14) return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x, b.x) - 1e-14 <= p.x && p.x <= std::max(a.x, b.x) + 1e-14 &&
           std::min(a.y, b.y) - 1e-14 <= p.y && p.y <= std::max(a.y, b.y) + 1e-14;
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

double signed_area(const std::vector<Point>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * a;
}

}  // namespace

DomainSpec DomainSpec::unit_disk() {
    DomainSpec d;
    d.kind_ = DomainKind::unit_disk;
    d.width_ = d.height_ = 2.0;
    return d;
}

DomainSpec DomainSpec::rectangle(double width, double height) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
        throw GeometryError("rectangle needs positive finite width and height");
    }
    DomainSpec d;
    d.kind_ = DomainKind::rectangle;
    d.width_ = width;
    d.height_ = height;
    return d;
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
    if (vertices.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
    const std::size_t m = vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == m - 1);
            const Point& a1 = vertices[i];
            const Point& a2 = vertices[(i + 1) % m];
            const Point& b1 = vertices[j];
            const Point& b2 = vertices[(j + 1) % m];
            if (adjacent) {
                // Adjacent edges share one vertex; they must not fold back onto each other.
                const Point& shared = (j == i + 1) ? a2 : a1;
                const Point& pa = (j == i + 1) ? a1 : a2;
                const Point& pb = (j == i + 1) ? b2 : b1;
                if (orientation(pa, shared, pb) == 0 &&
                    ((pa.x - shared.x) * (pb.x - shared.x) + (pa.y - shared.y) * (pb.y - shared.y)) > 0) {
                    throw GeometryError("polygon is not simple: overlapping edges");
                }
                continue;
            }
            if (segments_intersect(a1, a2, b1, b2)) {
                throw GeometryError("polygon is not simple: edges " + std::to_string(i) + " and " +
                                    std::to_string(j) + " intersect");
            }
        }
    }
    if (std::abs(signed_area(vertices)) < 1e-12) throw GeometryError("empty domain");
    DomainSpec d;
    d.kind_ = DomainKind::polygon;
    d.vertices_ = std::move(vertices);
    const auto [lo, hi] = d.bounds();
    d.width_ = hi.x - lo.x;
    d.height_ = hi.y - lo.y;
    return d;
}

bool DomainSpec::contains(const Point& p) const {
    switch (kind_) {
        case DomainKind::unit_disk:
            return p.x * p.x + p.y * p.y < 1.0;
        case DomainKind::rectangle:
            return p.x > 0.0 && p.x < width_ && p.y > 0.0 && p.y < height_;
        case DomainKind::polygon: {
            bool inside = false;
            const std::size_t m = vertices_.size();
            for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
                const Point& a = vertices_[i];
                const Point& b = vertices_[j];
                if (segment_distance(p, a, b) < 1e-13) return false;
                if ((a.y > p.y) != (b.y > p.y) &&
                    p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
                    inside = !inside;
                }
            }
            return inside;
        }
    }
    return false;
}

double DomainSpec::distance_to_boundary(const Point& p) const {
    switch (kind_) {
        case DomainKind::unit_disk:
            return std::abs(1.0 - norm(p));
        case DomainKind::rectangle: {
            if (contains(p)) return std::min({p.x, width_ - p.x, p.y, height_ - p.y});
            const double dx = std::max({0.0, -p.x, p.x - width_});
            const double dy = std::max({0.0, -p.y, p.y - height_});
            if (dx == 0.0 && dy == 0.0) {
                return std::min({std::abs(p.x), std::abs(width_ - p.x), std::abs(p.y),
                                 std::abs(height_ - p.y)});
            }
            return std::hypot(dx, dy);
        }
        case DomainKind::polygon: {
            double d = std::numeric_limits<double>::infinity();
            const std::size_t m = vertices_.size();
            for (std::size_t i = 0; i < m; ++i) {
                d = std::min(d, segment_distance(p, vertices_[i], vertices_[(i + 1) % m]));
            }
            return d;
        }
    }
    return 0.0;
}

std::pair<Point, Point> DomainSpec::bounds() const {
    switch (kind_) {
        case DomainKind::unit_disk:
            return {{-1.0, -1.0}, {1.0, 1.0}};
        case DomainKind::rectangle:
            return {{0.0, 0.0}, {width_, height_}};
        case DomainKind::polygon: {
            Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
            Point hi{-lo.x, -lo.y};
            for (const auto& v : vertices_) {
                lo.x = std::min(lo.x, v.x);
                lo.y = std::min(lo.y, v.y);
                hi.x = std::max(hi.x, v.x);
                hi.y = std::max(hi.y, v.y);
            }
            return {lo, hi};
        }
    }
    return {};
}

double DomainSpec::area() const {
    switch (kind_) {
        case DomainKind::unit_disk:
            return std::numbers::pi;
        case DomainKind::rectangle:
            return width_ * height_;
        case DomainKind::polygon:
            return std::abs(signed_area(vertices_));
    }
    return 0.0;
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case DomainKind::unit_disk:
            os << "unit_disk";
            break;
        case DomainKind::rectangle:
            os << "rectangle(" << width_ << "," << height_ << ")";
            break;
        case DomainKind::polygon:
            os << "polygon(";
            for (std::size_t i = 0; i < vertices_.size(); ++i) {
                os << (i ? ";" : "") << vertices_[i].x << "," << vertices_[i].y;
            }
            os << ")";
            break;
    }
    return os.str();
}

std::shared_ptr<const Grid> Grid::build(const DomainSpec& spec, int n) {
    if (n < 1) throw GeometryError("grid resolution n must be positive");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->spec_ = spec;
    g->n_ = n;
    g->h_ = 1.0 / n;
    const auto [lo, hi] = spec.bounds();
    const double eps = 1e-9;
    const long ix0 = static_cast<long>(std::floor(lo.x * n + eps));
    const long iy0 = static_cast<long>(std::floor(lo.y * n + eps));
    const long ix1 = static_cast<long>(std::ceil(hi.x * n - eps));
    const long iy1 = static_cast<long>(std::ceil(hi.y * n - eps));
    g->origin_ = {static_cast<double>(ix0) / n, static_cast<double>(iy0) / n};
    g->nx_ = static_cast<int>(ix1 - ix0);
    g->ny_ = static_cast<int>(iy1 - iy0);
    g->lookup_.assign(static_cast<std::size_t>(g->nx_) * g->ny_, kNoCell);

    for (int iy = 0; iy < g->ny_; ++iy) {
        for (int ix = 0; ix < g->nx_; ++ix) {
            const Point c = g->lattice_center(ix, iy);
            if (!spec.contains(c)) continue;
            g->lookup_[static_cast<std::size_t>(iy) * g->nx_ + ix] = static_cast<CellId>(g->centers_.size());
            g->centers_.push_back(c);
            g->ix_.push_back(ix);
            g->iy_.push_back(iy);
        }
    }
    if (g->centers_.empty()) throw GeometryError("empty domain");

    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    g->boundary_.assign(g->centers_.size(), 0);
    g->theta_.assign(4 * g->centers_.size(), 1.0);
    for (std::size_t c = 0; c < g->centers_.size(); ++c) {
        for (int d = 0; d < 4; ++d) {
            if (g->at(g->ix_[c] + kDx[d], g->iy_[c] + kDy[d]) != kNoCell) continue;
            g->boundary_[c] = 1;
            // Bisect the segment centre -> exterior neighbour for the boundary crossing.
            const Point a = g->centers_[c];
            const Point step{kDx[d] * g->h_, kDy[d] * g->h_};
            double inside = 0.0;
            double outside = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (inside + outside);
                if (spec.contains(a + step * mid)) inside = mid; else outside = mid;
            }
            g->theta_[4 * c + d] = std::max(0.5 * (inside + outside), 1e-9);
        }
    }
    return g;
}

CellId Grid::at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return kNoCell;
    return lookup_[static_cast<std::size_t>(iy) * nx_ + ix];
}

CellId Grid::neighbor(CellId c, Direction d) const {
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    const int k = static_cast<int>(d);
    return at(ix(c) + kDx[k], iy(c) + kDy[k]);
}

std::optional<CellId> Grid::nearest_cell(const Point& p) const {
    const Point q = lattice_coords(p);
    const CellId c = at(static_cast<int>(std::lround(q.x)), static_cast<int>(std::lround(q.y)));
    if (c == kNoCell) return std::nullopt;
    return c;
}

CellId Grid::require_cell(const Point& p) const {
    if (auto c = nearest_cell(p)) return *c;
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") is not inside the grid";
    throw GeometryError(os.str());
}

double measure(const Grid& grid, std::span<const CellId> cells) {
    for (const CellId c : cells) {
        if (c < 0 || static_cast<std::size_t>(c) >= grid.size()) {
            throw GeometryError("measure: cell id out of range");
        }
    }
    return static_cast<double>(cells.size()) * grid.cell_area();
}

}  // namespace vortexlab
