#include "vortexlab/kirchhoff_routh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <list>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace vortexlab {
namespace {

constexpr int kBlobWidth = 6;
constexpr int kBlobCells = kBlobWidth * kBlobWidth;
constexpr int kKernelHalf = kBlobWidth - 1;

double bspline5(double t) {
    t = std::abs(t);
    double s = 0.0;
    if (t < 3.0) s += std::pow(3.0 - t, 5);
    if (t < 2.0) s -= 6.0 * std::pow(2.0 - t, 5);
    if (t < 1.0) s += 15.0 * std::pow(1.0 - t, 5);
    return s / 120.0;
}

double bspline5_derivative(double t) {
    const double a = std::abs(t);
    double s = 0.0;
    if (a < 3.0) s += std::pow(3.0 - a, 4);
    if (a < 2.0) s -= 6.0 * std::pow(2.0 - a, 4);
    if (a < 1.0) s += 15.0 * std::pow(1.0 - a, 4);
    return (t < 0.0 ? 1.0 : -1.0) * s * 5.0 / 120.0;
}

/// Quintic B-spline weights of a point over the 6x6 surrounding cells.
struct Blob {
    std::array<CellId, kBlobCells> cells{};
    std::array<int, kBlobCells> ix{};
    std::array<int, kBlobCells> iy{};
    std::array<double, kBlobCells> w{};
    std::array<double, kBlobCells> dwx{};
    std::array<double, kBlobCells> dwy{};
    bool inside = true;
};

Blob make_blob(const Grid& g, Point x) {
    Blob b;
    const Point q = g.lattice_coords(x);
    const int i0 = static_cast<int>(std::floor(q.x)) - 2;
    const int j0 = static_cast<int>(std::floor(q.y)) - 2;
    std::array<double, kBlobWidth> wx{}, wy{}, dx{}, dy{};
    for (int k = 0; k < kBlobWidth; ++k) {
        wx[k] = bspline5(q.x - (i0 + k));
        wy[k] = bspline5(q.y - (j0 + k));
        dx[k] = bspline5_derivative(q.x - (i0 + k)) / g.h();
        dy[k] = bspline5_derivative(q.y - (j0 + k)) / g.h();
    }
    for (int j = 0; j < kBlobWidth; ++j) {
        for (int i = 0; i < kBlobWidth; ++i) {
            const int k = j * kBlobWidth + i;
            b.ix[k] = i0 + i;
            b.iy[k] = j0 + j;
            b.cells[k] = g.at(i0 + i, j0 + j);
            if (b.cells[k] == kNoCell) b.inside = false;
            b.w[k] = wx[i] * wy[j];
            b.dwx[k] = dx[i] * wy[j];
            b.dwy[k] = wx[i] * dy[j];
        }
    }
    return b;
}

}  // namespace

struct KirchhoffRouth::Impl {
    const PoissonSolver& solver;
    std::size_t capacity;
    std::array<double, (2 * kKernelHalf + 1) * (2 * kKernelHalf + 1)> kernel{};

    mutable std::mutex mutex;
    mutable std::list<CellId> lru;
    mutable std::unordered_map<CellId, std::pair<std::shared_ptr<const std::vector<double>>,
                                                 std::list<CellId>::iterator>>
        columns;

    Impl(const PoissonSolver& s, const KROptions& options) : solver(s) {
        const std::size_t column_bytes = std::max<std::size_t>(1, s.grid().size() * sizeof(double));
        capacity = std::max<std::size_t>(2 * kBlobCells, options.cache_bytes / column_bytes);
        const double h = s.grid().h();
        for (int my = -kKernelHalf; my <= kKernelHalf; ++my) {
            for (int mx = -kKernelHalf; mx <= kKernelHalf; ++mx) {
                kernel_at(mx, my) = free_lattice_green(mx, my, h);
            }
        }
    }

    double& kernel_at(int mx, int my) {
        return kernel[static_cast<std::size_t>((my + kKernelHalf) * (2 * kKernelHalf + 1) + mx + kKernelHalf)];
    }
    double kernel_at(int mx, int my) const {
        return kernel[static_cast<std::size_t>((my + kKernelHalf) * (2 * kKernelHalf + 1) + mx + kKernelHalf)];
    }

    std::shared_ptr<const std::vector<double>> column(CellId b) const {
        {
            std::lock_guard lock(mutex);
            if (auto it = columns.find(b); it != columns.end()) {
                lru.splice(lru.begin(), lru, it->second.second);
                return it->second.first;
            }
        }
        const ScalarField g = green_function(solver, b);
        auto col = std::make_shared<const std::vector<double>>(g.values().begin(), g.values().end());
        std::lock_guard lock(mutex);
        if (auto it = columns.find(b); it != columns.end()) return it->second.first;
        lru.push_front(b);
        columns.emplace(b, std::make_pair(col, lru.begin()));
        while (columns.size() > capacity) {
            columns.erase(lru.back());
            lru.pop_back();
        }
        return col;
    }

    /// Sum_a Sum_b u_a v_b G(a, b) over two blobs, with optional weight sets.
    template <typename WA, typename WB>
    double pair_sum(const Blob& A, const WA& wa, const Blob& B, const WB& wb) const {
        double s = 0.0;
        for (int kb = 0; kb < kBlobCells; ++kb) {
            if (wb[kb] == 0.0) continue;
            const auto col = column(B.cells[kb]);
            double inner = 0.0;
            for (int ka = 0; ka < kBlobCells; ++ka) inner += wa[ka] * (*col)[static_cast<std::size_t>(A.cells[ka])];
            s += wb[kb] * inner;
        }
        return s;
    }

    template <typename WA, typename WB>
    double kernel_sum(const Blob& A, const WA& wa, const WB& wb) const {
        double s = 0.0;
        for (int ka = 0; ka < kBlobCells; ++ka) {
            if (wa[ka] == 0.0) continue;
            double inner = 0.0;
            for (int kb = 0; kb < kBlobCells; ++kb) {
                inner += wb[kb] * kernel_at(A.ix[ka] - A.ix[kb], A.iy[ka] - A.iy[kb]);
            }
            s += wa[ka] * inner;
        }
        return s;
    }
};

KirchhoffRouth::KirchhoffRouth(const PoissonSolver& solver, KROptions options)
    : solver_(solver), impl_(std::make_unique<Impl>(solver, options)) {}

KirchhoffRouth::~KirchhoffRouth() = default;

std::size_t KirchhoffRouth::cached_columns() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->columns.size();
}

bool KirchhoffRouth::admissible(const KRConfiguration& cfg, double margin) const {
    try {
        check_admissible(cfg, margin);
    } catch (const GeometryError&) {
        return false;
    }
    return true;
}

void KirchhoffRouth::check_admissible(const KRConfiguration& cfg, double margin) const {
    const Grid& g = solver_.grid();
    if (cfg.points.size() != cfg.strengths.size() || cfg.points.empty()) {
        throw GeometryError("configuration needs one strength per point");
    }
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (cfg.strengths[i] == 0.0 || !std::isfinite(cfg.strengths[i])) {
            throw GeometryError("vortex strengths must be nonzero");
        }
        const Point& p = cfg.points[i];
        if (!g.domain().contains(p) || g.domain().distance_to_boundary(p) < margin - 1e-12) {
            std::ostringstream os;
            os << "boundary margin violated: point " << i << " at (" << p.x << ", " << p.y << ") is closer than "
               << margin << " to the boundary";
            throw GeometryError(os.str());
        }
        if (!make_blob(g, p).inside) {
            throw GeometryError("boundary margin violated: vortex blob leaves the grid");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (distance(p, cfg.points[j]) < margin - 1e-12) {
                std::ostringstream os;
                os << "separation margin violated: points " << j << " and " << i << " are closer than " << margin;
                throw GeometryError(os.str());
            }
        }
    }
}

double KirchhoffRouth::green(Point x, Point y) const {
    const Grid& g = solver_.grid();
    const Blob a = make_blob(g, x);
    const Blob b = make_blob(g, y);
    if (!a.inside || !b.inside) throw GeometryError("vortex blob leaves the grid");
    return impl_->pair_sum(a, a.w, b, b.w);
}

double KirchhoffRouth::robin(Point x) const {
    const Blob a = make_blob(solver_.grid(), x);
    if (!a.inside) throw GeometryError("vortex blob leaves the grid");
    return impl_->kernel_sum(a, a.w, a.w) - impl_->pair_sum(a, a.w, a, a.w);
}

double KirchhoffRouth::value(const KRConfiguration& cfg) const {
    check_admissible(cfg, 4.0 * solver_.grid().h());
    const Grid& g = solver_.grid();
    std::vector<Blob> blobs;
    blobs.reserve(cfg.size());
    for (const auto& p : cfg.points) blobs.push_back(make_blob(g, p));
    double w = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double k2 = cfg.strengths[i] * cfg.strengths[i];
        const Blob& a = blobs[i];
        w += 0.5 * k2 * (impl_->kernel_sum(a, a.w, a.w) - impl_->pair_sum(a, a.w, a, a.w));
        for (std::size_t j = i + 1; j < cfg.size(); ++j) {
            w -= cfg.strengths[i] * cfg.strengths[j] * impl_->pair_sum(a, a.w, blobs[j], blobs[j].w);
        }
    }
    return w;
}

std::vector<Point> KirchhoffRouth::model_gradient(const KRConfiguration& cfg) const {
    check_admissible(cfg, 4.0 * solver_.grid().h());
    const Grid& g = solver_.grid();
    std::vector<Blob> blobs;
    for (const auto& p : cfg.points) blobs.push_back(make_blob(g, p));
    std::vector<Point> grad(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const Blob& a = blobs[i];
        const double k2 = cfg.strengths[i] * cfg.strengths[i];
        // Both the lattice kernel and the discrete Green matrix are symmetric.
        grad[i].x += k2 * (impl_->kernel_sum(a, a.dwx, a.w) - impl_->pair_sum(a, a.dwx, a, a.w));
        grad[i].y += k2 * (impl_->kernel_sum(a, a.dwy, a.w) - impl_->pair_sum(a, a.dwy, a, a.w));
        for (std::size_t j = 0; j < cfg.size(); ++j) {
            if (j == i) continue;
            const double kk = cfg.strengths[i] * cfg.strengths[j];
            grad[i].x -= kk * impl_->pair_sum(a, a.dwx, blobs[j], blobs[j].w);
            grad[i].y -= kk * impl_->pair_sum(a, a.dwy, blobs[j], blobs[j].w);
        }
    }
    return grad;
}

std::vector<Point> KirchhoffRouth::gradient(const KRConfiguration& cfg) const {
    const double h = solver_.grid().h();
    check_admissible(cfg, 6.0 * h);
    const double step = 2.0 * h;
    std::vector<Point> grad(cfg.size());
    KRConfiguration probe = cfg;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? probe.points[i].x : probe.points[i].y;
            const double saved = coord;
            coord = saved + step;
            const double plus = value(probe);
            coord = saved - step;
            const double minus = value(probe);
            coord = saved;
            (axis == 0 ? grad[i].x : grad[i].y) = (plus - minus) / (2.0 * step);
        }
    }
    return grad;
}

double kr_value(const PoissonSolver& solver, const KRConfiguration& cfg) {
    return KirchhoffRouth(solver).value(cfg);
}

std::vector<Point> kr_gradient(const PoissonSolver& solver, const KRConfiguration& cfg) {
    return KirchhoffRouth(solver).gradient(cfg);
}

PairSignature pair_signature(Point a, Point b) { return {norm(a), norm(b), distance(a, b)}; }

double signature_distance(const PairSignature& a, const PairSignature& b) {
    const double d1 = a.r1 - b.r1;
    const double d2 = a.r2 - b.r2;
    const double d3 = a.separation - b.separation;
    return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

namespace {

/// Evaluates W and its gradient for a vortex pair with one Poisson solve per
/// blob. Cheaper than cached unit columns when positions never repeat.
struct BlobPairEvaluator {
    const PoissonSolver& solver;
    std::array<double, (2 * kKernelHalf + 1) * (2 * kKernelHalf + 1)> kernel{};
    double k1;
    double k2;

    BlobPairEvaluator(const PoissonSolver& s, double kappa1, double kappa2) : solver(s), k1(kappa1), k2(kappa2) {
        const double h = s.grid().h();
        for (int my = -kKernelHalf; my <= kKernelHalf; ++my) {
            for (int mx = -kKernelHalf; mx <= kKernelHalf; ++mx) {
                kernel[static_cast<std::size_t>((my + kKernelHalf) * (2 * kKernelHalf + 1) + mx + kKernelHalf)] =
                    free_lattice_green(mx, my, h);
            }
        }
    }

    double kern(int mx, int my) const {
        return kernel[static_cast<std::size_t>((my + kKernelHalf) * (2 * kKernelHalf + 1) + mx + kKernelHalf)];
    }

    std::vector<double> blob_potential(const Blob& b) const {
        std::vector<double> rhs(solver.grid().size(), 0.0);
        const double inv_area = 1.0 / solver.grid().cell_area();
        for (int k = 0; k < kBlobCells; ++k) rhs[static_cast<std::size_t>(b.cells[k])] += b.w[k] * inv_area;
        return solver.solve(rhs);
    }

    struct Result {
        double value;
        Point grad1;
        Point grad2;
    };

    Result evaluate(Point x1, Point x2) const {
        const Grid& g = solver.grid();
        const Blob a = make_blob(g, x1);
        const Blob b = make_blob(g, x2);
        const auto ua = blob_potential(a);
        const auto ub = blob_potential(b);
        auto self = [&](const Blob& s, const std::vector<double>& u, double& val, Point& grad) {
            double kv = 0.0, kx = 0.0, ky = 0.0, uv = 0.0, ux = 0.0, uy = 0.0;
            for (int i = 0; i < kBlobCells; ++i) {
                double inner = 0.0;
                for (int j = 0; j < kBlobCells; ++j) inner += s.w[j] * kern(s.ix[i] - s.ix[j], s.iy[i] - s.iy[j]);
                kv += s.w[i] * inner;
                kx += s.dwx[i] * inner;
                ky += s.dwy[i] * inner;
                const double uc = u[static_cast<std::size_t>(s.cells[i])];
                uv += s.w[i] * uc;
                ux += s.dwx[i] * uc;
                uy += s.dwy[i] * uc;
            }
            val = kv - uv;
            grad = {2.0 * (kx - ux), 2.0 * (ky - uy)};
        };
        double h1 = 0.0, h2 = 0.0;
        Point gh1, gh2;
        self(a, ua, h1, gh1);
        self(b, ub, h2, gh2);
        double g12 = 0.0;
        Point dg1, dg2;
        for (int i = 0; i < kBlobCells; ++i) {
            const double u = ub[static_cast<std::size_t>(a.cells[i])];
            g12 += a.w[i] * u;
            dg1.x += a.dwx[i] * u;
            dg1.y += a.dwy[i] * u;
            const double v = ua[static_cast<std::size_t>(b.cells[i])];
            dg2.x += b.dwx[i] * v;
            dg2.y += b.dwy[i] * v;
        }
        Result r;
        r.value = -k1 * k2 * g12 + 0.5 * k1 * k1 * h1 + 0.5 * k2 * k2 * h2;
        r.grad1 = dg1 * (-k1 * k2) + gh1 * (0.5 * k1 * k1);
        r.grad2 = dg2 * (-k1 * k2) + gh2 * (0.5 * k2 * k2);
        return r;
    }
};

struct ScanCandidate {
    double value;
    CellId a;
    CellId b;
};

}  // namespace

KRMinimum kr_minimize(const PoissonSolver& solver, double kappa1, double kappa2, double margin,
                      const KRMinimizeOptions& options) {
    const Grid& g = solver.grid();
    const double h = g.h();
    if (!(kappa1 * kappa2 < 0.0)) {
        throw GeometryError("kr_minimize needs opposite-signed strengths (kappa1 > 0 > kappa2)");
    }
    if (margin < 6.0 * h - 1e-12) throw GeometryError("kr_minimize margin must be at least 6h");

    // Coarse scan for starting pairs.
    const int scan_n = std::min(g.n(), std::max(32, g.n() / std::max(1, options.stride_cells)));
    std::unique_ptr<PoissonSolver> scan_owner;
    const PoissonSolver* scan_solver = &solver;
    if (scan_n != g.n()) {
        scan_owner = std::make_unique<PoissonSolver>(Grid::build(g.domain(), scan_n), solver.options());
        scan_solver = scan_owner.get();
    }
    const Grid& sg = scan_solver->grid();
    const double scan_margin = std::max(margin, 4.0 * sg.h());
    std::vector<CellId> admissible_cells;
    for (CellId c = 0; c < static_cast<CellId>(sg.size()); ++c) {
        if (sg.domain().distance_to_boundary(sg.center(c)) >= scan_margin) admissible_cells.push_back(c);
    }
    if (admissible_cells.size() < 2) throw GeometryError("no admissible vortex pair: domain too small for the margin");

    std::vector<double> robin_values(sg.size(), 0.0);
    for (const CellId c : admissible_cells) robin_values[static_cast<std::size_t>(c)] = robin(green_function(*scan_solver, c), c);

    constexpr std::size_t kKeep = 256;
    auto worse = [](const ScanCandidate& l, const ScanCandidate& r) {
        if (l.value != r.value) return l.value < r.value;
        return std::tie(l.b, l.a) < std::tie(r.b, r.a);
    };
    std::vector<ScanCandidate> best;  // max-heap on value: front is the worst kept
    std::size_t scanned = 0;
    const double separation = std::max(margin, 4.0 * sg.h());
    for (const CellId b : admissible_cells) {
        const ScalarField col = green_function(*scan_solver, b);
        const double hb = robin_values[static_cast<std::size_t>(b)];
        for (const CellId a : admissible_cells) {
            if (a == b || distance(sg.center(a), sg.center(b)) < separation) continue;
            ++scanned;
            const double w = -kappa1 * kappa2 * col[a] + 0.5 * kappa1 * kappa1 * robin_values[static_cast<std::size_t>(a)] +
                             0.5 * kappa2 * kappa2 * hb;
            const ScanCandidate cand{w, a, b};
            if (best.size() < kKeep) {
                best.push_back(cand);
                std::push_heap(best.begin(), best.end(), worse);
            } else if (worse(cand, best.front())) {
                std::pop_heap(best.begin(), best.end(), worse);
                best.back() = cand;
                std::push_heap(best.begin(), best.end(), worse);
            }
        }
    }
    if (best.empty()) throw GeometryError("no admissible vortex pair: domain too small for the margin");
    std::sort(best.begin(), best.end(), worse);

    std::vector<std::pair<Point, Point>> starts;
    const double distinct = 4.0 * sg.h();
    for (const auto& c : best) {
        const Point pa = sg.center(c.a);
        const Point pb = sg.center(c.b);
        const bool repeated = std::any_of(starts.begin(), starts.end(), [&](const auto& s) {
            return distance(s.first, pa) < distinct && distance(s.second, pb) < distinct;
        });
        if (repeated) continue;
        starts.emplace_back(pa, pb);
        if (static_cast<int>(starts.size()) >= options.max_starts) break;
    }

    // Backtracking gradient descent on the full grid.
    const BlobPairEvaluator eval(solver, kappa1, kappa2);
    KirchhoffRouth checker(solver, KROptions{0});
    auto admissible = [&](Point p1, Point p2) {
        return checker.admissible(KRConfiguration{{p1, p2}, {kappa1, kappa2}}, margin);
    };

    KRMinimum result;
    result.scan_resolution = scan_n;
    result.scanned_pairs = scanned;
    result.value = std::numeric_limits<double>::infinity();
    std::vector<std::tuple<double, Point, Point>> finals;
    for (auto [p1, p2] : starts) {
        if (!admissible(p1, p2)) continue;
        ++result.starts;
        auto cur = eval.evaluate(p1, p2);
        double step = 4.0 * h;  // displacement length of the next trial
        int it = 0;
        for (; it < options.max_iterations; ++it) {
            const double gnorm = std::sqrt(cur.grad1.x * cur.grad1.x + cur.grad1.y * cur.grad1.y +
                                           cur.grad2.x * cur.grad2.x + cur.grad2.y * cur.grad2.y);
            if (gnorm == 0.0) break;
            bool accepted = false;
            while (step >= 1e-3 * h) {
                const double alpha = step / gnorm;
                const Point q1 = p1 - cur.grad1 * alpha;
                const Point q2 = p2 - cur.grad2 * alpha;
                if (admissible(q1, q2)) {
                    const auto trial = eval.evaluate(q1, q2);
                    if (trial.value <= cur.value - 1e-4 * alpha * gnorm * gnorm) {
                        p1 = q1;
                        p2 = q2;
                        cur = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!accepted) break;
            step = std::min(2.0 * step, 16.0 * h);
        }
        result.iterations += it;
        finals.emplace_back(cur.value, p1, p2);
        if (cur.value < result.value) {
            result.value = cur.value;
            result.positive = p1;
            result.negative = p2;
            result.gradient_norm = std::sqrt(cur.grad1.x * cur.grad1.x + cur.grad1.y * cur.grad1.y +
                                             cur.grad2.x * cur.grad2.x + cur.grad2.y * cur.grad2.y);
        }
    }
    if (result.starts == 0) throw GeometryError("no admissible vortex pair: domain too small for the margin");
    for (const auto& [v, q1, q2] : finals) {
        const bool same_value = std::abs(v - result.value) <= 1e-6 * std::max(1.0, std::abs(result.value));
        const bool elsewhere = distance(q1, result.positive) > 2.0 * h || distance(q2, result.negative) > 2.0 * h;
        if (same_value && elsewhere) result.degenerate = true;
    }
    return result;
}

Point robin_minimize(const PoissonSolver& solver, double margin, const KRMinimizeOptions& options) {
    const Grid& g = solver.grid();
    const double h = g.h();
    const int scan_n = std::min(g.n(), std::max(32, g.n() / std::max(1, options.stride_cells)));
    std::unique_ptr<PoissonSolver> scan_owner;
    const PoissonSolver* scan_solver = &solver;
    if (scan_n != g.n()) {
        scan_owner = std::make_unique<PoissonSolver>(Grid::build(g.domain(), scan_n), solver.options());
        scan_solver = scan_owner.get();
    }
    const Grid& sg = scan_solver->grid();
    const double scan_margin = std::max(margin, 4.0 * sg.h());
    CellId best = kNoCell;
    double best_value = std::numeric_limits<double>::infinity();
    for (CellId c = 0; c < static_cast<CellId>(sg.size()); ++c) {
        if (sg.domain().distance_to_boundary(sg.center(c)) < scan_margin) continue;
        const double v = robin(green_function(*scan_solver, c), c);
        if (v < best_value) {
            best_value = v;
            best = c;
        }
    }
    if (best == kNoCell) throw GeometryError("no admissible point: domain too small for the margin");

    const KirchhoffRouth kr(solver);
    const double m = std::max(margin, 4.0 * h);
    Point x = sg.center(best);
    if (!kr.admissible(KRConfiguration{{x}, {1.0}}, m)) return x;
    double cur = kr.robin(x);
    double step = 4.0 * h;
    for (int it = 0; it < options.max_iterations; ++it) {
        const Point grad = kr.model_gradient(KRConfiguration{{x}, {1.0}})[0];
        const double gnorm = norm(grad);
        if (gnorm == 0.0) break;
        bool accepted = false;
        while (step >= 1e-3 * h) {
            const double alpha = step / gnorm;
            const Point y = x - grad * alpha;
            if (kr.admissible(KRConfiguration{{y}, {1.0}}, m)) {
                const double trial = kr.robin(y);
                // model_gradient of k = 1 is the gradient of H/2
                if (trial <= cur - 2e-4 * alpha * gnorm * gnorm) {
                    x = y;
                    cur = trial;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break;
        step = std::min(2.0 * step, 16.0 * h);
    }
    return x;
}

PVTrajectory pv_evolve(const KirchhoffRouth& kr, const KRConfiguration& cfg, double dt, double t_end,
                       const PVOptions& options) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("pv_evolve needs dt > 0 and T >= 0");
    const double margin = options.margin_cells * kr.solver().grid().h();
    kr.check_admissible(cfg, margin);
    const std::size_t k = cfg.size();

    auto rhs = [&](const std::vector<Point>& x) {
        const KRConfiguration c{x, cfg.strengths};
        kr.check_admissible(c, margin);
        auto grad = kr.model_gradient(c);
        std::vector<Point> v(k);
        for (std::size_t i = 0; i < k; ++i) v[i] = Point{grad[i].y, -grad[i].x} * (1.0 / cfg.strengths[i]);
        return v;
    };
    auto axpy = [&](const std::vector<Point>& x, const std::vector<Point>& d, double a) {
        std::vector<Point> y(k);
        for (std::size_t i = 0; i < k; ++i) y[i] = x[i] + d[i] * a;
        return y;
    };

    PVTrajectory traj;
    std::vector<Point> x = cfg.points;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.positions.push_back(x);
        traj.energies.push_back(kr.value(KRConfiguration{x, cfg.strengths}));
    };
    record(0.0);
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    for (long s = 1; s <= steps; ++s) {
        try {
            const auto k1 = rhs(x);
            const auto k2 = rhs(axpy(x, k1, 0.5 * dt));
            const auto k3 = rhs(axpy(x, k2, 0.5 * dt));
            const auto k4 = rhs(axpy(x, k3, dt));
            std::vector<Point> next(k);
            for (std::size_t i = 0; i < k; ++i) {
                next[i] = x[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
            kr.check_admissible(KRConfiguration{next, cfg.strengths}, margin);
            x = std::move(next);
        } catch (const GeometryError& e) {
            traj.truncated = true;
            traj.message = e.what();
            if (traj.times.back() != (s - 1) * dt) record((s - 1) * dt);
            return traj;
        }
        if (s % std::max(1, options.sample_every) == 0 || s == steps) record(s * dt);
    }
    return traj;
}

PVTrajectory pv_evolve(const PoissonSolver& solver, const KRConfiguration& cfg, double dt, double t_end,
                       const PVOptions& options) {
    const KirchhoffRouth kr(solver);
    return pv_evolve(kr, cfg, dt, t_end, options);
}

}  // namespace vortexlab
