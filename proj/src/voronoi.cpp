#include "latimp/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latimp {
namespace {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

// Clip a convex polygon by the half-plane n . x <= c (Sutherland-Hodgman).
Polygon clip_half_plane(const Polygon& poly, const Vec2& n, double c) {
    Polygon out;
    const int m = static_cast<int>(poly.size());
    for (int i = 0; i < m; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % m];
        const double da = n.dot(a) - c;
        const double db = n.dot(b) - c;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0) != (db < 0.0) && da != db) {
            const double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

double polygon_scale(const Polygon& poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i)
        s = std::max(s, (poly[(i + 1) % poly.size()] - poly[i]).norm());
    return s;
}

// Distances from p to the two nearest sites.
std::pair<double, double> two_nearest(const std::vector<Vec2>& sites,
                                      const Vec2& p) {
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    for (const auto& s : sites) {
        const double d = (s - p).norm();
        if (d < d1) {
            d2 = d1;
            d1 = d;
        } else if (d < d2) {
            d2 = d;
        }
    }
    return {d1, d2};
}

int equidistant_count(const std::vector<Vec2>& sites, const Vec2& p,
                      double rel_tol) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& s : sites) dmin = std::min(dmin, (s - p).norm());
    int count = 0;
    for (const auto& s : sites)
        if ((s - p).norm() <= dmin * (1.0 + rel_tol)) ++count;
    return count;
}

}  // namespace

VoronoiDiagram voronoi_partition(const std::vector<Vec2>& sites,
                                 const std::vector<Vec2>& region, int) {
    if (sites.size() < 3)
        throw std::invalid_argument("voronoi_partition needs at least 3 sites");
    if (region.size() < 3)
        throw std::invalid_argument("region polygon needs at least 3 vertices");

    // collinearity guard
    bool collinear = true;
    const Vec2 dir = sites[1] - sites[0];
    for (size_t i = 2; i < sites.size() && collinear; ++i) {
        const Vec2 w = sites[i] - sites[0];
        if (std::abs(dir.x() * w.y() - dir.y() * w.x()) >
            1e-12 * dir.norm() * w.norm())
            collinear = false;
    }
    if (collinear) throw std::domain_error("sites are collinear");

    VoronoiDiagram diagram;
    diagram.region = region;
    const double scale = polygon_scale(region);
    const double edge_tol = 1e-9 * std::max(scale, 1e-30);

    struct Key {
        long long x0, y0, x1, y1;
        bool operator<(const Key& o) const {
            return std::tie(x0, y0, x1, y1) < std::tie(o.x0, o.y0, o.x1, o.y1);
        }
    };
    auto quantize = [&](const Vec2& a, const Vec2& b) {
        auto q = [&](double v) {
            return static_cast<long long>(std::llround(v / (1e-7 * scale)));
        };
        Key k{q(a.x()), q(a.y()), q(b.x()), q(b.y())};
        Key r{k.x1, k.y1, k.x0, k.y0};
        return std::min(k, r);
    };
    std::vector<Key> seen_edges;
    std::vector<Vec2> vertex_candidates;

    for (size_t i = 0; i < sites.size(); ++i) {
        Polygon cell = region;
        for (size_t j = 0; j < sites.size() && !cell.empty(); ++j) {
            if (j == i) continue;
            const Vec2 n = sites[j] - sites[i];
            const double c = n.dot(0.5 * (sites[i] + sites[j]));
            cell = clip_half_plane(cell, n, c);
        }
        const int m = static_cast<int>(cell.size());
        for (int k = 0; k < m; ++k) {
            const Vec2& a = cell[k];
            const Vec2& b = cell[(k + 1) % m];
            if ((b - a).norm() < edge_tol) continue;
            // keep bisector segments only: midpoint equidistant to two sites
            const Vec2 mid = 0.5 * (a + b);
            const auto [d1, d2] = two_nearest(sites, mid);
            if (d2 - d1 > 1e-9 * std::max(d1, 1e-30)) continue;
            const Key key = quantize(a, b);
            if (std::binary_search(seen_edges.begin(), seen_edges.end(), key))
                continue;
            seen_edges.insert(
                std::lower_bound(seen_edges.begin(), seen_edges.end(), key), key);
            diagram.edges.emplace_back(a, b);
            vertex_candidates.push_back(a);
            vertex_candidates.push_back(b);
        }
    }

    // Voronoi vertices: edge endpoints equidistant to at least three sites.
    for (const auto& p : vertex_candidates) {
        if (equidistant_count(sites, p, 1e-9) < 3) continue;
        bool duplicate = false;
        for (const auto& v : diagram.vertices)
            if ((v - p).norm() < 1e-7 * scale) {
                duplicate = true;
                break;
            }
        if (!duplicate) diagram.vertices.push_back(p);
    }
    return diagram;
}

}  // namespace latimp
