#include "latimp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace latimp {
namespace {

constexpr double kCoincidenceTol = 1e-12;

struct Basis {
    Eigen::Vector2d a1;
    Eigen::Vector2d a2;
};

Basis bravais_vectors(const LatticeSpec& spec) {
    const double a = spec.spacing;
    switch (spec.kind) {
        case LatticeKind::square:
            return {{a, 0.0}, {0.0, a}};
        case LatticeKind::triangular:
            return {{a, 0.0}, {a / 2.0, std::sqrt(3.0) * a / 2.0}};
        case LatticeKind::oblique:
            return {{a, 0.0}, {a * std::cos(spec.theta) / std::sin(spec.theta), a}};
        case LatticeKind::rectangular:
            return {{a * spec.scale, 0.0}, {0.0, a}};
        case LatticeKind::honeycomb: {
            // Bravais vectors of the underlying triangular lattice; spacing is
            // the bond length.
            const double g = std::sqrt(3.0) * a;
            return {{g, 0.0}, {g / 2.0, 1.5 * a}};
        }
    }
    throw std::invalid_argument("unknown lattice kind");
}

// Basis offsets of the atoms within one unit cell.
std::vector<Eigen::Vector2d> cell_basis(const LatticeSpec& spec, const Basis& b) {
    if (spec.kind == LatticeKind::honeycomb) {
        return {{0.0, 0.0}, (b.a1 + b.a2) / 3.0};
    }
    return {{0.0, 0.0}};
}

// Factor `cells` into n1 x n2 (both >= 2) with the most even patch. Square,
// rectangular and honeycomb patches minimize the footprint aspect ratio;
// triangular and oblique patches count cells along the primitive vectors.
std::optional<std::pair<int, int>> grid_shape(LatticeKind kind, int cells,
                                              const Basis& b) {
    std::optional<std::pair<int, int>> best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int n1 = 2; n1 * 2 <= cells; ++n1) {
        if (cells % n1 != 0) continue;
        const int n2 = cells / n1;
        if (n2 < 2) continue;
        double ex = n1, ey = n2;
        if (kind == LatticeKind::square || kind == LatticeKind::rectangular ||
            kind == LatticeKind::honeycomb) {
            ex = n1 * std::abs(b.a1.x()) + n2 * std::abs(b.a2.x());
            ey = n1 * std::abs(b.a1.y()) + n2 * std::abs(b.a2.y());
        }
        const double score = std::abs(std::log(ex / ey));
        if (score < best_score - 1e-12) {
            best_score = score;
            best = {n1, n2};
        }
    }
    return best;
}

int nearest_feasible_count(const LatticeSpec& spec) {
    const Basis b = bravais_vectors(spec);
    const int per_cell = spec.kind == LatticeKind::honeycomb ? 2 : 1;
    for (int d = 1; d < spec.n_atoms + 64; ++d) {
        for (int candidate : {spec.n_atoms - d, spec.n_atoms + d}) {
            if (candidate < 4 || candidate % per_cell != 0) continue;
            if (grid_shape(spec.kind, candidate / per_cell, b)) return candidate;
        }
    }
    return 16;
}

struct Patch {
    std::vector<Eigen::Vector2d> positions;  // centroid at origin
    Basis basis;
    int n1 = 0, n2 = 0;
    Eigen::Vector2d centroid_shift;  // subtracted from generated coordinates
};

void validate_spec(const LatticeSpec& spec) {
    if (!(spec.spacing > 0.0))
        throw std::invalid_argument("lattice spacing must be positive");
    if (spec.n_atoms < 4)
        throw std::invalid_argument("n_atoms must be at least 4");
    if (spec.kind == LatticeKind::oblique &&
        !(spec.theta > 0.0 && spec.theta < std::numbers::pi))
        throw std::invalid_argument("oblique angle must lie in (0, pi)");
    if (spec.kind == LatticeKind::rectangular && !(spec.scale > 0.0))
        throw std::invalid_argument("rectangular scale must be positive");
    if (spec.kind == LatticeKind::honeycomb && spec.n_atoms % 2 != 0) {
        std::ostringstream msg;
        msg << "honeycomb needs an even atom count; nearest feasible is "
            << nearest_feasible_count(spec);
        throw std::invalid_argument(msg.str());
    }
}

Patch build_patch(const LatticeSpec& spec) {
    validate_spec(spec);
    Patch patch;
    patch.basis = bravais_vectors(spec);
    const auto basis_offsets = cell_basis(spec, patch.basis);
    const int per_cell = static_cast<int>(basis_offsets.size());
    const auto shape = grid_shape(spec.kind, spec.n_atoms / per_cell, patch.basis);
    if (!shape) {
        std::ostringstream msg;
        msg << "n_atoms = " << spec.n_atoms
            << " does not tile an n x m patch; nearest feasible is "
            << nearest_feasible_count(spec);
        throw std::invalid_argument(msg.str());
    }
    patch.n1 = shape->first;
    patch.n2 = shape->second;
    patch.positions.reserve(spec.n_atoms);
    for (int j = 0; j < patch.n2; ++j)
        for (int i = 0; i < patch.n1; ++i)
            for (const auto& off : basis_offsets)
                patch.positions.push_back(i * patch.basis.a1 + j * patch.basis.a2 + off);
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : patch.positions) centroid += p;
    centroid /= static_cast<double>(patch.positions.size());
    for (auto& p : patch.positions) p -= centroid;
    patch.centroid_shift = centroid;
    return patch;
}

std::vector<Eigen::Vector2d> hexagon_polygon(const Patch& patch,
                                             const Eigen::Vector2d& center,
                                             double bond) {
    std::vector<Eigen::Vector2d> ring;
    for (const auto& p : patch.positions)
        if (std::abs((p - center).norm() - bond) < 1e-9 * bond) ring.push_back(p);
    std::sort(ring.begin(), ring.end(), [&](const auto& a, const auto& b) {
        return std::atan2(a.y() - center.y(), a.x() - center.x()) <
               std::atan2(b.y() - center.y(), b.x() - center.x());
    });
    return ring;
}

PlaquetteFrame central_plaquette(const LatticeSpec& spec, const Patch& patch) {
    PlaquetteFrame frame;
    const auto& [a1, a2] = patch.basis;
    auto cell_origin = [&](int i, int j) {
        return Eigen::Vector2d(i * a1 + j * a2 - patch.centroid_shift);
    };
    double best = std::numeric_limits<double>::infinity();

    if (spec.kind == LatticeKind::honeycomb) {
        // Complete hexagons have their center one bond above the midpoint of
        // the cell diagonal; rings need the (i+1, j+1) cells present.
        const double bond = spec.spacing;
        Eigen::Vector2d center = Eigen::Vector2d::Zero();
        const Eigen::Vector2d hex_off(std::sqrt(3.0) * bond, bond);
        for (int j = 0; j + 1 < patch.n2; ++j)
            for (int i = 0; i + 1 < patch.n1; ++i) {
                const Eigen::Vector2d c = cell_origin(i, j) + hex_off;
                if (c.norm() < best - 1e-12) {
                    best = c.norm();
                    center = c;
                }
            }
        frame.shape = PlaquetteFrame::Shape::hexagon;
        frame.u = a1;
        frame.v = a2;
        frame.origin = center - 0.5 * (a1 + a2);
        frame.polygon = hexagon_polygon(patch, center, bond);
        return frame;
    }

    if (spec.kind == LatticeKind::triangular) {
        // The plaquette is one of the two triangles of a cell. The upper one
        // uses a point-reflected frame so fractional coordinates mean the
        // same thing in both.
        frame.shape = PlaquetteFrame::Shape::triangle;
        bool upper = false;
        Eigen::Vector2d origin = Eigen::Vector2d::Zero();
        for (int j = 0; j + 1 < patch.n2; ++j)
            for (int i = 0; i + 1 < patch.n1; ++i) {
                const Eigen::Vector2d base = cell_origin(i, j);
                const Eigen::Vector2d lower = base + (a1 + a2) / 3.0;
                const Eigen::Vector2d upperc = base + 2.0 * (a1 + a2) / 3.0;
                if (lower.norm() < best - 1e-12) {
                    best = lower.norm();
                    origin = base;
                    upper = false;
                }
                if (upperc.norm() < best - 1e-12) {
                    best = upperc.norm();
                    origin = base;
                    upper = true;
                }
            }
        if (upper) {
            frame.origin = origin + a1 + a2;
            frame.u = -a1;
            frame.v = -a2;
        } else {
            frame.origin = origin;
            frame.u = a1;
            frame.v = a2;
        }
        frame.polygon = {frame.origin, frame.origin + frame.u,
                         frame.origin + frame.v};
        // keep CCW orientation
        const Eigen::Vector2d e1 = frame.polygon[1] - frame.polygon[0];
        const Eigen::Vector2d e2 = frame.polygon[2] - frame.polygon[0];
        if (e1.x() * e2.y() - e1.y() * e2.x() < 0)
            std::swap(frame.polygon[1], frame.polygon[2]);
        return frame;
    }

    frame.shape = PlaquetteFrame::Shape::parallelogram;
    for (int j = 0; j + 1 < patch.n2; ++j)
        for (int i = 0; i + 1 < patch.n1; ++i) {
            const Eigen::Vector2d c = cell_origin(i, j) + 0.5 * (a1 + a2);
            if (c.norm() < best - 1e-12) {
                best = c.norm();
                frame.origin = cell_origin(i, j);
            }
        }
    frame.u = a1;
    frame.v = a2;
    frame.polygon = {frame.origin, frame.origin + a1, frame.origin + a1 + a2,
                     frame.origin + a2};
    return frame;
}

Eigen::Vector3d lift(const Eigen::Vector2d& p) { return {p.x(), p.y(), 0.0}; }

}  // namespace

std::string to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::square: return "square";
        case LatticeKind::triangular: return "triangular";
        case LatticeKind::oblique: return "oblique";
        case LatticeKind::rectangular: return "rectangular";
        case LatticeKind::honeycomb: return "honeycomb";
    }
    return "?";
}

std::string to_string(Placement placement) {
    return placement == Placement::interstitial ? "interstitial"
                                                : "substitutional";
}

LatticeKind lattice_kind_from_string(const std::string& s) {
    if (s == "square") return LatticeKind::square;
    if (s == "triangular") return LatticeKind::triangular;
    if (s == "oblique") return LatticeKind::oblique;
    if (s == "rectangular") return LatticeKind::rectangular;
    if (s == "honeycomb") return LatticeKind::honeycomb;
    throw std::invalid_argument("unknown lattice kind: " + s);
}

Placement placement_from_string(const std::string& s) {
    if (s == "interstitial") return Placement::interstitial;
    if (s == "substitutional") return Placement::substitutional;
    throw std::invalid_argument("unknown placement: " + s);
}

Eigen::Vector2d PlaquetteFrame::center_fraction() const {
    if (shape == Shape::triangle) return {1.0 / 3.0, 1.0 / 3.0};
    return {0.5, 0.5};
}

bool PlaquetteFrame::contains(const Eigen::Vector2d& p, double tol) const {
    const int n = static_cast<int>(polygon.size());
    if (n < 3) return false;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        scale = std::max(scale, (polygon[(i + 1) % n] - polygon[i]).norm());
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d e = polygon[(i + 1) % n] - polygon[i];
        const Eigen::Vector2d w = p - polygon[i];
        if (e.x() * w.y() - e.y() * w.x() < -tol * scale * scale) return false;
    }
    return true;
}

double rescaled_spacing(LatticeKind kind, double theta, double s, double a_sq,
                        TriangularSpacing tri) {
    if (!(a_sq > 0.0)) throw std::invalid_argument("a_sq must be positive");
    const double root2 = std::numbers::sqrt2;
    switch (kind) {
        case LatticeKind::square:
            return a_sq;
        case LatticeKind::triangular: {
            const double t2 = std::tan(std::numbers::pi / 6.0) *
                              std::tan(std::numbers::pi / 6.0);
            return tri == TriangularSpacing::cosine
                       ? root2 * a_sq / std::sqrt(1.0 + t2)
                       : root2 * a_sq / (1.0 + t2);
        }
        case LatticeKind::oblique: {
            if (!(theta > 0.0 && theta < std::numbers::pi))
                throw std::domain_error("theta out of (0, pi)");
            // The closed form holds the neighbor-distance constraint for
            // theta <= pi/2; obtuse plaquettes are mirror images of acute
            // ones, so reduce by reflection.
            const double t = std::min(theta, std::numbers::pi - theta);
            const double cot = std::cos(t) / std::sin(t);
            const double csc2 = 1.0 / (std::sin(t) * std::sin(t));
            return root2 * a_sq / std::sqrt(1.0 - 2.0 * cot + csc2);
        }
        case LatticeKind::rectangular:
            if (!(s > 0.0)) throw std::domain_error("scale must be positive");
            return root2 * a_sq / std::sqrt(1.0 + s * s);
        case LatticeKind::honeycomb:
            return root2 * a_sq / 2.0;
    }
    throw std::invalid_argument("unknown lattice kind");
}

double oblique_spacing_cosine_variant(double theta, double a_sq) {
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw std::domain_error("theta out of (0, pi)");
    const double cot = std::cos(theta) / std::sin(theta);
    const double radicand = 1.0 - 2.0 * cot + std::cos(theta) * std::cos(theta);
    if (radicand <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::numbers::sqrt2 * a_sq / std::sqrt(radicand);
}

double min_site_spacing_unit(LatticeKind kind, double theta, double s) {
    switch (kind) {
        case LatticeKind::square:
        case LatticeKind::triangular:
        case LatticeKind::honeycomb:
            return 1.0;
        case LatticeKind::oblique: {
            const double cot = std::cos(theta) / std::sin(theta);
            const double csc = 1.0 / std::sin(theta);
            const double diag = std::hypot(cot - 1.0, 1.0);
            return std::min({1.0, std::abs(csc), diag});
        }
        case LatticeKind::rectangular:
            return std::min(1.0, s);
    }
    throw std::invalid_argument("unknown lattice kind");
}

std::array<double, 4> plaquette_distances_oblique(double theta, double a_sq) {
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw std::domain_error("theta out of (0, pi)");
    // Reduced to theta <= pi/2 by the reflection symmetry of the plaquette;
    // the closed forms keep the impurity-distance constraint on that range.
    const double t = std::min(theta, std::numbers::pi - theta);
    const double cot = std::cos(t) / std::sin(t);
    const double csc2 = 1.0 / (std::sin(t) * std::sin(t));
    const double den = std::sqrt(1.0 - 2.0 * cot + csc2);
    const double base = std::numbers::sqrt2 * a_sq / den;
    const double hyp = std::sqrt(1.0 + cot * cot);  // = csc on (0, pi/2]
    return {base,
            base * hyp,
            base * std::sqrt(2.0 + cot * cot - 2.0 * hyp * std::cos(t)),
            base * std::sqrt(2.0 + cot * cot + 2.0 * hyp * std::cos(t))};
}

PlaquetteFrame reference_plaquette(const LatticeSpec& spec) {
    const Patch patch = build_patch(spec);
    return central_plaquette(spec, patch);
}

EmitterArray build_lattice(const LatticeSpec& spec) {
    const Patch patch = build_patch(spec);
    const PlaquetteFrame frame = central_plaquette(spec, patch);

    EmitterArray array;
    array.lattice_positions.reserve(patch.positions.size());
    for (const auto& p : patch.positions) array.lattice_positions.push_back(lift(p));

    if (spec.placement == Placement::interstitial) {
        const Eigen::Vector2d frac =
            spec.impurity_offset.value_or(frame.center_fraction());
        const Eigen::Vector2d pos = frame.point(frac);
        if (!frame.contains(pos))
            throw std::invalid_argument(
                "impurity offset lies outside the reference plaquette");
        array.impurity_position = lift(pos);
    } else {
        // Replace the atom nearest the array centroid (the origin after
        // centering); ties break on generation order.
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(patch.positions.size()); ++i) {
            const double d = patch.positions[i].norm();
            if (d < best_d - kCoincidenceTol) {
                best_d = d;
                best = i;
            }
        }
        array.impurity_position = lift(patch.positions[best]);
        array.lattice_positions.erase(array.lattice_positions.begin() + best);
    }

    // coincidence guard
    for (size_t i = 0; i < array.lattice_positions.size(); ++i) {
        if ((array.lattice_positions[i] - array.impurity_position).norm() <
            kCoincidenceTol)
            throw std::invalid_argument("impurity coincides with lattice atom " +
                                        std::to_string(i));
    }
    return array;
}

NeighborStats nearest_neighbor_stats(const EmitterArray& array, double rel_tol) {
    if (array.lattice_positions.empty())
        throw std::invalid_argument("empty lattice");
    NeighborStats stats;
    stats.d_min = std::numeric_limits<double>::infinity();
    for (const auto& p : array.lattice_positions)
        stats.d_min = std::min(stats.d_min, (p - array.impurity_position).norm());
    for (int i = 0; i < static_cast<int>(array.lattice_positions.size()); ++i) {
        const double d =
            (array.lattice_positions[i] - array.impurity_position).norm();
        if (d <= stats.d_min * (1.0 + rel_tol)) stats.neighbor_indices.push_back(i);
    }
    stats.n_nearest = static_cast<int>(stats.neighbor_indices.size());

    std::vector<double> pair_distances;
    for (size_t a = 0; a < stats.neighbor_indices.size(); ++a)
        for (size_t b = a + 1; b < stats.neighbor_indices.size(); ++b)
            pair_distances.push_back(
                (array.lattice_positions[stats.neighbor_indices[a]] -
                 array.lattice_positions[stats.neighbor_indices[b]])
                    .norm());
    std::sort(pair_distances.begin(), pair_distances.end());
    double cluster_start = -1.0;
    for (double d : pair_distances) {
        if (cluster_start < 0.0 || d > cluster_start * (1.0 + rel_tol)) {
            ++stats.n_distinct_distances;
            cluster_start = d;
        }
    }
    return stats;
}

Eigen::Vector3d remove_site_nearest(EmitterArray& array,
                                    const Eigen::Vector2d& target) {
    if (array.lattice_positions.empty())
        throw std::invalid_argument("empty lattice");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(array.lattice_positions.size()); ++i) {
        const double d =
            (array.lattice_positions[i].head<2>() - target).norm();
        if (d < best_d - kCoincidenceTol) {
            best_d = d;
            best = i;
        }
    }
    const Eigen::Vector3d removed = array.lattice_positions[best];
    array.lattice_positions.erase(array.lattice_positions.begin() + best);
    return removed;
}

void translate(EmitterArray& array, const Eigen::Vector3d& shift) {
    for (auto& p : array.lattice_positions) p += shift;
    array.impurity_position += shift;
}

}  // namespace latimp
