// geometry.hpp — finite lattice construction, impurity placement and
// neighborhood statistics for all five lattice families.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "latimp/common.hpp"

namespace latimp {

enum class LatticeKind { square, triangular, oblique, rectangular, honeycomb };
enum class Placement { interstitial, substitutional };

std::string to_string(LatticeKind kind);
std::string to_string(Placement placement);
LatticeKind lattice_kind_from_string(const std::string& s);
Placement placement_from_string(const std::string& s);

// Triangular spacing rescaling relative to the square reference. The
// cosine form keeps the impurity-to-nearest-neighbor distance equal to the
// square plaquette value; the cosine-squared form does not (its deviation is
// measured in the test suite).
enum class TriangularSpacing { cosine, cosine_squared };

struct LatticeSpec {
    LatticeKind kind = LatticeKind::square;
    double spacing = 0.15;  // lattice constant [lambda]; honeycomb: bond length
    double theta = std::numbers::pi / 2;  // opening angle, oblique only
    double scale = 1.0;                   // aspect factor s, rectangular only
    int n_atoms = 100;                    // N_tot
    Placement placement = Placement::interstitial;
    // Fractional plaquette coordinates; default = plaquette center.
    std::optional<Eigen::Vector2d> impurity_offset;
};

struct EmitterArray {
    std::vector<Eigen::Vector3d> lattice_positions;  // all z = 0
    Eigen::Vector3d impurity_position = Eigen::Vector3d::Zero();
    double gamma_L = kGammaL;
    double gamma_I = kGammaL;
    double omega = kOmega;
};

struct NeighborStats {
    int n_nearest = 0;            // N_nn
    int n_distinct_distances = 0; // N_d among the nearest neighbors
    double d_min = 0.0;
    std::vector<int> neighbor_indices;
};

// Reference plaquette of a lattice: the cell polygon the impurity lives in.
// Fractional coordinates (f1, f2) map to origin + f1*u + f2*v; the polygon
// is the closed region a valid impurity offset must lie in (parallelogram,
// triangle, or the hexagon of a honeycomb).
struct PlaquetteFrame {
    enum class Shape { parallelogram, triangle, hexagon };
    Shape shape = Shape::parallelogram;
    Eigen::Vector2d origin = Eigen::Vector2d::Zero();
    Eigen::Vector2d u = Eigen::Vector2d::UnitX();
    Eigen::Vector2d v = Eigen::Vector2d::UnitY();
    std::vector<Eigen::Vector2d> polygon;  // CCW vertices, Cartesian

    Eigen::Vector2d point(const Eigen::Vector2d& frac) const {
        return origin + frac.x() * u + frac.y() * v;
    }
    Eigen::Vector2d center_fraction() const;
    Eigen::Vector2d center() const { return point(center_fraction()); }
    bool contains(const Eigen::Vector2d& cartesian, double tol = 1e-9) const;
};

// Rescaled lattice spacing that keeps the impurity-to-nearest-neighbor
// distance of the interstitial placement equal to the square reference with
// spacing a_sq. theta and s are consulted for the kinds that need them.
double rescaled_spacing(LatticeKind kind, double theta, double s, double a_sq,
                        TriangularSpacing tri = TriangularSpacing::cosine);

// The cosine-squared oblique variant (radicand can turn negative; NaN then).
// Kept for the numerical comparison against the adopted cosecant form.
double oblique_spacing_cosine_variant(double theta, double a_sq);

// Smallest nearest-neighbor distance of the infinite lattice at unit spacing.
double min_site_spacing_unit(LatticeKind kind, double theta, double s);

// The four pairwise distances inside one oblique plaquette under the
// constraint of fixed impurity-to-nearest-neighbor distance. d1, d2 are the
// sides, d3/d4 the short/long diagonals.
std::array<double, 4> plaquette_distances_oblique(double theta, double a_sq);

EmitterArray build_lattice(const LatticeSpec& spec);

// The central plaquette of the lattice described by spec (pure function of
// the spec; used for impurity placement, position maps and Voronoi overlays).
PlaquetteFrame reference_plaquette(const LatticeSpec& spec);

NeighborStats nearest_neighbor_stats(const EmitterArray& array,
                                     double rel_tol = 1e-6);

// Removes the lattice atom nearest to `target` (2D, z ignored) and returns
// its position. Used by the vacancy experiments.
Eigen::Vector3d remove_site_nearest(EmitterArray& array,
                                    const Eigen::Vector2d& target);

void translate(EmitterArray& array, const Eigen::Vector3d& shift);

}  // namespace latimp
