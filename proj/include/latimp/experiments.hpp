// experiments.hpp — scripted pipelines: geometry comparison batch, vacancy
// scan, optimal-placement maps and the plaquette coupling table.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "latimp/geometry.hpp"
#include "latimp/solver.hpp"
#include "latimp/voronoi.hpp"

namespace latimp {

// Spacing convention for substitutional cases: keep the rescaled spacing of
// the interstitial counterpart, or rescale so the impurity-to-neighbor
// distance equals the square reference spacing.
enum class SubstitutionalSpacing { rescaled, reference };

struct CaseConventions {
    TriangularSpacing triangular = TriangularSpacing::cosine;
    SubstitutionalSpacing substitutional = SubstitutionalSpacing::rescaled;
    double gamma_I = 1.0;  // in gamma_L
};

struct Table1Config {
    double a_sq = 0.15;
    int n_atoms = 100;
    double theta = 0.3 * std::numbers::pi;
    double s = 1.5;
    // Batch minima are reported on the sampled grid; sub-grid refinement digs
    // into notches right at the band edge that sampled reference curves do
    // not resolve.
    SweepOptions sweep{.refine = false};
    CaseConventions conventions;
    int threads = 0;
};

struct GeometryComparisonRecord {
    LatticeKind kind = LatticeKind::square;
    Placement placement = Placement::interstitial;
    std::string label;
    int n_nn = 0;
    int n_d = 0;
    double gamma_eff_min = 0.0;
    double delta_min = 0.0;
    std::optional<double> band_edge;
    std::optional<double> d_be;
    double spacing = 0.0;
    double impurity_nn_distance = 0.0;
    std::string error;  // non-empty when this case failed; batch continues
};

// The lattice spec one batch case runs with (spacing resolved per the
// conventions).
LatticeSpec lattice_spec_for_case(LatticeKind kind, Placement placement,
                                  const Table1Config& config);

// All ten (kind, placement) cases; interstitial rows first.
std::vector<GeometryComparisonRecord> run_table1(const Table1Config& config);

struct VacancyScanConfig {
    double a = 0.15;
    int n_atoms = 100;
    // Impurity offsets from the plaquette center, in units of the spacing.
    std::vector<Eigen::Vector2d> offsets = {
        {0.0, 0.0}, {-0.1, -0.1}, {-0.2, -0.2}, {-0.3, -0.3}, {-0.5, -0.5}};
    SweepOptions sweep{.refine = false};
    double gamma_I = 1.0;
    int threads = 0;
};

struct VacancyScanResult {
    std::vector<SweepCurve> curves;  // one per offset
    std::vector<Eigen::Vector2d> impurity_positions;
    Eigen::Vector2d vacancy_position = Eigen::Vector2d::Zero();
};

// Square lattice with the atom at the central plaquette's far corner removed
// and the impurity marched along the diagonal toward the vacancy.
VacancyScanResult run_vacancy_scan(const VacancyScanConfig& config);

struct PositionMapConfig {
    LatticeSpec spec;  // interstitial
    int grid_n = 41;
    SweepOptions sweep{.refine = false};
    double gamma_I = 1.0;
    double optima_rel_tol = 1e-3;
    int threads = 0;
};

struct PositionMap {
    int nx = 0, ny = 0;
    PlaquetteFrame frame;
    std::vector<Eigen::Vector2d> grid_fractions;  // row-major, size nx*ny
    std::vector<double> gamma_min;      // NaN where masked (atom or outside)
    std::vector<double> opt_detuning;   // NaN where masked
    std::vector<Eigen::Vector2d> optima;          // Cartesian global minima
    std::vector<Eigen::Vector2d> optima_fractions;
    VoronoiDiagram voronoi;
    // 1D cut through the first optimum along the longest Voronoi edge.
    std::vector<double> cut_t;
    std::vector<Eigen::Vector2d> cut_points;
    std::vector<double> cut_gamma;
    Eigen::Vector2d cut_direction = Eigen::Vector2d::UnitX();
};

PositionMap run_position_map(const PositionMapConfig& config);

struct PlaquetteCouplingRow {
    double theta = 0.0;
    std::array<double, 4> distances{};
    std::array<double, 4> J{};
    std::array<double, 4> Gamma{};
};

std::vector<PlaquetteCouplingRow> run_plaquette_couplings(double theta_min,
                                                          double theta_max,
                                                          int n,
                                                          double a_sq = 0.15);

// Reference values the comparison report is generated against.
struct ReferenceRow {
    LatticeKind kind;
    Placement placement;
    int n_nn;
    int n_d;
    double gamma_eff_min;
    double d_be;
};
const std::vector<ReferenceRow>& reference_table();

}  // namespace latimp
