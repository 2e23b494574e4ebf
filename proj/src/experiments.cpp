#include "latimp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latimp/parallel.hpp"

namespace latimp {
namespace {

Eigen::Vector3d lift(const Eigen::Vector2d& p) { return {p.x(), p.y(), 0.0}; }

std::vector<Eigen::Vector2d> flatten(const std::vector<Eigen::Vector3d>& v) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(v.size());
    for (const auto& p : v) out.push_back(p.head<2>());
    return out;
}

// Bounding box of a polygon.
std::pair<Eigen::Vector2d, Eigen::Vector2d> bbox(
    const std::vector<Eigen::Vector2d>& poly) {
    Eigen::Vector2d lo = poly.front(), hi = poly.front();
    for (const auto& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

}  // namespace

LatticeSpec lattice_spec_for_case(LatticeKind kind, Placement placement,
                                  const Table1Config& config) {
    LatticeSpec spec;
    spec.kind = kind;
    spec.placement = placement;
    spec.n_atoms = config.n_atoms;
    spec.theta = config.theta;
    spec.scale = config.s;
    if (placement == Placement::substitutional &&
        config.conventions.substitutional == SubstitutionalSpacing::reference) {
        spec.spacing =
            config.a_sq / min_site_spacing_unit(kind, config.theta, config.s);
    } else {
        spec.spacing = rescaled_spacing(kind, config.theta, config.s,
                                        config.a_sq,
                                        config.conventions.triangular);
    }
    return spec;
}

std::vector<GeometryComparisonRecord> run_table1(const Table1Config& config) {
    const std::array<LatticeKind, 5> kinds = {
        LatticeKind::square, LatticeKind::triangular, LatticeKind::oblique,
        LatticeKind::rectangular, LatticeKind::honeycomb};
    const std::array<Placement, 2> placements = {Placement::interstitial,
                                                 Placement::substitutional};
    std::vector<GeometryComparisonRecord> records(10);

    parallel_for(10, config.threads, [&](int idx) {
        const Placement placement = placements[idx / 5];
        const LatticeKind kind = kinds[idx % 5];
        GeometryComparisonRecord& rec = records[idx];
        rec.kind = kind;
        rec.placement = placement;
        rec.label = to_string(kind) + (placement == Placement::interstitial
                                           ? " int."
                                           : " subst.");
        try {
            const LatticeSpec spec = lattice_spec_for_case(kind, placement, config);
            rec.spacing = spec.spacing;
            EmitterArray array = build_lattice(spec);
            array.gamma_I = config.conventions.gamma_I;
            const NeighborStats stats = nearest_neighbor_stats(array);
            rec.n_nn = stats.n_nearest;
            rec.n_d = stats.n_distinct_distances;
            rec.impurity_nn_distance = stats.d_min;
            CouplingSystem system = assemble_system(array);
            const SweepCurve curve = eigen_sweep(system, config.sweep);
            rec.gamma_eff_min = curve.gamma_min;
            rec.delta_min = curve.delta_min;
            rec.band_edge = curve.band_edge;
            rec.d_be = curve.d_be;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    return records;
}

VacancyScanResult run_vacancy_scan(const VacancyScanConfig& config) {
    LatticeSpec spec;
    spec.kind = LatticeKind::square;
    spec.spacing = config.a;
    spec.n_atoms = config.n_atoms;
    spec.placement = Placement::interstitial;

    EmitterArray base = build_lattice(spec);
    base.gamma_I = config.gamma_I;
    const PlaquetteFrame frame = reference_plaquette(spec);
    const Eigen::Vector2d center = frame.center();

    VacancyScanResult result;
    // Remove the plaquette corner the offsets march toward.
    const Eigen::Vector2d target =
        center + Eigen::Vector2d(-0.5 * config.a, -0.5 * config.a);
    result.vacancy_position = remove_site_nearest(base, target).head<2>();

    base.impurity_position = lift(center);
    CouplingSystem system = assemble_system(base);
    ensure_eigen_cache(system);

    const int n = static_cast<int>(config.offsets.size());
    result.curves.resize(n);
    result.impurity_positions.resize(n);
    parallel_for(n, config.threads, [&](int i) {
        const Eigen::Vector2d pos = center + config.a * config.offsets[i];
        result.impurity_positions[i] = pos;
        const Eigen::VectorXcd c = impurity_coupling_vector(
            base.lattice_positions, lift(pos), base.gamma_L, base.gamma_I,
            base.omega);
        result.curves[i] = eigen_sweep_with_coupling(system, c, config.sweep);
    });
    return result;
}

PositionMap run_position_map(const PositionMapConfig& config) {
    if (config.spec.placement != Placement::interstitial)
        throw std::invalid_argument("position maps need an interstitial spec");
    if (config.grid_n < 3)
        throw std::invalid_argument("grid_n must be at least 3");

    EmitterArray array = build_lattice(config.spec);
    array.gamma_I = config.gamma_I;
    CouplingSystem system = assemble_system(array);
    ensure_eigen_cache(system);

    PositionMap map;
    map.frame = reference_plaquette(config.spec);
    map.nx = map.ny = config.grid_n;

    const bool boxed = map.frame.shape == PlaquetteFrame::Shape::hexagon;
    const auto [lo, hi] = bbox(map.frame.polygon);
    auto cell_point = [&, lo = lo, hi = hi](const Eigen::Vector2d& frac) {
        if (boxed)
            return Eigen::Vector2d(lo + frac.cwiseProduct(hi - lo));
        return map.frame.point(frac);
    };

    const int total = map.nx * map.ny;
    map.grid_fractions.resize(total);
    map.gamma_min.assign(total, std::numeric_limits<double>::quiet_NaN());
    map.opt_detuning.assign(total, std::numeric_limits<double>::quiet_NaN());

    auto eval_position = [&](const Eigen::Vector2d& p,
                             double& gamma, double& delta) {
        for (const auto& site : array.lattice_positions)
            if ((site.head<2>() - p).norm() < 1e-7) return;  // masked: on an atom
        if (!map.frame.contains(p, 1e-9)) return;            // masked: outside
        const Eigen::VectorXcd c = impurity_coupling_vector(
            array.lattice_positions, lift(p), array.gamma_L, array.gamma_I,
            array.omega);
        const SweepCurve curve =
            eigen_sweep_with_coupling(system, c, config.sweep);
        gamma = curve.gamma_min;
        delta = curve.delta_min;
    };

    parallel_for(total, config.threads, [&](int idx) {
        const int ix = idx % map.nx;
        const int iy = idx / map.nx;
        const Eigen::Vector2d frac(
            static_cast<double>(ix) / (map.nx - 1),
            static_cast<double>(iy) / (map.ny - 1));
        map.grid_fractions[idx] = frac;
        eval_position(cell_point(frac), map.gamma_min[idx],
                      map.opt_detuning[idx]);
    });

    // Global minima: qualifying cells clustered over the 8-neighborhood, one
    // representative per cluster.
    double best = std::numeric_limits<double>::infinity();
    for (double g : map.gamma_min)
        if (std::isfinite(g)) best = std::min(best, g);
    if (!std::isfinite(best))
        throw NumericalError("position map: every cell was masked");
    std::vector<int> qualifying;
    for (int idx = 0; idx < total; ++idx)
        if (std::isfinite(map.gamma_min[idx]) &&
            map.gamma_min[idx] <= best * (1.0 + config.optima_rel_tol))
            qualifying.push_back(idx);
    std::vector<int> cluster(total, -1);
    int n_clusters = 0;
    for (int seed : qualifying) {
        if (cluster[seed] >= 0) continue;
        std::vector<int> stack{seed};
        cluster[seed] = n_clusters;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            const int cx = cur % map.nx, cy = cur / map.nx;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= map.nx || ny >= map.ny)
                        continue;
                    const int nidx = ny * map.nx + nx;
                    if (cluster[nidx] >= 0 ||
                        !std::binary_search(qualifying.begin(),
                                            qualifying.end(), nidx))
                        continue;
                    cluster[nidx] = n_clusters;
                    stack.push_back(nidx);
                }
        }
        ++n_clusters;
    }
    std::vector<int> representative(n_clusters, -1);
    for (int idx : qualifying) {
        int& rep = representative[cluster[idx]];
        if (rep < 0 || map.gamma_min[idx] < map.gamma_min[rep]) rep = idx;
    }
    for (int rep : representative) {
        map.optima_fractions.push_back(map.grid_fractions[rep]);
        map.optima.push_back(cell_point(map.grid_fractions[rep]));
    }

    map.voronoi = voronoi_partition(flatten(array.lattice_positions),
                                    map.frame.polygon, config.grid_n);

    // 1D cut: through the first optimum, parallel to the longest Voronoi edge.
    if (!map.voronoi.edges.empty() && !map.optima.empty()) {
        double longest = -1.0;
        for (const auto& [a, b] : map.voronoi.edges) {
            const double len = (b - a).norm();
            if (len > longest) {
                longest = len;
                map.cut_direction = (b - a).normalized();
            }
        }
        const Eigen::Vector2d anchor = map.optima.front();
        // span of the region along the cut direction through the anchor
        double t_lo = 0.0, t_hi = 0.0;
        const auto [blo, bhi] = bbox(map.frame.polygon);
        const double diag = (bhi - blo).norm();
        for (double t = -diag; t <= diag; t += diag / 4096.0) {
            if (map.frame.contains(anchor + t * map.cut_direction, 1e-9)) {
                t_lo = std::min(t_lo, t);
                t_hi = std::max(t_hi, t);
            }
        }
        for (int k = 0; k < config.grid_n; ++k) {
            const double t =
                t_lo + (t_hi - t_lo) * k / static_cast<double>(config.grid_n - 1);
            const Eigen::Vector2d p = anchor + t * map.cut_direction;
            double gamma = std::numeric_limits<double>::quiet_NaN();
            double delta = std::numeric_limits<double>::quiet_NaN();
            eval_position(p, gamma, delta);
            if (!std::isfinite(gamma)) continue;
            map.cut_t.push_back(t);
            map.cut_points.push_back(p);
            map.cut_gamma.push_back(gamma);
        }
    }
    return map;
}

std::vector<PlaquetteCouplingRow> run_plaquette_couplings(double theta_min,
                                                          double theta_max,
                                                          int n, double a_sq) {
    if (!(theta_min > 0.0 && theta_max < std::numbers::pi &&
          theta_min <= theta_max))
        throw std::invalid_argument("theta range must lie inside (0, pi)");
    if (n < 1) throw std::invalid_argument("need at least one sample");
    std::vector<PlaquetteCouplingRow> rows(n);
    for (int i = 0; i < n; ++i) {
        const double theta =
            n == 1 ? theta_min
                   : theta_min + (theta_max - theta_min) * i / (n - 1.0);
        rows[i].theta = theta;
        rows[i].distances = plaquette_distances_oblique(theta, a_sq);
        for (int k = 0; k < 4; ++k) {
            const PairCoupling pc =
                pair_coupling_circular(rows[i].distances[k], kGammaL, kGammaL);
            rows[i].J[k] = pc.J;
            rows[i].Gamma[k] = pc.Gamma;
        }
    }
    return rows;
}

const std::vector<ReferenceRow>& reference_table() {
    static const std::vector<ReferenceRow> table = {
        {LatticeKind::square, Placement::interstitial, 4, 2, 5.94e-5, 2.65},
        {LatticeKind::triangular, Placement::interstitial, 3, 1, 1.03e-4, 5.845},
        {LatticeKind::oblique, Placement::interstitial, 2, 1, 5.38e-4, 2.32},
        {LatticeKind::rectangular, Placement::interstitial, 4, 3, 1.74e-4, 1.42},
        {LatticeKind::honeycomb, Placement::interstitial, 6, 4, 2.9e-2, 0.0},
        {LatticeKind::square, Placement::substitutional, 4, 2, 2.63e-4, 0.0},
        {LatticeKind::triangular, Placement::substitutional, 6, 4, 1.3e-2, 0.0},
        {LatticeKind::oblique, Placement::substitutional, 2, 1, 8.54e-3, 0.0},
        {LatticeKind::rectangular, Placement::substitutional, 2, 1, 1.51e-3, 0.0},
        {LatticeKind::honeycomb, Placement::substitutional, 3, 1, 7.78e-3, 0.0},
    };
    return table;
}

}  // namespace latimp
