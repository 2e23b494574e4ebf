// solver.hpp — adiabatic elimination of the lattice: self-energy, effective
// decay rate, detuning sweeps with minimum/band-edge detection, and the
// eigendecomposition fast path for shifted solves.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "latimp/couplings.hpp"

namespace latimp {

struct SelfEnergy {
    Complex sigma{0.0, 0.0};  // Sigma_I [gamma_L]
    double delta = 0.0;       // detuning it was evaluated at
};

struct SweepOptions {
    double delta_min = -5.0;
    double delta_max = 15.0;
    int n_points = 2001;
    bool refine = true;        // golden-section refinement of the minimum
    double refine_tol = 1e-4;  // |delta| tolerance of the refinement
    double resonance_factor = 10.0;  // band-edge peak threshold, in gamma_I
};

struct SweepCurve {
    std::vector<double> detunings;
    std::vector<double> gamma_eff;  // NaN where the solve was refused
    double delta_min = 0.0;         // location of the minimum
    double gamma_min = 0.0;
    std::optional<double> band_edge;  // largest strongly resonant detuning
    std::optional<double> d_be;       // max(0, delta_min - band_edge)
    bool refined = false;
    bool fallback_used = false;  // eigen path fell back to direct solves
};

// Sigma_I = -C^T H_L(delta)^{-1} C via a partial-pivot LU solve. Refuses with
// ResonanceError when the block is singular to working precision.
SelfEnergy self_energy(const CouplingSystem& system, double delta);

// Gamma_eff = gamma_I - 2 Im Sigma_I.
double effective_decay(double gamma_I, const SelfEnergy& sigma);
// Collective frequency shift Re Sigma_I (auxiliary output).
double collective_shift(const SelfEnergy& sigma);

// One-time eigendecomposition of H_cpl; no-op if already present.
const EigenCache& ensure_eigen_cache(CouplingSystem& system);

// Projected pole weights w_k = (V^T C)_k (V^{-1} C)_k for a coupling vector.
Eigen::VectorXcd mode_weights(const EigenCache& cache, const Eigen::VectorXcd& c);

// Sigma_I(delta) = -sum_k w_k / (lambda_k - delta - i gamma_L/2).
Complex self_energy_from_weights(const Eigen::VectorXcd& eigenvalues,
                                 const Eigen::VectorXcd& weights,
                                 double gamma_L, double delta);

// Band edge from curve samples: local maxima with Gamma_eff >= factor *
// gamma_I; returns the largest such detuning, or nullopt when no resonance
// was sampled.
std::optional<double> detect_band_edge(const std::vector<double>& detunings,
                                       const std::vector<double>& gamma_eff,
                                       double gamma_I, double factor = 10.0);

// Band edge from pole data: a mode resonates if its on-resonance peak
// gamma_I + 4 Re(w_k) / (gamma_L - 2 Im lambda_k) crosses the threshold.
// Catches resonances that are much narrower than any sampling grid.
std::optional<double> pole_band_edge(const Eigen::VectorXcd& eigenvalues,
                                     const Eigen::VectorXcd& weights,
                                     double gamma_L, double gamma_I,
                                     double factor = 10.0);

// Dense-solve sweep; band edge detected from the samples.
SweepCurve detuning_sweep(const CouplingSystem& system, const SweepOptions& opt);

// Eigen-cache sweep: one decomposition, O(N) per detuning; band edge from
// pole data. Falls back to per-point direct solves (with fallback_used set)
// when the eigenvector matrix is ill-conditioned.
SweepCurve eigen_sweep(CouplingSystem& system, const SweepOptions& opt);

// Same fast path for a caller-supplied coupling vector (position maps reuse
// one lattice decomposition for many impurity positions).
SweepCurve eigen_sweep_with_coupling(const CouplingSystem& system,
                                     const Eigen::VectorXcd& c_li,
                                     const SweepOptions& opt);

}  // namespace latimp
