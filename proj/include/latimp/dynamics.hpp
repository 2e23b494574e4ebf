// dynamics.hpp — full single-excitation time evolution; the independent
// oracle for the adiabatic elimination.
#pragma once

#include <complex>
#include <vector>

#include "latimp/couplings.hpp"

namespace latimp {

struct Trajectory {
    std::vector<double> times;
    std::vector<Complex> impurity_amp;              // c(t)
    std::vector<std::vector<Complex>> lattice_amps; // b(t), only if stored
    std::vector<double> total_excitation;           // P(t) = |c|^2 + sum |b|^2
    double max_step_excitation_gain = 0.0;  // largest per-step increase of P
    double dt = 0.0;
    double delta = 0.0;
    double gamma_I = 0.0;
};

struct IntegrateOptions {
    int store_stride = 1;        // keep every k-th step
    bool store_lattice = false;  // keep the per-atom amplitudes
};

// Fixed-step RK4 integration of
//   b' = -i (H_L(delta) b + C c),   c' = -i C^T b - gamma_I/2 c,
// from c(0) = 1, b(0) = 0. dt must satisfy
//   dt <= 0.05 / max(spectral radius of H_L(delta), gamma_L).
Trajectory integrate_amplitudes(const CouplingSystem& system, double delta,
                                double gamma_I, double t_max, double dt,
                                const IntegrateOptions& opt = {});

// Least-squares slope of ln |c(t)|^2 over the trailing window
// [t_start_fraction * t_end, t_end]. Requires the window to span at least
// two decades of decay and a clean fit (R^2 >= 0.99).
double fit_decay_rate(const Trajectory& trajectory,
                      double t_start_fraction = 0.6);

}  // namespace latimp
