#include "latimp/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace latimp {
namespace {

constexpr double kRcondRefusal = 1e-14;
constexpr double kConditionFallback = 1e8;

double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Shared sweep skeleton: evaluate on the grid, locate/refine the minimum.
SweepCurve sweep_impl(const SweepOptions& opt, double gamma_I,
                      const std::function<double(double)>& gamma_at) {
    if (!(opt.delta_min < opt.delta_max))
        throw std::invalid_argument("sweep window is empty");
    if (opt.n_points < 3)
        throw std::invalid_argument("sweep needs at least 3 points");

    SweepCurve curve;
    curve.detunings.resize(opt.n_points);
    curve.gamma_eff.resize(opt.n_points);
    const double step =
        (opt.delta_max - opt.delta_min) / static_cast<double>(opt.n_points - 1);
    int n_valid = 0;
    int k_min = -1;
    for (int k = 0; k < opt.n_points; ++k) {
        const double d = opt.delta_min + k * step;
        curve.detunings[k] = d;
        double g = std::numeric_limits<double>::quiet_NaN();
        try {
            g = gamma_at(d);
            ++n_valid;
        } catch (const ResonanceError&) {
            // leave NaN; resonant grid point
        }
        curve.gamma_eff[k] = g;
        if (std::isfinite(g) && (k_min < 0 || g < curve.gamma_eff[k_min]))
            k_min = k;
    }
    if (n_valid == 0)
        throw NumericalError("detuning sweep: every grid point was resonant");

    curve.delta_min = curve.detunings[k_min];
    curve.gamma_min = curve.gamma_eff[k_min];

    if (opt.refine) {
        const double lo = curve.detunings[std::max(0, k_min - 1)];
        const double hi =
            curve.detunings[std::min(opt.n_points - 1, k_min + 1)];
        auto safe = [&](double d) {
            try {
                return gamma_at(d);
            } catch (const ResonanceError&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        const double d_star = golden_minimize(safe, lo, hi, opt.refine_tol);
        const double g_star = safe(d_star);
        if (std::isfinite(g_star) && g_star < curve.gamma_min) {
            curve.delta_min = d_star;
            curve.gamma_min = g_star;
        }
        curve.refined = true;
    }
    return curve;
}

void finish_band_edge(SweepCurve& curve, std::optional<double> band_edge) {
    curve.band_edge = band_edge;
    if (band_edge)
        curve.d_be = std::max(0.0, curve.delta_min - *band_edge);
    else
        curve.d_be = std::nullopt;
}

}  // namespace

SelfEnergy self_energy(const CouplingSystem& system, double delta) {
    const Eigen::MatrixXcd h = system.lattice_block(delta);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(h);
    const double rc = lu.rcond();
    if (!(rc > kRcondRefusal)) {
        std::ostringstream msg;
        msg << "lattice block singular to working precision at delta = "
            << delta << " (rcond = " << rc << ")";
        throw ResonanceError(delta, msg.str());
    }
    const Eigen::VectorXcd y = lu.solve(system.C_LI);
    return {-(system.C_LI.transpose() * y).value(), delta};
}

double effective_decay(double gamma_I, const SelfEnergy& sigma) {
    return gamma_I - 2.0 * sigma.sigma.imag();
}

double collective_shift(const SelfEnergy& sigma) { return sigma.sigma.real(); }

const EigenCache& ensure_eigen_cache(CouplingSystem& system) {
    if (system.eigen_cache) return *system.eigen_cache;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(system.H_cpl, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition of the coupling block failed");
    EigenCache cache;
    cache.eigenvalues = solver.eigenvalues();
    cache.V = solver.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cache.V);
    const double rc = lu.rcond();
    cache.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    cache.V_inv = lu.solve(
        Eigen::MatrixXcd::Identity(cache.V.rows(), cache.V.cols()));
    cache.usable = cache.condition < kConditionFallback;
    system.eigen_cache = std::move(cache);
    return *system.eigen_cache;
}

Eigen::VectorXcd mode_weights(const EigenCache& cache,
                              const Eigen::VectorXcd& c) {
    return (cache.V.transpose() * c).cwiseProduct(cache.V_inv * c);
}

Complex self_energy_from_weights(const Eigen::VectorXcd& eigenvalues,
                                 const Eigen::VectorXcd& weights,
                                 double gamma_L, double delta) {
    const Complex shift(delta, 0.5 * gamma_L);
    Complex sigma(0.0, 0.0);
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k)
        sigma -= weights(k) / (eigenvalues(k) - shift);
    return sigma;
}

std::optional<double> detect_band_edge(const std::vector<double>& detunings,
                                       const std::vector<double>& gamma_eff,
                                       double gamma_I, double factor) {
    if (detunings.size() != gamma_eff.size() || detunings.size() < 3)
        throw std::invalid_argument("detect_band_edge needs >= 3 samples");
    std::optional<double> edge;
    const double threshold = factor * gamma_I;
    for (size_t i = 1; i + 1 < gamma_eff.size(); ++i) {
        const double g = gamma_eff[i];
        if (!std::isfinite(g) || !std::isfinite(gamma_eff[i - 1]) ||
            !std::isfinite(gamma_eff[i + 1]))
            continue;
        if (g >= gamma_eff[i - 1] && g >= gamma_eff[i + 1] && g >= threshold)
            edge = detunings[i];
    }
    return edge;
}

std::optional<double> pole_band_edge(const Eigen::VectorXcd& eigenvalues,
                                     const Eigen::VectorXcd& weights,
                                     double gamma_L, double gamma_I,
                                     double factor) {
    std::optional<double> edge;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
        const double width = gamma_L - 2.0 * eigenvalues(k).imag();
        if (!(width > 0.0)) continue;
        const double peak = gamma_I + 4.0 * weights(k).real() / width;
        if (peak < factor * gamma_I) continue;
        const double re = eigenvalues(k).real();
        if (!edge || re > *edge) edge = re;
    }
    return edge;
}

SweepCurve detuning_sweep(const CouplingSystem& system,
                          const SweepOptions& opt) {
    auto gamma_at = [&](double d) {
        return effective_decay(system.gamma_I, self_energy(system, d));
    };
    SweepCurve curve = sweep_impl(opt, system.gamma_I, gamma_at);
    finish_band_edge(curve,
                     detect_band_edge(curve.detunings, curve.gamma_eff,
                                      system.gamma_I, opt.resonance_factor));
    return curve;
}

SweepCurve eigen_sweep_with_coupling(const CouplingSystem& system,
                                     const Eigen::VectorXcd& c_li,
                                     const SweepOptions& opt) {
    if (!system.eigen_cache || !system.eigen_cache->usable)
        throw NumericalError(
            "eigen_sweep_with_coupling requires a usable eigen cache");
    const EigenCache& cache = *system.eigen_cache;
    const Eigen::VectorXcd w = mode_weights(cache, c_li);
    auto gamma_at = [&](double d) {
        return system.gamma_I -
               2.0 * self_energy_from_weights(cache.eigenvalues, w,
                                              system.gamma_L, d)
                         .imag();
    };
    SweepCurve curve = sweep_impl(opt, system.gamma_I, gamma_at);
    finish_band_edge(curve,
                     pole_band_edge(cache.eigenvalues, w, system.gamma_L,
                                    system.gamma_I, opt.resonance_factor));
    return curve;
}

SweepCurve eigen_sweep(CouplingSystem& system, const SweepOptions& opt) {
    const EigenCache& cache = ensure_eigen_cache(system);
    if (!cache.usable) {
        SweepCurve curve = detuning_sweep(system, opt);
        curve.fallback_used = true;
        return curve;
    }
    return eigen_sweep_with_coupling(system, system.C_LI, opt);
}

}  // namespace latimp
