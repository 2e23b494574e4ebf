#include "latimp/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "latimp/solver.hpp"

namespace latimp {
namespace {

double spectral_radius(const CouplingSystem& system, double delta) {
    Eigen::VectorXcd lambda;
    if (system.eigen_cache) {
        lambda = system.eigen_cache->eigenvalues;
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(system.H_cpl, false);
        if (solver.info() != Eigen::Success)
            throw NumericalError("spectral radius: eigendecomposition failed");
        lambda = solver.eigenvalues();
    }
    const Complex shift(delta, 0.5 * system.gamma_L);
    double radius = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k)
        radius = std::max(radius, std::abs(lambda(k) - shift));
    return radius;
}

}  // namespace

Trajectory integrate_amplitudes(const CouplingSystem& system, double delta,
                                double gamma_I, double t_max, double dt,
                                const IntegrateOptions& opt) {
    if (!(t_max > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("t_max and dt must be positive");
    const double radius = spectral_radius(system, delta);
    const double dt_max = 0.05 / std::max(radius, system.gamma_L);
    if (dt > dt_max * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " violates the step bound " << dt_max
            << " set by the fastest lattice scale";
        throw std::invalid_argument(msg.str());
    }

    const auto n = system.size();
    const Eigen::MatrixXcd h = system.lattice_block(delta);
    const Eigen::VectorXcd& c_li = system.C_LI;
    const Complex mi(0.0, -1.0);

    const auto steps = static_cast<long long>(std::ceil(t_max / dt - 1e-12));
    const int stride = std::max(1, opt.store_stride);

    Trajectory traj;
    traj.dt = dt;
    traj.delta = delta;
    traj.gamma_I = gamma_I;
    const auto stored = static_cast<size_t>(steps / stride + 2);
    traj.times.reserve(stored);
    traj.impurity_amp.reserve(stored);
    traj.total_excitation.reserve(stored);

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    Complex c(1.0, 0.0);

    Eigen::VectorXcd kb1(n), kb2(n), kb3(n), kb4(n), tmp(n);
    Complex kc1, kc2, kc3, kc4;

    auto deriv = [&](const Eigen::VectorXcd& bb, const Complex& cc,
                     Eigen::VectorXcd& db, Complex& dc) {
        db.noalias() = h * bb;
        db.noalias() += c_li * cc;
        db *= mi;
        dc = mi * (c_li.transpose() * bb).value() - 0.5 * gamma_I * cc;
    };

    auto store = [&](double t) {
        traj.times.push_back(t);
        traj.impurity_amp.push_back(c);
        traj.total_excitation.push_back(std::norm(c) + b.squaredNorm());
        if (opt.store_lattice)
            traj.lattice_amps.emplace_back(b.data(), b.data() + n);
    };

    double excitation = std::norm(c) + b.squaredNorm();
    store(0.0);

    for (long long step = 0; step < steps; ++step) {
        deriv(b, c, kb1, kc1);
        tmp = b + 0.5 * dt * kb1;
        deriv(tmp, c + 0.5 * dt * kc1, kb2, kc2);
        tmp = b + 0.5 * dt * kb2;
        deriv(tmp, c + 0.5 * dt * kc2, kb3, kc3);
        tmp = b + dt * kb3;
        deriv(tmp, c + dt * kc3, kb4, kc4);
        b += (dt / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        c += (dt / 6.0) * (kc1 + 2.0 * (kc2 + kc3) + kc4);

        const double p = std::norm(c) + b.squaredNorm();
        if (!std::isfinite(p))
            throw NumericalError("integrate_amplitudes: non-finite amplitudes");
        traj.max_step_excitation_gain =
            std::max(traj.max_step_excitation_gain, p - excitation);
        excitation = p;

        if ((step + 1) % stride == 0 || step + 1 == steps)
            store((step + 1) * dt);
    }
    return traj;
}

double fit_decay_rate(const Trajectory& trajectory, double t_start_fraction) {
    if (trajectory.times.size() < 4)
        throw std::invalid_argument("trajectory too short to fit");
    if (!(t_start_fraction >= 0.0 && t_start_fraction < 1.0))
        throw std::invalid_argument("t_start_fraction must lie in [0, 1)");
    const double t_end = trajectory.times.back();
    const double t_start = t_start_fraction * t_end;

    std::vector<double> t, y;
    for (size_t i = 0; i < trajectory.times.size(); ++i) {
        if (trajectory.times[i] < t_start) continue;
        const double p = std::norm(trajectory.impurity_amp[i]);
        if (p <= 0.0)
            throw NumericalError("fit_decay_rate: amplitude vanished in window");
        t.push_back(trajectory.times[i]);
        y.push_back(std::log(p));
    }
    if (t.size() < 4)
        throw std::invalid_argument("fit window contains too few samples");
    if (y.front() - y.back() < 2.0 * std::log(10.0)) {
        std::ostringstream msg;
        msg << "insufficient decay in fit window: |c|^2 drops by "
            << (y.front() - y.back()) / std::log(10.0)
            << " decades, need at least 2";
        throw NumericalError(msg.str());
    }

    const double n = static_cast<double>(t.size());
    double st = 0.0, sy = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
    }
    const double mt = st / n, my = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sty / stt;
    double ss_res = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - (my + slope * (t[i] - mt));
        ss_res += r * r;
    }
    const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    if (r2 < 0.99) {
        std::ostringstream msg;
        msg << "oscillation-dominated fit window (R^2 = " << r2 << ")";
        throw NumericalError(msg.str());
    }
    return -slope;
}

}  // namespace latimp
