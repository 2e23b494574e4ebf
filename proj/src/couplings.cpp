#include "latimp/couplings.hpp"

#include <cmath>
#include <sstream>

namespace latimp {

Eigen::Matrix3cd green_tensor(const Eigen::Vector3d& r_vec, double omega) {
    const double r = r_vec.norm();
    if (r < 1e-9)
        throw std::domain_error("green_tensor: emitters closer than 1e-9 lambda");
    const double x = omega * r;
    const Complex I(0.0, 1.0);
    const Complex pref = std::exp(I * x) / (4.0 * std::numbers::pi * r);
    const Complex diag = 1.0 + I / x - 1.0 / (x * x);
    const Complex proj = 1.0 + 3.0 * I / x - 3.0 / (x * x);
    const Eigen::Vector3d rhat = r_vec / r;
    Eigen::Matrix3cd g;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            g(a, b) = pref * (diag * (a == b ? 1.0 : 0.0) -
                              proj * rhat(a) * rhat(b));
    return g;
}

PairCoupling pair_coupling_general(const Eigen::Vector3cd& d_i,
                                   const Eigen::Vector3cd& d_j,
                                   const Eigen::Vector3d& r_vec,
                                   double gamma_i, double gamma_j,
                                   double omega) {
    const Eigen::Matrix3cd g = green_tensor(r_vec, omega);
    const double pref = 3.0 * std::numbers::pi *
                        std::sqrt(gamma_i * gamma_j) / omega;
    const Complex re_part = d_i.dot(g.real().cast<Complex>() * d_j);
    const Complex im_part = d_i.dot(g.imag().cast<Complex>() * d_j);
    return {-pref * re_part.real(), 2.0 * pref * im_part.real()};
}

PairCoupling pair_coupling_circular(double r, double gamma_i, double gamma_j,
                                    double omega) {
    if (!(r > 0.0)) throw std::domain_error("pair_coupling_circular: r <= 0");
    const double x = omega * r;
    const double g = std::sqrt(gamma_i * gamma_j);
    const double sx = std::sin(x), cx = std::cos(x);
    return {-(3.0 * g / (8.0 * x)) * (cx + sx / x + cx / (x * x)),
            (3.0 * g / (4.0 * x)) * (sx - cx / x + sx / (x * x))};
}

Eigen::Vector3cd circular_dipole() {
    const double inv = 1.0 / std::numbers::sqrt2;
    return {Complex(inv, 0.0), Complex(0.0, inv), Complex(0.0, 0.0)};
}

Eigen::VectorXcd impurity_coupling_vector(
    const std::vector<Eigen::Vector3d>& sites, const Eigen::Vector3d& impurity,
    double gamma_L, double gamma_I, double omega) {
    Eigen::VectorXcd c(static_cast<Eigen::Index>(sites.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double r = (sites[i] - impurity).norm();
        PairCoupling pc;
        try {
            pc = pair_coupling_circular(r, gamma_L, gamma_I, omega);
        } catch (const std::domain_error&) {
            std::ostringstream msg;
            msg << "impurity coincides with lattice atom " << i;
            throw std::domain_error(msg.str());
        }
        c(i) = Complex(pc.J, -0.5 * pc.Gamma);
    }
    return c;
}

CouplingSystem assemble_system(const EmitterArray& array) {
    const auto n = static_cast<Eigen::Index>(array.lattice_positions.size());
    CouplingSystem system;
    system.gamma_L = array.gamma_L;
    system.gamma_I = array.gamma_I;
    system.omega = array.omega;
    system.H_cpl = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r =
                (array.lattice_positions[i] - array.lattice_positions[j]).norm();
            PairCoupling pc;
            try {
                pc = pair_coupling_circular(r, array.gamma_L, array.gamma_L,
                                            array.omega);
            } catch (const std::domain_error&) {
                std::ostringstream msg;
                msg << "coincident lattice atoms (" << i << ", " << j << ")";
                throw std::domain_error(msg.str());
            }
            const Complex v(pc.J, -0.5 * pc.Gamma);
            system.H_cpl(i, j) = v;
            system.H_cpl(j, i) = v;
        }
    }
    system.C_LI = impurity_coupling_vector(array.lattice_positions,
                                           array.impurity_position,
                                           array.gamma_L, array.gamma_I,
                                           array.omega);
    return system;
}

Eigen::MatrixXcd CouplingSystem::lattice_block(double delta) const {
    Eigen::MatrixXcd h = H_cpl;
    h.diagonal().array() -= Complex(delta, 0.5 * gamma_L);
    return h;
}

Eigen::MatrixXd gamma_matrix(const EmitterArray& array) {
    const auto n = static_cast<Eigen::Index>(array.lattice_positions.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    g.diagonal().setConstant(array.gamma_L);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r =
                (array.lattice_positions[i] - array.lattice_positions[j]).norm();
            const double v =
                pair_coupling_circular(r, array.gamma_L, array.gamma_L,
                                       array.omega)
                    .Gamma;
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

}  // namespace latimp
