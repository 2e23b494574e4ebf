// couplings.hpp — vacuum Green's tensor, light-induced dipole-dipole
// couplings and assembly of the non-Hermitian system matrices.
#pragma once

#include <Eigen/Dense>

#include <optional>

#include "latimp/common.hpp"
#include "latimp/geometry.hpp"

namespace latimp {

struct PairCoupling {
    double J = 0.0;      // coherent exchange [gamma_L]
    double Gamma = 0.0;  // collective decay  [gamma_L]
};

// Eigendecomposition of the coupling block H_cpl, shared by all detunings:
// H_L(delta) = H_cpl - (delta + i gamma_L/2) I.
struct EigenCache {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd V;      // eigenvectors, columns
    Eigen::MatrixXcd V_inv;
    double condition = 0.0;  // condition estimate of V
    bool usable = false;     // condition below the fallback threshold
};

struct CouplingSystem {
    // N_L x N_L complex symmetric, zero diagonal, entries J_ij - i Gamma_ij/2.
    Eigen::MatrixXcd H_cpl;
    // Impurity coupling vector, entries J_is - i Gamma_is/2.
    Eigen::VectorXcd C_LI;
    double gamma_L = kGammaL;
    double gamma_I = kGammaL;
    double omega = kOmega;
    std::optional<EigenCache> eigen_cache;

    Eigen::Index size() const { return H_cpl.rows(); }
    // Full lattice block at a given detuning.
    Eigen::MatrixXcd lattice_block(double delta) const;
};

// Free-space Green's tensor at separation r_vec, contact term excluded.
// Throws for |r_vec| < 1e-9 (coincident emitters).
Eigen::Matrix3cd green_tensor(const Eigen::Vector3d& r_vec, double omega = kOmega);

// General contraction d_i^dag . G . d_j; dipoles must be unit-normalized.
PairCoupling pair_coupling_general(const Eigen::Vector3cd& d_i,
                                   const Eigen::Vector3cd& d_j,
                                   const Eigen::Vector3d& r_vec,
                                   double gamma_i, double gamma_j,
                                   double omega = kOmega);

// Closed forms for circular polarization in the lattice plane; depends on
// the distance only.
PairCoupling pair_coupling_circular(double r, double gamma_i, double gamma_j,
                                    double omega = kOmega);

// The fixed circular dipole (1, i, 0)/sqrt(2).
Eigen::Vector3cd circular_dipole();

Eigen::VectorXcd impurity_coupling_vector(
    const std::vector<Eigen::Vector3d>& sites, const Eigen::Vector3d& impurity,
    double gamma_L, double gamma_I, double omega = kOmega);

CouplingSystem assemble_system(const EmitterArray& array);

// Real symmetric dissipator matrix of the lattice block: diagonal gamma_L,
// off-diagonal Gamma_ij. Physical lattices give a positive semidefinite one.
Eigen::MatrixXd gamma_matrix(const EmitterArray& array);

}  // namespace latimp
