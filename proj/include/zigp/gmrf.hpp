#pragma once

#include <Eigen/Sparse>
#include <memory>

#include "zigp/mesh.hpp"
#include "zigp/rng.hpp"

namespace zigp {

// Latent-field hyperparameters on the user scale: `range` is the distance at
// which correlation has dropped to about 0.1, `sd` the marginal standard
// deviation. Internally the field is parameterized by (log kappa, log tau)
// with kappa = sqrt(8)/range and tau^2 = 1 / (4 pi kappa^2 sd^2).
struct FieldHyper {
    double range = 1.0;
    double sd = 1.0;
};

inline double kappa_from_range(double range) { return std::sqrt(8.0) / range; }
inline double range_from_kappa(double kappa) { return std::sqrt(8.0) / kappa; }
inline double tau_from(double kappa, double sd) {
    return 1.0 / (std::sqrt(4.0 * M_PI) * kappa * sd);
}
inline double sd_from(double kappa, double tau) {
    return 1.0 / (std::sqrt(4.0 * M_PI) * kappa * tau);
}

// Sparse precision of the nodal field weights, with the half log-determinant
// cached from the sparse Cholesky factorization.
struct SparsePrecision {
    Eigen::SparseMatrix<double> q;
    double log_det_half = 0.0;
    std::shared_ptr<const Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> chol;

    int n() const { return static_cast<int>(q.rows()); }
};

// Q = tau^2 (kappa^4 C + 2 kappa^2 G + G C^-1 G), the planar Whittle-Matern
// (alpha = 2) discretization on the mesh basis.
SparsePrecision spde_precision(const FemMatrices& fem, const FieldHyper& hyper);
SparsePrecision spde_precision_internal(const FemMatrices& fem, double log_kappa, double log_tau);

// Factorizes an explicitly given precision matrix (test and oracle entry).
SparsePrecision make_precision(const Eigen::SparseMatrix<double>& q);

// log N(w; 0, Q^-1) = log|Q|/2 - (N/2) log(2 pi) - w'Qw/2.
double gaussian_log_density(const Eigen::VectorXd& w, const SparsePrecision& prec);

// Exact draw from N(0, Q^-1) through the cached factorization.
Eigen::VectorXd sample_field(const SparsePrecision& prec, Rng& rng);

}  // namespace zigp
