#include "zigp/gmrf.hpp"

#include <cmath>

#include "zigp/errors.hpp"

namespace zigp {

SparsePrecision make_precision(const Eigen::SparseMatrix<double>& q) {
    SparsePrecision prec;
    prec.q = q;
    auto chol = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    chol->compute(prec.q);
    if (chol->info() != Eigen::Success)
        throw numeric_error("precision matrix is not positive definite");
    double ld = 0.0;
    Eigen::SparseMatrix<double> l(chol->matrixL());
    for (int i = 0; i < prec.q.rows(); ++i) ld += std::log(l.coeff(i, i));
    prec.log_det_half = ld;
    prec.chol = std::move(chol);
    return prec;
}

SparsePrecision spde_precision_internal(const FemMatrices& fem, double log_kappa,
                                        double log_tau) {
    const double kappa2 = std::exp(2.0 * log_kappa);
    const double tau2 = std::exp(2.0 * log_tau);

    Eigen::SparseMatrix<double> c_inv_g = fem.c_diag.cwiseInverse().asDiagonal() * fem.g;
    Eigen::SparseMatrix<double> g2 = fem.g * c_inv_g;
    Eigen::SparseMatrix<double> q =
        kappa2 * kappa2 * Eigen::SparseMatrix<double>(fem.c_diag.asDiagonal());
    q += 2.0 * kappa2 * fem.g;
    q += g2;
    q *= tau2;
    return make_precision(q);
}

SparsePrecision spde_precision(const FemMatrices& fem, const FieldHyper& hyper) {
    if (!(hyper.range > 0.0) || !(hyper.sd > 0.0))
        throw usage_error("spde_precision: range and sd must be positive");
    const double kappa = kappa_from_range(hyper.range);
    const double tau = tau_from(kappa, hyper.sd);
    return spde_precision_internal(fem, std::log(kappa), std::log(tau));
}

double gaussian_log_density(const Eigen::VectorXd& w, const SparsePrecision& prec) {
    if (w.size() != prec.q.rows())
        throw usage_error("gaussian_log_density: vector length does not match precision size");
    const double quad = w.dot(prec.q * w);
    const double n = static_cast<double>(w.size());
    return prec.log_det_half - 0.5 * n * std::log(2.0 * M_PI) - 0.5 * quad;
}

Eigen::VectorXd sample_field(const SparsePrecision& prec, Rng& rng) {
    const int n = prec.n();
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    // Q = P' L L' P, so w = P' L^-T z has covariance Q^-1.
    Eigen::VectorXd v = prec.chol->matrixU().solve(z);
    return prec.chol->permutationPinv() * v;
}

}  // namespace zigp
