#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hexice/constants.hpp"
#include "hexice/lattice.hpp"

namespace hexice {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Eigensystem {
    VectorXd values;   // ascending
    MatrixXd vectors;  // columns, orthonormal
};

/// Dense symmetric eigendecomposition with the library-wide contract:
/// input symmetric within tol.hermiticity relative, reconstruction residual
/// below tol.eigh_residual * max|M|, orthonormal vectors.
inline Eigensystem eigh(const MatrixXd& M) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("eigh: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigh: solver failed to converge");
    Eigensystem out{es.eigenvalues(), es.eigenvectors()};
    if (!out.values.allFinite())
        throw NumericalError("eigh: non-finite spectrum");
    const MatrixXd recon =
        out.vectors * out.values.asDiagonal() * out.vectors.transpose();
    if ((M - recon).cwiseAbs().maxCoeff() > tol.eigh_residual * scale)
        throw NumericalError("eigh: reconstruction residual too large");
    return out;
}

inline Eigen::VectorXd eigvalsh(const MatrixXcd& M) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("eigvalsh: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(M);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigvalsh: solver failed to converge");
    return es.eigenvalues();
}

/// Density matrix over an ordered configuration basis (or a 4-dim two-site
/// basis, in which case `basis` holds 0..3).
struct DensityMatrix {
    std::vector<BasisState> basis;
    MatrixXcd mat;

    int dim() const { return static_cast<int>(mat.rows()); }

    void validate() const {
        if (mat.rows() != mat.cols() || mat.rows() != static_cast<long>(basis.size()))
            throw NumericalError("DensityMatrix: shape/basis mismatch");
        if (std::abs(mat.trace().real() - 1.0) > tol.trace ||
            std::abs(mat.trace().imag()) > tol.trace)
            throw NumericalError("DensityMatrix: trace differs from 1");
        if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity)
            throw NumericalError("DensityMatrix: not Hermitian");
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < tol.psd)
            throw NumericalError("DensityMatrix: negative eigenvalue");
    }
};

inline double entropy_bits_of_probs(std::vector<double> p) {
    double s = 0.0;
    for (double v : p) {
        if (v < -1e-8) throw NumericalError("entropy: negative probability");
        if (v > 1e-300) s -= v * std::log2(v);
    }
    return s;
}

/// Von Neumann entropy in bits; eigenvalues in [-1e-10, 0) are clamped to 0,
/// anything below -1e-8 rejects the input as non-PSD.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.mat, Eigen::EigenvaluesOnly);
    std::vector<double> p(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
    for (double& v : p)
        if (v < 0.0 && v >= tol.psd) v = 0.0;
    return entropy_bits_of_probs(std::move(p));
}

inline double purity(const DensityMatrix& rho) {
    return (rho.mat * rho.mat).trace().real();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.mat - b.mat, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Gibbs populations over a spectrum, overflow-safe via the min shift.
/// T = 0 is the documented limit: uniform mixture over the ground eigenspace,
/// degeneracy detected with tol.degeneracy_gap.
inline std::vector<double> gibbs_weights(const VectorXd& eps, double T) {
    if (T < 0.0) throw NumericalError("gibbs: negative temperature");
    if (!eps.allFinite()) throw NumericalError("gibbs: NaN in spectrum");
    const int n = static_cast<int>(eps.size());
    const double e0 = eps.minCoeff();
    std::vector<double> w(n);
    if (T == 0.0) {
        int nground = 0;
        for (int m = 0; m < n; ++m)
            if (eps[m] - e0 <= tol.degeneracy_gap) ++nground;
        for (int m = 0; m < n; ++m)
            w[m] = (eps[m] - e0 <= tol.degeneracy_gap) ? 1.0 / nground : 0.0;
        return w;
    }
    const double beta = 1.0 / (k_B * T);
    double z = 0.0;
    for (int m = 0; m < n; ++m) {
        w[m] = std::exp(-beta * (eps[m] - e0));
        z += w[m];
    }
    for (double& v : w) v /= z;
    return w;
}

/// rho = sum_m w_m |e_m><e_m| assembled in the configuration basis.
inline DensityMatrix gibbs_from_eigensystem(const Eigensystem& es,
                                            const std::vector<BasisState>& basis,
                                            double T) {
    const auto w = gibbs_weights(es.values, T);
    MatrixXd scaled = es.vectors;
    for (int m = 0; m < scaled.cols(); ++m) scaled.col(m) *= w[m];
    MatrixXd rho = scaled * es.vectors.transpose();
    rho = 0.5 * (rho + rho.transpose()).eval();
    rho /= rho.trace();
    return DensityMatrix{basis, rho.cast<cplx>()};
}

/// Two-site reduced state; `keep` selects distinct sites in 1..12, first kept
/// site = first tensor factor.  Works on any configuration-basis state (full
/// or sector) by matching the 10-site environments.
inline DensityMatrix partial_trace(const DensityMatrix& rho, int site_i, int site_j) {
    if (site_i == site_j || site_i < 1 || site_i > n_sites || site_j < 1 || site_j > n_sites)
        throw NumericalError("partial_trace: keep sites must be distinct, in 1..12");
    const BasisState mask_env =
        0xFFF & ~((1 << (n_sites - site_i)) | (1 << (n_sites - site_j)));
    const int n = rho.dim();
    MatrixXcd out = MatrixXcd::Zero(4, 4);
    for (int a = 0; a < n; ++a) {
        const BasisState sa = rho.basis[a];
        const int ia = 2 * occupied(sa, site_i) + occupied(sa, site_j);
        for (int b = 0; b < n; ++b) {
            const BasisState sb = rho.basis[b];
            if ((sa & mask_env) == (sb & mask_env)) {
                const int ib = 2 * occupied(sb, site_i) + occupied(sb, site_j);
                out(ia, ib) += rho.mat(a, b);
            }
        }
    }
    return DensityMatrix{{0, 1, 2, 3}, out};
}

inline double binary_entropy_bits(double p) {
    double s = 0.0;
    if (p > 1e-300) s -= p * std::log2(p);
    if (1.0 - p > 1e-300) s -= (1.0 - p) * std::log2(1.0 - p);
    return s;
}

} // namespace hexice
