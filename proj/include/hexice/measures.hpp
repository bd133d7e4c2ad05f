#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "hexice/numerics.hpp"

namespace hexice {

/// Sum of off-diagonal magnitudes in the state's own basis.
inline double coherence_l1(const DensityMatrix& rho) {
    rho.validate();
    return rho.mat.cwiseAbs().sum() - rho.mat.diagonal().cwiseAbs().sum();
}

/// Relative entropy of coherence, S(diag rho) - S(rho), in bits.
inline double coherence_relative_bits(const DensityMatrix& rho) {
    rho.validate();
    std::vector<double> p(rho.dim());
    for (int i = 0; i < rho.dim(); ++i) p[i] = rho.mat(i, i).real();
    return entropy_bits_of_probs(std::move(p)) - von_neumann_entropy(rho);
}

namespace detail {

inline void require_two_qubit_state(const MatrixXcd& rho, const char* who) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw NumericalError(std::string(who) + ": expected a 4x4 state");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw NumericalError(std::string(who) + ": state is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-8)
        throw NumericalError(std::string(who) + ": trace is not 1");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw NumericalError(std::string(who) + ": state is not positive");
}

inline const std::array<Eigen::Matrix2cd, 3>& pauli_matrices() {
    static const std::array<Eigen::Matrix2cd, 3> sigma = [] {
        std::array<Eigen::Matrix2cd, 3> s;
        s[0] << 0, 1, 1, 0;
        s[1] << 0, cplx(0, -1), cplx(0, 1), 0;
        s[2] << 1, 0, 0, -1;
        return s;
    }();
    return sigma;
}

inline double entropy_bits_of_matrix(const MatrixXcd& m) {
    const VectorXd ev = eigvalsh(m);
    std::vector<double> p(ev.data(), ev.data() + ev.size());
    for (double& v : p)
        if (v < 0.0 && v >= -1e-8) v = 0.0;
    return entropy_bits_of_probs(std::move(p));
}

} // namespace detail

/// Wootters concurrence of a two-qubit state.
inline double concurrence(const MatrixXcd& rho) {
    detail::require_two_qubit_state(rho, "concurrence");
    const auto& sy = detail::pauli_matrices()[1];
    const Eigen::Matrix4cd yy = Eigen::kroneckerProduct(sy, sy).eval();
    const MatrixXcd R = rho * yy * rho.conjugate() * yy;
    const Eigen::ComplexEigenSolver<MatrixXcd> es(R, false);
    std::array<double, 4> s{};
    for (int i = 0; i < 4; ++i)
        s[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(s.begin(), s.end(), std::greater<>());
    return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

inline double eof_bits_from_concurrence(double C) {
    if (C < 0.0 || C > 1.0 + 1e-12)
        throw NumericalError("entanglement of formation: concurrence out of range");
    C = std::min(C, 1.0);
    return binary_entropy_bits(0.5 * (1.0 + std::sqrt(1.0 - C * C)));
}

inline double entanglement_of_formation_bits(const MatrixXcd& rho) {
    return eof_bits_from_concurrence(concurrence(rho));
}

/// Average post-measurement entropy of qubit 1 when qubit 2 is measured in
/// the basis of the Bloch direction (theta, phi), in bits.  This is the inner
/// objective minimized for the discord and classical-correlation measures;
/// it assumes a valid 4x4 state and only rejects wrong shapes, so repeated
/// scan calls stay cheap.
inline double measured_conditional_entropy_bits(const MatrixXcd& rho,
                                                double theta, double phi) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw NumericalError(
            "measured_conditional_entropy_bits: expected a 4x4 state");
    // subsystem-2 blocks of rho = [[A, B], [B^dag, C]]
    const Eigen::Matrix2cd A = rho.block<2, 2>(0, 0);
    const Eigen::Matrix2cd B = rho.block<2, 2>(0, 2);
    const Eigen::Matrix2cd C = rho.block<2, 2>(2, 2);
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);

    const auto bloch = [&](const Eigen::Matrix2cd& X) {
        // tr(X P) for P = (I + n.sigma)/2
        const cplx x1 = X(0, 1) + X(1, 0);
        const cplx x2 = cplx(0, 1) * (X(0, 1) - X(1, 0));
        const cplx x3 = X(0, 0) - X(1, 1);
        return 0.5 * (X.trace() + nx * x1 + ny * x2 + nz * x3);
    };

    double total = 0.0;
    for (int outcome = 0; outcome < 2; ++outcome) {
        const double sgn = outcome == 0 ? 1.0 : -1.0;
        const auto proj = [&](const Eigen::Matrix2cd& X) {
            return sgn == 1.0 ? bloch(X) : X.trace() - bloch(X);
        };
        const cplx ta = proj(A), tb = proj(B), tc = proj(C);
        const double p = (ta + tc).real();
        if (p < 1e-14) continue;
        // conditional qubit-1 state [[ta, tb], [conj(tb), tc]] / p
        const double det =
            ((ta * tc - tb * std::conj(tb)) / (p * p)).real();
        const double disc = std::sqrt(std::max(0.0, 0.25 - det));
        total += p * binary_entropy_bits(0.5 + disc);
    }
    return total;
}

namespace detail {

/// Nelder-Mead on the measurement angles, started from a grid minimum.
inline double refine_measurement(const MatrixXcd& rho, double theta,
                                 double phi, double f0) {
    struct Vertex {
        double t, p, f;
    };
    const auto eval = [&rho](double t, double p) {
        return measured_conditional_entropy_bits(rho, t, p);
    };
    const double h = 0.02;
    std::array<Vertex, 3> v{Vertex{theta, phi, f0},
                             Vertex{theta + h, phi, eval(theta + h, phi)},
                             Vertex{theta, phi + h, eval(theta, phi + h)}};
    for (int iter = 0; iter < 300; ++iter) {
        std::sort(v.begin(), v.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (v[2].f - v[0].f < 1e-9) break;
        const double ct = 0.5 * (v[0].t + v[1].t), cp = 0.5 * (v[0].p + v[1].p);
        const double rt = ct + (ct - v[2].t), rp = cp + (cp - v[2].p);
        const double fr = eval(rt, rp);
        if (fr < v[0].f) {
            const double et = ct + 2.0 * (ct - v[2].t);
            const double ep = cp + 2.0 * (cp - v[2].p);
            const double fe = eval(et, ep);
            v[2] = fe < fr ? Vertex{et, ep, fe} : Vertex{rt, rp, fr};
        } else if (fr < v[1].f) {
            v[2] = Vertex{rt, rp, fr};
        } else {
            const double kt = ct + 0.5 * (v[2].t - ct);
            const double kp = cp + 0.5 * (v[2].p - cp);
            const double fk = eval(kt, kp);
            if (fk < v[2].f) {
                v[2] = Vertex{kt, kp, fk};
            } else {
                for (int i = 1; i < 3; ++i) {
                    v[i].t = v[0].t + 0.5 * (v[i].t - v[0].t);
                    v[i].p = v[0].p + 0.5 * (v[i].p - v[0].p);
                    v[i].f = eval(v[i].t, v[i].p);
                }
            }
        }
    }
    std::sort(v.begin(), v.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    return v[0].f;
}

} // namespace detail

struct DiscordResult {
    double discord_bits = 0.0;
    double classical_J_bits = 0.0;
    double mutual_info_bits = 0.0;
};

/// Quantum discord with projective measurements on qubit 2: the measurement
/// scan runs a 64 x 128 inclusive-theta / periodic-phi grid and polishes the
/// four best grid points with Nelder-Mead.
inline DiscordResult quantum_discord(const MatrixXcd& rho) {
    detail::require_two_qubit_state(rho, "quantum_discord");
    const Eigen::Matrix2cd A = rho.block<2, 2>(0, 0);
    const Eigen::Matrix2cd C = rho.block<2, 2>(2, 2);
    Eigen::Matrix2cd rho1;
    rho1 << rho(0, 0) + rho(1, 1), rho(0, 2) + rho(1, 3),
        rho(2, 0) + rho(3, 1), rho(2, 2) + rho(3, 3);
    const Eigen::Matrix2cd rho2 = A + C;

    const double S1 = detail::entropy_bits_of_matrix(rho1);
    const double S2 = detail::entropy_bits_of_matrix(rho2);
    const double S12 = detail::entropy_bits_of_matrix(rho);
    const double info = S1 + S2 - S12;

    constexpr int n_theta = 64, n_phi = 128;
    struct Candidate {
        double f, theta, phi;
        bool operator<(const Candidate& o) const { return f < o.f; }
    };
    std::vector<Candidate> best;
    for (int a = 0; a < n_theta; ++a) {
        const double theta = std::numbers::pi * a / (n_theta - 1);
        for (int b = 0; b < n_phi; ++b) {
            const double phi = 2.0 * std::numbers::pi * b / n_phi;
            const double f = measured_conditional_entropy_bits(rho, theta, phi);
            best.push_back({f, theta, phi});
            std::push_heap(best.begin(), best.end());
            if (best.size() > 4) {
                std::pop_heap(best.begin(), best.end());
                best.pop_back();
            }
        }
    }
    double cond = std::numeric_limits<double>::infinity();
    for (const Candidate& c : best)
        cond = std::min(cond, detail::refine_measurement(rho, c.theta, c.phi, c.f));

    DiscordResult out;
    out.mutual_info_bits = info;
    out.classical_J_bits = S1 - cond;
    out.discord_bits = std::max(0.0, info - out.classical_J_bits);
    return out;
}

/// Measurement-free lower bound: 1/4 (|x|^2 + |T|^2 - k_max) with x the
/// Bloch vector of qubit 2, T the correlation matrix and k_max the largest
/// eigenvalue of K = x x^T + T^T T.
inline double geometric_discord(const MatrixXcd& rho) {
    detail::require_two_qubit_state(rho, "geometric_discord");
    const auto& sigma = detail::pauli_matrices();
    const Eigen::Matrix2cd I2 = Eigen::Matrix2cd::Identity();
    Eigen::Vector3d x;
    Eigen::Matrix3d T;
    for (int m = 0; m < 3; ++m) {
        x(m) = (rho * Eigen::kroneckerProduct(I2, sigma[static_cast<std::size_t>(m)]))
                   .trace()
                   .real();
        for (int n = 0; n < 3; ++n)
            T(m, n) = (rho * Eigen::kroneckerProduct(
                                 sigma[static_cast<std::size_t>(m)],
                                 sigma[static_cast<std::size_t>(n)]))
                          .trace()
                          .real();
    }
    const Eigen::Matrix3d K = x * x.transpose() + T.transpose() * T;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(K, Eigen::EigenvaluesOnly);
    const double val =
        0.25 * (x.squaredNorm() + T.squaredNorm() - es.eigenvalues().maxCoeff());
    return std::max(0.0, val);
}

struct PairMeasures {
    double concurrence = 0.0;
    double eof_bits = 0.0;
    double discord_bits = 0.0;
    double geo_discord = 0.0;
    double mutual_info_bits = 0.0;
    double classical_J_bits = 0.0;
};

/// All pairwise measures of the reduced state on (site_i, site_j).
inline PairMeasures pair_measures(const DensityMatrix& rho, int site_i, int site_j) {
    const DensityMatrix reduced = partial_trace(rho, site_i, site_j);
    PairMeasures out;
    out.concurrence = concurrence(reduced.mat);
    out.eof_bits = eof_bits_from_concurrence(out.concurrence);
    const DiscordResult d = quantum_discord(reduced.mat);
    out.discord_bits = d.discord_bits;
    out.classical_J_bits = d.classical_J_bits;
    out.mutual_info_bits = d.mutual_info_bits;
    out.geo_discord = geometric_discord(reduced.mat);
    return out;
}

} // namespace hexice
