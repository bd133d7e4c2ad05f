#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "hexice/bath.hpp"
#include "hexice/hamiltonian.hpp"

namespace hexice {

/// Clusters of a sorted value set, split wherever neighbours are more than
/// `gap` apart.  Members of one cluster share a representative value.
struct FrequencyBins {
    std::vector<double> lo, hi, rep;

    static FrequencyBins build(std::vector<double> values, double gap) {
        std::sort(values.begin(), values.end());
        FrequencyBins bins;
        std::size_t start = 0;
        for (std::size_t k = 1; k <= values.size(); ++k) {
            if (k == values.size() || values[k] - values[k - 1] > gap) {
                double mean = 0.0;
                for (std::size_t i = start; i < k; ++i) mean += values[i];
                mean /= static_cast<double>(k - start);
                // a cluster straddling zero is the stationary bin exactly
                if (values[start] <= 0.0 && values[k - 1] >= 0.0) mean = 0.0;
                bins.lo.push_back(values[start]);
                bins.hi.push_back(values[k - 1]);
                bins.rep.push_back(mean);
                start = k;
            }
        }
        return bins;
    }

    int count() const { return static_cast<int>(rep.size()); }

    /// Bin holding `w`; valid for any value the bins were built from.
    int index_of(double w) const {
        auto it = std::lower_bound(hi.begin(), hi.end(), w);
        if (it == hi.end()) return count() - 1;
        return static_cast<int>(it - hi.begin());
    }
};

struct EigenOperatorEntry {
    double omega;        // meV, bin representative
    MatrixXd op;         // occupation-basis representation
};

struct EigenOperatorSet {
    std::vector<EigenOperatorEntry> entries;  // ascending in omega
};

/// Decomposition of the sigma_z coupling at `site` into jump operators
/// A(w) = sum over eigenpairs with energy gap w of |m'><m'| sigma_z |m><m|,
/// where w = (energy of column state) - (energy of row state).  Gaps closer
/// than freq_tol share one operator; all-zero operators are dropped.
/// sum_w A(w) = sigma_z and A(-w) = A(w)^T hold on the returned set.
inline EigenOperatorSet eigenoperators(const SectorMatrix& H, int site,
                                       double freq_tol = tol.degeneracy_gap) {
    const Eigensystem& es = H.eigensystem();
    const int d = H.dim();
    VectorXd z(d);
    for (int i = 0; i < d; ++i)
        z(i) = occupied(H.basis()[i], site) ? -1.0 : 1.0;
    const MatrixXd sz_eig = es.vectors.transpose() * z.asDiagonal() * es.vectors;

    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(d) * d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) diffs.push_back(es.values(c) - es.values(r));
    const FrequencyBins bins = FrequencyBins::build(std::move(diffs), freq_tol);

    std::vector<MatrixXd> parts(bins.count(), MatrixXd::Zero(d, d));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            parts[bins.index_of(es.values(c) - es.values(r))](r, c) += sz_eig(r, c);

    EigenOperatorSet set;
    for (int b = 0; b < bins.count(); ++b) {
        if (parts[b].cwiseAbs().maxCoeff() < 1e-14) continue;
        EigenOperatorEntry e;
        e.omega = bins.rep[b];
        e.op = es.vectors * parts[b] * es.vectors.transpose();
        set.entries.push_back(std::move(e));
    }
    return set;
}

/// One Bohr-frequency sector of the secular generator.  `elements` lists the
/// eigenbasis matrix positions (row, col) evolving jointly under `generator`
/// (units 1/ps); all share the binned frequency `omega`.
struct BohrClass {
    double omega = 0.0;
    std::vector<std::pair<int, int>> elements;
    MatrixXcd generator;
};

/// Secular weak-coupling generator for twelve identical sigma_z baths, built
/// over one Hamiltonian block.  Density-matrix elements in the eigenbasis
/// couple only within equal-frequency classes, so the generator is stored as
/// independent dense blocks instead of a dim^2 x dim^2 superoperator.
class Liouvillian {
public:
    Liouvillian(const SectorMatrix& H, const BathSpec& bath,
                bool include_lamb_shift = false,
                double freq_tol = tol.degeneracy_gap)
        : basis_(H.basis()), eig_(H.eigensystem()), bath_(bath),
          lamb_shift_(include_lamb_shift) {
        bath_.validate();
        const int d = dim();
        if (d > 128)
            throw NumericalError("Liouvillian: block dimension exceeds 128");

        std::vector<MatrixXd> sz(n_sites);
        for (int site = 1; site <= n_sites; ++site) {
            VectorXd z(d);
            for (int i = 0; i < d; ++i)
                z(i) = occupied(basis_[i], site) ? -1.0 : 1.0;
            sz[site - 1] = eig_.vectors.transpose() * z.asDiagonal() * eig_.vectors;
        }

        std::vector<double> diffs;
        diffs.reserve(static_cast<std::size_t>(d) * d);
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                diffs.push_back(eig_.values(p) - eig_.values(q));
        bins_ = FrequencyBins::build(std::move(diffs), freq_tol);

        // pair_bin(p,q) = bin of eps_p - eps_q; doubles as the class index
        pair_bin_.assign(static_cast<std::size_t>(d) * d, -1);
        classes_.resize(bins_.count());
        for (int b = 0; b < bins_.count(); ++b) classes_[b].omega = bins_.rep[b];
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) {
                const int b = bins_.index_of(eig_.values(p) - eig_.values(q));
                pair_bin_[static_cast<std::size_t>(p) * d + q] = b;
                slot_.push_back(static_cast<int>(classes_[b].elements.size()));
                classes_[b].elements.emplace_back(p, q);
            }
        for (const BohrClass& c : classes_)
            if (c.elements.size() > 1024)
                throw NumericalError("Liouvillian: Bohr class too large");

        std::vector<double> gamma_bin(bins_.count());
        for (int b = 0; b < bins_.count(); ++b)
            gamma_bin[b] = rate(bins_.rep[b], bath_);

        // Gamma(p,m) = sum_j (A_j^dag A_j)(p,m) weighted by gamma; the bin
        // equality keeps only matched jump frequencies, so support is
        // confined to near-degenerate (p,m)
        MatrixXd Gamma = MatrixXd::Zero(d, d);
        MatrixXd HLS;
        std::vector<double> s_bin;
        if (lamb_shift_) {
            HLS = MatrixXd::Zero(d, d);
            s_bin.resize(bins_.count());
            for (int b = 0; b < bins_.count(); ++b)
                s_bin[b] = lamb_shift_S(bins_.rep[b], bath_);
        }
        for (int p = 0; p < d; ++p)
            for (int m = p; m < d; ++m) {
                double g = 0.0, ls = 0.0;
                for (int r = 0; r < d; ++r) {
                    const int bp = pair_bin(p, r);
                    if (bp != pair_bin(m, r)) continue;
                    double overlap = 0.0;
                    for (int j = 0; j < n_sites; ++j)
                        overlap += sz[j](r, p) * sz[j](r, m);
                    g += gamma_bin[bp] * overlap;
                    if (lamb_shift_) ls += s_bin[bp] * overlap;
                }
                Gamma(p, m) = Gamma(m, p) = g;
                if (lamb_shift_) HLS(p, m) = HLS(m, p) = ls;
            }

        for (BohrClass& c : classes_) {
            const int s = static_cast<int>(c.elements.size());
            c.generator = MatrixXcd::Zero(s, s);
            for (int a = 0; a < s; ++a) {
                const auto [p, q] = c.elements[a];
                c.generator(a, a) +=
                    cplx(0.0, -(eig_.values(p) - eig_.values(q)) / hbar);
                for (int b = 0; b < s; ++b) {
                    const auto [m, n] = c.elements[b];
                    const int bg = pair_bin(m, p);
                    if (bg == pair_bin(n, q)) {
                        double overlap = 0.0;
                        for (int j = 0; j < n_sites; ++j)
                            overlap += sz[j](p, m) * sz[j](q, n);
                        c.generator(a, b) += gamma_bin[bg] * overlap;
                    }
                    if (n == q) c.generator(a, b) -= 0.5 * Gamma(p, m);
                    if (m == p) c.generator(a, b) -= 0.5 * Gamma(n, q);
                    if (lamb_shift_) {
                        if (n == q) c.generator(a, b) += cplx(0.0, -HLS(p, m));
                        if (m == p) c.generator(a, b) += cplx(0.0, HLS(n, q));
                    }
                }
            }
        }
    }

    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<BasisState>& basis() const { return basis_; }
    const Eigensystem& eigensystem() const { return eig_; }
    const BathSpec& bath() const { return bath_; }
    bool lamb_shift() const { return lamb_shift_; }
    const std::vector<BohrClass>& classes() const { return classes_; }
    const FrequencyBins& bins() const { return bins_; }

    int pair_bin(int p, int q) const {
        return pair_bin_[static_cast<std::size_t>(p) * dim() + q];
    }
    int pair_slot(int p, int q) const {
        return slot_[static_cast<std::size_t>(p) * dim() + q];
    }

private:
    std::vector<BasisState> basis_;
    Eigensystem eig_;
    BathSpec bath_;
    bool lamb_shift_;
    FrequencyBins bins_;
    std::vector<int> pair_bin_;
    std::vector<int> slot_;
    std::vector<BohrClass> classes_;
};

namespace detail {

inline void require_same_basis(const Liouvillian& L, const DensityMatrix& rho,
                               const char* who) {
    if (rho.basis != L.basis())
        throw NumericalError(std::string(who) + ": state basis does not match");
}

inline std::vector<Eigen::VectorXcd>
scatter_classes(const Liouvillian& L, const MatrixXcd& rho_eig) {
    std::vector<Eigen::VectorXcd> z;
    z.reserve(L.classes().size());
    for (const BohrClass& c : L.classes()) {
        Eigen::VectorXcd v(c.elements.size());
        for (std::size_t a = 0; a < c.elements.size(); ++a)
            v(static_cast<Eigen::Index>(a)) =
                rho_eig(c.elements[a].first, c.elements[a].second);
        z.push_back(std::move(v));
    }
    return z;
}

inline MatrixXcd gather_classes(const Liouvillian& L,
                                const std::vector<Eigen::VectorXcd>& z) {
    MatrixXcd rho_eig = MatrixXcd::Zero(L.dim(), L.dim());
    for (std::size_t ci = 0; ci < L.classes().size(); ++ci) {
        const BohrClass& c = L.classes()[ci];
        for (std::size_t a = 0; a < c.elements.size(); ++a)
            rho_eig(c.elements[a].first, c.elements[a].second) =
                z[ci](static_cast<Eigen::Index>(a));
    }
    return rho_eig;
}

} // namespace detail

/// d(rho)/dt for the given state, in the occupation basis, 1/ps.
inline MatrixXcd apply_generator(const Liouvillian& L, const DensityMatrix& rho) {
    detail::require_same_basis(L, rho, "apply_generator");
    const MatrixXd& V = L.eigensystem().vectors;
    const MatrixXcd rho_eig = V.transpose() * rho.mat * V;
    auto z = detail::scatter_classes(L, rho_eig);
    for (std::size_t ci = 0; ci < z.size(); ++ci)
        z[ci] = L.classes()[ci].generator * z[ci];
    return V * detail::gather_classes(L, z) * V.transpose();
}

/// Evolved states at the requested times (ps; finite, nondecreasing, >= 0).
/// Each class block is exponentiated independently; classes that carry no
/// amplitude in rho0 are skipped.  Trace drift beyond 1e-8 aborts.
inline std::vector<DensityMatrix> propagate(const Liouvillian& L,
                                            const DensityMatrix& rho0,
                                            const std::vector<double>& times) {
    detail::require_same_basis(L, rho0, "propagate");
    rho0.validate();
    if (times.empty())
        throw NumericalError("propagate: empty time grid");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0 ||
            (k > 0 && times[k] < times[k - 1]))
            throw NumericalError("propagate: time grid must be finite, "
                                 "nonnegative and nondecreasing");
    }

    const MatrixXd& V = L.eigensystem().vectors;
    const MatrixXcd rho_eig = V.transpose() * rho0.mat * V;
    const auto z0 = detail::scatter_classes(L, rho_eig);
    std::vector<char> live(z0.size());
    for (std::size_t ci = 0; ci < z0.size(); ++ci)
        live[ci] = !z0[ci].isZero(0.0);

    const double trace0 = rho0.mat.real().trace();
    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    auto z = z0;
    for (double t : times) {
        for (std::size_t ci = 0; ci < z0.size(); ++ci) {
            if (!live[ci]) continue;
            if (t == 0.0) {
                z[ci] = z0[ci];
            } else {
                const MatrixXcd e = (L.classes()[ci].generator * t).exp();
                z[ci] = e * z0[ci];
            }
        }
        MatrixXcd m = V * detail::gather_classes(L, z) * V.transpose();
        m = 0.5 * (m + m.adjoint().eval());
        if (std::abs(m.real().trace() - trace0) > 1e-8)
            throw NumericalError("propagate: trace drift exceeds 1e-8");
        out.push_back(DensityMatrix{L.basis(), std::move(m)});
    }
    return out;
}

/// Full generator as a dim^2 x dim^2 matrix over column-major vec(rho) in the
/// occupation basis.  Cross-check path only; refuses large blocks.
inline MatrixXcd dense_superoperator(const Liouvillian& L) {
    const int d = L.dim();
    if (d > 32)
        throw NumericalError("dense_superoperator: block dimension exceeds 32");
    const auto idx = [d](int r, int c) { return c * d + r; };
    MatrixXcd Le = MatrixXcd::Zero(d * d, d * d);
    for (const BohrClass& c : L.classes())
        for (std::size_t a = 0; a < c.elements.size(); ++a)
            for (std::size_t b = 0; b < c.elements.size(); ++b)
                Le(idx(c.elements[a].first, c.elements[a].second),
                   idx(c.elements[b].first, c.elements[b].second)) =
                    c.generator(static_cast<Eigen::Index>(a),
                                static_cast<Eigen::Index>(b));
    const MatrixXd K = Eigen::kroneckerProduct(L.eigensystem().vectors,
                                               L.eigensystem().vectors);
    return K * Le * K.transpose();
}

/// Splits a basis into complete proton-number sectors and builds each block.
inline std::vector<SectorMatrix>
partition_into_sectors(const std::vector<BasisState>& basis,
                       const ModelParams& params) {
    std::map<SectorLabel, std::vector<BasisState>> groups;
    for (BasisState s : basis) groups[sector_of(s)].push_back(s);
    const SpinHamiltonian H = build_spin(params);
    std::vector<SectorMatrix> sectors;
    for (auto& [label, states] : groups) {
        std::sort(states.begin(), states.end());
        if (states != enumerate_sector(label))
            throw NumericalError(
                "partition_into_sectors: basis covers a sector only partially");
        sectors.push_back(matrix_in_sector(H, label));
    }
    return sectors;
}

/// Long-time limit of the secular dynamics: each conserved sector J keeps its
/// initial weight P(J) = sum_m <eps_m|rho0|eps_m> and thermalizes internally,
/// rho_inf = sum_J P(J) * gibbs(H_J, T).
inline DensityMatrix steady_state_analytic(const DensityMatrix& rho0,
                                           const std::vector<SectorMatrix>& sectors,
                                           double T) {
    rho0.validate();
    {
        std::vector<BasisState> joint;
        for (const SectorMatrix& s : sectors)
            joint.insert(joint.end(), s.basis().begin(), s.basis().end());
        std::sort(joint.begin(), joint.end());
        std::vector<BasisState> mine = rho0.basis;
        std::sort(mine.begin(), mine.end());
        if (joint != mine)
            throw NumericalError(
                "steady_state_analytic: sectors do not partition the basis");
    }
    std::vector<int> pos(basis_size, -1);
    for (std::size_t i = 0; i < rho0.basis.size(); ++i)
        pos[rho0.basis[i]] = static_cast<int>(i);

    const int n = static_cast<int>(rho0.basis.size());
    MatrixXcd out = MatrixXcd::Zero(n, n);
    double total = 0.0, pmax = 0.0;
    for (const SectorMatrix& sec : sectors) {
        const int ds = sec.dim();
        // sector weight: trace of the diagonal block, eigenbasis-independent
        double P = 0.0;
        for (int i = 0; i < ds; ++i)
            P += rho0.mat(pos[sec.basis()[i]], pos[sec.basis()[i]]).real();
        P = std::max(P, 0.0);
        total += P;
        pmax = std::max(pmax, P);
        if (P == 0.0) continue;
        const DensityMatrix g = gibbs(sec, T);
        for (int i = 0; i < ds; ++i)
            for (int k = 0; k < ds; ++k)
                out(pos[sec.basis()[i]], pos[sec.basis()[k]]) += P * g.mat(i, k);
    }
    if (pmax <= 0.0)
        throw NumericalError("steady_state_analytic: all sector weights vanish");
    if (std::abs(total - 1.0) > 1e-8)
        throw NumericalError("steady_state_analytic: sector weights do not sum to 1");
    return DensityMatrix{rho0.basis, std::move(out)};
}

inline DensityMatrix steady_state_analytic(const DensityMatrix& rho0,
                                           const ModelParams& params, double T) {
    return steady_state_analytic(rho0, partition_into_sectors(rho0.basis, params), T);
}

/// Thermal state of the 64-state ice sector.
inline DensityMatrix steady_state_ice(const ModelParams& params, double T) {
    return gibbs(ice_sector_hamiltonian(params), T);
}

/// Combined population of the two ice-rule configurations.
inline double p_bf(const DensityMatrix& rho) {
    if (rho.basis != enumerate_sector(ice_label()))
        throw NumericalError("p_bf: expected the 64-state ice-sector basis");
    const auto at = [&rho](BasisState s) {
        const auto it = std::lower_bound(rho.basis.begin(), rho.basis.end(), s);
        return static_cast<int>(it - rho.basis.begin());
    };
    return rho.mat(at(ice_b), at(ice_b)).real() +
           rho.mat(at(ice_c), at(ice_c)).real();
}

} // namespace hexice
