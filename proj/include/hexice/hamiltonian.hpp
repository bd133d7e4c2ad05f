#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <vector>

#include "hexice/lattice.hpp"
#include "hexice/numerics.hpp"
#include "hexice/params.hpp"

namespace hexice {

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

/// One real-coefficient Pauli word on the 12 sites.
struct PauliString {
    double coefficient = 0.0;  // meV
    std::array<Pauli, n_sites> letters{};

    PauliString() { letters.fill(Pauli::I); }

    /// Action on a configuration: |s> -> amp |result>.  Convention
    /// sigma_z = |0><0| - |1><1| (empty site has z = +1).
    std::pair<BasisState, cplx> apply(BasisState s) const {
        cplx amp(coefficient, 0.0);
        BasisState t = s;
        for (int site = 1; site <= n_sites; ++site) {
            switch (letters[site - 1]) {
                case Pauli::I: break;
                case Pauli::X:
                    t = flip_site(t, site);
                    break;
                case Pauli::Y:
                    amp *= occupied(t, site) ? cplx(0, -1) : cplx(0, 1);
                    t = flip_site(t, site);
                    break;
                case Pauli::Z:
                    amp *= occupied(t, site) ? -1.0 : 1.0;
                    break;
            }
        }
        return {t, amp};
    }
};

struct SpinHamiltonian {
    std::vector<PauliString> terms;
};

/// The pseudo-spin form: edge XX+YY tunneling, edge and vortex ZZ penalties,
/// a uniform Z field and a constant.  37 strings in total.
inline SpinHamiltonian build_spin(const ModelParams& p) {
    p.validate();
    SpinHamiltonian H;
    auto two_site = [](double coeff, int a, int b, Pauli la, Pauli lb) {
        PauliString ps;
        ps.coefficient = coeff;
        ps.letters[a - 1] = la;
        ps.letters[b - 1] = lb;
        return ps;
    };
    for (int j = 1; j <= n_edges; ++j) {
        auto [a, b] = edge_sites(j);
        H.terms.push_back(two_site(p.J_x(), a, b, Pauli::X, Pauli::X));
        H.terms.push_back(two_site(p.J_x(), a, b, Pauli::Y, Pauli::Y));
    }
    for (int j = 1; j <= n_edges; ++j) {
        auto [a, b] = edge_sites(j);
        H.terms.push_back(two_site(p.J_z_inter(), a, b, Pauli::Z, Pauli::Z));
    }
    for (int j = 1; j <= n_edges; ++j) {
        auto [a, b] = vortex_sites(j);
        H.terms.push_back(two_site(p.J_z_intra(), a, b, Pauli::Z, Pauli::Z));
    }
    for (int site = 1; site <= n_sites; ++site) {
        PauliString ps;
        ps.coefficient = p.B();
        ps.letters[site - 1] = Pauli::Z;
        H.terms.push_back(ps);
    }
    PauliString id;
    id.coefficient = p.lambda_tilde();
    H.terms.push_back(id);
    return H;
}

/// Classical (diagonal) energy of a configuration in the occupation form.
inline double classical_energy(BasisState s, const ModelParams& p) {
    double e = p.W * proton_count(s) + p.lambda;
    for (int j = 1; j <= n_edges; ++j) {
        auto [a, b] = edge_sites(j);
        if (occupied(s, a) && occupied(s, b)) e += p.V_inter;
        auto [c, d] = vortex_sites(j);
        if (occupied(s, c) && occupied(s, d)) e += p.V_intra;
    }
    return e;
}

/// Dense real symmetric Hamiltonian block on an ordered basis, with a cached
/// eigendecomposition.  Immutable after construction; the cache is shared by
/// copies and initialized at most once even under concurrent first access.
class SectorMatrix {
  public:
    SectorMatrix(std::vector<BasisState> basis, MatrixXd mat)
        : basis_(std::move(basis)), mat_(std::move(mat)),
          cache_(std::make_shared<Cache>()) {
        if (basis_.empty()) throw NumericalError("SectorMatrix: empty basis");
        const double scale = std::max(1.0, mat_.cwiseAbs().maxCoeff());
        if ((mat_ - mat_.transpose()).cwiseAbs().maxCoeff() > tol.hermiticity * scale)
            throw NumericalError("SectorMatrix: not symmetric");
    }

    const std::vector<BasisState>& basis() const { return basis_; }
    const MatrixXd& matrix() const { return mat_; }
    int dim() const { return static_cast<int>(basis_.size()); }

    const Eigensystem& eigensystem() const {
        std::call_once(cache_->flag, [this] { cache_->es = eigh(mat_); });
        return cache_->es;
    }

  private:
    struct Cache {
        std::once_flag flag;
        Eigensystem es;
    };
    std::vector<BasisState> basis_;
    MatrixXd mat_;
    std::shared_ptr<Cache> cache_;
};

/// Occupation-form builder: classical energies on the diagonal, hopping -J
/// between states that differ by one proton moved inside a single edge.  The
/// fermionic string phase is +1 for every such hop because edge sites are
/// adjacent in the 1..12 ordering (the wrap-around pair (12,1) is a vortex
/// pair and carries no hopping), making the map to the spin form exact.
inline SectorMatrix build_fermionic(const ModelParams& p,
                                    const std::vector<BasisState>& basis) {
    p.validate();
    if (basis.empty()) throw NumericalError("build_fermionic: empty basis");
    const int n = static_cast<int>(basis.size());
    std::vector<int> index(basis_size, -1);
    for (int i = 0; i < n; ++i) index[basis[i]] = i;
    MatrixXd H = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const BasisState s = basis[i];
        H(i, i) = classical_energy(s, p);
        for (int j = 1; j <= n_edges; ++j) {
            auto [a, b] = edge_sites(j);
            if (occupied(s, a) != occupied(s, b)) {
                const BasisState t = flip_site(flip_site(s, a), b);
                if (index[t] >= 0) H(index[t], i) += -p.J;
            }
        }
    }
    return SectorMatrix(basis, std::move(H));
}

inline SectorMatrix build_fermionic(const ModelParams& p) {
    std::vector<BasisState> basis(basis_size);
    for (int s = 0; s < basis_size; ++s) basis[s] = s;
    return build_fermionic(p, basis);
}

/// Restriction of the spin form to one occupancy sector.  Every Pauli word of
/// the model preserves per-edge occupancy; an element leaking outside the
/// sector above 1e-12 signals a term-set bug and throws.
inline SectorMatrix matrix_in_sector(const SpinHamiltonian& H, const SectorLabel& label) {
    const std::vector<BasisState> basis = enumerate_sector(label);
    if (basis.empty()) throw NumericalError("matrix_in_sector: empty sector");
    const int n = static_cast<int>(basis.size());
    std::vector<int> index(basis_size, -1);
    for (int i = 0; i < n; ++i) index[basis[i]] = i;
    MatrixXcd M = MatrixXcd::Zero(n, n);
    // Individual XX / YY words leak outside the sector; only their sum
    // cancels, so leakage is checked on the accumulated column.
    std::vector<cplx> column(basis_size, cplx{});
    std::vector<char> seen(basis_size, 0);
    std::vector<BasisState> touched;
    for (int i = 0; i < n; ++i) {
        touched.clear();
        for (const auto& term : H.terms) {
            auto [t, amp] = term.apply(basis[i]);
            if (!seen[t]) {
                seen[t] = 1;
                touched.push_back(t);
            }
            column[t] += amp;
        }
        for (BasisState t : touched) {
            if (index[t] >= 0) M(index[t], i) = column[t];
            else if (std::abs(column[t]) > 1e-12)
                throw NumericalError("matrix_in_sector: term set couples different sectors");
            column[t] = cplx{};
            seen[t] = 0;
        }
    }
    if (M.imag().cwiseAbs().maxCoeff() > 1e-12)
        throw NumericalError("matrix_in_sector: imaginary parts failed to cancel");
    return SectorMatrix(basis, M.real());
}

/// Spin form on the full 4096 basis assembled sector by sector.
inline SectorMatrix build_spin_full(const ModelParams& p) {
    const SpinHamiltonian H = build_spin(p);
    std::vector<BasisState> basis(basis_size);
    for (int s = 0; s < basis_size; ++s) basis[s] = s;
    MatrixXd M = MatrixXd::Zero(basis_size, basis_size);
    for (const auto& [label, states] : all_sectors()) {
        const SectorMatrix block = matrix_in_sector(H, label);
        for (int i = 0; i < block.dim(); ++i)
            for (int j = 0; j < block.dim(); ++j)
                M(block.basis()[i], block.basis()[j]) = block.matrix()(i, j);
    }
    return SectorMatrix(std::move(basis), std::move(M));
}

inline SectorMatrix ice_sector_hamiltonian(const ModelParams& p) {
    return matrix_in_sector(build_spin(p), ice_label());
}

inline DensityMatrix gibbs(const SectorMatrix& H, double T) {
    return gibbs_from_eigensystem(H.eigensystem(), H.basis(), T);
}

} // namespace hexice
