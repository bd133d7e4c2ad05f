#pragma once

namespace hexice {

// Unit system: energies in meV, temperatures in K, times in ps.
inline constexpr double k_B = 0.08617333262;   // meV / K
inline constexpr double hbar = 0.6582119569;   // meV * ps

// Single source of truth for every numerical tolerance used by the library
// and its test suites.
struct Tolerances {
    double hermiticity = 1e-12;    // max asymmetry of a Hermitian matrix
    double psd = -1e-10;           // smallest admissible density-matrix eigenvalue
    double eigh_residual = 1e-9;   // reconstruction residual of the eigensolver
    double degeneracy_gap = 1e-9;  // meV; level/frequency binning threshold
    double trace = 1e-10;          // unit-trace slack for density matrices
};

inline constexpr Tolerances tol{};

} // namespace hexice
