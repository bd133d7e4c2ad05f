#pragma once

#include <cmath>
#include <numbers>

#include "hexice/constants.hpp"
#include "hexice/numerics.hpp"

namespace hexice {

/// Ohmic bath with exponential cutoff, J(w) = eta * w * exp(-w/omega_c).
/// Every site couples through sigma_z to its own identical copy.
struct BathSpec {
    double eta = 0.01;       // dimensionless coupling
    double omega_c = 100.0;  // meV
    double T = 0.0;          // K

    void validate() const {
        if (!(eta > 0.0) || !(omega_c > 0.0) || !(T >= 0.0) ||
            !std::isfinite(eta) || !std::isfinite(omega_c) || !std::isfinite(T))
            throw NumericalError("BathSpec: require eta > 0, omega_c > 0, T >= 0");
    }
};

inline double bose_occupation(double omega, double T) {
    // 1 / (e^{beta w} - 1), stable through expm1
    return 1.0 / std::expm1(omega / (k_B * T));
}

/// One-sided Fourier transform rate gamma(w) in 1/ps.  Emission for w > 0,
/// absorption for w < 0 with the KMS ratio gamma(-w)/gamma(w) = e^{-beta w};
/// the w -> 0 Ohmic limit is 2 pi eta k_B T.  T = 0 absorption is exactly 0.
inline double rate(double omega, const BathSpec& bath) {
    bath.validate();
    const double two_pi_eta = 2.0 * std::numbers::pi * bath.eta;
    double g;
    if (omega == 0.0) {
        g = two_pi_eta * k_B * bath.T;
    } else if (omega > 0.0) {
        const double stim = bath.T > 0.0 ? 1.0 + bose_occupation(omega, bath.T) : 1.0;
        g = two_pi_eta * omega * std::exp(-omega / bath.omega_c) * stim;
    } else {
        if (bath.T == 0.0) return 0.0;
        const double a = -omega;
        g = two_pi_eta * a * std::exp(-a / bath.omega_c) * bose_occupation(a, bath.T);
    }
    return g / hbar;
}

/// Principal-value Hilbert transform of the rate, S(w) = (1/2pi) PV int
/// gamma(w') / (w - w') dw', in 1/ps.  Feeds the Lamb shift H_LS =
/// sum_{j,w} S(w) A_j(w)^dag A_j(w); the symmetrized integrand removes the
/// pole.  Quadrature accuracy is ample for the default-off diagnostic role.
inline double lamb_shift_S(double omega, const BathSpec& bath) {
    bath.validate();
    const double upper = std::abs(omega) + 50.0 * bath.omega_c;
    const int n = 20000;
    const double du = upper / n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = (k + 0.5) * du;  // midpoint keeps u > 0
        acc += (rate(omega - u, bath) - rate(omega + u, bath)) / u * du;
    }
    return acc / (2.0 * std::numbers::pi);
}

} // namespace hexice
