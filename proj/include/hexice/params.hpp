#pragma once

#include <cmath>
#include <stdexcept>

namespace hexice {

/// Model parameters in meV together with the derived pseudo-spin couplings.
///
/// The occupation-basis energy is
///   H = W * N + V_inter * (doubly occupied edges) + V_intra * (doubly
///   occupied vortex pairs) + lambda, with tunneling -J inside each edge.
/// The equivalent spin form uses J_x (XX+YY on edges), J_z_inter (ZZ on
/// edges), J_z_intra (ZZ on vortex pairs), B (single Z) and a constant
/// lambda_tilde.  Vortex pairs carry no tunneling.
struct ModelParams {
    double W = 0.0;
    double J = 2.0;          // => J_x = -1 meV
    double V_inter = 100.0;
    double V_intra = 40.0;   // => J_z_intra = +10 meV
    double lambda = 0.0;

    double J_x() const { return -J / 2.0; }
    double J_z_inter() const { return V_inter / 4.0; }
    double J_z_intra() const { return V_intra / 4.0; }
    double B() const { return -(2.0 * W + V_inter + V_intra) / 4.0; }
    double lambda_tilde() const {
        return lambda + 6.0 * W + 1.5 * (V_inter + V_intra);
    }

    /// The five mapping identities, rechecked on demand; they are definitions
    /// here, so this guards only against NaN/Inf inputs.
    void validate() const {
        for (double v : {W, J, V_inter, V_intra, lambda})
            if (!std::isfinite(v))
                throw std::invalid_argument("ModelParams: non-finite entry");
        if (std::abs(J_x() + J / 2.0) > 0 || std::abs(4.0 * J_z_inter() - V_inter) > 0 ||
            std::abs(4.0 * J_z_intra() - V_intra) > 0 ||
            std::abs(4.0 * B() + 2.0 * W + V_inter + V_intra) > 0 ||
            std::abs(lambda_tilde() - lambda - 6.0 * W - 1.5 * (V_inter + V_intra)) > 0)
            throw std::logic_error("ModelParams: mapping identities violated");
    }
};

} // namespace hexice
