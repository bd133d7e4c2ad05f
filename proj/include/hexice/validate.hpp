#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hexice/measures.hpp"
#include "hexice/open_system.hpp"
#include "hexice/sweep.hpp"

namespace hexice {

enum class ValidationDepth { quick, full };

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double limit = 0.0;
    bool pass = false;
    std::string detail;
};

/// Largest entrywise deviation between the spin form restricted to a sector
/// and the occupation-form build on the same ordered basis.  Unlike a
/// per-sector spectral comparison this is sensitive to the sign of the
/// tunneling amplitude: the edges are disjoint, so a flipped hopping sign is
/// a local gauge change that leaves every sector spectrum untouched while
/// the matrices differ.
inline double sector_entry_residual(const SpinHamiltonian& H, const ModelParams& p,
                                    const SectorLabel& label) {
    const SectorMatrix spin = matrix_in_sector(H, label);
    const SectorMatrix ferm = build_fermionic(p, enumerate_sector(label));
    return (spin.matrix() - ferm.matrix()).cwiseAbs().maxCoeff();
}

/// Largest deviation between the sorted sector spectra of the two builds.
inline double sector_spectral_residual(const SpinHamiltonian& H, const ModelParams& p,
                                       const SectorLabel& label) {
    const SectorMatrix spin = matrix_in_sector(H, label);
    const SectorMatrix ferm = build_fermionic(p, enumerate_sector(label));
    return (spin.eigensystem().values - ferm.eigensystem().values)
        .cwiseAbs()
        .maxCoeff();
}

namespace detail {

inline std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericalError("validate: cannot reopen '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

inline DensityMatrix ginibre_state(const std::vector<BasisState>& basis,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const int n = static_cast<int>(basis.size());
    MatrixXcd G(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) G(r, c) = cplx(gauss(rng), gauss(rng));
    MatrixXcd rho = G * G.adjoint();
    rho /= rho.trace();
    return DensityMatrix{basis, rho};
}

} // namespace detail

/// Runs the named invariants of the library at its reference parameters and
/// reports one residual per check.  `quick` stays within a few seconds; the
/// extra `full` checks add the all-sector block equivalence and the
/// relaxation-versus-closed-form comparison.
inline std::vector<CheckResult> run_validation(ValidationDepth depth) {
    std::vector<CheckResult> out;
    auto run = [&out](const std::string& name, double limit, auto&& fn) {
        CheckResult r{name, 0.0, limit, false, ""};
        try {
            r.residual = fn();
            r.pass = std::isfinite(r.residual) && r.residual <= limit;
        } catch (const std::exception& e) {
            r.residual = std::numeric_limits<double>::infinity();
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    };

    const ModelParams p{};
    const SpinHamiltonian spin = build_spin(p);
    const SectorMatrix ice = ice_sector_hamiltonian(p);
    const BathSpec bath60{0.01, 100.0, 60.0};

    run("configuration-census", 0.5, [&] {
        int n_ice = 0, n_ionic = 0, n_bjerrum = 0;
        for (BasisState s = 0; s < (1 << n_sites); ++s) {
            switch (classify(s)) {
                case DefectClass::IceRule: ++n_ice; break;
                case DefectClass::Ionic: ++n_ionic; break;
                case DefectClass::Bjerrum: ++n_bjerrum; break;
            }
        }
        return std::abs(n_ice - 2) + std::abs(n_ionic - 62) +
               std::abs(n_bjerrum - 4032);
    });

    run("sector-partition", 0.5, [&] {
        const auto sectors = all_sectors();
        std::size_t total = 0;
        for (const auto& [label, states] : sectors) total += states.size();
        return std::abs(static_cast<double>(sectors.size()) - 729.0) +
               std::abs(static_cast<double>(total) - 4096.0);
    });

    run("block-equivalence-entries", 1e-10, [&] {
        const std::vector<SectorLabel> probes = {
            ice_label(),
            SectorLabel{1, 0, 0, 0, 0, 0},
            SectorLabel{2, 1, 0, 1, 0, 0},
            SectorLabel{0, 0, 0, 0, 0, 0},
            SectorLabel{2, 2, 2, 2, 2, 2},
        };
        double worst = 0.0;
        for (const auto& label : probes)
            worst = std::max(worst, sector_entry_residual(spin, p, label));
        return worst;
    });

    run("ice-doublet-splitting", 1e-8, [&] {
        // Reference value for the tunneling splitting of the ice doublet at
        // the default parameters, relative deviation.
        const double reference = 3.100090965727e-4;
        const VectorXd& e = ice.eigensystem().values;
        return std::abs((e[1] - e[0]) - reference) / reference;
    });

    run("thermal-state-trace", tol.trace, [&] {
        const DensityMatrix rho = gibbs(ice, 60.0);
        rho.validate();
        return std::abs(rho.mat.trace().real() - 1.0) + std::abs(rho.mat.trace().imag());
    });

    run("detailed-balance", 1e-8, [&] {
        const DensityMatrix rho = gibbs(ice, 60.0);
        const Eigensystem& es = ice.eigensystem();
        const MatrixXcd rot =
            es.vectors.transpose().cast<cplx>() * rho.mat * es.vectors.cast<cplx>();
        const VectorXd pops = rot.diagonal().real();
        const double beta = 1.0 / (k_B * 60.0);
        // Populations below 1e-4 are skipped: their assembly roundoff is
        // comparable to the ratio tolerance.
        double worst = 0.0;
        int used = 0;
        const int n = static_cast<int>(pops.size());
        for (int m = 0; m < n; ++m) {
            for (int k = m + 1; k < n; ++k) {
                const double gap = es.values[k] - es.values[m];
                if (gap <= tol.degeneracy_gap) continue;
                if (pops[m] < 1e-4 || pops[k] < 1e-4) continue;
                const double expected = std::exp(-beta * gap);
                worst = std::max(worst,
                                 std::abs(pops[k] / pops[m] - expected) / expected);
                ++used;
            }
        }
        if (used == 0) throw NumericalError("detailed balance: no usable level pairs");
        return worst;
    });

    run("generator-trace-preservation", 1e-10, [&] {
        const Liouvillian L(ice, bath60);
        const DensityMatrix thermal = gibbs(ice, 60.0);
        const DensityMatrix random = detail::ginibre_state(ice.basis(), 7);
        double worst = 0.0;
        for (const DensityMatrix* rho : {&thermal, &random})
            worst = std::max(worst, std::abs(apply_generator(L, *rho).trace()));
        return worst;
    });

    run("steady-state-fixed-point", 1e-8, [&] {
        const Liouvillian L(ice, bath60);
        const DensityMatrix rho = gibbs(ice, 60.0);
        return apply_generator(L, rho).cwiseAbs().maxCoeff();
    });

    run("measure-reference-states", 1e-5, [&] {
        auto dev = [](double got, double want) { return std::abs(got - want); };
        double worst = 0.0;
        MatrixXcd bell = MatrixXcd::Zero(4, 4);
        bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
        worst = std::max(worst, dev(concurrence(bell), 1.0));
        worst = std::max(worst, dev(entanglement_of_formation_bits(bell), 1.0));
        const DiscordResult db = quantum_discord(bell);
        worst = std::max(worst, dev(db.discord_bits, 1.0));
        worst = std::max(worst, dev(db.classical_J_bits, 1.0));
        worst = std::max(worst, dev(db.mutual_info_bits, 2.0));
        worst = std::max(worst, dev(geometric_discord(bell), 0.5));

        MatrixXcd product = MatrixXcd::Zero(4, 4);
        product(1, 1) = 1.0;  // |01><01|
        worst = std::max(worst, dev(concurrence(product), 0.0));
        const DiscordResult dp = quantum_discord(product);
        worst = std::max(worst, dev(dp.discord_bits, 0.0));
        worst = std::max(worst, dev(dp.mutual_info_bits, 0.0));
        worst = std::max(worst, dev(geometric_discord(product), 0.0));

        MatrixXcd cc = MatrixXcd::Zero(4, 4);
        cc(0, 0) = cc(3, 3) = 0.5;  // equal mixture of |00> and |11>
        worst = std::max(worst, dev(concurrence(cc), 0.0));
        const DiscordResult dc = quantum_discord(cc);
        worst = std::max(worst, dev(dc.discord_bits, 0.0));
        worst = std::max(worst, dev(dc.classical_J_bits, 1.0));
        worst = std::max(worst, dev(dc.mutual_info_bits, 1.0));
        worst = std::max(worst, dev(geometric_discord(cc), 0.0));
        return worst;
    });

    run("werner-concurrence", 1e-8, [&] {
        MatrixXcd singlet = MatrixXcd::Zero(4, 4);
        singlet(1, 1) = singlet(2, 2) = 0.5;
        singlet(1, 2) = singlet(2, 1) = -0.5;
        double worst = 0.0;
        for (double w : {0.1, 0.5, 0.9}) {
            const MatrixXcd rho =
                w * singlet + (1.0 - w) * 0.25 * MatrixXcd::Identity(4, 4);
            const double expected = std::max(0.0, (3.0 * w - 1.0) / 2.0);
            worst = std::max(worst, std::abs(concurrence(rho) - expected));
        }
        return worst;
    });

    run("csv-determinism", 0.5, [&] {
        SweepConfig cfg;
        cfg.tmin = 5.0;
        cfg.tmax = 6.0;
        cfg.tstep = 1.0;
        cfg.pairs = {{1, 2}};
        const auto first = run_sweep(cfg);
        const auto second = run_sweep(cfg);
        std::random_device rd;
        const auto dir = std::filesystem::temp_directory_path();
        const std::string stem = "hexice_validate_" + std::to_string(rd());
        const std::string pa = (dir / (stem + "_a.csv")).string();
        const std::string pb = (dir / (stem + "_b.csv")).string();
        emit_csv(first, cfg.pairs, pa);
        emit_csv(second, cfg.pairs, pb);
        const std::string a = detail::read_bytes(pa);
        const std::string b = detail::read_bytes(pb);
        std::filesystem::remove(pa);
        std::filesystem::remove(pb);
        if (a.empty()) throw NumericalError("csv determinism: empty output");
        return a == b ? 0.0 : 1.0;
    });

    run("plot-script-idempotence", 0.5, [&] {
        std::random_device rd;
        const auto dir = std::filesystem::temp_directory_path();
        const std::string path =
            (dir / ("hexice_validate_" + std::to_string(rd()) + ".py")).string();
        const std::vector<std::pair<int, int>> pairs = {{1, 2}, {2, 3}};
        emit_plot_script(pairs, "sweep.csv", path);
        const std::string a = detail::read_bytes(path);
        emit_plot_script(pairs, "sweep.csv", path);
        const std::string b = detail::read_bytes(path);
        std::filesystem::remove(path);
        if (a.empty()) throw NumericalError("plot script: empty output");
        return a == b ? 0.0 : 1.0;
    });

    if (depth == ValidationDepth::full) {
        run("block-equivalence-spectra-full", 1e-10, [&] {
            double worst = 0.0;
            for (const auto& [label, states] : all_sectors())
                worst = std::max(worst, sector_spectral_residual(spin, p, label));
            return worst;
        });

        run("relaxation-to-steady-state", 1e-6, [&] {
            double worst = 0.0;
            for (double T : {20.0, 60.0, 120.0}) {
                const BathSpec bath{0.01, 100.0, T};

                const auto edge_basis = enumerate_sector({1, 0, 0, 0, 0, 0});
                const SectorMatrix edge = build_fermionic(p, edge_basis);
                MatrixXcd e0 = MatrixXcd::Zero(2, 2);
                e0(0, 0) = 1.0;
                const Liouvillian Le(edge, bath);
                const auto edge_out =
                    propagate(Le, DensityMatrix{edge_basis, e0}, {200.0});
                worst = std::max(
                    worst, trace_distance(edge_out.back(), gibbs(edge, T)));

                MatrixXcd i0 = MatrixXcd::Zero(ice.dim(), ice.dim());
                for (std::size_t k = 0; k < ice.basis().size(); ++k)
                    if (ice.basis()[k] == ice_b) i0(k, k) = 1.0;
                const Liouvillian Li(ice, bath);
                const DensityMatrix target = gibbs(ice, T);
                // The slowest mode is a few 1e-3/ps at the coldest point, so
                // the later times are deep in the exponential tail.
                const auto ice_out = propagate(
                    Li, DensityMatrix{ice.basis(), i0}, {1000.0, 4000.0, 8000.0});
                worst = std::max(worst, trace_distance(ice_out.back(), target));
            }
            return worst;
        });

        run("frequency-corrected-fixed-point", 1e-8, [&] {
            const Liouvillian L(ice, bath60, true);
            const DensityMatrix rho = gibbs(ice, 60.0);
            return apply_generator(L, rho).cwiseAbs().maxCoeff();
        });
    }

    return out;
}

} // namespace hexice
