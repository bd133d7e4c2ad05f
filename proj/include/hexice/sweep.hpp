#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "hexice/config.hpp"
#include "hexice/hamiltonian.hpp"
#include "hexice/measures.hpp"
#include "hexice/open_system.hpp"

namespace hexice {

/// One temperature point of a sweep.
struct SweepRecord {
    double T = 0.0;       // K
    double P_BF = 0.0;    // weight on the two reference ice configurations
    double S_bits = 0.0;  // von Neumann entropy of the steady state
    double C_l1 = 0.0;
    double C_rel_bits = 0.0;
    std::vector<PairMeasures> pair_results;

    void validate() const {
        const bool finite = std::isfinite(T) && std::isfinite(P_BF) &&
                            std::isfinite(S_bits) && std::isfinite(C_l1) &&
                            std::isfinite(C_rel_bits);
        if (!finite) throw NumericalError("sweep record: non-finite entry");
        if (P_BF < -1e-12 || P_BF > 1.0 + 1e-12)
            throw NumericalError("sweep record: P_BF outside [0, 1]");
        if (S_bits < -1e-12 || S_bits > 6.0 + 1e-12)
            throw NumericalError("sweep record: entropy outside [0, 6] bits");
        for (const auto& pm : pair_results) {
            const bool ok = std::isfinite(pm.concurrence) && std::isfinite(pm.eof_bits) &&
                            std::isfinite(pm.discord_bits) && std::isfinite(pm.geo_discord) &&
                            std::isfinite(pm.mutual_info_bits) &&
                            std::isfinite(pm.classical_J_bits);
            if (!ok) throw NumericalError("sweep record: non-finite pair measure");
        }
    }
};

/// Steady state and all configured measures at one temperature.  `ice` must
/// be the 64-configuration singly-occupied-edges block the steady state
/// lives on.
inline SweepRecord evaluate_point(const SectorMatrix& ice, const SweepConfig& cfg,
                                  double T) {
    SweepRecord r;
    r.T = T;
    const DensityMatrix rho = gibbs(ice, T);
    r.P_BF = p_bf(rho);
    r.S_bits = von_neumann_entropy(rho);
    r.C_l1 = coherence_l1(rho);
    r.C_rel_bits = coherence_relative_bits(rho);
    r.pair_results.reserve(cfg.pairs.size());
    for (const auto& [i, j] : cfg.pairs)
        r.pair_results.push_back(pair_measures(rho, i, j));
    r.validate();
    return r;
}

/// Runs the full temperature grid.  The heavy eigendecomposition happens
/// once up front; the per-temperature work is distributed over a small
/// worker pool and results land in grid order regardless of scheduling.
/// Any per-point failure aborts the sweep naming the temperature.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::vector<double> grid = cfg.temperature_grid();
    const SectorMatrix ice = ice_sector_hamiltonian(cfg.params);
    ice.eigensystem();  // decompose before the pool starts

    std::vector<SweepRecord> records(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= grid.size()) return;
            try {
                records[k] = evaluate_point(ice, cfg, grid[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t n_workers =
        std::min<std::size_t>(grid.size(), hw == 0 ? 1 : hw);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
            char head[64];
            std::snprintf(head, sizeof head, "sweep failed at T = %g K: ", grid[k]);
            throw NumericalError(std::string(head) + e.what());
        }
    }
    return records;
}

namespace detail {

inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

inline std::string pair_suffix(const std::pair<int, int>& p) {
    return "_s" + std::to_string(p.first) + "_" + std::to_string(p.second);
}

} // namespace detail

/// Column header for a given pair list: five global columns, then six
/// measure columns per pair tagged with the site indices.
inline std::string csv_header(const std::vector<std::pair<int, int>>& pairs) {
    std::string h = "T_K,P_BF,S_bits,C_l1,C_rel_bits";
    static const char* group[] = {"concurrence", "eof_bits",         "discord_bits",
                                  "geo_discord", "mutual_info_bits", "classical_J_bits"};
    for (const auto& p : pairs)
        for (const char* g : group) h += "," + std::string(g) + detail::pair_suffix(p);
    return h;
}

/// Writes the records as CSV: LF line endings, every float in %.11e so
/// reruns are byte-identical.  Refuses to create a file for an empty sweep.
inline void emit_csv(const std::vector<SweepRecord>& records,
                     const std::vector<std::pair<int, int>>& pairs,
                     const std::string& path) {
    if (records.empty())
        throw NumericalError("emit_csv: no records to write");
    for (const auto& r : records) {
        r.validate();
        if (r.pair_results.size() != pairs.size())
            throw NumericalError("emit_csv: record pair count does not match header");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw NumericalError("emit_csv: cannot open '" + path + "'");
    out << csv_header(pairs) << '\n';
    for (const auto& r : records) {
        out << detail::sci(r.T) << ',' << detail::sci(r.P_BF) << ','
            << detail::sci(r.S_bits) << ',' << detail::sci(r.C_l1) << ','
            << detail::sci(r.C_rel_bits);
        for (const auto& pm : r.pair_results) {
            out << ',' << detail::sci(pm.concurrence) << ',' << detail::sci(pm.eof_bits)
                << ',' << detail::sci(pm.discord_bits) << ',' << detail::sci(pm.geo_discord)
                << ',' << detail::sci(pm.mutual_info_bits) << ','
                << detail::sci(pm.classical_J_bits);
        }
        out << '\n';
    }
    out.flush();
    if (!out)
        throw NumericalError("emit_csv: write to '" + path + "' failed");
}

/// Companion matplotlib script.  The marked temperatures are annotation
/// guides on the plots only; nothing in the model reads them.
inline void emit_plot_script(const std::vector<std::pair<int, int>>& pairs,
                             const std::string& csv_name, const std::string& path) {
    std::string py;
    py += "#!/usr/bin/env python3\n";
    py += "# Plots the sweep CSV written alongside this script.\n";
    py += "# Run from the directory containing " + csv_name + ".\n";
    py += "import csv\n";
    py += "import matplotlib\n";
    py += "matplotlib.use(\"Agg\")\n";
    py += "import matplotlib.pyplot as plt\n";
    py += "\n";
    py += "with open(\"" + csv_name + "\", newline=\"\") as fh:\n";
    py += "    rows = list(csv.DictReader(fh))\n";
    py += "cols = {k: [float(r[k]) for r in rows] for k in rows[0]}\n";
    py += "T = cols[\"T_K\"]\n";
    py += "\n";
    py += "fig, axes = plt.subplots(2, 2, figsize=(11, 8), sharex=True)\n";
    py += "marks = [58.9, 73.4, 105.0]\n";
    py += "\n";
    py += "ax = axes[0][0]\n";
    py += "ax.plot(T, cols[\"P_BF\"], label=\"P_BF\")\n";
    py += "ax.plot(T, cols[\"S_bits\"], label=\"S (bits)\")\n";
    py += "ax.set_title(\"Reference-state weight and entropy\")\n";
    py += "\n";
    py += "ax = axes[0][1]\n";
    py += "ax.plot(T, cols[\"C_l1\"], label=\"C_l1\")\n";
    py += "ax.plot(T, cols[\"C_rel_bits\"], label=\"C_rel (bits)\")\n";
    py += "ax.set_title(\"Coherence\")\n";
    py += "\n";
    py += "ax = axes[1][0]\n";
    std::string quantum = "ax = axes[1][1]\n";
    for (const auto& p : pairs) {
        const std::string s = detail::pair_suffix(p);
        const std::string tag =
            std::to_string(p.first) + "-" + std::to_string(p.second);
        py += "ax.plot(T, cols[\"mutual_info_bits" + s + "\"], label=\"I " + tag + "\")\n";
        py += "ax.plot(T, cols[\"classical_J_bits" + s + "\"], label=\"J " + tag + "\")\n";
        quantum += "ax.plot(T, cols[\"concurrence" + s + "\"], label=\"C " + tag + "\")\n";
        quantum += "ax.plot(T, cols[\"eof_bits" + s + "\"], label=\"EoF " + tag + "\")\n";
        quantum += "ax.plot(T, cols[\"discord_bits" + s + "\"], label=\"D " + tag + "\")\n";
        quantum += "ax.plot(T, cols[\"geo_discord" + s + "\"], label=\"D_G " + tag + "\")\n";
    }
    py += "ax.set_title(\"Classical pair correlations\")\n";
    py += "\n";
    py += quantum;
    py += "ax.set_title(\"Quantum pair correlations\")\n";
    py += "\n";
    py += "for ax in axes.flat:\n";
    py += "    for m in marks:\n";
    py += "        ax.axvline(m, color=\"gray\", linestyle=\":\", linewidth=0.8)\n";
    py += "    ax.set_xlabel(\"T (K)\")\n";
    py += "    ax.legend(fontsize=8)\n";
    py += "\n";
    py += "fig.tight_layout()\n";
    py += "fig.savefig(\"sweep.png\", dpi=150)\n";
    py += "print(\"wrote sweep.png\")\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw NumericalError("emit_plot_script: cannot open '" + path + "'");
    out << py;
    out.flush();
    if (!out)
        throw NumericalError("emit_plot_script: write to '" + path + "' failed");
}

} // namespace hexice
