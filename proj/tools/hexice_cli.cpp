#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "hexice/validate.hpp"

namespace {

using namespace hexice;

/// One flag per config key so a config file and command line can layer:
/// defaults, then the file, then any flag that was actually given.
struct Options {
    std::string config;
    double W = 0, J = 0, V_inter = 0, V_intra = 0, lambda = 0;
    double eta = 0, omega_c = 0, tmin = 0, tmax = 0, tstep = 0;
    std::string pairs, out;
    bool lamb_shift = false;

    CLI::Option* o_config = nullptr;
    CLI::Option* o_W = nullptr;
    CLI::Option* o_J = nullptr;
    CLI::Option* o_V_inter = nullptr;
    CLI::Option* o_V_intra = nullptr;
    CLI::Option* o_lambda = nullptr;
    CLI::Option* o_eta = nullptr;
    CLI::Option* o_omega_c = nullptr;
    CLI::Option* o_tmin = nullptr;
    CLI::Option* o_tmax = nullptr;
    CLI::Option* o_tstep = nullptr;
    CLI::Option* o_pairs = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_lamb_shift = nullptr;

    void install(CLI::App* cmd, bool with_grid) {
        o_config = cmd->add_option("--config", config, "key = value config file");
        o_W = cmd->add_option("--W", W, "on-site energy, meV");
        o_J = cmd->add_option("--J", J, "tunneling amplitude, meV");
        o_V_inter = cmd->add_option("--V-inter", V_inter, "edge penalty, meV");
        o_V_intra = cmd->add_option("--V-intra", V_intra, "vortex penalty, meV");
        o_lambda = cmd->add_option("--lambda", lambda, "energy offset, meV");
        o_eta = cmd->add_option("--eta", eta, "bath coupling");
        o_omega_c = cmd->add_option("--omega-c", omega_c, "bath cutoff, meV");
        if (with_grid) {
            o_tmin = cmd->add_option("--tmin", tmin, "grid start, K");
            o_tmax = cmd->add_option("--tmax", tmax, "grid end, K");
            o_tstep = cmd->add_option("--tstep", tstep, "grid step, K");
            o_out = cmd->add_option("--out", out, "output directory");
        }
        o_pairs = cmd->add_option("--pairs", pairs, "site pairs, e.g. 1:2,2:3");
        o_lamb_shift =
            cmd->add_flag("--lamb-shift", lamb_shift, "include the frequency correction");
    }

    SweepConfig resolve() const {
        SweepConfig cfg =
            o_config->count() ? parse_config_file(config) : SweepConfig{};
        if (o_W->count()) cfg.params.W = W;
        if (o_J->count()) cfg.params.J = J;
        if (o_V_inter->count()) cfg.params.V_inter = V_inter;
        if (o_V_intra->count()) cfg.params.V_intra = V_intra;
        if (o_lambda->count()) cfg.params.lambda = lambda;
        if (o_eta->count()) cfg.eta = eta;
        if (o_omega_c->count()) cfg.omega_c = omega_c;
        if (o_tmin && o_tmin->count()) cfg.tmin = tmin;
        if (o_tmax && o_tmax->count()) cfg.tmax = tmax;
        if (o_tstep && o_tstep->count()) cfg.tstep = tstep;
        if (o_pairs->count()) cfg.pairs = parse_pairs(pairs);
        if (o_out && o_out->count()) cfg.output_dir = out;
        if (o_lamb_shift->count()) cfg.lamb_shift = true;
        return cfg;
    }
};

void print_value(const char* key, double v) { std::printf("%s = %.11e\n", key, v); }

int cmd_sweep(const SweepConfig& cfg) {
    const auto records = run_sweep(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto csv = std::filesystem::path(cfg.output_dir) / "sweep.csv";
    const auto plot = std::filesystem::path(cfg.output_dir) / "plot_sweep.py";
    emit_csv(records, cfg.pairs, csv.string());
    emit_plot_script(cfg.pairs, "sweep.csv", plot.string());
    std::printf("wrote %s (%zu temperatures, %zu pairs)\n", csv.string().c_str(),
                records.size(), cfg.pairs.size());
    std::printf("wrote %s\n", plot.string().c_str());
    return 0;
}

int cmd_measures(const SweepConfig& cfg, double T) {
    if (!std::isfinite(T) || T <= 0.0)
        throw std::invalid_argument("measures: --T must be a positive temperature");
    cfg.validate();
    const SectorMatrix ice = ice_sector_hamiltonian(cfg.params);
    const DensityMatrix rho = gibbs(ice, T);
    const Liouvillian L(ice, BathSpec{cfg.eta, cfg.omega_c, T}, cfg.lamb_shift);

    print_value("T_K", T);
    print_value("P_BF", p_bf(rho));
    print_value("S_bits", von_neumann_entropy(rho));
    print_value("purity", purity(rho));
    print_value("C_l1", coherence_l1(rho));
    print_value("C_rel_bits", coherence_relative_bits(rho));
    for (std::size_t k = 0; k < ice.basis().size(); ++k) {
        if (ice.basis()[k] == ice_b)
            print_value("population_b", rho.mat(static_cast<int>(k), static_cast<int>(k)).real());
        if (ice.basis()[k] == ice_c)
            print_value("population_c", rho.mat(static_cast<int>(k), static_cast<int>(k)).real());
    }
    print_value("trace_error", std::abs(rho.mat.trace().real() - 1.0));
    print_value("fixed_point_residual", apply_generator(L, rho).cwiseAbs().maxCoeff());
    for (const auto& [i, j] : cfg.pairs) {
        const PairMeasures pm = pair_measures(rho, i, j);
        char key[64];
        auto field = [&](const char* name, double v) {
            std::snprintf(key, sizeof key, "pair_%d_%d.%s", i, j, name);
            print_value(key, v);
        };
        field("concurrence", pm.concurrence);
        field("eof_bits", pm.eof_bits);
        field("discord_bits", pm.discord_bits);
        field("geo_discord", pm.geo_discord);
        field("mutual_info_bits", pm.mutual_info_bits);
        field("classical_J_bits", pm.classical_J_bits);
    }
    return 0;
}

int cmd_validate(ValidationDepth depth) {
    const auto checks = run_validation(depth);
    int failures = 0;
    for (const auto& c : checks) {
        if (!c.pass) ++failures;
        std::printf("%s  %-32s  residual=%.3e  (limit %.1e)%s%s\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.residual, c.limit,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failures,
                checks.size());
    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states and correlation measures of the hexameric proton ring"};
    app.require_subcommand(1);

    Options sweep_opts, measures_opts;
    double T = 0.0;
    std::string depth = "quick";

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "temperature sweep: CSV table and plot script");
    sweep_opts.install(sweep_cmd, true);

    CLI::App* measures_cmd =
        app.add_subcommand("measures", "single-temperature diagnostic dump");
    measures_cmd->add_option("--T", T, "temperature, K")->required();
    measures_opts.install(measures_cmd, false);

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "run the named model invariants");
    validate_cmd->add_option("--depth", depth, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts.resolve());
        if (measures_cmd->parsed()) return cmd_measures(measures_opts.resolve(), T);
        if (validate_cmd->parsed())
            return cmd_validate(depth == "full" ? ValidationDepth::full
                                                : ValidationDepth::quick);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
