#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "hexice/sweep.hpp"
#include "hexice/validate.hpp"

using namespace hexice;
using Catch::Matchers::WithinAbs;

namespace {

std::filesystem::path temp_file(const std::string& suffix) {
    static std::mt19937_64 rng(std::random_device{}());
    return std::filesystem::temp_directory_path() /
           ("hexice_test_" + std::to_string(rng()) + suffix);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        if (at == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, at - start));
        start = at + 1;
    }
}

} // namespace

TEST_CASE("config files parse and layer onto the defaults", "[sweep]") {
    const auto path = temp_file(".toml");
    {
        std::ofstream out(path);
        out << "# sweep setup\n"
            << "J = 2.5\n"
            << "V_intra = 35   # meV\n"
            << "tmin = 10\n"
            << "tmax = 20\n"
            << "pairs = \"3:4,11:12\"\n"
            << "out = \"run7\"\n"
            << "lamb_shift = true\n";
    }
    const SweepConfig cfg = parse_config_file(path.string());
    std::filesystem::remove(path);

    CHECK(cfg.params.J == 2.5);
    CHECK(cfg.params.V_intra == 35.0);
    CHECK(cfg.params.W == 0.0);  // untouched default
    CHECK(cfg.tmin == 10.0);
    CHECK(cfg.tmax == 20.0);
    CHECK(cfg.tstep == 1.0);
    REQUIRE(cfg.pairs.size() == 2);
    CHECK(cfg.pairs[0] == std::pair<int, int>(3, 4));
    CHECK(cfg.pairs[1] == std::pair<int, int>(11, 12));
    CHECK(cfg.output_dir == "run7");
    CHECK(cfg.lamb_shift);
}

TEST_CASE("malformed config input is rejected", "[sweep]") {
    auto reject = [](const std::string& text) {
        const auto path = temp_file(".toml");
        {
            std::ofstream out(path);
            out << text;
        }
        CHECK_THROWS_AS(parse_config_file(path.string()), std::invalid_argument);
        std::filesystem::remove(path);
    };
    reject("unknown_key = 1\n");
    reject("J = fast\n");
    reject("J 2.5\n");
    reject("[section]\nJ = 2\n");
    reject("pairs = 1-2\n");
    reject("lamb_shift = yes\n");
    reject("J =\n");

    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.toml"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_pairs("1:2,,3:4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_pairs("12"), std::invalid_argument);
}

TEST_CASE("temperature grid is inclusive and configuration is checked",
          "[sweep]") {
    SweepConfig cfg;
    const auto grid = cfg.temperature_grid();
    REQUIRE(grid.size() == 149);
    CHECK(grid.front() == 2.0);
    CHECK(grid.back() == 150.0);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] > grid[k - 1]);

    cfg.tmin = 5.0;
    cfg.tmax = 7.0;
    REQUIRE(cfg.temperature_grid() == std::vector<double>{5.0, 6.0, 7.0});

    auto broken = [] { return SweepConfig{}; };
    SweepConfig bad = broken();
    bad.tstep = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = broken();
    bad.tmin = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = broken();
    bad.tmax = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = broken();
    bad.pairs = {{3, 3}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = broken();
    bad.pairs = {{0, 5}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = broken();
    bad.eta = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    SweepRecord rec;
    rec.T = 5.0;
    rec.P_BF = 1.5;
    CHECK_THROWS_AS(rec.validate(), NumericalError);
    rec.P_BF = 0.5;
    rec.S_bits = std::nan("");
    CHECK_THROWS_AS(rec.validate(), NumericalError);
}

TEST_CASE("sweep point at the reference temperature matches stored values",
          "[sweep]") {
    const SweepConfig cfg;
    const SectorMatrix ice = ice_sector_hamiltonian(cfg.params);
    const SweepRecord r = evaluate_point(ice, cfg, 5.0);

    CHECK_THAT(r.P_BF, WithinAbs(0.984942560133, 1e-9));
    CHECK_THAT(r.S_bits, WithinAbs(0.999999906643, 1e-9));
    CHECK_THAT(r.C_l1, WithinAbs(0.826410790381, 1e-9));
    CHECK_THAT(r.C_rel_bits, WithinAbs(0.153447373269, 1e-9));

    REQUIRE(r.pair_results.size() == 2);
    const PairMeasures& edge = r.pair_results[0];  // sites 1,2 share an edge
    CHECK_THAT(edge.concurrence, WithinAbs(0.100507684543, 1e-9));
    CHECK_THAT(edge.eof_bits, WithinAbs(0.025486842859, 1e-9));
    CHECK_THAT(edge.discord_bits, WithinAbs(0.007299222837, 1e-9));
    CHECK_THAT(edge.geo_discord, WithinAbs(5.050897326049e-3, 1e-9));
    CHECK_THAT(edge.mutual_info_bits, WithinAbs(1.007299222837, 1e-9));
    CHECK_THAT(edge.classical_J_bits, WithinAbs(1.000000000000, 1e-9));

    const PairMeasures& across = r.pair_results[1];  // sites 2,3 span edges
    CHECK(across.concurrence <= 1e-8);
    CHECK(across.geo_discord <= 1e-8);
    CHECK(across.discord_bits <= 1e-6);
    CHECK_THAT(across.mutual_info_bits, WithinAbs(0.954294249369, 1e-9));
    CHECK_THAT(across.classical_J_bits, WithinAbs(0.954294249369, 1e-9));
}

TEST_CASE("sweep fills its grid in order and reruns byte-identically",
          "[sweep]") {
    SweepConfig cfg;
    cfg.tmin = 5.0;
    cfg.tmax = 7.0;
    cfg.pairs = {{1, 2}};

    const auto first = run_sweep(cfg);
    REQUIRE(first.size() == 3);
    CHECK(first[0].T == 5.0);
    CHECK(first[1].T == 6.0);
    CHECK(first[2].T == 7.0);
    CHECK_THAT(first[0].P_BF, WithinAbs(0.984942560133, 1e-9));
    for (const auto& r : first) REQUIRE(r.pair_results.size() == 1);

    const auto second = run_sweep(cfg);
    const auto pa = temp_file("_a.csv");
    const auto pb = temp_file("_b.csv");
    emit_csv(first, cfg.pairs, pa.string());
    emit_csv(second, cfg.pairs, pb.string());
    const std::string a = slurp(pa);
    const std::string b = slurp(pb);
    std::filesystem::remove(pa);
    std::filesystem::remove(pb);
    CHECK(a == b);
}

TEST_CASE("csv output carries the promised schema", "[sweep]") {
    SweepConfig cfg;
    cfg.tmin = 5.0;
    cfg.tmax = 6.0;
    const auto records = run_sweep(cfg);
    const auto path = temp_file(".csv");
    emit_csv(records, cfg.pairs, path.string());
    const std::string text = slurp(path);
    std::filesystem::remove(path);

    CHECK(text.find('\r') == std::string::npos);
    REQUIRE(!text.empty());
    CHECK(text.back() == '\n');

    auto lines = split(text, '\n');
    REQUIRE(lines.back().empty());  // trailing newline
    lines.pop_back();
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "T_K,P_BF,S_bits,C_l1,C_rel_bits"
          ",concurrence_s1_2,eof_bits_s1_2,discord_bits_s1_2,geo_discord_s1_2"
          ",mutual_info_bits_s1_2,classical_J_bits_s1_2"
          ",concurrence_s2_3,eof_bits_s2_3,discord_bits_s2_3,geo_discord_s2_3"
          ",mutual_info_bits_s2_3,classical_J_bits_s2_3");

    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto fields = split(lines[row], ',');
        REQUIRE(fields.size() == 17);
        for (const auto& f : fields) {
            // fixed %.11e shape: 11 fractional digits, then the exponent
            const std::size_t dot = f.find('.');
            const std::size_t e = f.find('e');
            REQUIRE(dot != std::string::npos);
            REQUIRE(e != std::string::npos);
            CHECK(e - dot == 12);
            CHECK(std::isfinite(std::stod(f)));
        }
    }
}

TEST_CASE("csv writer refuses empty or inconsistent input", "[sweep]") {
    const std::vector<std::pair<int, int>> pairs = {{1, 2}};
    const auto path = temp_file(".csv");
    CHECK_THROWS_AS(emit_csv({}, pairs, path.string()), NumericalError);
    CHECK(!std::filesystem::exists(path));

    SweepRecord rec;
    rec.T = 5.0;
    rec.P_BF = 0.9;
    rec.S_bits = 1.0;  // no pair results although one pair is configured
    CHECK_THROWS_AS(emit_csv({rec}, pairs, path.string()), NumericalError);
    CHECK(!std::filesystem::exists(path));
}

TEST_CASE("plot script references the data and the marked temperatures",
          "[sweep]") {
    const std::vector<std::pair<int, int>> pairs = {{1, 2}, {2, 3}};
    const auto path = temp_file(".py");
    emit_plot_script(pairs, "sweep.csv", path.string());
    const std::string a = slurp(path);
    emit_plot_script(pairs, "sweep.csv", path.string());
    const std::string b = slurp(path);
    std::filesystem::remove(path);

    CHECK(a == b);
    CHECK(a.find("sweep.csv") != std::string::npos);
    CHECK(a.find("58.9") != std::string::npos);
    CHECK(a.find("73.4") != std::string::npos);
    CHECK(a.find("105") != std::string::npos);
    CHECK(a.find("axvline") != std::string::npos);
    CHECK(a.find("matplotlib") != std::string::npos);
    CHECK(a.find("concurrence_s1_2") != std::string::npos);
    CHECK(a.find("classical_J_bits_s2_3") != std::string::npos);
    CHECK(a.find("subplots(2, 2") != std::string::npos);
}

TEST_CASE("bad sweep configuration fails before any computation", "[sweep]") {
    SweepConfig cfg;
    cfg.tstep = -1.0;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = SweepConfig{};
    cfg.pairs = {{4, 4}};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
}

TEST_CASE("entrywise block comparison catches a flipped tunneling sign",
          "[sweep]") {
    const ModelParams p{};
    SpinHamiltonian good = build_spin(p);
    CHECK(sector_entry_residual(good, p, ice_label()) <= 1e-10);
    CHECK(sector_spectral_residual(good, p, ice_label()) <= 1e-10);

    // Flip the sign of every transverse (tunneling) word.  Per sector the
    // spectra cannot move, because the edges are disjoint and the sign is a
    // local gauge; the matrices themselves disagree immediately.
    SpinHamiltonian flipped = good;
    for (auto& term : flipped.terms) {
        bool transverse = false;
        for (Pauli letter : term.letters)
            transverse |= (letter == Pauli::X || letter == Pauli::Y);
        if (transverse) term.coefficient = -term.coefficient;
    }
    CHECK(sector_entry_residual(flipped, p, ice_label()) > 1.0);
    CHECK(sector_spectral_residual(flipped, p, ice_label()) <= 1e-10);

    // A corrupted longitudinal coupling moves the spectra as well.
    SpinHamiltonian detuned = good;
    for (auto& term : detuned.terms) {
        bool zz = false;
        for (Pauli letter : term.letters) zz |= (letter == Pauli::Z);
        if (zz) {
            term.coefficient += 1.0;
            break;
        }
    }
    CHECK(sector_spectral_residual(detuned, p, ice_label()) > 1e-6);
}

TEST_CASE("quick validation passes cleanly", "[sweep]") {
    const auto checks = run_validation(ValidationDepth::quick);
    REQUIRE(!checks.empty());
    bool saw_entries = false, saw_csv = false;
    for (const auto& c : checks) {
        INFO(c.name << " residual=" << c.residual << " limit=" << c.limit << " "
                    << c.detail);
        CHECK(c.pass);
        CHECK(std::isfinite(c.residual));
        saw_entries |= (c.name == "block-equivalence-entries");
        saw_csv |= (c.name == "csv-determinism");
    }
    CHECK(saw_entries);
    CHECK(saw_csv);
}
