#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hexice/lattice.hpp"

using namespace hexice;

namespace {
BasisState from_ket(const std::string& ket) {
    REQUIRE(ket.size() == 12);
    BasisState s = 0;
    for (char c : ket) s = (s << 1) | (c == '1');
    return s;
}
} // namespace

TEST_CASE("site pairing tables", "[lattice]") {
    for (int j = 1; j <= 6; ++j) {
        auto [a, b] = edge_sites(j);
        CHECK(a == 2 * j - 1);
        CHECK(b == 2 * j);
        CHECK(edge_partner(a) == b);
        CHECK(edge_partner(b) == a);
    }
    CHECK(vortex_sites(1) == std::pair<int, int>{2, 3});
    CHECK(vortex_sites(6) == std::pair<int, int>{12, 1});
    CHECK(vortex_partner(2) == 3);
    CHECK(vortex_partner(3) == 2);
    CHECK(vortex_partner(12) == 1);
    CHECK(vortex_partner(1) == 12);
}

TEST_CASE("ket convention puts site 1 at the most significant bit", "[lattice]") {
    const BasisState s = from_ket("100000000000");
    CHECK(occupied(s, 1));
    for (int site = 2; site <= 12; ++site) CHECK_FALSE(occupied(s, site));
    CHECK(ice_b == from_ket("010101010101"));
    CHECK(ice_c == from_ket("101010101010"));
}

TEST_CASE("classify on the named configurations", "[lattice]") {
    CHECK(classify(from_ket("010101010101")) == DefectClass::IceRule);
    CHECK(classify(from_ket("101010101010")) == DefectClass::IceRule);
    // one proton per edge with an occupied vortex pair (12,1)
    CHECK(classify(from_ket("100101010101")) == DefectClass::Ionic);
    // both sites of edge 1 occupied, the defining Bjerrum case
    CHECK(classify(from_ket("110000000000")) == DefectClass::Bjerrum);
    // no doubly occupied edge either, still neither ice nor ionic
    CHECK(classify(from_ket("000000000000")) == DefectClass::Bjerrum);
}

TEST_CASE("classification counts over the full basis", "[lattice]") {
    int n_ice = 0, n_ionic = 0, n_bjerrum = 0;
    for (BasisState s = 0; s < basis_size; ++s) {
        switch (classify(s)) {
            case DefectClass::IceRule: ++n_ice; break;
            case DefectClass::Ionic: ++n_ionic; break;
            case DefectClass::Bjerrum: ++n_bjerrum; break;
        }
    }
    CHECK(n_ice == 2);
    CHECK(n_ionic == 62);
    CHECK(n_bjerrum == 4032);
}

TEST_CASE("a doubly occupied edge forces Bjerrum", "[lattice]") {
    for (BasisState s = 0; s < basis_size; ++s) {
        const SectorLabel lab = sector_of(s);
        const bool has_double = std::any_of(lab.begin(), lab.end(),
                                            [](std::uint8_t e) { return e == 2; });
        if (has_double) CHECK(classify(s) == DefectClass::Bjerrum);
    }
}

TEST_CASE("sector_of on the named configurations", "[lattice]") {
    CHECK(sector_of(from_ket("010101010101")) == SectorLabel{1, 1, 1, 1, 1, 1});
    CHECK(sector_of(from_ket("000000000000")) == SectorLabel{0, 0, 0, 0, 0, 0});
    CHECK(sector_of(from_ket("110000000000")) == SectorLabel{2, 0, 0, 0, 0, 0});
}

TEST_CASE("sector labels partition the basis", "[lattice]") {
    const auto sectors = all_sectors();
    CHECK(sectors.size() == 729);
    std::size_t total = 0;
    for (const auto& [label, states] : sectors) {
        total += states.size();
        int sum = 0;
        for (auto e : label) sum += e;
        for (BasisState s : states) CHECK(proton_count(s) == sum);
    }
    CHECK(total == 4096);
}

TEST_CASE("ice sector contents and ordering", "[lattice]") {
    const auto states = enumerate_sector(ice_label());
    REQUIRE(states.size() == 64);
    CHECK(std::is_sorted(states.begin(), states.end()));
    int n_ice = 0, n_ionic = 0;
    for (BasisState s : states) {
        const DefectClass c = classify(s);
        if (c == DefectClass::IceRule) ++n_ice;
        if (c == DefectClass::Ionic) ++n_ionic;
    }
    CHECK(n_ice == 2);
    CHECK(n_ionic == 62);
}

TEST_CASE("full lattice sector is a singleton", "[lattice]") {
    const auto states = enumerate_sector(SectorLabel{2, 2, 2, 2, 2, 2});
    REQUIRE(states.size() == 1);
    CHECK(states[0] == from_ket("111111111111"));
}

TEST_CASE("every state lists itself in its own sector", "[lattice]") {
    for (BasisState s = 0; s < basis_size; s += 37) {
        const auto states = enumerate_sector(sector_of(s));
        CHECK(std::find(states.begin(), states.end(), s) != states.end());
    }
}
