#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace hexice {

/// 12-site hexagonal proton ring.
///
/// Sites are numbered 1..12 around the ring.  Each hydrogen bond (edge) owns
/// the site pair (2j-1, 2j); each vertex of the hexagon (vortex) sits between
/// the site pair (2j, 2j+1), indices mod 12, so the pair (12, 1) closes the
/// ring.  A basis state is a 12-bit word whose printed ket |s1 s2 ... s12>
/// puts site 1 at the most significant bit.

inline constexpr int n_sites = 12;
inline constexpr int n_edges = 6;
inline constexpr int basis_size = 4096;

using BasisState = int;

inline constexpr BasisState ice_b = 0b010101010101;  // |010101010101>
inline constexpr BasisState ice_c = 0b101010101010;  // |101010101010>

inline bool occupied(BasisState s, int site) {
    return (s >> (n_sites - site)) & 1;
}

inline int proton_count(BasisState s) {
    return __builtin_popcount(static_cast<unsigned>(s));
}

inline BasisState flip_site(BasisState s, int site) {
    return s ^ (1 << (n_sites - site));
}

/// Sites forming edge j, 1-based j in 1..6.
inline std::pair<int, int> edge_sites(int j) {
    return {2 * j - 1, 2 * j};
}

/// Sites forming vortex pair j, 1-based j in 1..6; pair 6 wraps to (12, 1).
inline std::pair<int, int> vortex_sites(int j) {
    return {2 * j, (2 * j) % n_sites + 1};
}

inline int edge_partner(int site) {
    return (site % 2 == 1) ? site + 1 : site - 1;
}

inline int vortex_partner(int site) {
    return (site % 2 == 0) ? site % n_sites + 1 : (site + n_sites - 2) % n_sites + 1;
}

/// Per-edge occupancy vector; entries in {0,1,2}.
using SectorLabel = std::array<std::uint8_t, n_edges>;

inline SectorLabel sector_of(BasisState s) {
    SectorLabel lab{};
    for (int j = 1; j <= n_edges; ++j) {
        auto [a, b] = edge_sites(j);
        lab[j - 1] = static_cast<std::uint8_t>(occupied(s, a) + occupied(s, b));
    }
    return lab;
}

enum class DefectClass { IceRule, Ionic, Bjerrum };

/// Total classification of a configuration.  The two alternating states are
/// the ice-rule states; every other one-proton-per-edge configuration hosts
/// an ionic defect; everything else is a Bjerrum configuration.  Counts over
/// the full basis: {2, 62, 4032}.
inline DefectClass classify(BasisState s) {
    if (s == ice_b || s == ice_c) return DefectClass::IceRule;
    SectorLabel lab = sector_of(s);
    for (auto e : lab)
        if (e != 1) return DefectClass::Bjerrum;
    return DefectClass::Ionic;
}

/// All basis states carrying the given label, ascending bits order.  This is
/// the canonical ordering every matrix in the library uses.
inline std::vector<BasisState> enumerate_sector(const SectorLabel& label) {
    std::vector<BasisState> out;
    for (BasisState s = 0; s < basis_size; ++s)
        if (sector_of(s) == label) out.push_back(s);
    return out;
}

inline SectorLabel ice_label() {
    return SectorLabel{1, 1, 1, 1, 1, 1};
}

/// The 729 labels realized on the basis, each with its member states.
inline std::map<SectorLabel, std::vector<BasisState>> all_sectors() {
    std::map<SectorLabel, std::vector<BasisState>> out;
    for (BasisState s = 0; s < basis_size; ++s)
        out[sector_of(s)].push_back(s);
    return out;
}

} // namespace hexice
