#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "cnotdihedral/gf2.hpp"

// Phase-free n-qubit Pauli strings encoded as an (x-mask, z-mask) pair,
// plus the orbit partitions of the Pauli set under conjugation by the CNOT
// subgroup and the CZ subgroup.

namespace cnotdihedral {

struct PauliString {
    int n = 1;
    uint64_t x = 0;
    uint64_t z = 0;

    PauliString() = default;
    PauliString(int n_, uint64_t x_, uint64_t z_)
        : n(n_), x(x_ & low_mask(n_)), z(z_ & low_mask(n_)) {
        check_dimension(n_);
    }

    bool is_identity() const { return x == 0 && z == 0; }
    uint64_t index() const { return (x << n) | z; }
    static PauliString from_index(int n, uint64_t idx) {
        return PauliString(n, idx >> n, idx & low_mask(n));
    }

    friend bool operator==(const PauliString&, const PauliString&) = default;
};

inline uint64_t pauli_count(int n) { return uint64_t(1) << (2 * n); }

// 1 if P and Q anticommute, 0 otherwise (symplectic form).
inline int anticommute(const PauliString& p, const PauliString& q) {
    return parity64((p.x & q.z) ^ (p.z & q.x));
}

// Conjugation by CNOT(control, target): X_c -> X_c X_t, Z_t -> Z_c Z_t.
inline PauliString conjugate_cnot(PauliString p, int control, int target) {
    if ((p.x >> control) & 1) p.x ^= uint64_t(1) << target;
    if ((p.z >> target) & 1) p.z ^= uint64_t(1) << control;
    return p;
}

// Conjugation by CZ(i, j): X_i -> X_i Z_j, X_j -> Z_i X_j (signs dropped).
inline PauliString conjugate_cz(PauliString p, int i, int j) {
    if ((p.x >> i) & 1) p.z ^= uint64_t(1) << j;
    if ((p.x >> j) & 1) p.z ^= uint64_t(1) << i;
    return p;
}

// Orbit labels under CNOT conjugation. For n = 1 there are no CNOTs and the
// partition degenerates to singletons, which the classification below
// already produces: X, Z and Y land in their own classes.
enum class CxOrbit { I, X, Z, Y, YY };

inline CxOrbit cx_orbit_of(const PauliString& p) {
    if (p.x == 0) return p.z == 0 ? CxOrbit::I : CxOrbit::Z;
    uint64_t z_on_support = p.z & p.x;
    if (parity64(z_on_support)) return CxOrbit::Y;   // odd number of Y factors
    if (p.z != 0) return CxOrbit::YY;                // even (incl. zero) Y count, some Z
    return CxOrbit::X;
}

struct OrbitPartition {
    // orbits[i] lists Pauli indices; representative is the first entry.
    std::vector<std::vector<uint64_t>> orbits;
};

inline OrbitPartition orbits_cx(int n) {
    if (n > 6) throw DimensionError("orbit enumeration supported for n <= 6");
    OrbitPartition part;
    part.orbits.resize(5);
    for (uint64_t idx = 0; idx < pauli_count(n); ++idx) {
        PauliString p = PauliString::from_index(n, idx);
        part.orbits[size_t(cx_orbit_of(p))].push_back(idx);
    }
    // n = 1: the Y-even-with-Z class and the YY class are empty or merge
    // into singletons automatically; drop empty classes.
    std::erase_if(part.orbits, [](const auto& o) { return o.empty(); });
    return part;
}

// CZ-orbit key: Paulis with x = 0 are singletons; otherwise the orbit is
// determined by the x-mask together with the parity of Z-factors on it.
inline uint64_t cz_orbit_key(const PauliString& p) {
    if (p.x == 0) return p.z << 1;  // singleton {Z(z)}
    return (p.x << 2) | uint64_t(parity64(p.z & p.x)) << 1 | 1;
}

inline OrbitPartition orbits_cz(int n) {
    if (n > 6) throw DimensionError("orbit enumeration supported for n <= 6");
    std::vector<std::pair<uint64_t, uint64_t>> keyed;
    for (uint64_t idx = 0; idx < pauli_count(n); ++idx)
        keyed.push_back({cz_orbit_key(PauliString::from_index(n, idx)), idx});
    std::sort(keyed.begin(), keyed.end());
    OrbitPartition part;
    for (size_t i = 0; i < keyed.size();) {
        size_t j = i;
        std::vector<uint64_t> orbit;
        while (j < keyed.size() && keyed[j].first == keyed[i].first)
            orbit.push_back(keyed[j++].second);
        part.orbits.push_back(std::move(orbit));
        i = j;
    }
    return part;
}

}  // namespace cnotdihedral
