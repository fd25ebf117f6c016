#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <unordered_set>

#include "cnotdihedral/circuit.hpp"
#include "cnotdihedral/group.hpp"
#include "cnotdihedral/pauli.hpp"

// Brute-force matrix ground truth: explicit unitaries for group elements,
// Hermitian Pauli matrices, and breadth-first group enumeration over the
// generating set. Enumeration works on an exact phased-permutation
// representation, so the global-phase quotient needs no floating-point
// canonicalization.

namespace cnotdihedral {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

inline void check_statevector_size(int n, int limit = 12) {
    if (n > limit) throw BudgetError("statevector size guard exceeded (n > " +
                                     std::to_string(limit) + ")");
}

// Column b carries the single entry w^{p(b)} at row Bb xor c.
inline Matrix element_to_unitary(const CNOTDihedralElement& g) {
    int n = g.poly.n;
    check_statevector_size(n);
    uint64_t dim = uint64_t(1) << n;
    uint32_t m = g.poly.modulus();
    Matrix u = Matrix::Zero(dim, dim);
    for (uint64_t b = 0; b < dim; ++b) {
        GF2Vector vb(n, b);
        uint64_t row = mat_vec(g.linear, vb).bits ^ g.shift.bits;
        double angle = 2.0 * std::numbers::pi * evaluate(g.poly, vb) / double(m);
        u(row, b) = std::polar(1.0, angle);
    }
    return u;
}

// Hermitian Pauli matrix: tensor product of I, X, Y, Z per qubit. Qubit 0 is
// the least significant bit of the basis index.
inline Matrix pauli_matrix(const PauliString& p) {
    check_statevector_size(p.n);
    uint64_t dim = uint64_t(1) << p.n;
    Matrix out = Matrix::Zero(dim, dim);
    for (uint64_t col = 0; col < dim; ++col) {
        uint64_t row = col ^ p.x;
        // Z part sign and Y phases: X^x Z^z picks up (-1)^{z.col}; each Y
        // factor contributes i.
        int zsign = parity64(p.z & col);
        int ycount = __builtin_popcountll(p.x & p.z);
        Complex phase = std::pow(Complex(0, 1), ycount % 4);
        out(row, col) = phase * (zsign ? -1.0 : 1.0);
    }
    return out;
}

inline bool approx_unitary(const Matrix& u, double tol = 1e-12) {
    Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() < tol;
}

// True when a = phase * b for a unit-modulus scalar.
inline bool equal_up_to_global_phase(const Matrix& a, const Matrix& b, double tol = 1e-12) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    Eigen::Index r = 0, c = 0;
    double mx = b.cwiseAbs().maxCoeff(&r, &c);
    if (mx < tol) return a.cwiseAbs().maxCoeff() < tol;
    Complex phase = a(r, c) / b(r, c);
    if (std::abs(std::abs(phase) - 1.0) > 1e-9) return false;
    return (a - phase * b).cwiseAbs().maxCoeff() < tol;
}

// Exact generalized permutation matrix over the 2^m-th (or m-th) roots of
// unity: column b maps to row perm[b] with phase exponent phase[b] mod m.
struct PhasedPermutation {
    int n = 1;
    int m = 1;
    std::vector<uint32_t> perm;
    std::vector<uint32_t> phase;

    static PhasedPermutation identity(int n, int m) {
        PhasedPermutation g;
        g.n = n;
        g.m = m;
        g.perm.resize(uint64_t(1) << n);
        g.phase.assign(uint64_t(1) << n, 0);
        for (uint32_t b = 0; b < g.perm.size(); ++b) g.perm[b] = b;
        return g;
    }

    // Operator product this * other ("other" acts first).
    PhasedPermutation compose(const PhasedPermutation& other) const {
        PhasedPermutation r = *this;
        for (size_t b = 0; b < perm.size(); ++b) {
            r.perm[b] = perm[other.perm[b]];
            r.phase[b] = (phase[other.perm[b]] + other.phase[b]) % uint32_t(m);
        }
        return r;
    }

    // Quotient by global phase: the |0...0> column gets unit phase.
    void canonicalize() {
        uint32_t p0 = phase[0];
        if (p0 == 0) return;
        for (auto& p : phase) p = (p + m - p0) % uint32_t(m);
    }

    friend bool operator==(const PhasedPermutation&, const PhasedPermutation&) = default;
};

struct PhasedPermutationHash {
    size_t operator()(const PhasedPermutation& g) const {
        size_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ull;
        };
        for (size_t b = 0; b < g.perm.size(); ++b) {
            mix(g.perm[b]);
            mix(g.phase[b]);
        }
        return h;
    }
};

inline std::vector<PhasedPermutation> cnot_dihedral_generators(int n, int m) {
    std::vector<PhasedPermutation> gens;
    uint64_t dim = uint64_t(1) << n;
    for (int j = 0; j < n; ++j) {
        PhasedPermutation x = PhasedPermutation::identity(n, m);
        for (uint64_t b = 0; b < dim; ++b) x.perm[b] = uint32_t(b ^ (uint64_t(1) << j));
        gens.push_back(x);
        if (m > 1) {
            PhasedPermutation z = PhasedPermutation::identity(n, m);
            for (uint64_t b = 0; b < dim; ++b)
                z.phase[b] = uint32_t(((b >> j) & 1) % uint64_t(m));
            gens.push_back(z);
        }
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            PhasedPermutation cx = PhasedPermutation::identity(n, m);
            for (uint64_t b = 0; b < dim; ++b) {
                uint64_t t = b;
                if ((b >> i) & 1) t ^= uint64_t(1) << j;
                cx.perm[b] = uint32_t(t);
            }
            gens.push_back(cx);
        }
    }
    return gens;
}

struct EnumerationResult {
    BigInt count = 0;
    std::vector<PhasedPermutation> elements;
};

// BFS closure over the generators of G_m modulo global phase. Refuses to run
// when the predicted order exceeds the budget.
inline EnumerationResult enumerate_group(int n, int m, BigInt budget = 10'000'000,
                                         bool keep_elements = false) {
    BigInt predicted = group_order(n, m);
    if (predicted > budget)
        throw BudgetError("predicted group order " + predicted.str() +
                          " exceeds enumeration budget " + budget.str());
    auto gens = cnot_dihedral_generators(n, m);
    std::unordered_set<PhasedPermutation, PhasedPermutationHash> seen;
    std::vector<PhasedPermutation> frontier;
    PhasedPermutation id = PhasedPermutation::identity(n, m);
    seen.insert(id);
    frontier.push_back(id);
    while (!frontier.empty()) {
        std::vector<PhasedPermutation> next;
        for (const auto& g : frontier) {
            for (const auto& gen : gens) {
                PhasedPermutation h = gen.compose(g);
                h.canonicalize();
                if (seen.insert(h).second) next.push_back(std::move(h));
            }
        }
        frontier = std::move(next);
    }
    EnumerationResult res;
    res.count = BigInt(seen.size());
    if (keep_elements) res.elements.assign(seen.begin(), seen.end());
    return res;
}

// Exact phased-permutation form of a triple, for enumeration cross-checks.
inline PhasedPermutation element_to_phased_permutation(const CNOTDihedralElement& g) {
    int n = g.poly.n;
    PhasedPermutation r = PhasedPermutation::identity(n, int(g.poly.modulus()));
    for (uint64_t b = 0; b < r.perm.size(); ++b) {
        GF2Vector vb(n, b);
        r.perm[b] = uint32_t(mat_vec(g.linear, vb).bits ^ g.shift.bits);
        r.phase[b] = evaluate(g.poly, vb);
    }
    r.canonicalize();
    return r;
}

}  // namespace cnotdihedral
