#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>

#include "cnotdihedral/gf2.hpp"

// Multilinear phase polynomials over Z_{2^k}: the additive group W of
// diagonal CNOT-dihedral elements. A polynomial stores only nonzero
// coefficients, keyed by the monomial's n-bit support mask. The constant
// term is always absent (global phase is fixed at |0...0>), the degree-d
// coefficient is divisible by 2^{min(d-1,k)}, and no monomial of degree
// greater than k is stored (its coefficient is forced to 0 mod 2^k).

namespace cnotdihedral {

inline void check_precision(int k) {
    if (k < 1 || k > 30) throw DimensionError("precision k must be in [1,30]");
}

struct PhasePolynomial {
    int n = 0;
    int k = 0;
    std::map<uint64_t, uint32_t> coeffs;  // mask -> coefficient in Z_{2^k}

    PhasePolynomial() = default;
    PhasePolynomial(int n_, int k_) : n(n_), k(k_) {
        check_dimension(n_);
        check_precision(k_);
    }

    uint32_t modulus() const { return uint32_t(1) << k; }

    uint32_t coeff(uint64_t mask) const {
        auto it = coeffs.find(mask);
        return it == coeffs.end() ? 0 : it->second;
    }

    // Adds v*x^mask, pruning zeros and dropping degree > k terms.
    void accumulate(uint64_t mask, uint32_t v) {
        v &= modulus() - 1;
        if (v == 0 || mask == 0) return;
        if (__builtin_popcountll(mask) > k) return;
        auto [it, inserted] = coeffs.try_emplace(mask, 0);
        it->second = (it->second + v) & (modulus() - 1);
        if (it->second == 0) coeffs.erase(it);
    }

    bool is_zero() const { return coeffs.empty(); }

    friend bool operator==(const PhasePolynomial&, const PhasePolynomial&) = default;
};

inline void check_same_params(const PhasePolynomial& p, const PhasePolynomial& q) {
    if (p.n != q.n || p.k != q.k)
        throw DimensionError("phase polynomial parameter mismatch");
}

inline PhasePolynomial add(const PhasePolynomial& p, const PhasePolynomial& q) {
    check_same_params(p, q);
    PhasePolynomial r = p;
    for (const auto& [mask, v] : q.coeffs) r.accumulate(mask, v);
    return r;
}

inline PhasePolynomial negate(const PhasePolynomial& p) {
    PhasePolynomial r(p.n, p.k);
    uint32_t m = p.modulus();
    for (const auto& [mask, v] : p.coeffs) r.accumulate(mask, m - v);
    return r;
}

inline PhasePolynomial scale(const PhasePolynomial& p, uint32_t s) {
    PhasePolynomial r(p.n, p.k);
    for (const auto& [mask, v] : p.coeffs)
        r.accumulate(mask, uint32_t((uint64_t(v) * s) & (p.modulus() - 1)));
    return r;
}

inline uint32_t evaluate(const PhasePolynomial& p, const GF2Vector& b) {
    if (p.n != b.n) throw DimensionError("evaluation point dimension mismatch");
    uint32_t sum = 0;
    for (const auto& [mask, v] : p.coeffs)
        if ((mask & ~b.bits) == 0) sum += v;
    return sum & (p.modulus() - 1);
}

// p_J of the xor expansion: sum over nonempty subsets alpha of J of
// (-2)^{|alpha|-1} x^alpha, reduced mod 2^k. Encodes Z applied to the
// parity of the bits in J.
inline PhasePolynomial monomial_basis_poly(int n, int k, uint64_t j_mask);

namespace detail {

// Visits every nonempty subset of `support` with popcount <= maxdeg.
template <class Fn>
void for_each_subset_up_to(uint64_t support, int maxdeg, Fn&& fn) {
    std::vector<int> bits;
    for (uint64_t w = support; w; w &= w - 1) bits.push_back(__builtin_ctzll(w));
    int s = int(bits.size());
    for (int d = 1; d <= maxdeg && d <= s; ++d) {
        std::vector<int> idx(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        while (true) {
            uint64_t mask = 0;
            for (int i : idx) mask |= uint64_t(1) << bits[i];
            fn(mask, d);
            int i = d - 1;
            while (i >= 0 && idx[i] == s - d + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace detail

inline PhasePolynomial monomial_basis_poly(int n, int k, uint64_t j_mask) {
    if (j_mask == 0) throw DimensionError("monomial support must be nonempty");
    PhasePolynomial p(n, k);
    uint32_t m = p.modulus();
    detail::for_each_subset_up_to(j_mask, k, [&](uint64_t sub, int d) {
        // (-2)^{d-1} mod 2^k; subsets of degree > k contribute 0 mod 2^k.
        uint32_t c = uint32_t(1) << (d - 1);
        if ((d - 1) % 2 == 1) c = (m - c) & (m - 1);
        p.accumulate(sub, c);
    });
    return p;
}

namespace detail {

// Multilinear product with x_j^2 = x_j: masks combine by union. Terms whose
// degree exceeds k are dropped; they can only feed degree > k terms of the
// final result, all of which vanish mod 2^k for polynomials arising from
// affine substitution into W.
inline std::map<uint64_t, uint32_t> multiply_truncated(
    const std::map<uint64_t, uint32_t>& a, const std::map<uint64_t, uint32_t>& b,
    int k, uint32_t modmask) {
    std::map<uint64_t, uint32_t> r;
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) {
            uint64_t m = ma | mb;
            if (__builtin_popcountll(m) > k) continue;
            uint32_t v = uint32_t((uint64_t(ca) * cb) & modmask);
            if (v == 0) continue;
            auto [it, ins] = r.try_emplace(m, 0);
            it->second = (it->second + v) & modmask;
            if (it->second == 0) r.erase(it);
        }
    }
    return r;
}

}  // namespace detail

// Substitutes x' = Bx xor c into p and returns the W representative: the
// polynomial q with q(b) = p(Bb xor c) - p(c) mod 2^k for every b. The
// constant term p(c) accrued during expansion is discarded exactly once at
// the end.
inline PhasePolynomial substitute_affine(const PhasePolynomial& p, const GF2Matrix& b,
                                         const GF2Vector& c) {
    if (p.n != b.n || p.n != c.n) throw DimensionError("substitution dimension mismatch");
    int n = p.n, k = p.k;
    uint32_t modmask = p.modulus() - 1;

    // Expansion of each substituted variable x'_j as a coefficient map
    // (constant term allowed mid-computation).
    std::vector<std::map<uint64_t, uint32_t>> xprime(n);
    for (int j = 0; j < n; ++j) {
        uint64_t row = b.rows[j];
        std::map<uint64_t, uint32_t> e;
        if (row != 0) e = monomial_basis_poly(n, k, row).coeffs;
        if (c.get(j)) {
            // x'_j = 1 - p_{J_j}(x)
            for (auto& [mask, v] : e) v = (0u - v) & modmask;
            auto [it, ins] = e.try_emplace(uint64_t(0), 0);
            it->second = (it->second + 1) & modmask;
            if (it->second == 0) e.erase(it);
        }
        xprime[j] = std::move(e);
    }

    std::map<uint64_t, uint32_t> acc;
    for (const auto& [mask, v] : p.coeffs) {
        std::map<uint64_t, uint32_t> prod{{uint64_t(0), 1u}};
        uint64_t rest = mask;
        while (rest && !prod.empty()) {
            int j = __builtin_ctzll(rest);
            rest &= rest - 1;
            prod = detail::multiply_truncated(prod, xprime[j], k, modmask);
        }
        for (const auto& [m, cv] : prod) {
            uint32_t t = uint32_t((uint64_t(v) * cv) & modmask);
            if (t == 0) continue;
            auto [it, ins] = acc.try_emplace(m, 0);
            it->second = (it->second + t) & modmask;
            if (it->second == 0) acc.erase(it);
        }
    }

    PhasePolynomial q(n, k);
    for (const auto& [mask, v] : acc)
        if (mask != 0) q.accumulate(mask, v);
    return q;
}

namespace detail {

// Visits every mask over n bits with 1 <= popcount <= maxdeg, in increasing
// degree and, within a degree, increasing mask order.
template <class Fn>
void for_each_monomial(int n, int maxdeg, Fn&& fn) {
    for (int d = 1; d <= maxdeg && d <= n; ++d) {
        std::vector<int> idx(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        while (true) {
            uint64_t mask = 0;
            for (int i : idx) mask |= uint64_t(1) << i;
            fn(mask);
            int i = d - 1;
            while (i >= 0 && idx[i] == n - d + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace detail

// Uniform over W: each monomial of degree d <= k independently gets
// coefficient u * (-2)^{d-1} mod 2^k with u uniform over Z_{2^k}.
template <class Rng>
PhasePolynomial random_w_polynomial(int n, int k, Rng& rng) {
    PhasePolynomial p(n, k);
    uint32_t m = p.modulus();
    std::uniform_int_distribution<uint32_t> dist(0, m - 1);
    detail::for_each_monomial(n, k, [&](uint64_t mask) {
        int d = __builtin_popcountll(mask);
        uint32_t base = uint32_t(1) << (d - 1);
        if ((d - 1) % 2 == 1) base = (m - base) & (m - 1);
        p.accumulate(mask, uint32_t((uint64_t(dist(rng)) * base) & (m - 1)));
    });
    return p;
}

// Order of the additive group W for parameters (n, k), as a double-checkable
// product: prod_{t=1..n} (2^k / 2^{min(t-1,k)})^{C(n,t)}.
inline bool w_divisibility_ok(const PhasePolynomial& p) {
    for (const auto& [mask, v] : p.coeffs) {
        int d = __builtin_popcountll(mask);
        int pow2 = std::min(d - 1, p.k);
        if (v % (uint32_t(1) << pow2) != 0) return false;
        if (d > p.k) return false;
        if (mask == 0) return false;
    }
    return true;
}

}  // namespace cnotdihedral
