#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/integer/common_factor_rt.hpp>

#include "cnotdihedral/gf2.hpp"
#include "cnotdihedral/phasepoly.hpp"

// CNOT-dihedral group elements as triples (p, B, c): the element acting as
// g|b> = w^{p(b)} |Bb xor c> with w a primitive 2^k-th root of unity and
// p the phase polynomial. The triple labels each element uniquely once p
// has no constant term.

namespace cnotdihedral {

using BigInt = boost::multiprecision::cpp_int;

struct GroupParams {
    int n = 1;
    int k = 1;
    GroupParams() = default;
    GroupParams(int n_, int k_) : n(n_), k(k_) {
        check_dimension(n_);
        check_precision(k_);
    }
    int phase_order() const { return 1 << k; }
    friend bool operator==(const GroupParams&, const GroupParams&) = default;
};

struct CNOTDihedralElement {
    PhasePolynomial poly;
    GF2Matrix linear;
    GF2Vector shift;

    GroupParams params() const { return GroupParams(poly.n, poly.k); }
    friend bool operator==(const CNOTDihedralElement&, const CNOTDihedralElement&) = default;

    // Canonical ordering key, usable for set-based enumeration tests.
    friend auto operator<=>(const CNOTDihedralElement& a, const CNOTDihedralElement& b) {
        if (auto c = a.shift.bits <=> b.shift.bits; c != 0) return c;
        if (auto c = a.linear.rows <=> b.linear.rows; c != 0) return c;
        return a.poly.coeffs <=> b.poly.coeffs;
    }
};

inline CNOTDihedralElement identity(GroupParams params) {
    return {PhasePolynomial(params.n, params.k), GF2Matrix::identity(params.n),
            GF2Vector::zero(params.n)};
}

inline void check_same_params(const CNOTDihedralElement& a, const CNOTDihedralElement& b) {
    if (a.params() != b.params()) throw DimensionError("group parameter mismatch");
}

// multiply(g2, g1) applies g1 first: the triple of the operator product
// g2 g1 is (p1(x) + p2(B1 x xor c1), B2 B1, B2 c1 xor c2).
inline CNOTDihedralElement multiply(const CNOTDihedralElement& g2,
                                    const CNOTDihedralElement& g1) {
    check_same_params(g2, g1);
    CNOTDihedralElement r;
    r.poly = add(g1.poly, substitute_affine(g2.poly, g1.linear, g1.shift));
    r.linear = mat_mul(g2.linear, g1.linear);
    r.shift = mat_vec(g2.linear, g1.shift) ^ g2.shift;
    return r;
}

inline CNOTDihedralElement inverse(const CNOTDihedralElement& g) {
    CNOTDihedralElement r;
    r.linear = mat_inverse(g.linear);
    r.shift = mat_vec(r.linear, g.shift);
    r.poly = substitute_affine(negate(g.poly), r.linear, r.shift);
    return r;
}

inline bool equal(const CNOTDihedralElement& g1, const CNOTDihedralElement& g2) {
    check_same_params(g1, g2);
    return g1 == g2;
}

template <class Rng>
CNOTDihedralElement sample_uniform(GroupParams params, Rng& rng) {
    CNOTDihedralElement g;
    g.poly = random_w_polynomial(params.n, params.k, rng);
    g.linear = random_invertible(params.n, rng);
    std::uniform_int_distribution<uint64_t> dist(0, low_mask(params.n));
    g.shift = GF2Vector(params.n, dist(rng));
    return g;
}

inline bool element_valid(const CNOTDihedralElement& g) {
    return g.poly.n == g.linear.n && g.poly.n == g.shift.n &&
           is_invertible(g.linear) && w_divisibility_ok(g.poly);
}

// |G_m| = 2^n prod_{l=0}^{n-1} (2^n - 2^l) * prod_{t=1}^{n} o_m(2^{t-1})^C(n,t)
// where o_m(a) = lcm(a, m)/a is the additive order of a in Z_m. Defined for
// every m >= 1, odd values included.
inline BigInt group_order(int n, BigInt m) {
    if (n < 1 || m < 1) throw DimensionError("group_order requires n >= 1, m >= 1");
    BigInt order = BigInt(1) << n;
    BigInt two_n = BigInt(1) << n;
    for (int l = 0; l < n; ++l) order *= two_n - (BigInt(1) << l);
    // Binomial coefficients C(n, t) computed incrementally.
    BigInt binom = 1;
    for (int t = 1; t <= n; ++t) {
        binom = binom * (n - t + 1) / t;
        BigInt a = BigInt(1) << (t - 1);
        BigInt o = boost::integer::lcm(a, m) / a;
        order *= boost::multiprecision::pow(o, binom.convert_to<unsigned>());
    }
    return order;
}

// Number of elements of the diagonal subgroup W for m = 2^k.
inline BigInt w_group_order(int n, int k) {
    BigInt order = 1;
    BigInt binom = 1;
    for (int t = 1; t <= n; ++t) {
        binom = binom * (n - t + 1) / t;
        int log_cyc = std::max(k - (t - 1), 0);  // 2^k / 2^{min(t-1,k)}
        order <<= log_cyc * binom.convert_to<unsigned>();
    }
    return order;
}

namespace detail {

// Enumerates all of GL_n(F2) by filtering the 2^{n^2} candidate matrices.
// Intended for n <= 4.
inline std::vector<GF2Matrix> enumerate_gl(int n) {
    if (n > 4) throw DimensionError("GL enumeration supported only for n <= 4");
    std::vector<GF2Matrix> out;
    uint64_t total = uint64_t(1) << (n * n);
    for (uint64_t code = 0; code < total; ++code) {
        GF2Matrix m(n);
        for (int i = 0; i < n; ++i)
            m.rows[i] = (code >> (i * n)) & low_mask(n);
        if (is_invertible(m)) out.push_back(std::move(m));
    }
    return out;
}

// Enumerates W as polynomials: for each monomial of degree d, the coefficient
// ranges over the 2^{k-d+1} multiples of 2^{d-1} in Z_{2^k}.
template <class Fn>
void enumerate_w(int n, int k, Fn&& fn) {
    std::vector<uint64_t> masks;
    for_each_monomial(n, k, [&](uint64_t m) { masks.push_back(m); });
    PhasePolynomial p(n, k);
    uint32_t mod = p.modulus();
    std::vector<uint32_t> choice(masks.size(), 0);
    while (true) {
        PhasePolynomial q(n, k);
        for (size_t i = 0; i < masks.size(); ++i) {
            int d = __builtin_popcountll(masks[i]);
            uint32_t base = uint32_t(1) << (d - 1);
            if ((d - 1) % 2 == 1) base = (mod - base) & (mod - 1);
            q.accumulate(masks[i], choice[i] * base);
        }
        fn(q);
        size_t i = 0;
        for (; i < masks.size(); ++i) {
            int d = __builtin_popcountll(masks[i]);
            uint32_t vals = uint32_t(1) << (k - d + 1);  // d <= k by construction
            if (++choice[i] < vals) break;
            choice[i] = 0;
        }
        if (i == masks.size()) break;
    }
}

}  // namespace detail

// Visits every element of G_{2^k} exactly once via the triple decomposition.
// Work grows with |G|; callers should check group_order against a budget.
template <class Fn>
void for_each_element(GroupParams params, Fn&& fn) {
    auto gls = detail::enumerate_gl(params.n);
    detail::enumerate_w(params.n, params.k, [&](const PhasePolynomial& p) {
        for (const auto& b : gls) {
            for (uint64_t c = 0; c <= low_mask(params.n); ++c) {
                CNOTDihedralElement g{p, b, GF2Vector(params.n, c)};
                fn(g);
            }
        }
    });
}

}  // namespace cnotdihedral
