#include <doctest.h>

#include <array>
#include <random>

#include "cnotdihedral/group.hpp"
#include "cnotdihedral/phasepoly.hpp"

using namespace cnotdihedral;

namespace {

PhasePolynomial make_poly(int n, int k, std::vector<std::pair<uint64_t, uint32_t>> terms) {
    PhasePolynomial p(n, k);
    for (auto [mask, c] : terms) p.accumulate(mask, c);
    return p;
}

// Naive evaluation oracle: sum each stored term with 64-bit arithmetic.
uint32_t eval_oracle(const PhasePolynomial& p, uint64_t b) {
    uint64_t sum = 0;
    for (const auto& [mask, v] : p.coeffs) {
        uint64_t prod = 1;
        for (int j = 0; j < p.n; ++j)
            if ((mask >> j) & 1) prod *= (b >> j) & 1;
        sum += uint64_t(v) * prod;
    }
    return uint32_t(sum % p.modulus());
}

}  // namespace

TEST_CASE("add") {
    auto p = make_poly(2, 3, {{0b01, 1}, {0b11, 6}});
    CHECK(add(p, PhasePolynomial(2, 3)) == p);
    CHECK(add(make_poly(1, 3, {{1, 1}}), make_poly(1, 3, {{1, 7}})).is_zero());
    CHECK(add(p, make_poly(2, 3, {{0b11, 2}})) == make_poly(2, 3, {{0b01, 1}}));
    CHECK_THROWS_AS(add(p, PhasePolynomial(3, 3)), DimensionError);
}

TEST_CASE("negate") {
    CHECK(negate(PhasePolynomial(2, 3)).is_zero());
    CHECK(negate(make_poly(1, 3, {{1, 1}})) == make_poly(1, 3, {{1, 7}}));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        auto p = random_w_polynomial(4, 3, rng);
        CHECK(add(p, negate(p)).is_zero());
    }
}

TEST_CASE("evaluate") {
    std::mt19937_64 rng(4);
    auto p = random_w_polynomial(4, 3, rng);
    CHECK(evaluate(p, GF2Vector(4, 0)) == 0);

    auto q = make_poly(3, 3, {{0b111, 4}});
    CHECK(evaluate(q, GF2Vector(3, 0b111)) == 4);
    CHECK(evaluate(q, GF2Vector(3, 0b011)) == 0);

    for (int trial = 0; trial < 50; ++trial) {
        auto r = random_w_polynomial(4, 3, rng);
        for (uint64_t b = 0; b < 16; ++b)
            CHECK(evaluate(r, GF2Vector(4, b)) == eval_oracle(r, b));
    }
}

TEST_CASE("monomial_basis_poly") {
    CHECK(monomial_basis_poly(2, 3, 0b01) == make_poly(2, 3, {{0b01, 1}}));
    CHECK(monomial_basis_poly(2, 3, 0b11) ==
          make_poly(2, 3, {{0b01, 1}, {0b10, 1}, {0b11, 6}}));
    // k=1: all degree >= 2 coefficients vanish mod 2
    CHECK(monomial_basis_poly(3, 1, 0b111) ==
          make_poly(3, 1, {{0b001, 1}, {0b010, 1}, {0b100, 1}}));
    CHECK_THROWS_AS(monomial_basis_poly(2, 3, 0), DimensionError);

    // p_J(b) = xor of bits of b in J, for every b (xor expansion identity)
    for (uint64_t j_mask : {0b101ull, 0b1111ull, 0b0110ull}) {
        auto p = monomial_basis_poly(4, 3, j_mask);
        for (uint64_t b = 0; b < 16; ++b)
            CHECK(evaluate(p, GF2Vector(4, b)) == uint32_t(parity64(b & j_mask)));
    }
}

TEST_CASE("substitute_affine identity") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        auto p = random_w_polynomial(4, 3, rng);
        CHECK(substitute_affine(p, GF2Matrix::identity(4), GF2Vector(4)) == p);
    }
}

TEST_CASE("substitute_affine known cases") {
    // p = x1 at k=3, B=I, c=(1): p(b xor 1) - p(1) = -x1 = 7x1
    auto p = make_poly(1, 3, {{1, 1}});
    CHECK(substitute_affine(p, GF2Matrix::identity(1), GF2Vector(1, 1)) ==
          make_poly(1, 3, {{1, 7}}));

    // p = x2 (n=2,k=3), B = CNOT(1->2): substitution gives x1 + x2 - 2 x1x2
    GF2Matrix cnot = GF2Matrix::from_rows({{1, 0}, {1, 1}});
    auto q = substitute_affine(make_poly(2, 3, {{0b10, 1}}), cnot, GF2Vector(2));
    CHECK(q == make_poly(2, 3, {{0b01, 1}, {0b10, 1}, {0b11, 6}}));
}

TEST_CASE("substitute_affine pointwise semantics") {
    // evaluate(substitute(p,B,c), b) == p(Bb xor c) - p(c) mod 2^k
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + int(rng() % 5);
        int k = 1 + int(rng() % 3);
        auto p = random_w_polynomial(n, k, rng);
        GF2Matrix b = random_invertible(n, rng);
        GF2Vector c(n, rng() & low_mask(n));
        auto q = substitute_affine(p, b, c);
        CHECK(w_divisibility_ok(q));
        uint32_t mod = p.modulus();
        uint32_t pc = evaluate(p, c);
        for (uint64_t x = 0; x <= low_mask(n); ++x) {
            GF2Vector vx(n, x);
            uint32_t lhs = evaluate(q, vx);
            uint32_t rhs = (evaluate(p, mat_vec(b, vx) ^ c) + mod - pc) & (mod - 1);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("substitute_affine composition") {
    // substituting twice equals substituting with the composed affine map
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + int(rng() % 4);
        int k = 1 + int(rng() % 3);
        auto p = random_w_polynomial(n, k, rng);
        GF2Matrix b1 = random_invertible(n, rng), b2 = random_invertible(n, rng);
        GF2Vector c1(n, rng() & low_mask(n)), c2(n, rng() & low_mask(n));
        auto two_step = substitute_affine(substitute_affine(p, b1, c1), b2, c2);
        // x -> B1(B2 x xor c2) xor c1 = (B1 B2) x xor (B1 c2 xor c1)
        auto one_step = substitute_affine(p, mat_mul(b1, b2), mat_vec(b1, c2) ^ c1);
        CHECK(two_step == one_step);
    }
}

TEST_CASE("degree bound and invariants") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_w_polynomial(5, 2, rng);
        auto q = random_w_polynomial(5, 2, rng);
        for (const auto& poly : {p, q, add(p, q), negate(p)}) {
            CHECK(w_divisibility_ok(poly));
            for (const auto& [mask, v] : poly.coeffs) {
                CHECK(__builtin_popcountll(mask) <= 2);
                CHECK(v != 0);
            }
        }
        // additive group axioms
        auto r = random_w_polynomial(5, 2, rng);
        CHECK(add(add(p, q), r) == add(p, add(q, r)));
        CHECK(add(p, PhasePolynomial(5, 2)) == p);
    }
}

TEST_CASE("random_w_polynomial distributions") {
    std::mt19937_64 rng(9);
    // n=1, k=3: coefficient of x1 uniform over Z_8
    std::array<int, 8> counts{};
    const int draws = 80000;
    for (int i = 0; i < draws; ++i) ++counts[random_w_polynomial(1, 3, rng).coeff(1)];
    double chi2 = 0;
    for (int c : counts) {
        double expect = draws / 8.0;
        chi2 += (c - expect) * (c - expect) / expect;
    }
    CHECK(chi2 < 24.32);  // 7 dof at significance 0.001

    // n=2, k=2: x1x2 coefficient only ever in {0, 2}
    for (int i = 0; i < 200; ++i) {
        uint32_t c = random_w_polynomial(2, 2, rng).coeff(0b11);
        CHECK((c == 0 || c == 2));
    }
}

TEST_CASE("W group order matches enumeration for small n,k") {
    // |W| = prod_t (2^k / 2^{min(t-1,k)})^C(n,t)
    for (int n = 1; n <= 3; ++n) {
        for (int k = 1; k <= 3; ++k) {
            uint64_t expect = 1;
            auto binom = [](int n, int t) {
                long b = 1;
                for (int i = 1; i <= t; ++i) b = b * (n - i + 1) / i;
                return b;
            };
            for (int t = 1; t <= n; ++t) {
                int log_cyc = std::max(k - (t - 1), 0);
                expect *= uint64_t(1) << (log_cyc * binom(n, t));
            }
            uint64_t count = 0;
            detail::enumerate_w(n, k, [&](const PhasePolynomial&) { ++count; });
            CHECK(count == expect);
        }
    }
}
