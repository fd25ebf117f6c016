#include <doctest.h>

#include <random>
#include <set>

#include "cnotdihedral/group.hpp"
#include "cnotdihedral/unitary.hpp"

using namespace cnotdihedral;

namespace {

CNOTDihedralElement t_gate(int k = 3) {
    CNOTDihedralElement g = identity(GroupParams(1, k));
    g.poly.accumulate(1, 1);
    return g;
}

CNOTDihedralElement x_gate(int k = 3) {
    CNOTDihedralElement g = identity(GroupParams(1, k));
    g.shift.flip(0);
    return g;
}

}  // namespace

TEST_CASE("identity laws") {
    GroupParams params(2, 3);
    std::mt19937_64 rng(21);
    CNOTDihedralElement id = identity(params);
    CHECK(inverse(id) == id);
    CHECK(element_to_unitary(id).isApprox(Matrix::Identity(4, 4)));
    for (int i = 0; i < 20; ++i) {
        auto g = sample_uniform(params, rng);
        CHECK(multiply(id, g) == g);
        CHECK(multiply(g, id) == g);
        CHECK(equal(g, multiply(id, g)));
    }
}

TEST_CASE("multiply known case: T after X at n=1,k=3") {
    auto r = multiply(t_gate(), x_gate());
    CHECK(r.poly.coeff(1) == 7);
    CHECK(r.linear == GF2Matrix::identity(1));
    CHECK(r.shift == GF2Vector(1, 1));

    // 2x2 unitary oracle, up to global phase
    Matrix u = element_to_unitary(t_gate()) * element_to_unitary(x_gate());
    CHECK(equal_up_to_global_phase(element_to_unitary(r), u));
}

TEST_CASE("multiply matches unitary oracle") {
    std::mt19937_64 rng(22);
    for (int n = 1; n <= 3; ++n) {
        GroupParams params(n, 2);
        for (int trial = 0; trial < 50; ++trial) {
            auto g1 = sample_uniform(params, rng);
            auto g2 = sample_uniform(params, rng);
            Matrix lhs = element_to_unitary(multiply(g2, g1));
            Matrix rhs = element_to_unitary(g2) * element_to_unitary(g1);
            CHECK(equal_up_to_global_phase(lhs, rhs, 1e-12));
        }
    }
}

TEST_CASE("inverse") {
    CHECK(inverse(t_gate()).poly.coeff(1) == 7);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        GroupParams params(1 + int(rng() % 5), 1 + int(rng() % 3));
        auto g = sample_uniform(params, rng);
        CHECK(multiply(g, inverse(g)) == identity(params));
        CHECK(multiply(inverse(g), g) == identity(params));
    }
}

TEST_CASE("associativity on random triples") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        GroupParams params(1 + int(rng() % 5), 1 + int(rng() % 3));
        auto a = sample_uniform(params, rng);
        auto b = sample_uniform(params, rng);
        auto c = sample_uniform(params, rng);
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
    }
}

TEST_CASE("semi-direct structure: permutation conjugation preserves diagonals") {
    std::mt19937_64 rng(25);
    GroupParams params(3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        // diagonal element (w part only)
        CNOTDihedralElement w = identity(params);
        w.poly = random_w_polynomial(params.n, params.k, rng);
        // permutation element (no poly)
        CNOTDihedralElement pi = identity(params);
        pi.linear = random_invertible(params.n, rng);
        pi.shift = GF2Vector(params.n, rng() & low_mask(params.n));
        auto conj = multiply(multiply(pi, w), inverse(pi));
        CHECK(conj.linear == GF2Matrix::identity(params.n));
        CHECK(conj.shift == GF2Vector(params.n));
    }
}

TEST_CASE("group_order reproduces the tabulated orders") {
    CHECK(group_order(1, 8) == 16);
    CHECK(group_order(2, 8) == 6144);
    CHECK(group_order(3, 8) == 88080384);
    CHECK(group_order(3, 5) == 105000000);
    CHECK(group_order(1, 1) == 2);
    CHECK(group_order(2, 3) == 648);
    CHECK_THROWS_AS(group_order(0, 2), DimensionError);
}

TEST_CASE("equal distinguishes distinct triples") {
    auto t = t_gate();
    CHECK(equal(t, t));
    CHECK_FALSE(equal(t, inverse(t)));  // T vs T^7
}

TEST_CASE("sampling uniformity at n=1,k=1 over the 4 elements") {
    GroupParams params(1, 1);
    std::mt19937_64 rng(26);
    std::map<CNOTDihedralElement, int> counts;
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) ++counts[sample_uniform(params, rng)];
    CHECK(counts.size() == 4);
    double chi2 = 0;
    for (const auto& [g, c] : counts) {
        double expect = draws / 4.0;
        chi2 += (c - expect) * (c - expect) / expect;
    }
    CHECK(chi2 < 16.27);  // 3 dof at 0.001
}

TEST_CASE("sampling uniformity at n=1,k=2 over 8 elements") {
    GroupParams params(1, 2);
    CHECK(group_order(1, 4) == 8);
    std::mt19937_64 rng(27);
    std::map<CNOTDihedralElement, int> counts;
    const int draws = 80000;
    for (int i = 0; i < draws; ++i) ++counts[sample_uniform(params, rng)];
    CHECK(counts.size() == 8);
    double chi2 = 0;
    for (const auto& [g, c] : counts) {
        double expect = draws / 8.0;
        chi2 += (c - expect) * (c - expect) / expect;
    }
    CHECK(chi2 < 24.32);  // 7 dof at 0.001
}

TEST_CASE("sampled elements satisfy invariants") {
    GroupParams params(2, 3);
    std::mt19937_64 rng(28);
    for (int i = 0; i < 200; ++i) CHECK(element_valid(sample_uniform(params, rng)));
}

TEST_CASE("for_each_element visits each element exactly once") {
    for (auto [n, k] : {std::pair{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}}) {
        GroupParams params(n, k);
        std::set<CNOTDihedralElement> seen;
        for_each_element(params, [&](const CNOTDihedralElement& g) {
            CHECK(element_valid(g));
            CHECK(seen.insert(g).second);
        });
        CHECK(BigInt(seen.size()) == group_order(n, 1 << k));
    }
}

TEST_CASE("canonical-form factorization at the matrix level") {
    std::mt19937_64 rng(29);
    for (int n = 1; n <= 3; ++n) {
        GroupParams params(n, 2);
        for (int trial = 0; trial < 25; ++trial) {
            auto g = sample_uniform(params, rng);
            CNOTDihedralElement w = identity(params), v = identity(params),
                                u = identity(params);
            w.poly = g.poly;
            v.linear = g.linear;
            u.shift = g.shift;
            auto rebuilt = multiply(u, multiply(v, w));
            CHECK(rebuilt == g);
            Matrix lhs = element_to_unitary(u) * element_to_unitary(v) * element_to_unitary(w);
            CHECK(equal_up_to_global_phase(element_to_unitary(g), lhs, 1e-12));
        }
    }
}
