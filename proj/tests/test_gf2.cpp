#include <doctest.h>

#include <map>
#include <random>

#include "cnotdihedral/gf2.hpp"

using namespace cnotdihedral;

namespace {

// Independent oracle: integer matrix product reduced mod 2.
std::vector<std::vector<int>> int_mat_mul(const std::vector<std::vector<int>>& a,
                                          const std::vector<std::vector<int>>& b) {
    int n = int(a.size());
    std::vector<std::vector<int>> c(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            long s = 0;
            for (int l = 0; l < n; ++l) s += long(a[i][l]) * b[l][j];
            c[i][j] = int(s % 2);
        }
    return c;
}

std::vector<std::vector<int>> to_rows(const GF2Matrix& m) {
    std::vector<std::vector<int>> r(m.n, std::vector<int>(m.n));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) r[i][j] = m.get(i, j);
    return r;
}

}  // namespace

TEST_CASE("mat_mul basics") {
    GF2Matrix cnot = GF2Matrix::from_rows({{1, 1}, {0, 1}});
    CHECK(mat_mul(GF2Matrix::identity(2), cnot) == cnot);
    CHECK(mat_mul(cnot, cnot) == GF2Matrix::identity(2));
    CHECK_THROWS_AS(mat_mul(cnot, GF2Matrix::identity(3)), DimensionError);
}

TEST_CASE("mat_mul matches integer oracle at n=4") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<uint64_t> dist(0, low_mask(4));
    for (int trial = 0; trial < 200; ++trial) {
        GF2Matrix a(4), b(4);
        for (int i = 0; i < 4; ++i) {
            a.rows[i] = dist(rng);
            b.rows[i] = dist(rng);
        }
        CHECK(to_rows(mat_mul(a, b)) == int_mat_mul(to_rows(a), to_rows(b)));
    }
}

TEST_CASE("mat_vec") {
    GF2Matrix cnot = GF2Matrix::from_rows({{1, 1}, {0, 1}});
    GF2Vector v(2, 0b10);  // (0,1): bit j holds entry j
    CHECK(mat_vec(GF2Matrix::identity(2), v) == v);
    CHECK(mat_vec(cnot, v) == GF2Vector(2, 0b11));

    std::mt19937_64 rng(12);
    std::uniform_int_distribution<uint64_t> dist(0, low_mask(5));
    for (int trial = 0; trial < 200; ++trial) {
        GF2Matrix a(5);
        for (int i = 0; i < 5; ++i) a.rows[i] = dist(rng);
        GF2Vector x(5, dist(rng));
        auto rows = to_rows(a);
        GF2Vector expect(5);
        for (int i = 0; i < 5; ++i) {
            long s = 0;
            for (int j = 0; j < 5; ++j) s += long(rows[i][j]) * x.get(j);
            expect.set(i, int(s % 2));
        }
        CHECK(mat_vec(a, x) == expect);
    }
}

TEST_CASE("mat_inverse") {
    CHECK(mat_inverse(GF2Matrix::identity(3)) == GF2Matrix::identity(3));
    GF2Matrix cnot = GF2Matrix::from_rows({{1, 1}, {0, 1}});
    CHECK(mat_inverse(cnot) == cnot);
    CHECK_THROWS_AS(mat_inverse(GF2Matrix(2)), SingularMatrixError);

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        GF2Matrix a = random_invertible(6, rng);
        CHECK(mat_mul(a, mat_inverse(a)) == GF2Matrix::identity(6));
    }
}

TEST_CASE("random_invertible n=1 is the only element of GL_1") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i)
        CHECK(random_invertible(1, rng) == GF2Matrix::identity(1));
}

TEST_CASE("random_invertible uniform over the 6 elements of GL_2") {
    std::mt19937_64 rng(15);
    std::map<std::vector<uint64_t>, int> counts;
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) ++counts[random_invertible(2, rng).rows];
    CHECK(counts.size() == 6);
    // chi-square against uniform; 5 dof, 0.001 critical value 20.52
    double chi2 = 0;
    for (const auto& [rows, c] : counts) {
        double expect = draws / 6.0;
        chi2 += (c - expect) * (c - expect) / expect;
    }
    CHECK(chi2 < 20.52);
}

TEST_CASE("random_invertible postcondition at n=5") {
    std::mt19937_64 rng(16);
    for (int i = 0; i < 50; ++i) CHECK(is_invertible(random_invertible(5, rng)));
}

TEST_CASE("row_reduce_transcript") {
    CHECK(row_reduce_transcript(GF2Matrix::identity(4)).empty());

    GF2Matrix cnot = GF2Matrix::from_rows({{1, 1}, {0, 1}});
    auto ops = row_reduce_transcript(cnot);
    CHECK(replay_transcript(2, ops) == cnot);
    CHECK(ops.size() == 1);

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + int(rng() % 8);
        GF2Matrix b = random_invertible(n, rng);
        auto t = row_reduce_transcript(b);
        CHECK(replay_transcript(n, t) == b);
        CHECK(t.size() <= size_t(n * n + n));
    }
    CHECK_THROWS_AS(row_reduce_transcript(GF2Matrix(3)), SingularMatrixError);
}
