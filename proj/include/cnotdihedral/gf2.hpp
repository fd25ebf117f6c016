#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

// Exact linear algebra over F2. Vectors and matrix rows are packed into
// single 64-bit words, so the supported dimension is 1 <= n <= 64.

namespace cnotdihedral {

struct SingularMatrixError : std::runtime_error {
    SingularMatrixError() : std::runtime_error("matrix is singular over F2") {}
};

struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

inline void check_dimension(int n) {
    if (n < 1 || n > 64) throw DimensionError("dimension must be in [1,64]");
}

inline uint64_t low_mask(int n) {
    return n >= 64 ? ~uint64_t(0) : ((uint64_t(1) << n) - 1);
}

inline int parity64(uint64_t w) { return __builtin_parityll(w); }

struct GF2Vector {
    int n = 0;
    uint64_t bits = 0;

    GF2Vector() = default;
    GF2Vector(int n_, uint64_t bits_ = 0) : n(n_), bits(bits_ & low_mask(n_)) {
        check_dimension(n_);
    }
    static GF2Vector zero(int n) { return GF2Vector(n); }
    static GF2Vector unit(int n, int j) { return GF2Vector(n, uint64_t(1) << j); }

    int get(int j) const { return int((bits >> j) & 1); }
    void set(int j, int v) {
        if (v) bits |= uint64_t(1) << j;
        else bits &= ~(uint64_t(1) << j);
    }
    void flip(int j) { bits ^= uint64_t(1) << j; }

    friend GF2Vector operator^(GF2Vector a, const GF2Vector& b) {
        if (a.n != b.n) throw DimensionError("vector dimension mismatch");
        a.bits ^= b.bits;
        return a;
    }
    friend bool operator==(const GF2Vector&, const GF2Vector&) = default;
};

struct GF2Matrix {
    int n = 0;
    std::vector<uint64_t> rows;  // rows[i] bit j = entry (i,j)

    GF2Matrix() = default;
    explicit GF2Matrix(int n_) : n(n_), rows(n_, 0) { check_dimension(n_); }

    static GF2Matrix identity(int n) {
        GF2Matrix m(n);
        for (int i = 0; i < n; ++i) m.rows[i] = uint64_t(1) << i;
        return m;
    }
    static GF2Matrix from_rows(const std::vector<std::vector<int>>& r) {
        GF2Matrix m(int(r.size()));
        for (int i = 0; i < m.n; ++i) {
            if (int(r[i].size()) != m.n) throw DimensionError("matrix not square");
            for (int j = 0; j < m.n; ++j)
                if (r[i][j]) m.rows[i] |= uint64_t(1) << j;
        }
        return m;
    }

    int get(int i, int j) const { return int((rows[i] >> j) & 1); }
    void set(int i, int j, int v) {
        if (v) rows[i] |= uint64_t(1) << j;
        else rows[i] &= ~(uint64_t(1) << j);
    }

    friend bool operator==(const GF2Matrix&, const GF2Matrix&) = default;
};

inline GF2Matrix mat_mul(const GF2Matrix& a, const GF2Matrix& b) {
    if (a.n != b.n) throw DimensionError("matrix dimension mismatch");
    GF2Matrix c(a.n);
    for (int i = 0; i < a.n; ++i) {
        uint64_t acc = 0, row = a.rows[i];
        while (row) {
            int l = __builtin_ctzll(row);
            acc ^= b.rows[l];
            row &= row - 1;
        }
        c.rows[i] = acc;
    }
    return c;
}

inline GF2Vector mat_vec(const GF2Matrix& a, const GF2Vector& v) {
    if (a.n != v.n) throw DimensionError("matrix/vector dimension mismatch");
    GF2Vector y(a.n);
    for (int i = 0; i < a.n; ++i)
        if (parity64(a.rows[i] & v.bits)) y.bits |= uint64_t(1) << i;
    return y;
}

inline GF2Matrix transpose(const GF2Matrix& a) {
    GF2Matrix t(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j)
            if (a.get(i, j)) t.set(j, i, 1);
    return t;
}

// Gauss-Jordan on [A | I].
inline GF2Matrix mat_inverse(const GF2Matrix& a) {
    int n = a.n;
    std::vector<uint64_t> left(a.rows);
    GF2Matrix inv = GF2Matrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if ((left[r] >> col) & 1) { pivot = r; break; }
        if (pivot < 0) throw SingularMatrixError();
        std::swap(left[pivot], left[col]);
        std::swap(inv.rows[pivot], inv.rows[col]);
        for (int r = 0; r < n; ++r) {
            if (r != col && ((left[r] >> col) & 1)) {
                left[r] ^= left[col];
                inv.rows[r] ^= inv.rows[col];
            }
        }
    }
    return inv;
}

inline bool is_invertible(const GF2Matrix& a) {
    std::vector<uint64_t> rows(a.rows);
    for (int col = 0; col < a.n; ++col) {
        int pivot = -1;
        for (int r = col; r < a.n; ++r)
            if ((rows[r] >> col) & 1) { pivot = r; break; }
        if (pivot < 0) return false;
        std::swap(rows[pivot], rows[col]);
        for (int r = col + 1; r < a.n; ++r)
            if ((rows[r] >> col) & 1) rows[r] ^= rows[col];
    }
    return true;
}

// Uniform over GL_n(F2) by rejection; the invertible fraction exceeds 0.288
// for every n, so the expected number of trials is below 4.
template <class Rng>
GF2Matrix random_invertible(int n, Rng& rng) {
    check_dimension(n);
    std::uniform_int_distribution<uint64_t> dist(0, low_mask(n));
    GF2Matrix m(n);
    do {
        for (int i = 0; i < n; ++i) m.rows[i] = dist(rng);
    } while (!is_invertible(m));
    return m;
}

// Elementary row operation: add row `src` into row `dst` (0-based, src != dst).
struct RowOp {
    int src = 0;
    int dst = 0;
    friend bool operator==(const RowOp&, const RowOp&) = default;
};

// Decomposes an invertible B into elementary row additions. Replaying the
// transcript on the identity (for each op in order: row[dst] ^= row[src])
// reproduces B. Transcript length is O(n^2).
inline std::vector<RowOp> row_reduce_transcript(const GF2Matrix& b) {
    int n = b.n;
    std::vector<uint64_t> rows(b.rows);
    std::vector<RowOp> ops;
    // Reduce B to I using only row additions, recording each one.
    for (int col = 0; col < n; ++col) {
        if (!((rows[col] >> col) & 1)) {
            int pivot = -1;
            for (int r = col + 1; r < n; ++r)
                if ((rows[r] >> col) & 1) { pivot = r; break; }
            if (pivot < 0) throw SingularMatrixError();
            rows[col] ^= rows[pivot];
            ops.push_back({pivot, col});
        }
        for (int r = 0; r < n; ++r) {
            if (r != col && ((rows[r] >> col) & 1)) {
                rows[r] ^= rows[col];
                ops.push_back({col, r});
            }
        }
    }
    // ops reduce B to I left-to-right, so the reversed list rebuilds B from I.
    std::vector<RowOp> transcript(ops.rbegin(), ops.rend());
    return transcript;
}

inline GF2Matrix replay_transcript(int n, const std::vector<RowOp>& transcript) {
    GF2Matrix m = GF2Matrix::identity(n);
    for (const auto& op : transcript) m.rows[op.dst] ^= m.rows[op.src];
    return m;
}

}  // namespace cnotdihedral
