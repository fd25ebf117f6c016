#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "cnotdihedral/pauli.hpp"
#include "cnotdihedral/unitary.hpp"

// Channels, Liouville (Pauli transfer) representations and the group twirl.
// The Liouville matrix is R_{PQ} = Tr(P E(Q)) / 2^n over Hermitian Pauli
// operators, normalized so the identity map has R = I. Pauli indices are
// (x_mask << n) | z_mask.

namespace cnotdihedral {

using RealMatrix = Eigen::MatrixXd;

struct PauliChannel {
    int n = 1;
    std::vector<double> eta;  // size 4^n, indexed by PauliString::index()

    PauliChannel() : eta(4, 0.0) { eta[0] = 1.0; }
    explicit PauliChannel(int n_) : n(n_), eta(pauli_count(n_), 0.0) {
        check_dimension(n_);
        eta[0] = 1.0;
    }

    double total() const {
        double s = 0;
        for (double v : eta) s += v;
        return s;
    }
    bool valid(double tol = 1e-12) const {
        for (double v : eta)
            if (v < -tol) return false;
        return std::abs(total() - 1.0) < tol;
    }

    static PauliChannel identity_channel(int n) { return PauliChannel(n); }

    // eta_I = alpha + (1-alpha)/4^n, every other Pauli (1-alpha)/4^n.
    static PauliChannel depolarizing(int n, double alpha) {
        PauliChannel ch(n);
        double rest = (1.0 - alpha) / double(pauli_count(n));
        for (auto& v : ch.eta) v = rest;
        ch.eta[0] += alpha;
        return ch;
    }

    // Independent single-qubit Z-dephasing with probability p per qubit.
    static PauliChannel z_dephasing(int n, double p) {
        PauliChannel ch(n);
        std::fill(ch.eta.begin(), ch.eta.end(), 0.0);
        for (uint64_t z = 0; z <= low_mask(n); ++z)
            ch.eta[z] = std::pow(p, __builtin_popcountll(z)) *
                        std::pow(1.0 - p, n - __builtin_popcountll(z));
        return ch;
    }
};

struct LiouvilleRep {
    int n = 1;
    RealMatrix r;

    LiouvilleRep() : r(RealMatrix::Identity(4, 4)) {}
    explicit LiouvilleRep(int n_)
        : n(n_), r(RealMatrix::Identity(pauli_count(n_), pauli_count(n_))) {}
};

struct DensityMatrixError : std::runtime_error {
    explicit DensityMatrixError(const std::string& what) : std::runtime_error(what) {}
};

inline Matrix zero_state(int n) {
    check_statevector_size(n);
    Matrix rho = Matrix::Zero(1 << n, 1 << n);
    rho(0, 0) = 1.0;
    return rho;
}

inline Matrix plus_state(int n) {
    check_statevector_size(n);
    uint64_t dim = uint64_t(1) << n;
    return Matrix::Constant(dim, dim, Complex(1.0 / double(dim), 0.0));
}

inline bool density_matrix_valid(const Matrix& rho, double tol = 1e-12) {
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        return false;
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff() < tol;
}

inline Matrix apply_element(const Matrix& rho, const CNOTDihedralElement& g) {
    Matrix u = element_to_unitary(g);
    if (u.rows() != rho.rows()) throw DimensionError("state/element dimension mismatch");
    return u * rho * u.adjoint();
}

inline Matrix apply_unitary(const Matrix& rho, const Matrix& u) {
    if (u.rows() != rho.rows()) throw DimensionError("state/unitary dimension mismatch");
    return u * rho * u.adjoint();
}

inline Matrix apply_pauli_channel(const Matrix& rho, const PauliChannel& ch) {
    if ((uint64_t(1) << ch.n) != uint64_t(rho.rows()))
        throw DimensionError("state/channel dimension mismatch");
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (uint64_t idx = 0; idx < ch.eta.size(); ++idx) {
        if (ch.eta[idx] == 0.0) continue;
        Matrix q = pauli_matrix(PauliString::from_index(ch.n, idx));
        out += ch.eta[idx] * (q * rho * q);  // Hermitian Paulis: Q = Q^dagger
    }
    return out;
}

inline double expectation(const Matrix& observable, const Matrix& rho, double tol = 1e-10) {
    if (observable.rows() != rho.rows()) throw DimensionError("observable dimension mismatch");
    if ((observable - observable.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw DensityMatrixError("observable is not Hermitian");
    Complex v = (observable * rho).trace();
    if (std::abs(v.imag()) > tol)
        throw DensityMatrixError("expectation has non-negligible imaginary part");
    return v.real();
}

inline void check_liouville_size(int n, int limit = 6) {
    if (n > limit) throw BudgetError("Liouville size guard exceeded (n > " +
                                     std::to_string(limit) + ")");
}

inline LiouvilleRep liouville_of_unitary(int n, const Matrix& u) {
    check_liouville_size(n);
    uint64_t np = pauli_count(n);
    double dim = double(uint64_t(1) << n);
    LiouvilleRep rep(n);
    std::vector<Matrix> paulis(np);
    for (uint64_t i = 0; i < np; ++i) paulis[i] = pauli_matrix(PauliString::from_index(n, i));
    for (uint64_t q = 0; q < np; ++q) {
        Matrix image = u * paulis[q] * u.adjoint();
        for (uint64_t p = 0; p < np; ++p)
            rep.r(p, q) = (paulis[p] * image).trace().real() / dim;
    }
    return rep;
}

inline LiouvilleRep liouville_of_kraus(int n, const std::vector<Matrix>& kraus) {
    check_liouville_size(n);
    uint64_t np = pauli_count(n);
    double dim = double(uint64_t(1) << n);
    LiouvilleRep rep(n);
    std::vector<Matrix> paulis(np);
    for (uint64_t i = 0; i < np; ++i) paulis[i] = pauli_matrix(PauliString::from_index(n, i));
    for (uint64_t q = 0; q < np; ++q) {
        Matrix image = Matrix::Zero(paulis[q].rows(), paulis[q].cols());
        for (const Matrix& a : kraus) image += a * paulis[q] * a.adjoint();
        for (uint64_t p = 0; p < np; ++p)
            rep.r(p, q) = (paulis[p] * image).trace().real() / dim;
    }
    return rep;
}

// Pauli channels are diagonal in the Pauli basis:
// R_QQ = sum_P eta_P (-1)^{<P,Q>}.
inline LiouvilleRep liouville_of_pauli_channel(const PauliChannel& ch) {
    check_liouville_size(ch.n);
    uint64_t np = pauli_count(ch.n);
    LiouvilleRep rep(ch.n);
    rep.r.setZero();
    for (uint64_t q = 0; q < np; ++q) {
        PauliString qs = PauliString::from_index(ch.n, q);
        double d = 0;
        for (uint64_t p = 0; p < np; ++p) {
            if (ch.eta[p] == 0.0) continue;
            d += ch.eta[p] *
                 (anticommute(PauliString::from_index(ch.n, p), qs) ? -1.0 : 1.0);
        }
        rep.r(q, q) = d;
    }
    return rep;
}

// Pauli twirl: keep only the diagonal of the Liouville rep; the resulting
// Pauli probabilities are its symplectic transform,
// eta_P = (1/4^n) sum_Q R_QQ (-1)^{<P,Q>}.
inline PauliChannel pauli_twirl(const LiouvilleRep& rep) {
    uint64_t np = pauli_count(rep.n);
    PauliChannel ch(rep.n);
    for (uint64_t p = 0; p < np; ++p) {
        PauliString ps = PauliString::from_index(rep.n, p);
        double s = 0;
        for (uint64_t q = 0; q < np; ++q)
            s += rep.r(q, q) *
                 (anticommute(ps, PauliString::from_index(rep.n, q)) ? -1.0 : 1.0);
        ch.eta[p] = s / double(np);
    }
    return ch;
}

// Summary of a twirled Liouville matrix: the Z-diagonal block value, the
// remaining block value, the combined depolarizing parameter and gate error.
struct TwirlSummary {
    double alpha_z = 1.0;
    double alpha_r = 1.0;
    double alpha = 1.0;
    double r = 0.0;
    double max_offdiag = 0.0;
    double z_block_spread = 0.0;
    double r_block_spread = 0.0;
};

inline TwirlSummary summarize_twirl(const LiouvilleRep& rep) {
    int n = rep.n;
    uint64_t np = pauli_count(n);
    TwirlSummary s;
    double zmin = 1e300, zmax = -1e300, rmin = 1e300, rmax = -1e300;
    double zsum = 0, rsum = 0;
    int zcount = 0, rcount = 0;
    for (uint64_t q = 0; q < np; ++q) {
        for (uint64_t p = 0; p < np; ++p)
            if (p != q) s.max_offdiag = std::max(s.max_offdiag, std::abs(rep.r(p, q)));
        if (q == 0) continue;
        PauliString qs = PauliString::from_index(n, q);
        double v = rep.r(q, q);
        if (qs.x == 0) {  // Z-type
            zsum += v; ++zcount;
            zmin = std::min(zmin, v); zmax = std::max(zmax, v);
        } else {
            rsum += v; ++rcount;
            rmin = std::min(rmin, v); rmax = std::max(rmax, v);
        }
    }
    s.alpha_z = zcount ? zsum / zcount : 1.0;
    s.alpha_r = rcount ? rsum / rcount : 1.0;
    s.z_block_spread = zcount ? zmax - zmin : 0.0;
    s.r_block_spread = rcount ? rmax - rmin : 0.0;
    double dim = double(uint64_t(1) << n);
    s.alpha = (s.alpha_z + dim * s.alpha_r) / (dim + 1.0);
    s.r = (dim - 1.0) * (1.0 - s.alpha) / dim;
    return s;
}

// Full group twirl by explicit summation over every element of G_{2^k}:
// (1/|G|) sum_U R(U)^T R_E R(U). R(U) is orthogonal for unitary U, so
// R(U^dagger) = R(U)^T. Elements are visited in the canonical triple order,
// keeping the floating-point reduction deterministic.
inline LiouvilleRep twirl_full(const LiouvilleRep& rep_e, GroupParams params,
                               BigInt budget = 10'000) {
    check_liouville_size(params.n, 3);
    BigInt order = group_order(params.n, BigInt(1) << params.k);
    if (order > budget)
        throw BudgetError("group order " + order.str() + " exceeds twirl budget " +
                          budget.str());
    LiouvilleRep out(params.n);
    out.r.setZero();
    size_t count = 0;
    for_each_element(params, [&](const CNOTDihedralElement& g) {
        LiouvilleRep ru = liouville_of_unitary(params.n, element_to_unitary(g));
        out.r += ru.r.transpose() * rep_e.r * ru.r;
        ++count;
    });
    out.r /= double(count);
    return out;
}

// Precomputed Liouville reps of every group element, in canonical triple
// order. Lets callers twirl many channels against the same group cheaply.
inline std::vector<RealMatrix> group_liouvilles(GroupParams params, BigInt budget = 10'000) {
    check_liouville_size(params.n, 3);
    BigInt order = group_order(params.n, BigInt(1) << params.k);
    if (order > budget)
        throw BudgetError("group order " + order.str() + " exceeds twirl budget " +
                          budget.str());
    std::vector<RealMatrix> reps;
    reps.reserve(size_t(order.convert_to<uint64_t>()));
    for_each_element(params, [&](const CNOTDihedralElement& g) {
        reps.push_back(liouville_of_unitary(params.n, element_to_unitary(g)).r);
    });
    return reps;
}

inline LiouvilleRep twirl_full_precomputed(const LiouvilleRep& rep_e,
                                           const std::vector<RealMatrix>& reps) {
    LiouvilleRep out(rep_e.n);
    out.r.setZero();
    for (const RealMatrix& ru : reps) out.r += ru.transpose() * rep_e.r * ru;
    out.r /= double(reps.size());
    return out;
}

// Sequential twirl of a Pauli channel through the stage decomposition:
// orbit-average under CNOT conjugation (5 parameters), merge under CZ
// conjugation, then merge the X-like and Y-like classes (3 parameters).
// Equals twirl_full on Pauli-channel inputs.
inline LiouvilleRep twirl_sequential(const PauliChannel& ch, GroupParams params) {
    if (params.n != ch.n) throw DimensionError("channel parameter mismatch");
    int n = ch.n;
    if (n > 4) throw BudgetError("sequential twirl supported for n <= 4");
    uint64_t np = pauli_count(n);

    // cX-twirl: average within each of the five conjugation orbits.
    double sums[5] = {0, 0, 0, 0, 0};
    uint64_t counts[5] = {0, 0, 0, 0, 0};
    for (uint64_t idx = 0; idx < np; ++idx) {
        size_t c = size_t(cx_orbit_of(PauliString::from_index(n, idx)));
        sums[c] += ch.eta[idx];
        ++counts[c];
    }
    double beta_i = sums[size_t(CxOrbit::I)];
    auto avg = [&](CxOrbit o) {
        size_t c = size_t(o);
        return counts[c] ? sums[c] / double(counts[c]) : 0.0;
    };
    double beta_x = avg(CxOrbit::X);
    double beta_z = avg(CxOrbit::Z);
    double beta_y = avg(CxOrbit::Y);
    double beta_yy = avg(CxOrbit::YY);

    // The cZ- and Z_{2^k}-coset stages need k >= 2: at k = 1 neither CZ nor
    // S-like gates exist in the group (their phase-polynomial coefficients
    // vanish mod 2), so the twirl only averages within the five cX orbits.
    PauliChannel twirled(n);
    if (params.k >= 2) {
        // cZ-twirl merges the X and YY classes:
        // beta_{X-YY} = (beta_X + (2^{n-1}-1) beta_YY) / 2^{n-1},
        // then the Z_{2^k}-coset twirl merges with the odd-Y class.
        double half = double(uint64_t(1) << (n - 1));
        double beta_xyy = n == 1 ? beta_x : (beta_x + (half - 1.0) * beta_yy) / half;
        double beta_r = 0.5 * (beta_xyy + beta_y);
        for (uint64_t idx = 0; idx < np; ++idx) {
            PauliString p = PauliString::from_index(n, idx);
            if (p.is_identity()) twirled.eta[idx] = beta_i;
            else if (p.x == 0) twirled.eta[idx] = beta_z;
            else twirled.eta[idx] = beta_r;
        }
    } else {
        for (uint64_t idx = 0; idx < np; ++idx) {
            PauliString p = PauliString::from_index(n, idx);
            switch (cx_orbit_of(p)) {
                case CxOrbit::I: twirled.eta[idx] = beta_i; break;
                case CxOrbit::Z: twirled.eta[idx] = beta_z; break;
                case CxOrbit::X: twirled.eta[idx] = beta_x; break;
                case CxOrbit::Y: twirled.eta[idx] = beta_y; break;
                case CxOrbit::YY: twirled.eta[idx] = beta_yy; break;
            }
        }
    }
    return liouville_of_pauli_channel(twirled);
}

// Random CPTP channel via a Haar-ish random isometry into `env_dim`
// environment dimensions, sliced into Kraus operators.
template <class Rng>
std::vector<Matrix> random_cptp_kraus(int n, int env_dim, Rng& rng) {
    check_statevector_size(n);
    uint64_t dim = uint64_t(1) << n;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim * env_dim, dim);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(dim * env_dim, dim);
    std::vector<Matrix> kraus;
    for (int e = 0; e < env_dim; ++e)
        kraus.push_back(q.block(e * dim, 0, dim, dim));
    return kraus;
}

}  // namespace cnotdihedral
