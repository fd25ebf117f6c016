#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "cnotdihedral/channel.hpp"
#include "cnotdihedral/circuit.hpp"
#include "cnotdihedral/fit.hpp"
#include "cnotdihedral/group.hpp"

// Randomized benchmarking over the CNOT-dihedral group: sequence generation
// with an exact inversion gate, optional interleaving, noisy density-matrix
// simulation, averaging, and decay fitting.

namespace cnotdihedral {

struct InputState {
    std::string name;   // "zeros", "plus", or "custom"
    Matrix rho;
    Matrix observable;  // defaults to the projector onto the prepared state
};

inline InputState zeros_input(int n) {
    Matrix rho = zero_state(n);
    return {"zeros", rho, rho};
}
inline InputState plus_input(int n) {
    Matrix rho = plus_state(n);
    return {"plus", rho, rho};
}

enum class SimMode { Density, Trajectory };

struct RBConfig {
    GroupParams params;
    std::vector<int> lengths;
    int sequences_per_length = 30;  // K
    std::vector<InputState> states;
    std::optional<PauliChannel> noise;  // applied after every gate incl. recovery
    std::optional<CNOTDihedralElement> interleaved;
    uint64_t seed = 0;
    SimMode mode = SimMode::Density;
    int threads = 1;

    void validate() const {
        if (lengths.empty()) throw DimensionError("lengths must be nonempty");
        for (int l : lengths)
            if (l < 1) throw DimensionError("every sequence length must be >= 1");
        if (sequences_per_length < 1) throw DimensionError("K must be >= 1");
        if (states.empty()) throw DimensionError("at least one input state required");
        if (noise && noise->n != params.n) throw DimensionError("noise dimension mismatch");
    }
};

struct RBSequence {
    std::vector<CNOTDihedralElement> elements;  // applied left to right
    CNOTDihedralElement recovery;
};

struct RBPoint {
    int length = 0;
    std::string state;
    std::vector<double> fidelities;  // one per sequence, in sequence order
    double mean = 0.0;
    double stderr_mean = 0.0;
};

struct RBDataset {
    RBConfig config;
    std::vector<RBPoint> points;  // state-major, then length order

    const RBPoint& at(const std::string& state, int length) const {
        for (const auto& p : points)
            if (p.state == state && p.length == length) return p;
        throw std::out_of_range("no such RB data point");
    }
};

struct RBStateFit {
    std::string state;
    DecayFit fit;
    bool deviation_flag = false;  // residual chi^2/dof above threshold
};

struct RBFit {
    std::vector<RBStateFit> per_state;
    // Combined parameters; populated when both "zeros" and "plus" ran.
    std::optional<double> alpha_z, alpha_r, alpha, r;
    std::optional<double> alpha_z_se, alpha_r_se;
};

namespace detail {

// splitmix64; decorrelates the per-sequence streams derived from
// (seed, length index, sequence index).
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 sequence_rng(uint64_t seed, size_t length_index, size_t seq_index) {
    uint64_t s = mix64(seed ^ mix64(uint64_t(length_index) << 32 | uint64_t(seq_index)));
    return std::mt19937_64(s);
}

}  // namespace detail

template <class Rng>
RBSequence generate_sequence(const RBConfig& cfg, int length, Rng& rng) {
    RBSequence seq;
    CNOTDihedralElement product = identity(cfg.params);
    for (int i = 0; i < length; ++i) {
        CNOTDihedralElement g = sample_uniform(cfg.params, rng);
        seq.elements.push_back(g);
        product = multiply(g, product);
        if (cfg.interleaved) {
            seq.elements.push_back(*cfg.interleaved);
            product = multiply(*cfg.interleaved, product);
        }
    }
    seq.recovery = inverse(product);
    return seq;
}

inline std::vector<std::vector<RBSequence>> generate_sequences(const RBConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<RBSequence>> out(cfg.lengths.size());
    for (size_t li = 0; li < cfg.lengths.size(); ++li) {
        out[li].reserve(cfg.sequences_per_length);
        for (int si = 0; si < cfg.sequences_per_length; ++si) {
            auto rng = detail::sequence_rng(cfg.seed, li, size_t(si));
            out[li].push_back(generate_sequence(cfg, cfg.lengths[li], rng));
        }
    }
    return out;
}

inline double simulate_sequence_density(const RBSequence& seq, const RBConfig& cfg,
                                        const InputState& state) {
    Matrix rho = state.rho;
    for (const auto& g : seq.elements) {
        rho = apply_element(rho, g);
        if (cfg.noise) rho = apply_pauli_channel(rho, *cfg.noise);
    }
    rho = apply_element(rho, seq.recovery);
    if (cfg.noise) rho = apply_pauli_channel(rho, *cfg.noise);
    return expectation(state.observable, rho);
}

// Trajectory mode: statevector evolution with one sampled Pauli error per
// channel application. Statistical rather than exact; the returned sample is
// the exact overlap for the sampled error pattern.
template <class Rng>
double simulate_sequence_trajectory(const RBSequence& seq, const RBConfig& cfg,
                                    const InputState& state, Rng& rng) {
    int n = cfg.params.n;
    uint64_t dim = uint64_t(1) << n;
    Eigen::VectorXcd psi(dim);
    // Requires a pure prepared state.
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.rho);
    Eigen::Index which = 0;
    es.eigenvalues().maxCoeff(&which);
    psi = es.eigenvectors().col(which);

    auto apply_g = [&](const CNOTDihedralElement& g) {
        PhasedPermutation pp = element_to_phased_permutation(g);
        Eigen::VectorXcd next(dim);
        for (uint64_t b = 0; b < dim; ++b) {
            double angle = 2.0 * std::numbers::pi * pp.phase[b] / double(pp.m);
            next(pp.perm[b]) = std::polar(1.0, angle) * psi(b);
        }
        psi = std::move(next);
    };
    auto apply_noise = [&]() {
        if (!cfg.noise) return;
        std::discrete_distribution<size_t> dist(cfg.noise->eta.begin(), cfg.noise->eta.end());
        PauliString q = PauliString::from_index(n, dist(rng));
        if (q.is_identity()) return;
        Eigen::VectorXcd next(dim);
        for (uint64_t b = 0; b < dim; ++b) {
            double sign = parity64(q.z & b) ? -1.0 : 1.0;
            next(b ^ q.x) = sign * psi(b);
        }
        psi = std::move(next);  // global phase from Y factors dropped
    };

    for (const auto& g : seq.elements) {
        apply_g(g);
        apply_noise();
    }
    apply_g(seq.recovery);
    apply_noise();
    Complex v = psi.adjoint() * state.observable * psi;
    return v.real();
}

// Runs the full protocol. Work is partitioned over (length, sequence) cells;
// results land in preallocated slots, so the output is independent of the
// thread count.
inline RBDataset estimate_sequence_fidelity(const RBConfig& cfg) {
    cfg.validate();
    size_t nl = cfg.lengths.size();
    size_t ns = cfg.states.size();
    size_t k = size_t(cfg.sequences_per_length);
    std::vector<double> fid(nl * k * ns, 0.0);

    auto run_cell = [&](size_t li, size_t si) {
        auto rng = detail::sequence_rng(cfg.seed, li, si);
        RBSequence seq = generate_sequence(cfg, cfg.lengths[li], rng);
        for (size_t st = 0; st < ns; ++st) {
            double f;
            if (cfg.mode == SimMode::Density) {
                f = simulate_sequence_density(seq, cfg, cfg.states[st]);
            } else {
                auto traj_rng = detail::sequence_rng(cfg.seed ^ 0x72616a1ull,
                                                     li * ns + st, si);
                f = simulate_sequence_trajectory(seq, cfg, cfg.states[st], traj_rng);
            }
            fid[(li * k + si) * ns + st] = f;
        }
    };

    size_t cells = nl * k;
    int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (size_t c = 0; c < cells; ++c) run_cell(c / k, c % k);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                for (size_t c = next.fetch_add(1); c < cells; c = next.fetch_add(1))
                    run_cell(c / k, c % k);
            });
        for (auto& t : pool) t.join();
    }

    RBDataset ds;
    ds.config = cfg;
    for (size_t st = 0; st < ns; ++st) {
        for (size_t li = 0; li < nl; ++li) {
            RBPoint pt;
            pt.length = cfg.lengths[li];
            pt.state = cfg.states[st].name;
            pt.fidelities.reserve(k);
            double sum = 0;
            for (size_t si = 0; si < k; ++si) {
                double f = fid[(li * k + si) * ns + st];
                pt.fidelities.push_back(f);
                sum += f;
            }
            pt.mean = sum / double(k);
            double var = 0;
            for (double f : pt.fidelities) var += (f - pt.mean) * (f - pt.mean);
            pt.stderr_mean = k > 1 ? std::sqrt(var / double(k - 1) / double(k)) : 0.0;
            ds.points.push_back(std::move(pt));
        }
    }
    return ds;
}

enum class FitModel { Single, Dual };

inline RBFit fit_decay(const RBDataset& ds, FitModel model = FitModel::Single,
                       double deviation_threshold = 4.0) {
    RBFit out;
    const auto& cfg = ds.config;
    for (const auto& state : cfg.states) {
        std::vector<double> lengths, means, errs;
        for (const auto& pt : ds.points) {
            if (pt.state != state.name) continue;
            lengths.push_back(double(pt.length));
            means.push_back(pt.mean);
            errs.push_back(pt.stderr_mean);
        }
        RBStateFit sf;
        sf.state = state.name;
        bool weighted = std::any_of(errs.begin(), errs.end(), [](double e) { return e > 0; });
        if (model == FitModel::Dual) {
            DualDecayFit dual = fit_decay_dual(lengths, means, weighted ? errs
                                                                        : std::vector<double>{});
            // Report the dominant decay in the single-fit slot, keep chi2.
            sf.fit.alpha = dual.alpha_z;
            sf.fit.amplitude = dual.amplitude_z;
            sf.fit.offset = dual.offset;
            sf.fit.chi2_per_dof = dual.chi2_per_dof;
        } else {
            sf.fit = fit_decay_single(lengths, means, weighted ? errs : std::vector<double>{});
        }
        sf.deviation_flag = weighted && sf.fit.chi2_per_dof > deviation_threshold;
        out.per_state.push_back(std::move(sf));
    }

    const RBStateFit* zeros = nullptr;
    const RBStateFit* plus = nullptr;
    for (const auto& sf : out.per_state) {
        if (sf.state == "zeros") zeros = &sf;
        if (sf.state == "plus") plus = &sf;
    }
    if (zeros && plus) {
        double dim = double(uint64_t(1) << cfg.params.n);
        out.alpha_z = zeros->fit.alpha;
        out.alpha_r = plus->fit.alpha;
        out.alpha_z_se = zeros->fit.alpha_se;
        out.alpha_r_se = plus->fit.alpha_se;
        out.alpha = (*out.alpha_z + dim * *out.alpha_r) / (dim + 1.0);
        out.r = (dim - 1.0) * (1.0 - *out.alpha) / dim;
    }
    return out;
}

inline std::string dataset_csv(const RBDataset& ds) {
    std::ostringstream out;
    out << "length,state,seq_index,fidelity\n";
    out.precision(17);
    for (const auto& pt : ds.points)
        for (size_t si = 0; si < pt.fidelities.size(); ++si)
            out << pt.length << "," << pt.state << "," << si << "," << pt.fidelities[si]
                << "\n";
    return out.str();
}

}  // namespace cnotdihedral
