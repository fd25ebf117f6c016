#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Decay-curve fitting for benchmarking data: F(l) = A * alpha^l + e with
// 0 < alpha <= 1, and the dual variant A_Z alpha_Z^l + A_R alpha_R^l + e.
// Damped (Levenberg-style) least squares on a logit reparameterization of
// alpha, seeded by a variable-projection scan (alpha fixed -> linear solve).

namespace cnotdihedral {

struct FitNonConvergence : std::runtime_error {
    explicit FitNonConvergence(const std::string& what) : std::runtime_error(what) {}
};
struct InsufficientLengths : std::invalid_argument {
    explicit InsufficientLengths(const std::string& what) : std::invalid_argument(what) {}
};

struct DecayFit {
    double amplitude = 0.0;
    double alpha = 1.0;
    double offset = 0.0;
    double amplitude_se = 0.0;
    double alpha_se = 0.0;
    double offset_se = 0.0;
    double chi2_per_dof = 0.0;
    bool degenerate = false;  // flat data; alpha not identifiable
};

struct DualDecayFit {
    double amplitude_z = 0.0, alpha_z = 1.0;
    double amplitude_r = 0.0, alpha_r = 1.0;
    double offset = 0.0;
    double chi2_per_dof = 0.0;
};

namespace detail {

inline double logit(double a) { return std::log(a / (1.0 - a)); }
inline double expit(double s) { return 1.0 / (1.0 + std::exp(-s)); }

// Given alpha, solve the linear least-squares problem for (A, e).
inline double varpro_sse(const std::vector<double>& l, const std::vector<double>& y,
                         const std::vector<double>& w, double alpha, double* a_out,
                         double* e_out) {
    double swx2 = 0, swx = 0, sw = 0, swxy = 0, swy = 0;
    for (size_t i = 0; i < l.size(); ++i) {
        double x = std::pow(alpha, l[i]);
        swx2 += w[i] * x * x;
        swx += w[i] * x;
        sw += w[i];
        swxy += w[i] * x * y[i];
        swy += w[i] * y[i];
    }
    double det = swx2 * sw - swx * swx;
    double a, e;
    if (std::abs(det) < 1e-300) {
        a = 0.0;
        e = swy / sw;
    } else {
        a = (swxy * sw - swy * swx) / det;
        e = (swx2 * swy - swx * swxy) / det;
    }
    double sse = 0;
    for (size_t i = 0; i < l.size(); ++i) {
        double r = a * std::pow(alpha, l[i]) + e - y[i];
        sse += w[i] * r * r;
    }
    if (a_out) *a_out = a;
    if (e_out) *e_out = e;
    return sse;
}

}  // namespace detail

// lengths/means aligned; stderrs may be empty (unweighted) or contain
// per-point standard errors (zeros fall back to the smallest positive one).
inline DecayFit fit_decay_single(const std::vector<double>& lengths,
                                 const std::vector<double>& means,
                                 const std::vector<double>& stderrs = {}) {
    size_t m = lengths.size();
    if (m < 3 || means.size() != m)
        throw InsufficientLengths("single-decay fit needs >= 3 distinct lengths");

    std::vector<double> w(m, 1.0);
    if (!stderrs.empty()) {
        double minpos = 0;
        for (double s : stderrs)
            if (s > 0 && (minpos == 0 || s < minpos)) minpos = s;
        if (minpos > 0)
            for (size_t i = 0; i < m; ++i) {
                double s = stderrs[i] > 0 ? stderrs[i] : minpos;
                w[i] = 1.0 / (s * s);
            }
    }

    DecayFit fit;
    double ymin = *std::min_element(means.begin(), means.end());
    double ymax = *std::max_element(means.begin(), means.end());
    if (ymax - ymin < 1e-12) {
        fit.degenerate = true;
        fit.alpha = 1.0;
        fit.amplitude = 0.0;
        fit.offset = means[0];
        return fit;
    }

    // Variable-projection scan over alpha for a robust seed.
    double best_alpha = 0.5, best_sse = 1e300;
    for (int i = 1; i <= 999; ++i) {
        double alpha = i / 1000.0;
        double sse = detail::varpro_sse(lengths, means, w, alpha, nullptr, nullptr);
        if (sse < best_sse) {
            best_sse = sse;
            best_alpha = alpha;
        }
    }
    // Golden-section refine around the seed (SSE is smooth in alpha).
    {
        double lo = std::max(1e-6, best_alpha - 0.002), hi = std::min(1.0 - 1e-9, best_alpha + 0.002);
        const double gr = 0.6180339887498949;
        double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
        double fa = detail::varpro_sse(lengths, means, w, a, nullptr, nullptr);
        double fb = detail::varpro_sse(lengths, means, w, b, nullptr, nullptr);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            if (fa < fb) {
                hi = b; b = a; fb = fa;
                a = hi - gr * (hi - lo);
                fa = detail::varpro_sse(lengths, means, w, a, nullptr, nullptr);
            } else {
                lo = a; a = b; fa = fb;
                b = lo + gr * (hi - lo);
                fb = detail::varpro_sse(lengths, means, w, b, nullptr, nullptr);
            }
        }
        best_alpha = 0.5 * (lo + hi);
    }
    double a0, e0;
    detail::varpro_sse(lengths, means, w, best_alpha, &a0, &e0);

    // Levenberg refinement on (A, s, e) with alpha = expit(s).
    Eigen::Vector3d theta(a0, detail::logit(std::clamp(best_alpha, 1e-9, 1.0 - 1e-12)), e0);
    double lambda = 1e-3;
    auto model_sse = [&](const Eigen::Vector3d& t, Eigen::Vector3d* grad,
                         Eigen::Matrix3d* hess) {
        double A = t(0), alpha = detail::expit(t(1)), e = t(2);
        double sse = 0;
        if (grad) grad->setZero();
        if (hess) hess->setZero();
        for (size_t i = 0; i < m; ++i) {
            double x = std::pow(alpha, lengths[i]);
            double r = A * x + e - means[i];
            sse += w[i] * r * r;
            if (grad) {
                double dalpha_ds = alpha * (1.0 - alpha);
                Eigen::Vector3d j(x, A * lengths[i] * std::pow(alpha, lengths[i] - 1) * dalpha_ds,
                                  1.0);
                *grad += 2.0 * w[i] * r * j;
                if (hess) *hess += 2.0 * w[i] * j * j.transpose();
            }
        }
        return sse;
    };
    Eigen::Vector3d grad;
    Eigen::Matrix3d hess;
    double sse = model_sse(theta, &grad, &hess);
    for (int it = 0; it < 500; ++it) {
        Eigen::Matrix3d damped = hess + lambda * Eigen::Matrix3d(hess.diagonal().asDiagonal());
        Eigen::Vector3d step = damped.ldlt().solve(-grad);
        Eigen::Vector3d cand = theta + step;
        double cand_sse = model_sse(cand, nullptr, nullptr);
        if (cand_sse < sse) {
            theta = cand;
            lambda = std::max(lambda * 0.5, 1e-12);
            double prev = sse;
            sse = model_sse(theta, &grad, &hess);
            if (prev - sse < 1e-18 * (1.0 + prev)) break;
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }

    fit.amplitude = theta(0);
    fit.alpha = detail::expit(theta(1));
    fit.offset = theta(2);
    int dof = int(m) - 3;
    fit.chi2_per_dof = dof > 0 ? sse / dof : 0.0;

    // Covariance of (A, s, e): sigma^2 (J^T W J)^-1; for unweighted data
    // sigma^2 is the residual variance, for weighted data it is 1.
    Eigen::Matrix3d jtwj = 0.5 * hess;  // hess = 2 J^T W J at optimum (GN approx)
    Eigen::Matrix3d cov = jtwj.completeOrthogonalDecomposition().pseudoInverse();
    double sigma2 = stderrs.empty() ? (dof > 0 ? sse / dof : 0.0) : 1.0;
    cov *= sigma2;
    fit.amplitude_se = std::sqrt(std::max(cov(0, 0), 0.0));
    double dalpha_ds = fit.alpha * (1.0 - fit.alpha);
    fit.alpha_se = std::sqrt(std::max(cov(1, 1), 0.0)) * dalpha_ds;
    fit.offset_se = std::sqrt(std::max(cov(2, 2), 0.0));
    return fit;
}

// Joint fit of two decays plus offset. Seeded by a coarse scan over the
// (alpha_z, alpha_r) grid with a linear solve for the amplitudes and offset,
// then coordinate-refined.
inline DualDecayFit fit_decay_dual(const std::vector<double>& lengths,
                                   const std::vector<double>& means,
                                   const std::vector<double>& stderrs = {}) {
    size_t m = lengths.size();
    if (m < 5 || means.size() != m)
        throw InsufficientLengths("dual-decay fit needs >= 5 distinct lengths");
    std::vector<double> w(m, 1.0);
    if (!stderrs.empty())
        for (size_t i = 0; i < m; ++i)
            if (stderrs[i] > 0) w[i] = 1.0 / (stderrs[i] * stderrs[i]);

    auto linear_sse = [&](double az, double ar, Eigen::Vector3d* coeffs) {
        Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
        Eigen::Vector3d atb = Eigen::Vector3d::Zero();
        for (size_t i = 0; i < m; ++i) {
            Eigen::Vector3d row(std::pow(az, lengths[i]), std::pow(ar, lengths[i]), 1.0);
            ata += w[i] * row * row.transpose();
            atb += w[i] * row * means[i];
        }
        Eigen::Vector3d c = ata.completeOrthogonalDecomposition().pseudoInverse() * atb;
        double sse = 0;
        for (size_t i = 0; i < m; ++i) {
            double f = c(0) * std::pow(az, lengths[i]) + c(1) * std::pow(ar, lengths[i]) + c(2);
            double r = f - means[i];
            sse += w[i] * r * r;
        }
        if (coeffs) *coeffs = c;
        return sse;
    };

    double best_az = 0.9, best_ar = 0.9, best_sse = 1e300;
    for (int i = 1; i <= 99; ++i) {
        for (int j = 1; j <= 99; ++j) {
            double az = i / 100.0, ar = j / 100.0;
            double sse = linear_sse(az, ar, nullptr);
            if (sse < best_sse) {
                best_sse = sse;
                best_az = az;
                best_ar = ar;
            }
        }
    }
    // Coordinate refinement.
    double step = 0.01;
    while (step > 1e-12) {
        bool improved = false;
        for (auto [daz, dar] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            double az = std::clamp(best_az + daz, 1e-6, 1.0);
            double ar = std::clamp(best_ar + dar, 1e-6, 1.0);
            double sse = linear_sse(az, ar, nullptr);
            if (sse < best_sse - 1e-30) {
                best_sse = sse;
                best_az = az;
                best_ar = ar;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    Eigen::Vector3d c;
    double sse = linear_sse(best_az, best_ar, &c);
    DualDecayFit fit;
    fit.alpha_z = best_az;
    fit.alpha_r = best_ar;
    fit.amplitude_z = c(0);
    fit.amplitude_r = c(1);
    fit.offset = c(2);
    int dof = int(m) - 5;
    fit.chi2_per_dof = dof > 0 ? sse / dof : 0.0;
    return fit;
}

}  // namespace cnotdihedral
