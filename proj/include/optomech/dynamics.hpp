#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "optomech/errors.hpp"
#include "optomech/linalg.hpp"
#include "optomech/params.hpp"

// Linearized fluctuation dynamics of the quadrature vector
// f = (X_a, Y_a, X_b1, Y_b1, X_b2, Y_b2): df/dt = A f + noise, with the
// covariance obeying dV/dt = A V + V A^T + D.
namespace optomech {

using Mat6 = Eigen::Matrix<double, 6, 6>;

struct DriftMatrix {
    Mat6 A = Mat6::Zero();
};

struct NoiseMatrix {
    Mat6 D = Mat6::Zero();
};

// Symmetric second moments V_jk = <f_j f_k + f_k f_j> / 2; vacuum is I/2.
struct CovarianceMatrix {
    Mat6 V = Mat6::Zero();
};

struct StabilityReport {
    bool stable = false;
    double max_real_part = 0.0;
    linalg::ComplexList eigenvalues;
};

// Real parts within this distance of zero count as unstable.
inline constexpr double marginal_stability_band = 1e-9;

inline DriftMatrix build_drift(const EffectiveParams& ep) {
    ep.validate();
    const double c = 2.0 * ep.chi * std::cos(ep.theta);
    const double s = 2.0 * ep.chi * std::sin(ep.theta);
    const double kappa_plus = -ep.kappa / 2.0 + c;
    const double kappa_minus = -ep.kappa / 2.0 - c;
    const double delta_plus = ep.Delta_a + s;
    const double delta_minus = -ep.Delta_a + s;
    const double g1 = 2.0 * ep.g1_eff;
    const double g2 = 2.0 * ep.g2_eff;

    DriftMatrix d;
    Mat6& A = d.A;
    A(0, 0) = kappa_plus;
    A(0, 1) = delta_plus;
    A(1, 0) = delta_minus;
    A(1, 1) = kappa_minus;
    A(1, 2) = g1;
    A(1, 4) = g2;

    A(2, 2) = -ep.gamma1 / 2.0;
    A(2, 3) = ep.omega_m1;
    A(3, 0) = g1;
    A(3, 2) = -ep.omega_m1 - 4.0 * ep.lambda_mpa;
    A(3, 3) = -ep.gamma1 / 2.0;

    A(4, 4) = -ep.gamma2 / 2.0;
    A(4, 5) = ep.omega_m2;
    A(5, 0) = g2;
    A(5, 4) = -ep.omega_m2;
    A(5, 5) = -ep.gamma2 / 2.0;
    return d;
}

inline NoiseMatrix build_noise(const EffectiveParams& ep) {
    ep.validate();
    NoiseMatrix n;
    const double cav = ep.kappa / 2.0;
    const double m1 = ep.gamma1 * (2.0 * ep.n_th1 + 1.0) / 2.0;
    const double m2 = ep.gamma2 * (2.0 * ep.n_th2 + 1.0) / 2.0;
    n.D.diagonal() << cav, cav, m1, m1, m2, m2;
    return n;
}

/// Routh-Hurwitz test through the spectrum of A: stable iff every eigenvalue
/// has real part below -marginal_stability_band.
inline StabilityReport stability(const DriftMatrix& drift) {
    StabilityReport r;
    r.eigenvalues = linalg::eigenvalues(drift.A);
    r.max_real_part = r.eigenvalues.front().real();
    for (const auto& z : r.eigenvalues) {
        r.max_real_part = std::max(r.max_real_part, z.real());
    }
    r.stable = r.max_real_part < -marginal_stability_band;
    return r;
}

/// Residual A V + V A^T + D.
inline Mat6 lyapunov_residual(const DriftMatrix& drift, const NoiseMatrix& noise,
                              const CovarianceMatrix& cov) {
    return drift.A * cov.V + cov.V * drift.A.transpose() + noise.D;
}

/**
 * Steady-state covariance: solves A V + V A^T + D = 0 through the vectorized
 * 36x36 system (I (x) A + A (x) I) vec(V) = -vec(D), then symmetrizes.
 * Throws Unstable when A fails the stability test.
 */
inline CovarianceMatrix steady_state(const DriftMatrix& drift, const NoiseMatrix& noise) {
    const auto report = stability(drift);
    if (!report.stable) {
        throw Unstable("steady_state: drift matrix is not stable (max real part " +
                       std::to_string(report.max_real_part) + ")");
    }
    const Mat6 id = Mat6::Identity();
    const linalg::Matrix op = linalg::kron(id, drift.A) + linalg::kron(drift.A, id);
    const linalg::Vector rhs = -linalg::vec(noise.D);
    const linalg::Vector x = linalg::solve_linear(op, rhs);
    CovarianceMatrix out;
    out.V = linalg::unvec(x, 6, 6);
    out.V = (0.5 * (out.V + out.V.transpose())).eval();
    return out;
}

// Vacuum cavity, thermal mechanics.
inline CovarianceMatrix default_initial_covariance(const EffectiveParams& ep) {
    CovarianceMatrix v;
    v.V.diagonal() << 0.5, 0.5, ep.n_th1 + 0.5, ep.n_th1 + 0.5, ep.n_th2 + 0.5, ep.n_th2 + 0.5;
    return v;
}

// One period of the reference mechanical frequency is 2 pi in model units.
inline constexpr double default_transient_step = 1e-3 * two_pi;

/**
 * Integrates dV/dt = A V + V A^T + D from V0 over [0, t_final] with classical
 * fixed-step RK4. The step is dt, shortened uniformly so that an integer
 * number of steps lands exactly on t_final. V is symmetrized after every step.
 */
inline CovarianceMatrix integrate_transient(const DriftMatrix& drift, const NoiseMatrix& noise,
                                            const CovarianceMatrix& v0, double t_final,
                                            double dt = default_transient_step) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidArgument("integrate_transient: dt must be finite and > 0");
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw InvalidArgument("integrate_transient: t_final must be finite and >= 0");
    }
    CovarianceMatrix out = v0;
    if (t_final == 0.0) {
        return out;
    }
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt));
    const double h = t_final / static_cast<double>(steps);
    const Mat6& A = drift.A;
    const Mat6 At = A.transpose();
    const Mat6& D = noise.D;
    auto rhs = [&](const Mat6& v) -> Mat6 { return A * v + v * At + D; };

    Mat6 v = v0.V;
    for (std::size_t i = 0; i < steps; ++i) {
        const Mat6 k1 = rhs(v);
        const Mat6 k2 = rhs(v + 0.5 * h * k1);
        const Mat6 k3 = rhs(v + 0.5 * h * k2);
        const Mat6 k4 = rhs(v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        v = (0.5 * (v + v.transpose())).eval();
        if (!v.allFinite()) {
            throw StepTooLarge("integrate_transient: covariance became non-finite at step " +
                               std::to_string(i));
        }
    }
    out.V = v;
    return out;
}

} // namespace optomech
