#pragma once

#include <cmath>

#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"
#include "optomech/params.hpp"

// Bright/dark hybrid mechanical modes
//   B = (g1 b1 + g2 b2) / g+,   D = (g2 b1 - g1 b2) / g+,   g+ = sqrt(g1^2 + g2^2)
// and the coefficients of the rotating-wave effective Hamiltonian. Used as a
// dark-mode diagnostic only; the dynamics always use the full drift matrix.
namespace optomech {

struct HybridModeParams {
    double g_plus = 0.0;
    double omega_B = 0.0;
    double omega_D = 0.0;
    double omega_B_lambda = 0.0;
    double omega_D_lambda = 0.0;
    double g_BD_omega = 0.0;  // frequency-mismatch coupling
    double g_BD_lambda = 0.0; // Coulomb-induced coupling
};

inline HybridModeParams hybrid_decomposition(const EffectiveParams& ep) {
    const double g1 = ep.g1_eff;
    const double g2 = ep.g2_eff;
    const double gp2 = g1 * g1 + g2 * g2;
    if (!(gp2 > 0.0)) {
        throw ZeroCoupling("hybrid_decomposition: both couplings vanish");
    }
    HybridModeParams h;
    h.g_plus = std::sqrt(gp2);
    h.omega_B = (ep.omega_m1 * g1 * g1 + ep.omega_m2 * g2 * g2) / gp2;
    h.omega_D = (ep.omega_m1 * g2 * g2 + ep.omega_m2 * g1 * g1) / gp2;
    h.omega_B_lambda = ep.lambda_mpa * g1 * g1 / gp2;
    h.omega_D_lambda = ep.lambda_mpa * g2 * g2 / gp2;
    h.g_BD_omega = (ep.omega_m1 - ep.omega_m2) * g1 * g2 / gp2;
    h.g_BD_lambda = ep.lambda_mpa * g1 * g2 / gp2;
    return h;
}

inline constexpr double default_dark_mode_tolerance = 1e-12;

// True when B and D are coupled, so the dark mode no longer decouples.
inline bool dark_mode_broken(const EffectiveParams& ep, double tol = default_dark_mode_tolerance) {
    const double gp2 = ep.g1_eff * ep.g1_eff + ep.g2_eff * ep.g2_eff;
    if (!(gp2 > 0.0)) {
        // Without optomechanical coupling there is no bright mode to break from.
        return false;
    }
    const auto h = hybrid_decomposition(ep);
    return std::abs(h.g_BD_omega) + std::abs(h.g_BD_lambda) > tol;
}

/**
 * Orthogonal 6x6 change of basis (X_a, Y_a, X_b1, Y_b1, X_b2, Y_b2) ->
 * (X_a, Y_a, X_B, Y_B, X_D, Y_D). The mechanical 2x2 mixing matrix has rows
 * (g1, g2)/g+ and (g2, -g1)/g+, applied to X and Y alike.
 */
inline Mat6 bright_dark_rotation(const EffectiveParams& ep) {
    const double gp2 = ep.g1_eff * ep.g1_eff + ep.g2_eff * ep.g2_eff;
    if (!(gp2 > 0.0)) {
        throw ZeroCoupling("bright_dark_rotation: both couplings vanish");
    }
    const double gp = std::sqrt(gp2);
    const double c1 = ep.g1_eff / gp;
    const double c2 = ep.g2_eff / gp;
    Mat6 r = Mat6::Zero();
    r(0, 0) = 1.0;
    r(1, 1) = 1.0;
    for (int q = 0; q < 2; ++q) {
        r(2 + q, 2 + q) = c1;
        r(2 + q, 4 + q) = c2;
        r(4 + q, 2 + q) = c2;
        r(4 + q, 4 + q) = -c1;
    }
    return r;
}

inline CovarianceMatrix to_bright_dark_basis(const CovarianceMatrix& cov, const EffectiveParams& ep) {
    const Mat6 r = bright_dark_rotation(ep);
    CovarianceMatrix out;
    out.V = r * cov.V * r.transpose();
    return out;
}

struct HybridOccupations {
    double bright = 0.0;
    double dark = 0.0;
};

inline HybridOccupations hybrid_occupations(const CovarianceMatrix& cov, const EffectiveParams& ep) {
    const auto rotated = to_bright_dark_basis(cov, ep);
    const Mat6& v = rotated.V;
    return {(v(2, 2) + v(3, 3) - 1.0) / 2.0, (v(4, 4) + v(5, 5) - 1.0) / 2.0};
}

} // namespace optomech
