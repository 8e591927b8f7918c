#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(name) + " must be finite");
    }
}

inline void require_positive(double v, const char* name) {
    require_finite(v, name);
    if (!(v > 0.0)) {
        throw InvalidArgument(std::string(name) + " must be > 0");
    }
}

inline void require_nonnegative(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0) {
        throw InvalidArgument(std::string(name) + " must be >= 0");
    }
}

} // namespace detail

/**
 * Raw experimental parameters in SI units.
 *
 * Angular frequencies and rates are in rad/s. The first resonator carries the
 * charge Q1 = e * s * sigma1 and sits between two electrodes 2L apart, each of
 * capacitance C0 at bias U0.
 */
struct PhysicalParams {
    double m1 = 0.0;       // [kg]
    double m2 = 0.0;       // [kg]
    double omega_m1 = 0.0; // [rad/s]
    double omega_m2 = 0.0; // [rad/s]
    double C0 = 0.0;       // [F]
    double U0 = 0.0;       // [V]
    double L = 0.0;        // [m]
    double sigma1 = 0.0;   // [1/m^2]
    double s = 0.0;        // [m^2]
    double gamma1 = 0.0;   // [rad/s]
    double gamma2 = 0.0;   // [rad/s]
    double kappa = 0.0;    // [rad/s]
    std::optional<double> T0; // [K]; if absent, thermal occupations are given directly

    void validate() const {
        detail::require_positive(m1, "m1");
        detail::require_positive(m2, "m2");
        detail::require_positive(omega_m1, "omega_m1");
        detail::require_positive(omega_m2, "omega_m2");
        detail::require_positive(C0, "C0");
        detail::require_positive(L, "L");
        detail::require_positive(s, "s");
        detail::require_positive(gamma1, "gamma1");
        detail::require_positive(gamma2, "gamma2");
        detail::require_positive(kappa, "kappa");
        detail::require_nonnegative(sigma1, "sigma1");
        detail::require_nonnegative(U0, "U0");
        if (T0) {
            detail::require_nonnegative(*T0, "T0");
        }
    }

    // Q1 = |e| s sigma1
    double charge(const PhysicalConstants& c = codata2018) const { return c.e * s * sigma1; }
};

// Experimental values of the two-resonator device: m = 20 pg,
// omega_m = 2 pi x 134 kHz, C0 = 27.5 nF, gamma = 1e-6 omega_m, L = 0.1 mm,
// sigma1 = 1.25e13 cm^-2, s = 0.08 um^2. kappa defaults to 20 omega_m.
inline PhysicalParams device_defaults() {
    PhysicalParams p;
    const double wm = two_pi * 134.0e3;
    p.m1 = 20.0e-15;
    p.m2 = 20.0e-15;
    p.omega_m1 = wm;
    p.omega_m2 = wm;
    p.C0 = 27.5e-9;
    p.U0 = 0.0;
    p.L = 0.1e-3;
    p.sigma1 = 1.25e17; // 1.25e13 cm^-2
    p.s = 0.08e-12;
    p.gamma1 = 1.0e-6 * wm;
    p.gamma2 = 1.0e-6 * wm;
    p.kappa = 20.0 * wm;
    return p;
}

/**
 * Dimensionless model parameters. Every frequency and rate is expressed in
 * units of the reference frequency omega_m1 (SI). These fully determine the
 * drift and noise matrices.
 */
struct EffectiveParams {
    double g1_eff = 0.0;     // linearized coupling g~1
    double g2_eff = 0.0;     // linearized coupling g~2
    double Delta_a = 0.0;    // effective cavity detuning
    double kappa = 0.0;      // cavity decay
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double lambda_mpa = 0.0; // Coulomb-induced MPA strength
    double chi = 0.0;        // OPA gain
    double theta = 0.0;      // OPA phase [rad], in [0, 2 pi)
    double omega_m1 = 1.0;
    double omega_m2 = 1.0;
    double n_th1 = 0.0;
    double n_th2 = 0.0;

    // omega'_m1 = omega_m1 + 2 lambda
    double omega_m1_prime() const { return omega_m1 + 2.0 * lambda_mpa; }

    void validate() const {
        detail::require_finite(g1_eff, "g1_eff");
        detail::require_finite(g2_eff, "g2_eff");
        detail::require_finite(Delta_a, "Delta_a");
        detail::require_finite(lambda_mpa, "lambda_mpa");
        detail::require_finite(omega_m1, "omega_m1");
        detail::require_finite(omega_m2, "omega_m2");
        detail::require_nonnegative(kappa, "kappa");
        detail::require_nonnegative(gamma1, "gamma1");
        detail::require_nonnegative(gamma2, "gamma2");
        detail::require_nonnegative(chi, "chi");
        detail::require_nonnegative(n_th1, "n_th1");
        detail::require_nonnegative(n_th2, "n_th2");
        detail::require_finite(theta, "theta");
        if (theta < 0.0 || theta >= two_pi) {
            throw InvalidArgument("theta must lie in [0, 2 pi)");
        }
    }
};

// Maps any angle into [0, 2 pi).
inline double wrap_phase(double phi) {
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    // fmod of a value just below 0 can round up to exactly 2 pi
    if (r >= two_pi) {
        r = 0.0;
    }
    return r;
}

/// Coulomb MPA strength lambda = C0 U0 Q1 / (4 pi eps0 L^3 m1 omega_m1), in rad/s.
inline double lambda_from_voltage(const PhysicalParams& p, const PhysicalConstants& c = codata2018) {
    p.validate();
    const double q1 = p.charge(c);
    return p.C0 * p.U0 * q1 /
           (4.0 * std::numbers::pi * c.epsilon0 * p.L * p.L * p.L * p.m1 * p.omega_m1);
}

/// Bose-Einstein occupation 1 / (exp(hbar omega / kB T0) - 1); zero at T0 = 0.
inline double n_th_from_temperature(double omega_m, double T0, const PhysicalConstants& c = codata2018) {
    detail::require_positive(omega_m, "omega_m");
    detail::require_nonnegative(T0, "T0");
    if (T0 == 0.0) {
        return 0.0;
    }
    const double x = c.hbar * omega_m / (c.kB * T0);
    return 1.0 / std::expm1(x);
}

// x_zpf = sqrt(hbar / (2 m omega))
inline double zero_point_position(double mass, double omega, const PhysicalConstants& c = codata2018) {
    detail::require_positive(mass, "mass");
    detail::require_positive(omega, "omega");
    return std::sqrt(c.hbar / (2.0 * mass * omega));
}

// p_zpf = sqrt(hbar m omega / 2)
inline double zero_point_momentum(double mass, double omega, const PhysicalConstants& c = codata2018) {
    detail::require_positive(mass, "mass");
    detail::require_positive(omega, "omega");
    return std::sqrt(c.hbar * mass * omega / 2.0);
}

// Single-photon optomechanical coupling g = omega_a x_zpf / L, in rad/s.
inline double single_photon_coupling(double omega_a, double x_zpf, double L) {
    detail::require_positive(omega_a, "omega_a");
    detail::require_positive(x_zpf, "x_zpf");
    detail::require_positive(L, "L");
    return omega_a * x_zpf / L;
}

/**
 * Drive-side quantities injected directly in units of omega_m1. Figures fix
 * g~_j and Delta_a instead of deriving them from the drive power; the
 * meanfield module provides the physical path when needed.
 */
struct EffectiveDrive {
    double g1_eff = 0.0;
    double g2_eff = 0.0;
    double Delta_a = 0.0;
    double chi = 0.0;
    double theta = 0.0;
    std::optional<double> n_th1; // overrides the T0 path
    std::optional<double> n_th2;
};

inline EffectiveParams effective_from_physical(const PhysicalParams& p, const EffectiveDrive& drive,
                                               const PhysicalConstants& c = codata2018) {
    p.validate();
    if (!std::isfinite(drive.chi) || drive.chi < 0.0) {
        throw InvalidArgument("chi must be finite and >= 0");
    }
    const double wref = p.omega_m1;
    EffectiveParams ep;
    ep.g1_eff = drive.g1_eff;
    ep.g2_eff = drive.g2_eff;
    ep.Delta_a = drive.Delta_a;
    ep.chi = drive.chi;
    ep.theta = wrap_phase(drive.theta);
    ep.kappa = p.kappa / wref;
    ep.gamma1 = p.gamma1 / wref;
    ep.gamma2 = p.gamma2 / wref;
    ep.omega_m1 = 1.0;
    ep.omega_m2 = p.omega_m2 / wref;
    ep.lambda_mpa = lambda_from_voltage(p, c) / wref;

    auto occupation = [&](const std::optional<double>& direct, double omega) {
        if (direct) {
            return *direct;
        }
        if (p.T0) {
            return n_th_from_temperature(omega, *p.T0, c);
        }
        return 0.0;
    };
    ep.n_th1 = occupation(drive.n_th1, p.omega_m1);
    ep.n_th2 = occupation(drive.n_th2, p.omega_m2);
    ep.validate();
    return ep;
}

struct OpaSetting {
    double chi = 0.0;
    double theta = 0.0;
};

/**
 * OPA gain and phase that suppress the Stokes heating of the first resonator:
 *
 *   chi_opt = sqrt(kappa^2 / 4 + (Delta_a - omega'_m1)^2) / 2
 *   2 chi_opt exp(-i theta_opt) = i (Delta_a - omega'_m1) - kappa / 2
 *
 * The phase is taken from the principal complex argument and wrapped into
 * [0, 2 pi). All three inputs share one frequency unit.
 */
inline OpaSetting optimal_opa(double Delta_a, double omega_m1_prime, double kappa) {
    detail::require_finite(Delta_a, "Delta_a");
    detail::require_finite(omega_m1_prime, "omega_m1_prime");
    detail::require_nonnegative(kappa, "kappa");
    const double delta = Delta_a - omega_m1_prime;
    const std::complex<double> target(-0.5 * kappa, delta);
    OpaSetting out;
    out.chi = std::abs(target) / 2.0;
    out.theta = out.chi > 0.0 ? wrap_phase(-std::arg(target)) : 0.0;
    return out;
}

} // namespace optomech
