#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/params.hpp"

// Classical steady state of the driven cavity and the two displaced
// resonators. Supplies the effective detuning and the linearized couplings
// g~_j = g_j alpha on the physical-parameter path.
namespace optomech {

// All frequencies in rad/s (or any single consistent unit).
struct DriveParams {
    double omega_a = 0.0; // cavity frequency
    double omega_d = 0.0; // drive frequency
    double P = 0.0;       // drive power [W]
    double g1 = 0.0;      // single-photon couplings
    double g2 = 0.0;
    double chi = 0.0;
    double theta = 0.0;
    double lambda_mpa = 0.0;

    // E = sqrt(kappa P / (hbar omega_d))
    double amplitude(double kappa, const PhysicalConstants& c = codata2018) const {
        detail::require_nonnegative(P, "P");
        detail::require_positive(omega_d, "omega_d");
        detail::require_nonnegative(kappa, "kappa");
        return std::sqrt(kappa * P / (c.hbar * omega_d));
    }
};

struct DampingRates {
    double kappa = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

struct MechanicalFrequencies {
    double omega_m1 = 0.0;
    double omega_m2 = 0.0;
};

// The fixed-point problem with the drive already reduced to its amplitude.
struct MeanFieldProblem {
    double E = 0.0;           // drive amplitude |E|
    double Delta_prime = 0.0; // bare detuning omega_a - omega_d
    double g1 = 0.0;
    double g2 = 0.0;
    double chi = 0.0;
    double theta = 0.0;
    double lambda_mpa = 0.0;
    double kappa = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double omega_m1 = 0.0; // bare; the MPA shift is added internally
    double omega_m2 = 0.0;
};

struct MeanFieldOptions {
    std::size_t max_iterations = 10000;
    double damping = 0.5;           // weight of the new iterate
    double relative_tolerance = 1e-14;
};

struct MeanFieldState {
    std::complex<double> alpha;     // real by choice of drive phase
    std::complex<double> beta1;
    std::complex<double> beta2;
    double Delta_a_eff = 0.0;
    double g_eff_1 = 0.0;           // g1 * alpha
    double g_eff_2 = 0.0;
    double drive_phase = 0.0;       // the drive is E * exp(i drive_phase)
    std::size_t iterations = 0;
};

class MeanFieldNoConvergence : public NonConvergence {
public:
    MeanFieldNoConvergence(const std::string& what, MeanFieldState last, double residual)
        : NonConvergence(what), last_(last), residual_(residual) {}

    const MeanFieldState& last_iterate() const { return last_; }
    double residual() const { return residual_; }

private:
    MeanFieldState last_;
    double residual_;
};

namespace detail {

struct Displacements {
    std::complex<double> beta1;
    std::complex<double> beta2;
    double Delta_a = 0.0;
};

// Mechanical displacements and shifted detuning for a given photon number.
inline Displacements displacements(const MeanFieldProblem& p, double photons) {
    const double wp = p.omega_m1 + 2.0 * p.lambda_mpa;
    const double l2 = 2.0 * p.lambda_mpa;
    const double h1 = p.gamma1 / 2.0;
    // (i w' + gamma/2) beta + 2 i lambda beta* = i g1 N, split into real and
    // imaginary parts of beta = x + i y:
    //   h1 x + (l2 - w') y = 0
    //   (w' + l2) x + h1 y = g1 N
    const double det = h1 * h1 - (l2 - wp) * (wp + l2);
    if (det == 0.0) {
        throw SingularMatrix("mean field: resonator 1 equations are singular");
    }
    const double rhs = p.g1 * photons;
    const double x = -(l2 - wp) * rhs / det;
    const double y = h1 * rhs / det;
    Displacements d;
    d.beta1 = {x, y};
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> den2 = i * p.omega_m2 + p.gamma2 / 2.0;
    d.beta2 = den2 == 0.0 ? std::complex<double>{} : i * p.g2 * photons / den2;
    d.Delta_a = p.Delta_prime - 2.0 * p.g1 * d.beta1.real() - 2.0 * p.g2 * d.beta2.real();
    return d;
}

// kappa/2 + i Delta_a - 2 chi e^{i theta}: drive needed per unit of real alpha.
inline std::complex<double> cavity_response(const MeanFieldProblem& p, double Delta_a) {
    const std::complex<double> i(0.0, 1.0);
    return p.kappa / 2.0 + i * Delta_a - 2.0 * p.chi * std::exp(i * p.theta);
}

} // namespace detail

/// Norm of the three fixed-point equations at a given state, with the drive
/// E * exp(i phase).
inline double mean_field_residual(const MeanFieldProblem& p, const MeanFieldState& s) {
    const std::complex<double> i(0.0, 1.0);
    const auto& a = s.alpha;
    const double n = std::norm(a);
    const double Delta_a =
        p.Delta_prime - p.g1 * 2.0 * s.beta1.real() - p.g2 * 2.0 * s.beta2.real();
    const std::complex<double> drive = p.E * std::exp(i * s.drive_phase);
    const std::complex<double> ra =
        -(i * Delta_a + p.kappa / 2.0) * a + 2.0 * p.chi * std::exp(i * p.theta) * std::conj(a) + drive;
    const double wp = p.omega_m1 + 2.0 * p.lambda_mpa;
    const std::complex<double> rb1 = -(i * wp + p.gamma1 / 2.0) * s.beta1 + i * p.g1 * n -
                                     2.0 * i * p.lambda_mpa * std::conj(s.beta1);
    const std::complex<double> rb2 = -(i * p.omega_m2 + p.gamma2 / 2.0) * s.beta2 + i * p.g2 * n;
    return std::sqrt(std::norm(ra) + std::norm(rb1) + std::norm(rb2));
}

/**
 * Steady state of the classical equations by damped Picard iteration on the
 * intracavity photon number N = |alpha|^2. For fixed N the resonator
 * equations are linear and solved in closed form; the drive phase is then
 * chosen so alpha is real, which gives N = E^2 / |kappa/2 + i Delta_a(N) -
 * 2 chi e^{i theta}|^2. Bistable or unstable branches show up as
 * MeanFieldNoConvergence carrying the last iterate.
 */
inline MeanFieldState solve_mean_field(const MeanFieldProblem& p, const MeanFieldOptions& opt = {}) {
    for (double v : {p.E, p.Delta_prime, p.g1, p.g2, p.chi, p.theta, p.lambda_mpa, p.kappa,
                     p.gamma1, p.gamma2, p.omega_m1, p.omega_m2}) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("solve_mean_field: non-finite input");
        }
    }
    if (p.E < 0.0 || p.kappa < 0.0 || p.gamma1 < 0.0 || p.gamma2 < 0.0 || p.chi < 0.0) {
        throw InvalidArgument("solve_mean_field: E, rates and chi must be >= 0");
    }
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) {
        throw InvalidArgument("solve_mean_field: damping must lie in (0, 1]");
    }

    auto assemble = [&](double photons, std::size_t iterations) {
        const auto d = detail::displacements(p, photons);
        MeanFieldState s;
        const double amp = std::sqrt(photons);
        s.alpha = {amp, 0.0};
        s.beta1 = d.beta1;
        s.beta2 = d.beta2;
        s.Delta_a_eff = d.Delta_a;
        s.g_eff_1 = p.g1 * amp;
        s.g_eff_2 = p.g2 * amp;
        const auto drive = detail::cavity_response(p, d.Delta_a) * amp;
        s.drive_phase = amp > 0.0 ? wrap_phase(std::arg(drive)) : 0.0;
        s.iterations = iterations;
        return s;
    };

    if (p.E == 0.0) {
        return assemble(0.0, 0);
    }

    auto update = [&](double photons) {
        const auto d = detail::displacements(p, photons);
        const double resp = std::norm(detail::cavity_response(p, d.Delta_a));
        if (!(resp > 0.0)) {
            throw SingularMatrix("solve_mean_field: cavity response vanishes");
        }
        return p.E * p.E / resp;
    };

    double n = update(0.0);
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        const double next = update(n);
        if (!std::isfinite(next)) {
            break;
        }
        const double step = next - n;
        if (std::abs(step) <= opt.relative_tolerance * std::max(n, next)) {
            return assemble(next, it);
        }
        n += opt.damping * step;
    }
    const auto last = assemble(n, opt.max_iterations);
    throw MeanFieldNoConvergence("solve_mean_field: no convergence after " +
                                     std::to_string(opt.max_iterations) + " iterations",
                                 last, mean_field_residual(p, last));
}

inline MeanFieldProblem make_mean_field_problem(const DriveParams& d, const DampingRates& rates,
                                                const MechanicalFrequencies& freqs,
                                                const PhysicalConstants& c = codata2018) {
    MeanFieldProblem p;
    p.E = d.amplitude(rates.kappa, c);
    p.Delta_prime = d.omega_a - d.omega_d;
    p.g1 = d.g1;
    p.g2 = d.g2;
    p.chi = d.chi;
    p.theta = d.theta;
    p.lambda_mpa = d.lambda_mpa;
    p.kappa = rates.kappa;
    p.gamma1 = rates.gamma1;
    p.gamma2 = rates.gamma2;
    p.omega_m1 = freqs.omega_m1;
    p.omega_m2 = freqs.omega_m2;
    return p;
}

inline MeanFieldState solve_mean_field(const DriveParams& d, const DampingRates& rates,
                                       const MechanicalFrequencies& freqs,
                                       const MeanFieldOptions& opt = {},
                                       const PhysicalConstants& c = codata2018) {
    return solve_mean_field(make_mean_field_problem(d, rates, freqs, c), opt);
}

} // namespace optomech
