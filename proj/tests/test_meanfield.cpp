#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "optomech/meanfield.hpp"
#include "test_support.hpp"

using namespace optomech;

namespace {

MeanFieldProblem linear_cavity(double E, double delta, double kappa) {
    MeanFieldProblem p;
    p.E = E;
    p.Delta_prime = delta;
    p.kappa = kappa;
    p.gamma1 = 1e-3;
    p.gamma2 = 1e-3;
    p.omega_m1 = 1.0;
    p.omega_m2 = 1.0;
    return p;
}

// Photon number by plain bisection on f(N) = N |kappa/2 + i Delta(N)|^2 - E^2
// for lambda = 0 and chi = 0, written out without the library helpers.
double bisect_photons(const MeanFieldProblem& p) {
    auto delta = [&](double n) {
        const double re1 = p.g1 * n * p.omega_m1 / (p.omega_m1 * p.omega_m1 + p.gamma1 * p.gamma1 / 4.0);
        const double re2 = p.g2 * n * p.omega_m2 / (p.omega_m2 * p.omega_m2 + p.gamma2 * p.gamma2 / 4.0);
        return p.Delta_prime - 2.0 * p.g1 * re1 - 2.0 * p.g2 * re2;
    };
    auto f = [&](double n) {
        const double d = delta(n);
        return n * (p.kappa * p.kappa / 4.0 + d * d) - p.E * p.E;
    };
    double lo = 0.0, hi = 1.0;
    while (f(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(MeanField, NoDriveNoDisplacement) {
    auto p = linear_cavity(0.0, 1.3, 2.0);
    p.g1 = 0.01;
    p.lambda_mpa = 0.1;
    const auto s = solve_mean_field(p);
    EXPECT_EQ(s.alpha, std::complex<double>(0.0, 0.0));
    EXPECT_EQ(s.beta1, std::complex<double>(0.0, 0.0));
    EXPECT_EQ(s.beta2, std::complex<double>(0.0, 0.0));
    EXPECT_EQ(s.Delta_a_eff, 1.3);
    EXPECT_EQ(s.g_eff_1, 0.0);
}

TEST(MeanField, LinearCavity) {
    const auto p = linear_cavity(3.0, 1.5, 2.0);
    const auto s = solve_mean_field(p);
    const std::complex<double> resp(1.0, 1.5);
    EXPECT_NEAR(std::abs(s.alpha), 3.0 / std::abs(resp), 1e-12);
    EXPECT_EQ(s.alpha.imag(), 0.0);
    EXPECT_NEAR(s.drive_phase, std::arg(resp), 1e-12);
    EXPECT_NEAR(s.Delta_a_eff, 1.5, 1e-15);
    EXPECT_LE(mean_field_residual(p, s), 1e-12);
}

TEST(MeanField, PerturbativeSecondResonator) {
    auto p = linear_cavity(1.0, 2.0, 4.0);
    p.g2 = 1e-6;
    p.gamma2 = 1e-9;
    const auto s = solve_mean_field(p);
    const double n = std::norm(s.alpha);
    EXPECT_NEAR(s.beta2.real(), p.g2 * n / p.omega_m2, 1e-9 * p.g2 * n);
    EXPECT_NEAR(n, 1.0 / (4.0 + 4.0), 1e-9);
}

TEST(MeanField, MatchesIndependentBisection) {
    auto p = linear_cavity(0.4, 1.0, 1.0);
    p.g1 = 0.05;
    p.g2 = 0.03;
    p.omega_m2 = 1.1;
    const auto s = solve_mean_field(p);
    const double n = bisect_photons(p);
    EXPECT_NEAR(std::norm(s.alpha), n, 1e-10 * n);
    EXPECT_NEAR(s.g_eff_1, p.g1 * std::sqrt(n), 1e-10);
}

TEST(MeanField, ResidualBoundOnRandomProblems) {
    testkit::Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        MeanFieldProblem p;
        p.kappa = testkit::uniform(rng, 0.5, 5.0);
        p.E = testkit::uniform(rng, 0.0, 0.5 * p.kappa);
        p.Delta_prime = testkit::uniform(rng, 0.5, 2.0);
        p.g1 = testkit::uniform(rng, 0.0, 0.05);
        p.g2 = testkit::uniform(rng, 0.0, 0.05);
        p.chi = testkit::uniform(rng, 0.0, p.kappa / 8.0);
        p.theta = testkit::uniform(rng, 0.0, 6.28);
        p.lambda_mpa = testkit::uniform(rng, 0.0, 0.2);
        p.gamma1 = testkit::uniform(rng, 1e-4, 1e-2);
        p.gamma2 = testkit::uniform(rng, 1e-4, 1e-2);
        p.omega_m1 = 1.0;
        p.omega_m2 = testkit::uniform(rng, 0.8, 1.2);
        const auto s = solve_mean_field(p);
        EXPECT_LE(mean_field_residual(p, s), 1e-10 * (p.E + p.kappa * std::abs(s.alpha))) << "trial " << i;
    }
}

TEST(MeanField, MpaShiftsResonatorResponse) {
    auto p = linear_cavity(1.0, 1.0, 2.0);
    p.g1 = 0.02;
    const auto s0 = solve_mean_field(p);
    p.lambda_mpa = 0.15;
    const auto s1 = solve_mean_field(p);
    EXPECT_NE(s0.beta1, s1.beta1);
    EXPECT_LE(mean_field_residual(p, s1), 1e-12);
}

TEST(MeanField, ReportsNonConvergence) {
    auto p = linear_cavity(5.0, 1.0, 1.0);
    p.g1 = 0.2;
    MeanFieldOptions opt;
    opt.max_iterations = 2;
    try {
        solve_mean_field(p, opt);
        FAIL() << "expected MeanFieldNoConvergence";
    } catch (const MeanFieldNoConvergence& e) {
        EXPECT_EQ(e.last_iterate().iterations, 2u);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(MeanField, RejectsBadInput) {
    auto p = linear_cavity(-1.0, 1.0, 1.0);
    EXPECT_THROW(solve_mean_field(p), InvalidArgument);
    p = linear_cavity(1.0, std::nan(""), 1.0);
    EXPECT_THROW(solve_mean_field(p), InvalidArgument);
    p = linear_cavity(1.0, 1.0, 1.0);
    MeanFieldOptions opt;
    opt.damping = 0.0;
    EXPECT_THROW(solve_mean_field(p, opt), InvalidArgument);
}

TEST(MeanField, DrivePowerPath) {
    DriveParams d;
    d.omega_a = 2.0e15;
    d.omega_d = 2.0e15 - 1.0e6;
    d.P = 1e-9;
    const DampingRates rates{2.0e6, 10.0, 10.0};
    const MechanicalFrequencies freqs{1.0e6, 1.0e6};
    const auto p = make_mean_field_problem(d, rates, freqs);
    EXPECT_DOUBLE_EQ(p.E, std::sqrt(2.0e6 * 1e-9 / (codata2018.hbar * d.omega_d)));
    EXPECT_DOUBLE_EQ(p.Delta_prime, 1.0e6);
    const auto s = solve_mean_field(d, rates, freqs);
    EXPECT_NEAR(std::norm(s.alpha), p.E * p.E / (1.0e12 + 1.0e12), 1e-9 * std::norm(s.alpha));
}
