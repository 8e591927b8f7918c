#include <cmath>

#include <gtest/gtest.h>

#include "optomech/dynamics.hpp"
#include "optomech/observables.hpp"
#include "test_support.hpp"

using namespace optomech;

namespace {

CovarianceMatrix from(const Eigen::MatrixXd& m) {
    CovarianceMatrix c;
    c.V = m;
    return c;
}

} // namespace

TEST(Observables, VacuumIsQuietAndSeparable) {
    const auto cov = from(0.5 * Mat6::Identity());
    const auto o = compute_observables(cov);
    EXPECT_EQ(o.n1, 0.0);
    EXPECT_EQ(o.n2, 0.0);
    EXPECT_NEAR(o.s_db_b1, 0.0, 1e-12);
    EXPECT_NEAR(o.s_db_b2, 0.0, 1e-12);
    EXPECT_EQ(o.en_a_b1, 0.0);
    EXPECT_EQ(o.en_a_b2, 0.0);
    EXPECT_EQ(o.en_b1_b2, 0.0);
    for (double e : o.en_one_vs_two) EXPECT_EQ(e, 0.0);
    EXPECT_EQ(o.r_min, 0.0);
}

TEST(Observables, ThermalOccupationAndSqueezing) {
    Mat6 v = 0.5 * Mat6::Identity();
    v.block<2, 2>(2, 2) *= 2.0 * 37.0 + 1.0;
    v.block<2, 2>(4, 4) *= 2.0 * 3.5 + 1.0;
    const auto cov = from(v);
    const auto n = phonon_numbers(cov);
    EXPECT_NEAR(n.n1, 37.0, 1e-12);
    EXPECT_NEAR(n.n2, 3.5, 1e-12);
    EXPECT_LT(squeezing_db(cov, Mode::b1), 0.0);
}

TEST(Observables, HalfVacuumVarianceIsThreeDecibels) {
    Mat6 v = 0.5 * Mat6::Identity();
    v(2, 2) = 0.25;
    v(3, 3) = 1.0;
    const auto cov = from(v);
    EXPECT_NEAR(squeezing_db(cov, Mode::b1), 10.0 * std::log10(2.0), 1e-12);
    EXPECT_NEAR(squeezing_db(cov, Mode::b1), 3.0103, 1e-4);
    EXPECT_NEAR(squeezing_optimal_db(cov, Mode::b1), 3.0103, 1e-4);
}

TEST(Observables, OptimalQuadratureBeatsFixedOne) {
    testkit::Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        const auto cov = from(testkit::random_physical_covariance(3, rng));
        EXPECT_GE(squeezing_optimal_db(cov, Mode::b1), squeezing_db(cov, Mode::b1) - 1e-12);
        EXPECT_GE(squeezing_optimal_db(cov, Mode::b2), squeezing_db(cov, Mode::b2) - 1e-12);
    }
}

TEST(Observables, ClampsOnlyTinyNegativeOccupation) {
    Mat6 v = 0.5 * Mat6::Identity();
    v(2, 2) = 0.5 - 1e-10;
    EXPECT_EQ(phonon_numbers(from(v)).n1, 0.0);
    v(2, 2) = 0.5 - 1e-6;
    EXPECT_LT(phonon_numbers(from(v)).n1, 0.0);
}

TEST(SymplecticEigenvalues, KnownSpectrum) {
    testkit::Rng rng(32);
    for (int n = 1; n <= 3; ++n) {
        for (int i = 0; i < 30; ++i) {
            Eigen::VectorXd nu;
            const auto v = testkit::random_physical_covariance(n, rng, &nu);
            auto got = symplectic_eigenvalues(v);
            std::vector<double> want(nu.data(), nu.data() + nu.size());
            std::sort(want.begin(), want.end());
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t k = 0; k < want.size(); ++k) {
                EXPECT_NEAR(got[k], want[k], 1e-9 * v.norm());
            }
        }
    }
}

TEST(SymplecticEigenvalues, ProductEqualsSqrtDeterminant) {
    testkit::Rng rng(33);
    for (int i = 0; i < 50; ++i) {
        const auto v = testkit::random_physical_covariance(3, rng);
        const auto nu = symplectic_eigenvalues(v);
        double prod = 1.0;
        for (double x : nu) prod *= x;
        EXPECT_NEAR(prod, std::sqrt(v.determinant()), 1e-9 * prod);
    }
}

TEST(SymplecticEigenvalues, RejectsBadMatrices) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
    m(0, 1) = 0.3;
    EXPECT_THROW(symplectic_eigenvalues(m), NotSymmetric);
    m = -Eigen::MatrixXd::Identity(4, 4);
    EXPECT_THROW(symplectic_eigenvalues(m), NotPositive);
    EXPECT_THROW(symplectic_eigenvalues(Eigen::MatrixXd::Identity(3, 3)), InvalidArgument);
}

TEST(LogNegativity, TwoModeSqueezedVacuum) {
    // r = 1/2 gives nu~_- = e^{-1}/2 and E_N = 1 exactly.
    const auto v = testkit::two_mode_squeezed(0.5);
    EXPECT_NEAR(nu_minus(v), std::exp(-1.0) / 2.0, 1e-12);
    EXPECT_NEAR(log_negativity(v), 1.0, 1e-12);
    EXPECT_NEAR(nu_minus_two_mode_closed_form(v), std::exp(-1.0) / 2.0, 1e-12);
}

TEST(LogNegativity, ClosedFormAgreesWithEigenRoute) {
    testkit::Rng rng(34);
    for (int i = 0; i < 100; ++i) {
        const auto v = testkit::random_physical_covariance(2, rng);
        const double eig = nu_minus(v);
        // The closed form works on the untransposed V; the sign flip of
        // det C inside S is what encodes the partial transpose.
        const double closed = nu_minus_two_mode_closed_form(v);
        EXPECT_NEAR(eig, closed, 1e-8 * std::max(1.0, v.norm())) << "trial " << i;
    }
}

TEST(LogNegativity, WhichModeIsTransposedDoesNotMatter) {
    testkit::Rng rng(35);
    for (int i = 0; i < 50; ++i) {
        const auto cov = from(testkit::random_physical_covariance(3, rng));
        const double ab = log_negativity(cov, {Mode::cavity, {Mode::b1}});
        const double ba = log_negativity(cov, {Mode::b1, {Mode::cavity}});
        EXPECT_NEAR(ab, ba, 1e-9);
        const double a_rest = log_negativity(cov, {Mode::cavity, {Mode::b1, Mode::b2}});
        const double a_rest2 = log_negativity(cov, {Mode::cavity, {Mode::b2, Mode::b1}});
        EXPECT_NEAR(a_rest, a_rest2, 1e-9);
    }
}

TEST(LogNegativity, LocalSymplecticInvariance) {
    testkit::Rng rng(36);
    for (int i = 0; i < 30; ++i) {
        const auto v = testkit::random_physical_covariance(3, rng);
        Eigen::MatrixXd local = Eigen::MatrixXd::Identity(6, 6);
        for (int m = 0; m < 3; ++m) {
            local = testkit::phase_rotation(3, m, testkit::uniform(rng, 0.0, 6.28)) *
                    testkit::single_mode_squeezer(3, m, testkit::uniform(rng, -0.5, 0.5)) * local;
        }
        const auto before = negativities(from(v));
        const auto after = negativities(from(local * v * local.transpose()));
        EXPECT_NEAR(before.a_b1, after.a_b1, 1e-8);
        EXPECT_NEAR(before.a_b2, after.a_b2, 1e-8);
        EXPECT_NEAR(before.b1_b2, after.b1_b2, 1e-8);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(before.one_vs_two[k], after.one_vs_two[k], 1e-8);
    }
}

TEST(LogNegativity, PhysicalStatesHaveNonNegativeMeasure) {
    testkit::Rng rng(37);
    for (int i = 0; i < 100; ++i) {
        const auto t = negativities(from(testkit::random_physical_covariance(3, rng)));
        EXPECT_GE(t.a_b1, 0.0);
        EXPECT_GE(t.a_b2, 0.0);
        EXPECT_GE(t.b1_b2, 0.0);
        for (double e : t.one_vs_two) EXPECT_GE(e, 0.0);
    }
}

TEST(LogNegativity, BipartitionValidation) {
    const auto cov = from(0.5 * Mat6::Identity());
    EXPECT_THROW(log_negativity(cov, {Mode::b1, {Mode::b1}}), InvalidArgument);
    EXPECT_THROW(log_negativity(cov, {Mode::b1, {}}), InvalidArgument);
}

TEST(ResidualContangle, ProductOfTwoModeSqueezedAndVacuum) {
    // a-b1 in a TMSV, b2 in vacuum: every residual vanishes.
    Mat6 v = 0.5 * Mat6::Identity();
    v.block<4, 4>(0, 0) = testkit::two_mode_squeezed(0.4);
    const auto cov = from(v);
    const auto t = negativities(cov);
    EXPECT_NEAR(t.a_b1, 0.8, 1e-12);
    EXPECT_NEAR(t.one_vs_two[0], 0.8, 1e-12);
    const auto r = residual_contangle(t);
    for (double x : r.residuals) EXPECT_NEAR(x, 0.0, 1e-10);
    EXPECT_NEAR(r.r_min, 0.0, 1e-10);
    EXPECT_FALSE(r.r_min > 1e-10);
}

TEST(ResidualContangle, HandBuiltTable) {
    NegativityTable t;
    t.a_b1 = 0.1;
    t.a_b2 = 0.2;
    t.b1_b2 = 0.05;
    t.one_vs_two = {0.4, 0.3, 0.25};
    const auto r = residual_contangle(t);
    EXPECT_NEAR(r.residuals[0], 0.16 - 0.01 - 0.04, 1e-15);
    EXPECT_NEAR(r.residuals[1], 0.09 - 0.01 - 0.0025, 1e-15);
    EXPECT_NEAR(r.residuals[2], 0.0625 - 0.04 - 0.0025, 1e-15);
    EXPECT_NEAR(r.r_min, 0.0625 - 0.04 - 0.0025, 1e-15);
    EXPECT_TRUE(r.genuine_tripartite());
}

TEST(ResidualContangle, SteadyStatesSatisfyMonogamy) {
    testkit::Rng rng(38);
    for (int i = 0; i < 30; ++i) {
        auto ep = testkit::random_stable_params(rng, {1e-4, 1e-2, 0.5, 3.0, 5.0});
        const auto cov = steady_state(build_drift(ep), build_noise(ep));
        const auto r = residual_contangle(cov);
        for (double x : r.residuals) EXPECT_GE(x, -1e-8);
    }
}

TEST(IsPhysical, Detects) {
    testkit::Rng rng(39);
    EXPECT_TRUE(is_physical(from(testkit::random_physical_covariance(3, rng))));
    EXPECT_FALSE(is_physical(from(0.3 * Mat6::Identity())));
    Mat6 v = 0.5 * Mat6::Identity();
    v(0, 0) = 0.2;
    EXPECT_FALSE(is_physical(from(v)));
}
