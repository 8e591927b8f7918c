#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"
#include "optomech/linalg.hpp"

namespace optomech {

enum class Mode : int { cavity = 0, b1 = 1, b2 = 2 };

inline const char* mode_name(Mode m) {
    switch (m) {
    case Mode::cavity: return "a";
    case Mode::b1: return "b1";
    case Mode::b2: return "b2";
    }
    return "?";
}

inline constexpr double phonon_clamp_tolerance = 1e-9;

struct PhononNumbers {
    double n1 = 0.0;
    double n2 = 0.0;
};

namespace detail {

inline double clamp_tiny_negative(double v) {
    return (v < 0.0 && v >= -phonon_clamp_tolerance) ? 0.0 : v;
}

inline int quadrature_offset(Mode m) { return 2 * static_cast<int>(m); }

} // namespace detail

/// n_j = (V_XX + V_YY - 1) / 2 for mechanical mode j.
inline PhononNumbers phonon_numbers(const CovarianceMatrix& cov) {
    const Mat6& V = cov.V;
    PhononNumbers out;
    out.n1 = detail::clamp_tiny_negative((V(2, 2) + V(3, 3) - 1.0) / 2.0);
    out.n2 = detail::clamp_tiny_negative((V(4, 4) + V(5, 5) - 1.0) / 2.0);
    return out;
}

// -10 log10(2 <dX^2>); positive values are squeezed below the vacuum level.
inline double squeezing_db(const CovarianceMatrix& cov, Mode mode) {
    const int k = detail::quadrature_offset(mode);
    const double var = cov.V(k, k);
    if (!(var > 0.0)) {
        throw InvalidArgument("squeezing_db: quadrature variance must be > 0");
    }
    return -10.0 * std::log10(2.0 * var);
}

// Same measure for the best-squeezed quadrature: the smaller eigenvalue of
// the mode's 2x2 covariance block.
inline double squeezing_optimal_db(const CovarianceMatrix& cov, Mode mode) {
    const int k = detail::quadrature_offset(mode);
    const Eigen::Matrix2d block = cov.V.block<2, 2>(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block, Eigen::EigenvaluesOnly);
    const double var = es.eigenvalues()(0);
    if (!(var > 0.0)) {
        throw InvalidArgument("squeezing_optimal_db: quadrature variance must be > 0");
    }
    return -10.0 * std::log10(2.0 * var);
}

/// Direct sum of n blocks [[0, 1], [-1, 0]].
inline linalg::Matrix symplectic_form(Eigen::Index n_modes) {
    linalg::Matrix omega = linalg::Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (Eigen::Index k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

/**
 * Symplectic eigenvalues of a symmetric positive-definite 2n x 2n matrix M.
 *
 * The spectrum of i Omega M is {+-nu_k}; the n values nu_k are returned in
 * ascending order. Each nu_k is the mean of the two moduli in its pair, so
 * round-off that splits a pair is averaged out.
 */
inline std::vector<double> symplectic_eigenvalues(const linalg::Matrix& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0) {
        throw InvalidArgument("symplectic_eigenvalues: need a non-empty 2n x 2n matrix");
    }
    linalg::require_finite(m, "symplectic_eigenvalues");
    const double scale = linalg::frobenius(m);
    if ((m - m.transpose()).norm() > 1e-10 * scale) {
        throw NotSymmetric("symplectic_eigenvalues: matrix is not symmetric");
    }
    const linalg::Matrix sym = 0.5 * (m + m.transpose());
    Eigen::LLT<linalg::Matrix> llt(sym);
    if (llt.info() != Eigen::Success) {
        throw NotPositive("symplectic_eigenvalues: matrix is not positive definite");
    }
    const Eigen::Index n = m.rows() / 2;
    // Omega M has eigenvalues +-i nu; the real parts are round-off.
    const auto ev = linalg::eigenvalues(symplectic_form(n) * sym);
    std::vector<double> moduli;
    moduli.reserve(ev.size());
    for (const auto& z : ev) {
        moduli.push_back(std::abs(z.imag()));
    }
    std::sort(moduli.begin(), moduli.end());
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
    }
    return out;
}

// A focus mode against one or two other modes.
struct Bipartition {
    Mode focus = Mode::cavity;
    std::vector<Mode> others;
};

namespace detail {

inline std::vector<int> partition_indices(const Bipartition& part) {
    if (part.others.empty() || part.others.size() > 2) {
        throw InvalidArgument("bipartition: need one or two modes opposite the focus");
    }
    std::vector<Mode> all{part.focus};
    all.insert(all.end(), part.others.begin(), part.others.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (all[i] == all[j]) {
                throw InvalidArgument("bipartition: modes must be distinct");
            }
        }
    }
    std::vector<int> idx;
    for (Mode m : all) {
        idx.push_back(quadrature_offset(m));
        idx.push_back(quadrature_offset(m) + 1);
    }
    return idx;
}

} // namespace detail

// Reduced covariance of the listed modes, in the given order.
inline linalg::Matrix reduced_covariance(const CovarianceMatrix& cov, const std::vector<Mode>& modes) {
    std::vector<int> idx;
    for (Mode m : modes) {
        idx.push_back(detail::quadrature_offset(m));
        idx.push_back(detail::quadrature_offset(m) + 1);
    }
    linalg::Matrix out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out(i, j) = cov.V(idx[i], idx[j]);
        }
    }
    return out;
}

/// Partial transpose with respect to the first mode of an ordered
/// covariance matrix: P = sigma_z (+) 1 (+) ..., flipping that mode's Y.
inline linalg::Matrix partial_transpose_first(const linalg::Matrix& m) {
    linalg::Matrix out = m;
    out.row(1) *= -1.0;
    out.col(1) *= -1.0;
    return out;
}

// Smallest symplectic eigenvalue after partial transposition of the first mode.
inline double nu_minus(const linalg::Matrix& ordered) {
    return symplectic_eigenvalues(partial_transpose_first(ordered)).front();
}

inline double log_negativity_from_nu(double nu) {
    return std::max(0.0, -std::log(2.0 * nu));
}

/// E_N = max(0, -ln(2 nu~_-)) for an ordered covariance whose first mode is
/// one side of the cut.
inline double log_negativity(const linalg::Matrix& ordered) {
    return log_negativity_from_nu(nu_minus(ordered));
}

inline double log_negativity(const CovarianceMatrix& cov, const Bipartition& part) {
    const auto idx = detail::partition_indices(part);
    linalg::Matrix sub(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            sub(i, j) = cov.V(idx[i], idx[j]);
        }
    }
    return log_negativity(sub);
}

/**
 * Closed-form nu~_- of a two-mode covariance V = [[A, C], [C^T, B]]:
 *   nu~_-^2 = (S - sqrt(S^2 - 4 det V)) / 2,  S = det A + det B - 2 det C.
 * Cross-check path for the eigen-based route.
 */
inline double nu_minus_two_mode_closed_form(const linalg::Matrix& v) {
    if (v.rows() != 4 || v.cols() != 4) {
        throw InvalidArgument("nu_minus_two_mode_closed_form: need a 4x4 matrix");
    }
    const double det_a = v.block<2, 2>(0, 0).determinant();
    const double det_b = v.block<2, 2>(2, 2).determinant();
    const double det_c = v.block<2, 2>(0, 2).determinant();
    const double det_v = v.determinant();
    const double sigma = det_a + det_b - 2.0 * det_c;
    const double disc = std::max(0.0, sigma * sigma - 4.0 * det_v);
    return std::sqrt(std::max(0.0, (sigma - std::sqrt(disc)) / 2.0));
}

struct ResidualContangle {
    // Focus a, b1, b2 in that order: R^{a|b1b2}, R^{b1|ab2}, R^{b2|ab1}.
    std::array<double, 3> residuals{};
    double r_min = 0.0;

    bool genuine_tripartite() const { return r_min > 0.0; }
};

struct NegativityTable {
    double a_b1 = 0.0;
    double a_b2 = 0.0;
    double b1_b2 = 0.0;
    // One mode against the other two: a|b1b2, b1|ab2, b2|ab1.
    std::array<double, 3> one_vs_two{};

    double pair(Mode i, Mode j) const {
        const int lo = std::min(static_cast<int>(i), static_cast<int>(j));
        const int hi = std::max(static_cast<int>(i), static_cast<int>(j));
        if (lo == 0 && hi == 1) return a_b1;
        if (lo == 0 && hi == 2) return a_b2;
        if (lo == 1 && hi == 2) return b1_b2;
        throw InvalidArgument("NegativityTable::pair: modes must be distinct");
    }
};

inline NegativityTable negativities(const CovarianceMatrix& cov) {
    NegativityTable t;
    t.a_b1 = log_negativity(cov, {Mode::cavity, {Mode::b1}});
    t.a_b2 = log_negativity(cov, {Mode::cavity, {Mode::b2}});
    t.b1_b2 = log_negativity(cov, {Mode::b1, {Mode::b2}});
    t.one_vs_two[0] = log_negativity(cov, {Mode::cavity, {Mode::b1, Mode::b2}});
    t.one_vs_two[1] = log_negativity(cov, {Mode::b1, {Mode::cavity, Mode::b2}});
    t.one_vs_two[2] = log_negativity(cov, {Mode::b2, {Mode::cavity, Mode::b1}});
    return t;
}

/// R^{i|jk} = E_N(i|jk)^2 - E_N(i|j)^2 - E_N(i|k)^2; residuals are not clamped.
inline ResidualContangle residual_contangle(const NegativityTable& t) {
    constexpr std::array<std::array<Mode, 3>, 3> orders{{
        {Mode::cavity, Mode::b1, Mode::b2},
        {Mode::b1, Mode::cavity, Mode::b2},
        {Mode::b2, Mode::cavity, Mode::b1},
    }};
    ResidualContangle r;
    for (std::size_t f = 0; f < 3; ++f) {
        const auto& o = orders[f];
        const double whole = t.one_vs_two[f];
        const double p1 = t.pair(o[0], o[1]);
        const double p2 = t.pair(o[0], o[2]);
        r.residuals[f] = whole * whole - p1 * p1 - p2 * p2;
    }
    r.r_min = *std::min_element(r.residuals.begin(), r.residuals.end());
    return r;
}

inline ResidualContangle residual_contangle(const CovarianceMatrix& cov) {
    return residual_contangle(negativities(cov));
}

/// Physicality of a covariance: every symplectic eigenvalue >= 1/2 - tol.
inline bool is_physical(const CovarianceMatrix& cov, double tol = 1e-8) {
    try {
        const auto nu = symplectic_eigenvalues(linalg::Matrix(cov.V));
        return nu.front() >= 0.5 - tol;
    } catch (const NumericalError&) {
        return false;
    }
}

struct ObservablesRecord {
    double n1 = 0.0;
    double n2 = 0.0;
    double s_db_b1 = 0.0;
    double s_db_b2 = 0.0;
    double s_db_b1_opt = 0.0;
    double s_db_b2_opt = 0.0;
    double en_a_b1 = 0.0;
    double en_a_b2 = 0.0;
    double en_b1_b2 = 0.0;
    std::array<double, 3> en_one_vs_two{};
    std::array<double, 3> residuals{};
    double r_min = 0.0;
    bool stable = true;
};

inline ObservablesRecord compute_observables(const CovarianceMatrix& cov) {
    ObservablesRecord r;
    const auto n = phonon_numbers(cov);
    r.n1 = n.n1;
    r.n2 = n.n2;
    r.s_db_b1 = squeezing_db(cov, Mode::b1);
    r.s_db_b2 = squeezing_db(cov, Mode::b2);
    r.s_db_b1_opt = squeezing_optimal_db(cov, Mode::b1);
    r.s_db_b2_opt = squeezing_optimal_db(cov, Mode::b2);
    const auto t = negativities(cov);
    r.en_a_b1 = t.a_b1;
    r.en_a_b2 = t.a_b2;
    r.en_b1_b2 = t.b1_b2;
    r.en_one_vs_two = t.one_vs_two;
    const auto rc = residual_contangle(t);
    r.residuals = rc.residuals;
    r.r_min = rc.r_min;
    r.stable = true;
    return r;
}

} // namespace optomech
