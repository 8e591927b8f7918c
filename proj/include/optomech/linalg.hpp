#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "optomech/errors.hpp"

// Small dense kernels: eigenvalues of nonsymmetric real matrices, pivoted
// linear solves and Kronecker products. Tolerances are relative to the
// Frobenius norm of the operand.
namespace optomech::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexList = std::vector<std::complex<double>>;

inline constexpr int max_eigen_dimension = 64;
inline constexpr double singular_pivot_tolerance = 1e-13;

template <typename Derived>
double frobenius(const Eigen::MatrixBase<Derived>& m) {
    return m.norm();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (!m.allFinite()) {
        throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
}

/// All eigenvalues of a square real matrix, with multiplicity. Sorted by
/// descending real part, then by imaginary part.
template <typename Derived>
ComplexList eigenvalues(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) {
        throw InvalidArgument("eigenvalues: matrix is not square");
    }
    if (a.rows() > max_eigen_dimension) {
        throw InvalidArgument("eigenvalues: dimension exceeds 64");
    }
    require_finite(a, "eigenvalues");
    ComplexList out;
    if (a.rows() == 0) {
        return out;
    }
    Eigen::EigenSolver<Matrix> solver(Matrix(a), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("eigenvalues: QR iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    out.assign(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) {
            return x.real() > y.real();
        }
        return x.imag() < y.imag();
    });
    return out;
}

/// Solves M x = rhs by LU with partial pivoting, followed by one step of
/// iterative refinement. Throws SingularMatrix when a pivot falls below
/// 1e-13 * ||M||_F.
template <typename DerivedM, typename DerivedB>
Vector solve_linear(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedB>& rhs) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("solve_linear: matrix is not square");
    }
    if (rhs.size() != m.rows()) {
        throw InvalidArgument("solve_linear: dimension mismatch");
    }
    require_finite(m, "solve_linear");
    require_finite(rhs, "solve_linear rhs");
    const Matrix mm = m;
    const Vector b = rhs;
    Eigen::PartialPivLU<Matrix> lu(mm);
    const double threshold = singular_pivot_tolerance * frobenius(mm);
    const auto& factors = lu.matrixLU();
    for (Eigen::Index i = 0; i < factors.rows(); ++i) {
        if (!(std::abs(factors(i, i)) > threshold)) {
            throw SingularMatrix("solve_linear: pivot " + std::to_string(i) +
                                 " below tolerance");
        }
    }
    Vector x = lu.solve(b);
    const Vector r = b - mm * x;
    x += lu.solve(r);
    return x;
}

/// Kronecker product a (x) b, of size (ra*rb) x (ca*cb).
template <typename DerivedA, typename DerivedB>
Matrix kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

template <typename Derived>
double determinant(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) {
        throw InvalidArgument("determinant: matrix is not square");
    }
    return Matrix(a).partialPivLu().determinant();
}

// Column-major vectorization, vec(X) stacks columns.
template <typename Derived>
Vector vec(const Eigen::MatrixBase<Derived>& x) {
    Matrix copy = x;
    return Eigen::Map<const Vector>(copy.data(), copy.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw InvalidArgument("unvec: size mismatch");
    }
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

} // namespace optomech::linalg
