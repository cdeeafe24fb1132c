#ifndef CRJET_LINALG_HPP
#define CRJET_LINALG_HPP

#include <vector>

#include <crjet/series.hpp>

namespace crjet
{

template <typename F>
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<F> a;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, F(0)) {}

    F &operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const F &operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Rank and a kernel basis of a real matrix. The kernel vectors are returned in
// reduced form: vector k has a 1 in the k-th free column and zeros in the other
// free columns.
template <typename F>
struct KernelResult {
    int rank = 0;
    std::vector<std::size_t> pivot_columns;
    std::vector<std::vector<F>> kernel;
};

// Exact, fraction-free elimination over the integers after clearing denominators.
KernelResult<Rational> kernel_exact(const DenseMatrix<Rational> &A);
// Gauss-Jordan with partial pivoting; entries with magnitude <= tol * max|A|
// are treated as zero.
KernelResult<Real128> kernel_float(const DenseMatrix<Real128> &A, const Real128 &tol);

int rank_exact(const DenseMatrix<Rational> &A);
int rank_float(const DenseMatrix<Real128> &A, const Real128 &tol);

// Constant complex matrices.
template <typename S>
using CMatrix = DenseMatrix<S>;

template <typename S>
CMatrix<S> cmat_identity(std::size_t n);
template <typename S>
CMatrix<S> cmat_mul(const CMatrix<S> &A, const CMatrix<S> &B);
template <typename S>
CMatrix<S> cmat_adjoint(const CMatrix<S> &A);
// Inverse by Gauss-Jordan elimination; DomainError when singular.
template <typename S>
CMatrix<S> cmat_inverse(const CMatrix<S> &A, const RealOf<S> &tol);

// Eigen-decomposition of a constant Hermitian matrix: A = V diag(lambda) V*.
// The float backend uses cyclic complex Jacobi rotations; the exact backend
// accepts only matrices that are already diagonal (BackendError otherwise).
template <typename S>
struct HermitianEigen {
    std::vector<RealOf<S>> values;
    CMatrix<S> vectors;
};

template <typename S>
HermitianEigen<S> hermitian_eigen(const CMatrix<S> &A);
template <>
HermitianEigen<Gaussian> hermitian_eigen(const CMatrix<Gaussian> &A);
template <>
HermitianEigen<FloatComplex> hermitian_eigen(const CMatrix<FloatComplex> &A);

// Matrices of series (all entries over the same variables).
template <typename S>
using SeriesMatrix = std::vector<std::vector<Series<S>>>;

template <typename S>
SeriesMatrix<S> smat_identity(const VarList &vars, int trunc, std::size_t n);
template <typename S>
SeriesMatrix<S> smat_zero(const VarList &vars, int trunc, std::size_t n);
template <typename S>
SeriesMatrix<S> smat_mul(const SeriesMatrix<S> &A, const SeriesMatrix<S> &B);
template <typename S>
SeriesMatrix<S> smat_add(const SeriesMatrix<S> &A, const SeriesMatrix<S> &B);
template <typename S>
SeriesMatrix<S> smat_scale(const SeriesMatrix<S> &A, const S &c);
// Conjugate transpose, conjugating coefficients only (all variables are real
// parameters).
template <typename S>
SeriesMatrix<S> smat_adjoint(const SeriesMatrix<S> &A);
// exp(X) for X vanishing at the origin.
template <typename S>
SeriesMatrix<S> smat_exp(const SeriesMatrix<S> &X);
template <typename S>
SeriesMatrix<S> smat_const_mul(const CMatrix<S> &C, const SeriesMatrix<S> &A);
template <typename S>
SeriesMatrix<S> smat_mul_const(const SeriesMatrix<S> &A, const CMatrix<S> &C);
template <typename S>
CMatrix<S> smat_constant_part(const SeriesMatrix<S> &A);
// Largest coefficient magnitude over all entries of A - B.
template <typename S>
RealOf<S> smat_distance(const SeriesMatrix<S> &A, const SeriesMatrix<S> &B);

} // namespace crjet

#endif
