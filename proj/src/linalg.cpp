#include <crjet/linalg.hpp>

#include <algorithm>
#include <numeric>

namespace crjet
{

namespace
{

using SparseRow = std::vector<std::pair<std::size_t, mpz_class>>;

mpz_class entry(const SparseRow &row, std::size_t col)
{
    auto it = std::lower_bound(row.begin(), row.end(), col,
                               [](const auto &p, std::size_t c) { return p.first < c; });
    if (it != row.end() && it->first == col) {
        return it->second;
    }
    return 0;
}

void remove_content(SparseRow &row)
{
    mpz_class g = 0;
    for (const auto &[c, v] : row) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        if (g == 1) {
            return;
        }
    }
    if (g > 1) {
        for (auto &[c, v] : row) {
            mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
        }
    }
}

// row = P*row - a*prow
SparseRow combine(const SparseRow &row, const mpz_class &P, const mpz_class &a, const SparseRow &prow)
{
    SparseRow out;
    out.reserve(row.size() + prow.size());
    auto i = row.begin(), j = prow.begin();
    mpz_class t;
    while (i != row.end() || j != prow.end()) {
        if (j == prow.end() || (i != row.end() && i->first < j->first)) {
            out.emplace_back(i->first, P * i->second);
            ++i;
        } else if (i == row.end() || j->first < i->first) {
            out.emplace_back(j->first, -a * j->second);
            ++j;
        } else {
            t = P * i->second - a * j->second;
            if (t != 0) {
                out.emplace_back(i->first, t);
            }
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

KernelResult<Rational> kernel_exact(const DenseMatrix<Rational> &A)
{
    // Clear denominators row by row.
    std::vector<SparseRow> rows;
    rows.reserve(A.rows);
    for (std::size_t i = 0; i < A.rows; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < A.cols; ++j) {
            const Rational &x = A(i, j);
            if (sgn(x) != 0) {
                mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
            }
        }
        SparseRow r;
        for (std::size_t j = 0; j < A.cols; ++j) {
            const Rational &x = A(i, j);
            if (sgn(x) != 0) {
                r.emplace_back(j, mpz_class(x.get_num() * (l / x.get_den())));
            }
        }
        if (!r.empty()) {
            remove_content(r);
            rows.push_back(std::move(r));
        }
    }

    KernelResult<Rational> res;
    std::vector<SparseRow> pivots; // pivot rows, in pivot-column order
    std::vector<bool> used(rows.size(), false);
    // Column index -> rows with a nonzero there is recomputed lazily.
    for (std::size_t c = 0; c < A.cols; ++c) {
        std::size_t best = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r] || rows[r].empty() || rows[r].front().first != c) {
                continue;
            }
            if (best == rows.size() || rows[r].size() < rows[best].size()) {
                best = r;
            }
        }
        if (best == rows.size()) {
            continue;
        }
        used[best] = true;
        const SparseRow prow = rows[best];
        const mpz_class P = prow.front().second;
        // Eliminate column c from all other active rows and earlier pivot rows.
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == best || rows[r].empty()) {
                continue;
            }
            if (used[r]) {
                mpz_class a = entry(rows[r], c);
                if (a != 0) {
                    rows[r] = combine(rows[r], P, a, prow);
                    remove_content(rows[r]);
                }
            } else if (rows[r].front().first == c) {
                mpz_class a = rows[r].front().second;
                rows[r] = combine(rows[r], P, a, prow);
                remove_content(rows[r]);
            }
        }
        res.pivot_columns.push_back(c);
    }
    res.rank = static_cast<int>(res.pivot_columns.size());

    // Collect pivot rows keyed by pivot column.
    std::vector<const SparseRow *> by_pivot;
    for (std::size_t c : res.pivot_columns) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r] && !rows[r].empty() && rows[r].front().first == c) {
                by_pivot.push_back(&rows[r]);
                break;
            }
        }
    }
    std::vector<bool> is_pivot(A.cols, false);
    for (std::size_t c : res.pivot_columns) {
        is_pivot[c] = true;
    }
    for (std::size_t f = 0; f < A.cols; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        std::vector<Rational> v(A.cols, Rational(0));
        v[f] = 1;
        for (std::size_t k = 0; k < res.pivot_columns.size(); ++k) {
            const SparseRow &row = *by_pivot[k];
            const mpz_class a = entry(row, f);
            if (a != 0) {
                Rational x(-a, row.front().second);
                x.canonicalize();
                v[res.pivot_columns[k]] = x;
            }
        }
        res.kernel.push_back(std::move(v));
    }
    return res;
}

KernelResult<Real128> kernel_float(const DenseMatrix<Real128> &A, const Real128 &tol)
{
    DenseMatrix<Real128> M = A;
    Real128 scale = 0;
    for (const auto &x : M.a) {
        scale = std::max(scale, Real128(abs(x)));
    }
    const Real128 thresh = tol * (scale > 1 ? scale : Real128(1));
    KernelResult<Real128> res;
    std::size_t prow = 0;
    for (std::size_t c = 0; c < M.cols && prow < M.rows; ++c) {
        std::size_t best = prow;
        Real128 bv = abs(M(prow, c));
        for (std::size_t r = prow + 1; r < M.rows; ++r) {
            Real128 v = abs(M(r, c));
            if (v > bv) {
                bv = v;
                best = r;
            }
        }
        if (bv <= thresh) {
            for (std::size_t r = prow; r < M.rows; ++r) {
                M(r, c) = 0;
            }
            continue;
        }
        if (best != prow) {
            for (std::size_t j = 0; j < M.cols; ++j) {
                std::swap(M(prow, j), M(best, j));
            }
        }
        const Real128 inv = Real128(1) / M(prow, c);
        for (std::size_t j = c; j < M.cols; ++j) {
            M(prow, j) *= inv;
        }
        for (std::size_t r = 0; r < M.rows; ++r) {
            if (r == prow) {
                continue;
            }
            const Real128 f = M(r, c);
            if (f == 0) {
                continue;
            }
            for (std::size_t j = c; j < M.cols; ++j) {
                if (M(prow, j) != 0) {
                    M(r, j) -= f * M(prow, j);
                }
            }
        }
        res.pivot_columns.push_back(c);
        ++prow;
    }
    res.rank = static_cast<int>(res.pivot_columns.size());
    std::vector<bool> is_pivot(M.cols, false);
    for (std::size_t c : res.pivot_columns) {
        is_pivot[c] = true;
    }
    for (std::size_t f = 0; f < M.cols; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        std::vector<Real128> v(M.cols, Real128(0));
        v[f] = 1;
        for (std::size_t k = 0; k < res.pivot_columns.size(); ++k) {
            v[res.pivot_columns[k]] = -M(k, f);
        }
        res.kernel.push_back(std::move(v));
    }
    return res;
}

int rank_exact(const DenseMatrix<Rational> &A)
{
    return kernel_exact(A).rank;
}

int rank_float(const DenseMatrix<Real128> &A, const Real128 &tol)
{
    return kernel_float(A, tol).rank;
}

template <typename S>
CMatrix<S> cmat_identity(std::size_t n)
{
    CMatrix<S> I(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        I(i, i) = S(1);
    }
    return I;
}

template <typename S>
CMatrix<S> cmat_mul(const CMatrix<S> &A, const CMatrix<S> &B)
{
    CMatrix<S> C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t k = 0; k < A.cols; ++k) {
            if (A(i, k) == S(0)) {
                continue;
            }
            for (std::size_t j = 0; j < B.cols; ++j) {
                C(i, j) += A(i, k) * B(k, j);
            }
        }
    }
    return C;
}

template <typename S>
CMatrix<S> cmat_adjoint(const CMatrix<S> &A)
{
    CMatrix<S> B(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t j = 0; j < A.cols; ++j) {
            B(j, i) = conj(A(i, j));
        }
    }
    return B;
}

template <typename S>
CMatrix<S> cmat_inverse(const CMatrix<S> &A, const RealOf<S> &tol)
{
    if (A.rows != A.cols) {
        throw DomainError("inverse of a non-square matrix");
    }
    const std::size_t n = A.rows;
    CMatrix<S> M = A;
    CMatrix<S> I = cmat_identity<S>(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = n;
        RealOf<S> bv(0);
        for (std::size_t r = c; r < n; ++r) {
            RealOf<S> v = norm2(M(r, c));
            if (!ScalarTraits<S>::negligible(M(r, c), tol) && (best == n || bv < v)) {
                best = r;
                bv = v;
            }
        }
        if (best == n) {
            throw DomainError("singular matrix");
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(M(c, j), M(best, j));
            std::swap(I(c, j), I(best, j));
        }
        const S inv = S(1) / M(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            M(c, j) *= inv;
            I(c, j) *= inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || M(r, c) == S(0)) {
                continue;
            }
            const S f = M(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                M(r, j) -= f * M(c, j);
                I(r, j) -= f * I(c, j);
            }
        }
    }
    return I;
}

namespace
{

HermitianEigen<FloatComplex> jacobi(const CMatrix<FloatComplex> &A0)
{
    using R = Real128;
    const std::size_t n = A0.rows;
    CMatrix<FloatComplex> A = A0;
    CMatrix<FloatComplex> V = cmat_identity<FloatComplex>(n);
    R scale = 0;
    for (const auto &x : A.a) {
        scale = std::max(scale, R(sqrt(norm2(x))));
    }
    const R eps = R("1e-36") * (scale > 1 ? scale : R(1));
    for (int sweep = 0; sweep < 100; ++sweep) {
        R off = 0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off = std::max(off, R(sqrt(norm2(A(p, q)))));
            }
        }
        if (off <= eps) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const FloatComplex b = A(p, q);
                const R mb = sqrt(norm2(b));
                if (mb <= eps) {
                    continue;
                }
                // Phase e^{-i phi} with b = |b| e^{i phi}.
                const FloatComplex ph = conj(FloatComplex(R(b.re / mb), R(b.im / mb)));
                const R app = A(p, p).re, aqq = A(q, q).re;
                const R tau = (aqq - app) / (2 * mb);
                const R t = (tau >= 0 ? R(1) : R(-1)) / (abs(tau) + sqrt(1 + tau * tau));
                const R c = 1 / sqrt(1 + t * t);
                const R s = t * c;
                // Rotation acting on columns p, q: [[c, s], [-s ph, c ph]].
                const FloatComplex vpp(c), vpq(s), vqp = FloatComplex(R(-s)) * ph, vqq = FloatComplex(c) * ph;
                for (std::size_t k = 0; k < n; ++k) {
                    const FloatComplex akp = A(k, p), akq = A(k, q);
                    A(k, p) = akp * vpp + akq * vqp;
                    A(k, q) = akp * vpq + akq * vqq;
                    const FloatComplex xkp = V(k, p), xkq = V(k, q);
                    V(k, p) = xkp * vpp + xkq * vqp;
                    V(k, q) = xkp * vpq + xkq * vqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const FloatComplex apk = A(p, k), aqk = A(q, k);
                    A(p, k) = conj(vpp) * apk + conj(vqp) * aqk;
                    A(q, k) = conj(vpq) * apk + conj(vqq) * aqk;
                }
                A(p, q) = FloatComplex(0);
                A(q, p) = FloatComplex(0);
                A(p, p).im = 0;
                A(q, q).im = 0;
            }
        }
    }
    HermitianEigen<FloatComplex> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.values.push_back(A(i, i).re);
    }
    out.vectors = V;
    return out;
}

} // namespace

template <>
HermitianEigen<FloatComplex> hermitian_eigen(const CMatrix<FloatComplex> &A)
{
    return jacobi(A);
}

template <>
HermitianEigen<Gaussian> hermitian_eigen(const CMatrix<Gaussian> &A)
{
    HermitianEigen<Gaussian> out;
    for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t j = 0; j < A.cols; ++j) {
            if (i != j && A(i, j) != Gaussian(0)) {
                throw BackendError("exact backend cannot diagonalize a non-diagonal Hermitian matrix; use the float "
                                   "backend");
            }
        }
        if (sgn(A(i, i).im) != 0) {
            throw DomainError("matrix is not Hermitian");
        }
        out.values.push_back(A(i, i).re);
    }
    out.vectors = cmat_identity<Gaussian>(A.rows);
    return out;
}

template <typename S>
SeriesMatrix<S> smat_zero(const VarList &vars, int trunc, std::size_t n)
{
    return SeriesMatrix<S>(n, std::vector<Series<S>>(n, Series<S>(vars, trunc)));
}

template <typename S>
SeriesMatrix<S> smat_identity(const VarList &vars, int trunc, std::size_t n)
{
    auto I = smat_zero<S>(vars, trunc, n);
    for (std::size_t i = 0; i < n; ++i) {
        I[i][i] = Series<S>::constant(vars, trunc, S(1));
    }
    return I;
}

template <typename S>
SeriesMatrix<S> smat_mul(const SeriesMatrix<S> &A, const SeriesMatrix<S> &B)
{
    const std::size_t n = A.size(), m = B.empty() ? 0 : B[0].size(), k = B.size();
    const VarList &vars = A[0][0].vars();
    const int trunc = std::min(A[0][0].trunc(), B[0][0].trunc());
    SeriesMatrix<S> C(n, std::vector<Series<S>>(m, Series<S>(vars, trunc)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < k; ++l) {
                if (A[i][l].is_zero() || B[l][j].is_zero()) {
                    continue;
                }
                C[i][j] += A[i][l] * B[l][j];
            }
        }
    }
    return C;
}

template <typename S>
SeriesMatrix<S> smat_add(const SeriesMatrix<S> &A, const SeriesMatrix<S> &B)
{
    SeriesMatrix<S> C = A;
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = 0; j < A[i].size(); ++j) {
            C[i][j] += B[i][j];
        }
    }
    return C;
}

template <typename S>
SeriesMatrix<S> smat_scale(const SeriesMatrix<S> &A, const S &c)
{
    SeriesMatrix<S> C = A;
    for (auto &row : C) {
        for (auto &x : row) {
            x *= c;
        }
    }
    return C;
}

template <typename S>
SeriesMatrix<S> smat_adjoint(const SeriesMatrix<S> &A)
{
    const std::size_t n = A.size(), m = A.empty() ? 0 : A[0].size();
    SeriesMatrix<S> B(m, std::vector<Series<S>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            B[j][i] = conj_series(A[i][j]);
        }
    }
    return B;
}

template <typename S>
SeriesMatrix<S> smat_exp(const SeriesMatrix<S> &X)
{
    const std::size_t n = X.size();
    const VarList &vars = X[0][0].vars();
    const int trunc = X[0][0].trunc();
    for (const auto &row : X) {
        for (const auto &x : row) {
            if (!x.is_zero() && x.valuation() == 0) {
                throw DomainError("matrix exponential needs an argument vanishing at the origin");
            }
        }
    }
    SeriesMatrix<S> result = smat_identity<S>(vars, trunc, n);
    SeriesMatrix<S> term = result;
    for (int k = 1; k <= trunc; ++k) {
        term = smat_scale(smat_mul(term, X), S(1) / S(k));
        bool zero = true;
        for (const auto &row : term) {
            for (const auto &x : row) {
                zero = zero && x.is_zero();
            }
        }
        if (zero) {
            break;
        }
        result = smat_add(result, term);
    }
    return result;
}

template <typename S>
SeriesMatrix<S> smat_const_mul(const CMatrix<S> &C, const SeriesMatrix<S> &A)
{
    const VarList &vars = A[0][0].vars();
    const int trunc = A[0][0].trunc();
    SeriesMatrix<S> out(C.rows, std::vector<Series<S>>(A[0].size(), Series<S>(vars, trunc)));
    for (std::size_t i = 0; i < C.rows; ++i) {
        for (std::size_t l = 0; l < C.cols; ++l) {
            if (C(i, l) == S(0)) {
                continue;
            }
            for (std::size_t j = 0; j < A[0].size(); ++j) {
                out[i][j] += A[l][j] * C(i, l);
            }
        }
    }
    return out;
}

template <typename S>
SeriesMatrix<S> smat_mul_const(const SeriesMatrix<S> &A, const CMatrix<S> &C)
{
    const VarList &vars = A[0][0].vars();
    const int trunc = A[0][0].trunc();
    SeriesMatrix<S> out(A.size(), std::vector<Series<S>>(C.cols, Series<S>(vars, trunc)));
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t l = 0; l < C.rows; ++l) {
            if (A[i][l].is_zero()) {
                continue;
            }
            for (std::size_t j = 0; j < C.cols; ++j) {
                if (C(l, j) == S(0)) {
                    continue;
                }
                out[i][j] += A[i][l] * C(l, j);
            }
        }
    }
    return out;
}

template <typename S>
CMatrix<S> smat_constant_part(const SeriesMatrix<S> &A)
{
    CMatrix<S> C(A.size(), A.empty() ? 0 : A[0].size());
    for (std::size_t i = 0; i < C.rows; ++i) {
        for (std::size_t j = 0; j < C.cols; ++j) {
            C(i, j) = A[i][j].constant_term();
        }
    }
    return C;
}

template <typename S>
RealOf<S> smat_distance(const SeriesMatrix<S> &A, const SeriesMatrix<S> &B)
{
    RealOf<S> m(0);
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = 0; j < A[i].size(); ++j) {
            Series<S> d = A[i][j] - B[i][j];
            RealOf<S> v = max_abs_coeff(d);
            if (m < v) {
                m = v;
            }
        }
    }
    return m;
}

#define CRJET_INSTANTIATE_LINALG(S)                                                                              \
    template CMatrix<S> cmat_identity<S>(std::size_t);                                                         \
    template CMatrix<S> cmat_mul(const CMatrix<S> &, const CMatrix<S> &);                                      \
    template CMatrix<S> cmat_adjoint(const CMatrix<S> &);                                                      \
    template CMatrix<S> cmat_inverse(const CMatrix<S> &, const RealOf<S> &);                                   \
    template SeriesMatrix<S> smat_identity<S>(const VarList &, int, std::size_t);                              \
    template SeriesMatrix<S> smat_zero<S>(const VarList &, int, std::size_t);                                  \
    template SeriesMatrix<S> smat_mul(const SeriesMatrix<S> &, const SeriesMatrix<S> &);                       \
    template SeriesMatrix<S> smat_add(const SeriesMatrix<S> &, const SeriesMatrix<S> &);                       \
    template SeriesMatrix<S> smat_scale(const SeriesMatrix<S> &, const S &);                                   \
    template SeriesMatrix<S> smat_adjoint(const SeriesMatrix<S> &);                                            \
    template SeriesMatrix<S> smat_exp(const SeriesMatrix<S> &);                                                \
    template SeriesMatrix<S> smat_const_mul(const CMatrix<S> &, const SeriesMatrix<S> &);                      \
    template SeriesMatrix<S> smat_mul_const(const SeriesMatrix<S> &, const CMatrix<S> &);                      \
    template CMatrix<S> smat_constant_part(const SeriesMatrix<S> &);                                           \
    template RealOf<S> smat_distance(const SeriesMatrix<S> &, const SeriesMatrix<S> &);

CRJET_INSTANTIATE_LINALG(Gaussian)
CRJET_INSTANTIATE_LINALG(FloatComplex)

} // namespace crjet
