#include <crjet/io.hpp>
#include <crjet/normalform.hpp>

#include <algorithm>
#include <numeric>

namespace crjet
{

const VarList &t_vars()
{
    static const VarList v{"t"};
    return v;
}

const VarList &s_vars()
{
    static const VarList v{"s"};
    return v;
}

namespace
{

// Same terms, declared at a higher truncation order. Only valid when the caller
// knows the missing coefficients cannot influence the result.
template <typename S>
Series<S> padded(const Series<S> &f, int trunc)
{
    std::vector<Term<S>> terms = f.terms();
    return Series<S>::from_sorted(f.vars(), std::max(trunc, f.trunc()), f.tolerance(), std::move(terms));
}

template <typename S>
Series<S> to_map_var(const Series<S> &f, const std::string &from, int n)
{
    return rename(f, {{from, "w"}}, map_vars(n));
}

template <typename S>
bool is_negligible(const S &x, const RealOf<S> &tol)
{
    return ScalarTraits<S>::negligible(x, tol);
}

template <typename S>
SeriesMatrix<S> const_series_matrix(const CMatrix<S> &C, int trunc, const RealOf<S> &tol)
{
    SeriesMatrix<S> M(C.rows);
    for (std::size_t i = 0; i < C.rows; ++i) {
        for (std::size_t j = 0; j < C.cols; ++j) {
            M[i].push_back(Series<S>::constant(s_vars(), trunc, C(i, j)).with_tolerance(tol));
        }
    }
    return M;
}

template <typename S>
SeriesMatrix<S> with_tolerance(SeriesMatrix<S> M, const RealOf<S> &tol)
{
    for (auto &row : M) {
        for (auto &x : row) {
            x = x.with_tolerance(tol);
        }
    }
    return M;
}

template <typename S>
struct RellichCore {
    SeriesMatrix<S> W;
    std::vector<int> persistent;
};

// W unitary with W* A W diagonal to the truncation order of A.
template <typename S>
RellichCore<S> rellich_core(const SeriesMatrix<S> &A, const RellichOptions &opts)
{
    const std::size_t n = A.size();
    const int N = A[0][0].trunc();
    const RealOf<S> tol = A[0][0].tolerance();
    const HermitianEigen<S> eig = hermitian_eigen(smat_constant_part(A));

    // Eigenpairs sorted by value so that clusters are contiguous.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eig.values[a] < eig.values[b]; });
    std::vector<RealOf<S>> lambda;
    CMatrix<S> E(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        lambda.push_back(eig.values[order[c]]);
        for (std::size_t r = 0; r < n; ++r) {
            E(r, c) = eig.vectors(r, order[c]);
        }
    }
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> cluster_of(n);
    const RealOf<S> ctol = ScalarTraits<S>::real_from_rational(Rational(opts.cluster_tol));
    for (std::size_t i = 0; i < n; ++i) {
        RealOf<S> gap = i == 0 ? RealOf<S>(0) : RealOf<S>(lambda[i] - lambda[i - 1]);
        RealOf<S> scale = lambda[i] < 0 ? RealOf<S>(-lambda[i]) : lambda[i];
        if (scale < 1) {
            scale = 1;
        }
        if (i == 0 || gap > ctol * scale) {
            clusters.emplace_back();
        }
        clusters.back().push_back(i);
        cluster_of[i] = clusters.size() - 1;
    }

    SeriesMatrix<S> W = const_series_matrix(E, N, tol);
    SeriesMatrix<S> B = smat_mul(smat_adjoint(W), smat_mul(A, W));

    // Remove the couplings between different clusters order by order:
    // with X = s^k Y, e^{-X} B e^{X} changes the s^k coefficient by
    // (lambda_i - lambda_j) Y_ij.
    for (int k = 1; k <= N; ++k) {
        SeriesMatrix<S> X = smat_zero<S>(s_vars(), N, n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (cluster_of[i] == cluster_of[j]) {
                    continue;
                }
                const S c = B[i][j].coeff(Exponents{k});
                if (is_negligible(c, tol)) {
                    continue;
                }
                const S y = -c / S(RealOf<S>(lambda[i] - lambda[j]));
                X[i][j] = Series<S>::monomial(s_vars(), N, Exponents{k}, y).with_tolerance(tol);
                any = true;
            }
        }
        if (!any) {
            continue;
        }
        const SeriesMatrix<S> Ep = smat_exp(X);
        const SeriesMatrix<S> Em = smat_exp(smat_scale(X, S(-1)));
        B = smat_mul(Em, smat_mul(B, Ep));
        W = smat_mul(W, Ep);
    }

    RellichCore<S> out;
    for (const auto &cl : clusters) {
        if (cl.size() < 2) {
            continue;
        }
        if (N == 0) {
            out.persistent.push_back(static_cast<int>(cl.size()));
            continue;
        }
        // Inside a cluster B = lambda + s B1(s); diagonalize B1 recursively.
        SeriesMatrix<S> B1(cl.size());
        for (std::size_t a = 0; a < cl.size(); ++a) {
            for (std::size_t b = 0; b < cl.size(); ++b) {
                const Series<S> &x = B[cl[a]][cl[b]];
                const Series<S> c0 = Series<S>::constant(s_vars(), N, x.constant_term()).with_tolerance(tol);
                B1[a].push_back(divide_by_monomial(x - c0, Exponents{1}));
            }
        }
        RellichCore<S> sub = rellich_core(B1, opts);
        out.persistent.insert(out.persistent.end(), sub.persistent.begin(), sub.persistent.end());
        // sub.W is unitary to order N-1; restore unitarity at order N with
        // W <- W (I - (W* W - I)/2), which leaves W* B W unchanged to order N
        // because B - lambda is O(s).
        SeriesMatrix<S> Wb = sub.W;
        for (auto &row : Wb) {
            for (auto &x : row) {
                x = padded(x, N);
            }
        }
        const SeriesMatrix<S> I = smat_identity<S>(s_vars(), N, cl.size());
        const SeriesMatrix<S> gram = smat_mul(smat_adjoint(Wb), Wb);
        const SeriesMatrix<S> corr =
            smat_add(I, smat_scale(smat_add(gram, smat_scale(I, S(-1))),
                                   S(-1) * ScalarTraits<S>::from_rational(make_rational(1, 2))));
        Wb = with_tolerance(smat_mul(Wb, corr), tol);
        SeriesMatrix<S> Wfull = with_tolerance(smat_identity<S>(s_vars(), N, n), tol);
        for (std::size_t a = 0; a < cl.size(); ++a) {
            for (std::size_t b = 0; b < cl.size(); ++b) {
                Wfull[cl[a]][cl[b]] = Wb[a][b];
            }
        }
        B = smat_mul(smat_adjoint(Wfull), smat_mul(B, Wfull));
        W = smat_mul(W, Wfull);
    }
    out.W = W;
    return out;
}

template <typename S>
bool is_diagonal(const SeriesMatrix<S> &A)
{
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = 0; j < A.size(); ++j) {
            if (i != j && !A[i][j].is_zero()) {
                return false;
            }
        }
    }
    return true;
}

template <typename S>
int sign_of(const RealOf<S> &x)
{
    return x < 0 ? -1 : 1;
}

template <typename S>
RealOf<S> abs_real(const RealOf<S> &x)
{
    return x < 0 ? RealOf<S>(-x) : x;
}

std::string join_ints(const std::vector<int> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + std::to_string(v[i]);
    }
    return out;
}

} // namespace

template <typename S>
CheckReport curve_membership(const RealGraph<S> &g, const AnalyticCurve<S> &c)
{
    const int n = g.n;
    if (static_cast<int>(c.beta.size()) != n) {
        throw IncompatibleSeries("curve has " + std::to_string(c.beta.size()) + " z-components, expected "
                                 + std::to_string(n));
    }
    int N = std::min(g.phi.trunc(), c.eta.trunc());
    for (const auto &b : c.beta) {
        N = std::min(N, b.trunc());
    }
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        const Series<S> &b = c.beta[static_cast<std::size_t>(j - 1)];
        sub.emplace(zname(j), b.truncated(N));
        sub.emplace(zbname(j), conj_series(b).truncated(N));
    }
    const Series<S> t = Series<S>::variable(t_vars(), N, "t").with_tolerance(g.phi.tolerance());
    sub.emplace("s", t);
    const Series<S> psi = compose(g.phi, sub, ComposeOptions{N, t_vars(), false});
    return report_zero(c.eta.truncated(N) - t - psi * imag_unit<S>(), "eta(t) = t + i psi(beta, conj beta, t)");
}

template <typename S>
AnalyticCurve<S> normalize_parametrization(const AnalyticCurve<S> &c)
{
    const int N = c.eta.trunc();
    const S d = c.eta.coeff(Exponents{1});
    if (is_negligible(d, c.eta.tolerance())) {
        throw DomainError("curve is not transverse to the complex tangent space: eta'(0) = 0");
    }
    const S half = ScalarTraits<S>::from_rational(make_rational(1, 2));
    const Series<S> r = (c.eta + conj_series(c.eta)) * half;
    const Series<S> t = Series<S>::variable(t_vars(), N, "t").with_tolerance(c.eta.tolerance());
    if (r == t) {
        return c;
    }
    if (is_negligible(r.coeff(Exponents{1}), c.eta.tolerance())) {
        throw DomainError("curve is not transverse: Re eta'(0) = 0");
    }
    const VarList tx{"t", "x"};
    const Series<S> F = rename(r, {{"t", "x"}}, tx) - Series<S>::variable(tx, N, "t").with_tolerance(r.tolerance());
    const Series<S> x = implicit_solve(F, "x");
    const Substitution<S> sub{{"t", x}};
    AnalyticCurve<S> out;
    for (const auto &b : c.beta) {
        out.beta.push_back(compose(b, sub, ComposeOptions{std::min(N, b.trunc()), t_vars(), false}));
    }
    out.eta = compose(c.eta, sub, ComposeOptions{N, t_vars(), false});
    return out;
}

template <typename S>
AdaptedChart<S> adapt_to_curve(const ComplexDefining<S> &h, const AnalyticCurve<S> &c0)
{
    const int n = h.n;
    const AnalyticCurve<S> c = normalize_parametrization(c0);
    const CheckReport member = curve_membership(complex_to_real(h), c);
    if (!member.ok) {
        throw DomainError("curve is not contained in the hypersurface: " + member.describe());
    }
    int N = std::min(h.Q.trunc(), c.eta.trunc());
    for (const auto &b : c.beta) {
        N = std::min(N, b.trunc());
    }
    const VarList &mv = map_vars(n);
    HoloMap<S> Phi;
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        const Series<S> &b = c.beta[static_cast<std::size_t>(j - 1)];
        Series<S> Fj = Series<S>::variable(mv, N, zname(j)).with_tolerance(h.Q.tolerance())
                       + to_map_var(b.truncated(N), "t", n);
        sub.emplace(zname(j), Fj);
        sub.emplace(chiname(j), to_map_var(conj_series(b).truncated(N), "t", n));
        Phi.comps.push_back(Fj);
    }
    sub.emplace("tau", to_map_var(conj_series(c.eta).truncated(N), "t", n));
    Phi.comps.push_back(compose(h.Q.truncated(N), sub, ComposeOptions{N, mv, false}));

    AdaptedChart<S> out;
    out.change = Phi;
    out.h = transform(h, Phi);
    out.normality = check_normal(out.h);
    // change(0, t) against (beta(t), eta(t)).
    Substitution<S> axis;
    for (int j = 1; j <= n; ++j) {
        axis.emplace(zname(j), Series<S>(t_vars(), N, h.Q.tolerance()));
    }
    axis.emplace("w", Series<S>::variable(t_vars(), N, "t").with_tolerance(h.Q.tolerance()));
    out.axis_image.trunc = N;
    for (int i = 0; i <= n; ++i) {
        const Series<S> img = compose(Phi.comps[static_cast<std::size_t>(i)], axis, ComposeOptions{N, t_vars(), false});
        const Series<S> &want = i < n ? c.beta[static_cast<std::size_t>(i)] : c.eta;
        CheckReport r = report_zero(img - want.truncated(N), "change(0,t) = curve(t), component " + std::to_string(i + 1));
        if (!r.ok) {
            out.axis_image = r;
            break;
        }
    }
    return out;
}

template <typename S>
RealOf<S> unitarity_defect(const SeriesMatrix<S> &U)
{
    const SeriesMatrix<S> I = smat_identity<S>(U[0][0].vars(), U[0][0].trunc(), U.size());
    return smat_distance(smat_mul(U, smat_adjoint(U)), I);
}

template <typename S>
RealOf<S> offdiagonal_defect(const SeriesMatrix<S> &U, const SeriesMatrix<S> &A)
{
    const SeriesMatrix<S> B = smat_mul(U, smat_mul(A, smat_adjoint(U)));
    RealOf<S> worst(0);
    for (std::size_t i = 0; i < B.size(); ++i) {
        for (std::size_t j = 0; j < B.size(); ++j) {
            if (i != j) {
                worst = std::max(worst, max_abs_coeff(B[i][j]));
            }
        }
    }
    return worst;
}

template <typename S>
RellichResult<S> rellich_diagonalize(const SeriesMatrix<S> &A, const RellichOptions &opts)
{
    const std::size_t n = A.size();
    if (n == 0) {
        throw DomainError("empty matrix family");
    }
    const int N = A[0][0].trunc();
    const RealOf<S> tol = A[0][0].tolerance();
    for (std::size_t i = 0; i < n; ++i) {
        if (A[i].size() != n) {
            throw DomainError("matrix family is not square");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (A[i][j].vars() != s_vars()) {
                throw IncompatibleSeries("matrix family entries must be series in s");
            }
            if (A[i][j].trunc() != N) {
                throw IncompatibleSeries("matrix family entries must share one truncation order");
            }
            if (A[i][j] != conj_series(A[j][i])) {
                throw DomainError("matrix family is not Hermitian at entry (" + std::to_string(i + 1) + ","
                                  + std::to_string(j + 1) + ")");
            }
        }
    }
    RellichCore<S> core = rellich_core(A, opts);
    const bool diagonal_input = is_diagonal(A);
    if (!core.persistent.empty() && !diagonal_input) {
        throw DegeneracyError("unresolvable degeneracy at truncation " + std::to_string(N)
                              + ": eigenvalue branches in clusters of size " + join_ints(core.persistent)
                              + " coincide through the whole truncation window, so their eigenspace split is not "
                                "determined");
    }
    SeriesMatrix<S> B = smat_mul(smat_adjoint(core.W), smat_mul(A, core.W));
    RealOf<S> off(0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                off = std::max(off, max_abs_coeff(B[i][j]));
            }
        }
    }
    const RealOf<S> limit = ScalarTraits<S>::exact ? RealOf<S>(0) : RealOf<S>(tol * 100000);
    if (off > limit) {
        throw DegeneracyError("unresolvable degeneracy at truncation " + std::to_string(N)
                              + ": nearly colliding eigenvalue branches leave an off-diagonal defect of "
                              + ScalarTraits<S>::format(S(off)));
    }
    // Branch order: s-valuation descending, then positive leading coefficient
    // first, then leading magnitude descending.
    struct Branch {
        std::size_t index;
        int valuation;
        int sign;
        RealOf<S> magnitude;
    };
    std::vector<Branch> branches;
    for (std::size_t j = 0; j < n; ++j) {
        const Series<S> &d = B[j][j];
        const auto lead = leading_term(d);
        Branch br{j, d.valuation(), 1, RealOf<S>(0)};
        if (lead) {
            br.sign = sign_of<S>(lead->coeff.re);
            br.magnitude = abs_real<S>(lead->coeff.re);
        }
        branches.push_back(br);
    }
    std::stable_sort(branches.begin(), branches.end(), [](const Branch &a, const Branch &b) {
        if (a.valuation != b.valuation) {
            return a.valuation > b.valuation;
        }
        if (a.sign != b.sign) {
            return a.sign > b.sign;
        }
        return a.magnitude > b.magnitude;
    });
    RellichResult<S> out;
    SeriesMatrix<S> Wp(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto &br : branches) {
            Wp[r].push_back(core.W[r][br.index]);
        }
    }
    for (const auto &br : branches) {
        // The diagonal of a Hermitian matrix is real; drop rounding residue.
        Series<S> d = B[br.index][br.index];
        out.D.push_back((d + conj_series(d)) * ScalarTraits<S>::from_rational(make_rational(1, 2)));
    }
    out.U = smat_adjoint(Wp);
    out.persistent_clusters = core.persistent;
    return out;
}

template <typename S>
NormalFormData<S> model_normal_form(const std::vector<int> &epsilons, const std::vector<int> &exponents, int trunc)
{
    if (epsilons.size() != exponents.size() || epsilons.empty()) {
        throw DomainError("epsilons and exponents must be non-empty and of equal length");
    }
    NormalFormData<S> nf;
    nf.n = static_cast<int>(epsilons.size());
    nf.epsilons = epsilons;
    nf.exponents = exponents;
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
        nf.thetas.push_back(Series<S>::constant(s_vars(), trunc, S(1)));
    }
    nf.R = Series<S>(real_vars(nf.n), trunc);
    nf.change = identity_map<S>(nf.n, trunc);
    return nf;
}

template <typename S>
RealGraph<S> normal_form_graph(const NormalFormData<S> &nf)
{
    const int n = nf.n;
    const VarList &v = real_vars(n);
    int N = nf.R.trunc();
    for (int j = 0; j < n; ++j) {
        N = std::min(N, nf.thetas[static_cast<std::size_t>(j)].trunc() + 2 + nf.exponents[static_cast<std::size_t>(j)]);
    }
    RealGraph<S> g;
    g.n = n;
    g.phi = nf.R.truncated(N);
    for (int j = 1; j <= n; ++j) {
        const std::size_t k = static_cast<std::size_t>(j - 1);
        Exponents e(v.size(), 0);
        e[k] = 1;
        e[static_cast<std::size_t>(n) + k] = 1;
        e.back() = nf.exponents[k];
        const Series<S> theta = rename(nf.thetas[k], {}, v);
        g.phi += multiply_by_monomial(theta, e).truncated(N) * S(nf.epsilons[k]);
    }
    return g;
}

template <typename S>
CheckReport check_normal_form_shape(const NormalFormData<S> &nf)
{
    CheckReport r;
    r.trunc = nf.R.trunc();
    auto fail = [&](const std::string &what) {
        r.ok = false;
        r.identity = what;
        return r;
    };
    for (std::size_t j = 0; j < nf.epsilons.size(); ++j) {
        if (nf.epsilons[j] != 1 && nf.epsilons[j] != -1) {
            return fail("epsilon_" + std::to_string(j + 1) + " in {-1, 1}");
        }
        if (nf.exponents[j] < 0 || (j > 0 && nf.exponents[j] > nf.exponents[j - 1])) {
            return fail("b_1 >= ... >= b_n >= 0");
        }
        const Series<S> &th = nf.thetas[j];
        if (!ScalarTraits<S>::negligible(th.constant_term() - S(1), th.tolerance())) {
            return fail("theta_" + std::to_string(j + 1) + "(0) = 1");
        }
    }
    const RealGraph<S> rg{nf.n, nf.R};
    CheckReport rn = check_real_normal(rg);
    if (!rn.ok) {
        rn.identity = "R " + rn.identity;
        return rn;
    }
    // R = O(|z|^3): no term of (z, zb)-degree <= 2.
    const std::size_t n = static_cast<std::size_t>(nf.n);
    for (const auto &t : nf.R.terms()) {
        int zdeg = 0;
        for (std::size_t i = 0; i < 2 * n; ++i) {
            zdeg += key_exponent(t.key, i);
        }
        if (zdeg <= 2) {
            r.ok = false;
            r.identity = "R = O(|z|^3)";
            r.monomial = format_monomial(nf.R.vars(), t.key);
            r.defect_order = t.degree;
            r.coefficient = ScalarTraits<S>::format(t.coeff);
            return r;
        }
    }
    return r;
}

template <typename S>
Series<S> normal_form_residual(const NormalFormData<S> &nf, const RealGraph<S> &original)
{
    return graph_membership_residual(nf.change, normal_form_graph(nf), original);
}

template <typename S>
NormalFormData<S> normal_form(const RealGraph<S> &g, const RellichOptions &opts)
{
    const int n = g.n;
    const CheckReport normal = check_real_normal(g);
    if (!normal.ok) {
        throw DomainError("input graph is not in normal coordinates: " + normal.describe());
    }
    const int N = g.phi.trunc();
    if (N < 3) {
        throw TruncationError("normal form needs truncation order at least 3");
    }
    const RealOf<S> tol = g.phi.tolerance();
    const SeriesMatrix<S> A = with_tolerance(levi_matrix_along_axis(g), tol);
    const RellichResult<S> rr = rellich_diagonalize(A, opts);

    NormalFormData<S> nf;
    nf.n = n;
    std::vector<S> inv_root;
    for (int j = 0; j < n; ++j) {
        const Series<S> &d = rr.D[static_cast<std::size_t>(j)];
        const auto lead = leading_term(d);
        if (!lead) {
            throw DomainError("Levi form degenerates along the axis: diagonal entry " + std::to_string(j + 1)
                              + " vanishes to order " + std::to_string(d.trunc()));
        }
        const RealOf<S> c = abs_real<S>(lead->coeff.re);
        nf.epsilons.push_back(sign_of<S>(lead->coeff.re));
        nf.exponents.push_back(lead->degree);
        const auto root = ScalarTraits<S>::sqrt(c);
        if (!root) {
            throw BackendError("rescaling factor sqrt(" + ScalarTraits<S>::format(S(c))
                               + ") is irrational; use the float backend");
        }
        inv_root.push_back(S(1) / S(*root));
    }

    // z' = U(w)^T C z with C = diag(1/sqrt(c_j)), w' = w. With A_jk = phi_{z_j zb_k}
    // the new Levi matrix along the axis is C U A U* C = diag(eps_j s^{b_j} ...).
    // The entries of U are known to order N-2; each multiplies some z_k, and
    // terms of Phi_F of degree N cannot reach phi' below degree N+1 because phi
    // vanishes on {zb = 0}, so the product is declared at order N.
    const VarList &mv = map_vars(n);
    HoloMap<S> Phi;
    for (int j = 0; j < n; ++j) {
        Series<S> Fj(mv, N, tol);
        for (int k = 0; k < n; ++k) {
            Exponents e(mv.size(), 0);
            e[static_cast<std::size_t>(k)] = 1;
            const Series<S> ukj = to_map_var(rr.U[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)], "s", n);
            Fj += padded(multiply_by_monomial(ukj, e), N) * inv_root[static_cast<std::size_t>(k)];
        }
        Phi.comps.push_back(Fj);
    }
    Phi.comps.push_back(Series<S>::variable(mv, N, "w").with_tolerance(tol));
    const RealGraph<S> gn = transform_graph(g, Phi);

    // Split phi' into the diagonal Levi part (-> theta_j) and the O(|z|^3) rest.
    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<std::unordered_map<MonomialKey, S, MonomialKeyHash>> theta_acc(un);
    std::unordered_map<MonomialKey, S, MonomialKeyHash> r_acc;
    for (const auto &t : gn.phi.terms()) {
        int zdeg = 0, zbdeg = 0;
        std::size_t zi = 0, zbi = 0;
        for (std::size_t i = 0; i < un; ++i) {
            const int a = key_exponent(t.key, i), b = key_exponent(t.key, un + i);
            zdeg += a;
            zbdeg += b;
            if (a) {
                zi = i;
            }
            if (b) {
                zbi = i;
            }
        }
        if (zdeg + zbdeg > 2) {
            r_acc[t.key] = t.coeff;
            continue;
        }
        if (zdeg == 1 && zbdeg == 1 && zi == zbi) {
            const int se = key_exponent(t.key, 2 * un) - nf.exponents[zi];
            if (se >= 0) {
                theta_acc[zi][unit_key(0, se)] += t.coeff * S(nf.epsilons[zi]);
            }
        }
        // Any other term of degree <= 2 is a diagonalization defect; it is
        // dropped here and shows up in normal_form_residual.
    }
    for (std::size_t j = 0; j < un; ++j) {
        const int tt = N - 2 - nf.exponents[j];
        if (tt < 0) {
            throw TruncationError("theta_" + std::to_string(j + 1) + " is not determined at truncation "
                                  + std::to_string(N));
        }
        nf.thetas.push_back(Series<S>::from_terms(s_vars(), tt, tol, std::move(theta_acc[j])));
    }
    nf.R = Series<S>::from_terms(real_vars(n), N, tol, std::move(r_acc));
    nf.change = Phi;
    return nf;
}

template <typename S>
std::string format_normal_form(const NormalFormData<S> &nf)
{
    std::string out = "n: " + std::to_string(nf.n) + "\nepsilons: " + format_ints(nf.epsilons)
                      + "\nexponents: " + format_ints(nf.exponents) + "\n";
    for (int j = 0; j < nf.n; ++j) {
        out += format_block("theta" + std::to_string(j + 1), nf.thetas[static_cast<std::size_t>(j)]);
    }
    out += format_block("R", nf.R);
    out += format_map(nf.change);
    return out;
}

template <typename S>
NormalFormData<S> parse_normal_form(const std::string &text)
{
    const Document doc = parse_document(text);
    NormalFormData<S> nf;
    nf.n = doc.get_int("n");
    nf.epsilons = doc.get_ints("epsilons");
    nf.exponents = doc.get_ints("exponents");
    if (static_cast<int>(nf.epsilons.size()) != nf.n || static_cast<int>(nf.exponents.size()) != nf.n) {
        throw ParseError("epsilons and exponents need n entries each", doc.get("epsilons").line);
    }
    for (int j = 1; j <= nf.n; ++j) {
        const DocEntry &e = doc.get("theta" + std::to_string(j));
        try {
            nf.thetas.push_back(embed(entry_series<S>(e), s_vars()));
        } catch (const ParseError &) {
            throw;
        } catch (const Error &err) {
            throw ParseError(std::string("theta block must be a series in s: ") + err.what(), e.block_line);
        }
    }
    const DocEntry &r = doc.get("R");
    try {
        nf.R = embed(entry_series<S>(r), real_vars(nf.n));
    } catch (const ParseError &) {
        throw;
    } catch (const Error &err) {
        throw ParseError(std::string("R block has unexpected variables: ") + err.what(), r.block_line);
    }
    if (doc.find("G")) {
        nf.change = parse_map<S>(text);
    } else {
        nf.change = identity_map<S>(nf.n, nf.R.trunc());
    }
    return nf;
}

#define CRJET_INSTANTIATE_NORMALFORM(S)                                                                          \
    template CheckReport curve_membership(const RealGraph<S> &, const AnalyticCurve<S> &);                     \
    template AnalyticCurve<S> normalize_parametrization(const AnalyticCurve<S> &);                             \
    template AdaptedChart<S> adapt_to_curve(const ComplexDefining<S> &, const AnalyticCurve<S> &);             \
    template RellichResult<S> rellich_diagonalize(const SeriesMatrix<S> &, const RellichOptions &);            \
    template RealOf<S> unitarity_defect(const SeriesMatrix<S> &);                                              \
    template RealOf<S> offdiagonal_defect(const SeriesMatrix<S> &, const SeriesMatrix<S> &);                   \
    template NormalFormData<S> model_normal_form<S>(const std::vector<int> &, const std::vector<int> &, int);  \
    template RealGraph<S> normal_form_graph(const NormalFormData<S> &);                                        \
    template CheckReport check_normal_form_shape(const NormalFormData<S> &);                                   \
    template Series<S> normal_form_residual(const NormalFormData<S> &, const RealGraph<S> &);                  \
    template NormalFormData<S> normal_form(const RealGraph<S> &, const RellichOptions &);                      \
    template std::string format_normal_form(const NormalFormData<S> &);                                        \
    template NormalFormData<S> parse_normal_form<S>(const std::string &);

CRJET_INSTANTIATE_NORMALFORM(Gaussian)
CRJET_INSTANTIATE_NORMALFORM(FloatComplex)

} // namespace crjet
