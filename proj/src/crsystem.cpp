#include <crjet/crsystem.hpp>
#include <crjet/errors.hpp>
#include <crjet/io.hpp>
#include <crjet/linalg.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace crjet
{

const VarList &w_vars()
{
    static const VarList v{"w"};
    return v;
}

const VarList &wwb_vars()
{
    static const VarList v{"w", "wb"};
    return v;
}

namespace
{

template <typename S>
Series<S> var(const VarList &v, int trunc, const std::string &name)
{
    return Series<S>::variable(v, trunc, name);
}

template <typename S>
Exponents single(const VarList &v, const std::string &name, int k)
{
    Exponents e(v.size(), 0);
    e[v.index(name)] = k;
    return e;
}

CheckReport failed(const std::string &identity, int order = -1)
{
    CheckReport r;
    r.ok = false;
    r.identity = identity;
    r.defect_order = order;
    return r;
}

template <typename S>
std::vector<std::pair<std::string, std::string>> z_pairs(int n)
{
    std::vector<std::pair<std::string, std::string>> p;
    for (int j = 1; j <= n; ++j) {
        p.emplace_back(zname(j), zbname(j));
    }
    return p;
}

} // namespace

template <typename S>
CheckReport check_gw_real(const HoloMap<S> &H, int m)
{
    const Series<S> &G = H.G();
    if (G.trunc() < m) {
        throw TruncationError("G known to order " + std::to_string(G.trunc()) + ", reality check needs order "
                              + std::to_string(m));
    }
    CheckReport ok;
    ok.trunc = G.trunc();
    for (int l = 0; l <= m; ++l) {
        const Series<S> c = coefficient_of(G, "w", l);
        const std::string what = "d^" + std::to_string(l) + "G/dw^" + std::to_string(l) + "(z,0)";
        for (const auto &t : c.terms()) {
            if (t.degree > 0) {
                CheckReport r = failed(what + " is constant (l = " + std::to_string(l) + ")", t.degree + l);
                r.monomial = format_monomial(c.vars(), t.key) + (l == 0 ? "" : l == 1 ? "*w" : "*w^" + std::to_string(l));
                r.coefficient = ScalarTraits<S>::format(t.coeff);
                r.trunc = G.trunc();
                return r;
            }
        }
        const S c0 = c.constant_term();
        if (!ScalarTraits<S>::negligible_real(c0.im, G.tolerance())) {
            CheckReport r = failed(what + " is real (l = " + std::to_string(l) + ")", l);
            r.monomial = l == 0 ? "1" : (l == 1 ? "w" : "w^" + std::to_string(l));
            r.coefficient = ScalarTraits<S>::format(c0);
            r.trunc = G.trunc();
            return r;
        }
    }
    return ok;
}

template <typename S>
AutomorphismSplit<S> split_automorphism(const HoloMap<S> &H, int m)
{
    const auto r = check_gw_real(H, m);
    if (!r.ok) {
        throw DomainError("reality conditions violated: " + r.describe());
    }
    const int n = H.n();
    const Series<S> &G = H.G();
    const int N = G.trunc();
    AutomorphismSplit<S> out;
    out.m = m;
    out.P = Series<S>(w_vars(), N, G.tolerance());
    out.Qpoly = Series<S>(wwb_vars(), N, G.tolerance());
    Series<S> Pmap(map_vars(n), N, G.tolerance());
    const Series<S> w = var<S>(w_vars(), N, "w");
    const Series<S> ww = var<S>(wwb_vars(), N, "w");
    const Series<S> wb = var<S>(wwb_vars(), N, "wb");
    for (int j = 1; j <= m - 1; ++j) {
        const S pj = coefficient_of(G, "w", j).constant_term();
        out.P += power(w, j) * pj;
        Pmap += power(var<S>(map_vars(n), N, "w"), j) * pj;
        for (int k = 0; k < j; ++k) {
            out.Qpoly += power(wb, k) * power(ww, j - 1 - k) * pj;
        }
    }
    out.G2 = divide_by_monomial(G - Pmap, single<S>(map_vars(n), "w", m));
    if (m > 1) {
        out.Tpoly = divide_by_monomial(out.P, Exponents{1});
    } else {
        out.Tpoly = Series<S>(w_vars(), N - 1, G.tolerance());
    }
    return out;
}

template <typename S>
ChartFunctions<S> chart_functions(const RealGraph<S> &g, int m)
{
    if (m < 1) {
        throw DomainError("chart functions need m >= 1");
    }
    const VarList &v = real_vars(g.n);
    const Series<S> &phi = g.phi;
    if (!phi.is_zero() && var_valuation(phi, "s") < m) {
        throw DomainError("w - conj(w) is not divisible by s^" + std::to_string(m) + " to order "
                          + std::to_string(phi.trunc()));
    }
    ChartFunctions<S> out;
    out.m = m;
    const int N = phi.trunc();
    const S i = imag_unit<S>();
    out.w_of_t = var<S>(v, N, "s") + phi * i;
    const Series<S> u = divide_by_monomial(phi, single<S>(v, "s", 1)); // w = s (1 + i u)
    const Series<S> one = Series<S>::constant(v, u.trunc(), S(1)).with_tolerance(phi.tolerance());
    const Series<S> inv = reciprocal(one + u * i);
    out.A = (one - u * i) * inv;
    const Series<S> phim = divide_by_monomial(phi, single<S>(v, "s", m));
    out.B = phim * (S(-2) * i) * power(inv.truncated(std::min(inv.trunc(), phim.trunc())), m);
    return out;
}

template <typename S>
Series<S> apply_field(const VectorField<S> &X, const Series<S> &f)
{
    const VarList &v = f.vars();
    if (X.coeffs.size() != v.size()) {
        throw IncompatibleSeries("vector field and series live on different variables");
    }
    Series<S> out(v, f.trunc() - 1, f.tolerance());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (X.coeffs[k].is_zero() && X.coeffs[k].trunc() >= f.trunc()) {
            continue;
        }
        out += X.coeffs[k] * partial(f, v[k]);
    }
    return out;
}

template <typename S>
VectorField<S> lie_bracket(const VectorField<S> &X, const VectorField<S> &Y)
{
    VectorField<S> out;
    for (std::size_t k = 0; k < X.coeffs.size(); ++k) {
        out.coeffs.push_back(apply_field(X, Y.coeffs[k]) - apply_field(Y, X.coeffs[k]));
    }
    return out;
}

template <typename S>
CRFrame<S> cr_frame(const RealGraph<S> &g, int m)
{
    const int n = g.n;
    const VarList &v = real_vars(n);
    const int N = g.phi.trunc();
    const auto tol = g.phi.tolerance();
    const std::size_t is = v.index("s");
    const Series<S> zero(v, N, tol);
    const Series<S> one = Series<S>::constant(v, N, S(1)).with_tolerance(tol);
    const Series<S> denom = reciprocal(partial(g.phi, "s") - one * imag_unit<S>());
    CRFrame<S> fr;
    fr.n = n;
    fr.m = m;
    for (int j = 1; j <= n; ++j) {
        VectorField<S> L{std::vector<Series<S>>(v.size(), zero)};
        L.coeffs[v.index(zbname(j))] = one;
        L.coeffs[is] = -(partial(g.phi, zbname(j)) * denom);
        VectorField<S> Lb{std::vector<Series<S>>(v.size(), zero)};
        Lb.coeffs[v.index(zname(j))] = one;
        Lb.coeffs[is] = formal_conjugate(L.coeffs[is], z_pairs<S>(n));
        fr.L.push_back(std::move(L));
        fr.Lbar.push_back(std::move(Lb));
    }
    fr.S_field.coeffs.assign(v.size(), zero);
    fr.S_field.coeffs[is] = power(var<S>(v, N, "s"), m);
    return fr;
}

namespace
{

// Coefficient c with [X, Y] = c S; DomainError if the bracket leaves the s-direction
// or is not divisible by s^m.
template <typename S>
Series<S> s_multiple(const VectorField<S> &Br, int m, const VarList &v, const std::string &what)
{
    const std::size_t is = v.index("s");
    for (std::size_t k = 0; k < Br.coeffs.size(); ++k) {
        if (k != is && !Br.coeffs[k].is_zero()) {
            throw DomainError(what + " has a component along d/d" + v[k]);
        }
    }
    try {
        return divide_by_monomial(Br.coeffs[is], single<S>(v, "s", m));
    } catch (const DomainError &) {
        throw DomainError("division defect: the d/ds coefficient of " + what + " is not divisible by s^"
                          + std::to_string(m));
    }
}

} // namespace

template <typename S>
Commutators<S> commutators(const CRFrame<S> &frame)
{
    const int n = frame.n;
    const int m = frame.m;
    const VarList &v = real_vars(n);
    const std::size_t is = v.index("s");
    Commutators<S> out;
    out.a.assign(static_cast<std::size_t>(n), {});
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const auto Br = lie_bracket(frame.L[static_cast<std::size_t>(j)], frame.Lbar[static_cast<std::size_t>(k)]);
            const std::string what = "[L_" + std::to_string(j + 1) + ", Lbar_" + std::to_string(k + 1) + "]";
            const Series<S> a = s_multiple(Br, m, v, what);
            if (out.aS.ok) {
                out.aS = report_zero(Br.coeffs[is] - a * frame.S_field.coeffs[is], what + " = a S");
            }
            out.a[static_cast<std::size_t>(j)].push_back(a);

            const auto LL = lie_bracket(frame.L[static_cast<std::size_t>(j)], frame.L[static_cast<std::size_t>(k)]);
            for (const auto &c : LL.coeffs) {
                if (out.LL.ok) {
                    out.LL = report_zero(c, "[L_" + std::to_string(j + 1) + ", L_" + std::to_string(k + 1) + "] = 0");
                }
            }
        }
        const auto BS = lie_bracket(frame.L[static_cast<std::size_t>(j)], frame.S_field);
        const std::string what = "[L_" + std::to_string(j + 1) + ", S]";
        const Series<S> b = s_multiple(BS, m, v, what);
        if (out.bS.ok) {
            out.bS = report_zero(BS.coeffs[is] - b * frame.S_field.coeffs[is], what + " = b S");
        }
        out.b.push_back(b);
    }
    out.a_diagonal_nonzero = true;
    for (int j = 0; j < n; ++j) {
        const auto &ajj = out.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
        if (ScalarTraits<S>::negligible(ajj.constant_term(), ajj.tolerance())) {
            out.a_diagonal_nonzero = false;
        }
    }
    if (!out.a_diagonal_nonzero) {
        throw DomainError("a_jj(0) = 0: the Levi form along S degenerates (not of infinite type " + std::to_string(m)
                          + " at this order)");
    }
    return out;
}

template <typename S>
CheckReport reflection_check(const HoloMap<S> &H, const RealGraph<S> &g)
{
    const int n = g.n;
    const VarList &v = real_vars(n);
    const ComplexDefining<S> h = real_to_complex(g);
    const int N = std::min(g.phi.trunc(), H.trunc());
    const S i = imag_unit<S>();
    const Series<S> s = var<S>(v, N, "s");
    const Series<S> phi = g.phi.truncated(N);
    std::vector<Series<S>> args, bargs;
    for (int j = 1; j <= n; ++j) {
        args.push_back(var<S>(v, N, zname(j)));
        bargs.push_back(var<S>(v, N, zbname(j)));
    }
    args.push_back(s + phi * i);
    bargs.push_back(s - phi * i);
    const auto Hf = apply_map(H, args);
    const auto Hb = apply_conjugate_map(H, bargs);
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), Hf[static_cast<std::size_t>(j - 1)]);
        sub.emplace(chiname(j), Hb[static_cast<std::size_t>(j - 1)]);
    }
    sub.emplace("tau", Hb.back());

    CheckReport last = report_zero(Hf.back() - compose(h.Q, sub), "G(z, w) = Q(F, conj F, conj G) on M");
    if (!last.ok) {
        return last;
    }
    const CRFrame<S> frame = cr_frame(g, 1);
    last.trunc = std::min(last.trunc, N - 1);
    // L_j of the identity: sum_k Q_chi_k(F, Fbar, Gbar) L_j Fbar_k + Q_tau(F, Fbar, Gbar) L_j Gbar = 0.
    std::vector<Series<S>> Qchi;
    for (int k = 1; k <= n; ++k) {
        Qchi.push_back(compose(partial(h.Q, chiname(k)), sub));
    }
    const Series<S> Qtau = compose(partial(h.Q, "tau"), sub);
    for (int j = 0; j < n; ++j) {
        const auto &L = frame.L[static_cast<std::size_t>(j)];
        Series<S> Psi = Qtau * apply_field(L, Hb.back());
        for (int k = 0; k < n; ++k) {
            Psi += Qchi[static_cast<std::size_t>(k)] * apply_field(L, Hb[static_cast<std::size_t>(k)]);
        }
        auto r = report_zero(Psi, "L_" + std::to_string(j + 1) + " of the basic identity on M");
        if (!r.ok) {
            return r;
        }
        last.trunc = std::min(last.trunc, r.trunc);
    }
    return last;
}

// ---------------------------------------------------------------------------
// Jet determination probe

namespace
{

template <typename S>
struct Unknown {
    std::size_t comp;  // 0..n-1 for F, n for G
    Exponents exps;    // over map_vars(n)
    int degree;
    bool imaginary;    // coefficient 1 or i
};

template <typename S>
std::vector<Unknown<S>> unknowns_between(int n, int lo, int hi)
{
    std::vector<Unknown<S>> out;
    const std::size_t nv = map_vars(n).size();
    for (int d = lo; d <= hi; ++d) {
        for (const auto &e : monomials_of_degree(nv, d)) {
            for (std::size_t c = 0; c < nv; ++c) {
                out.push_back({c, e, d, false});
                out.push_back({c, e, d, true});
            }
        }
    }
    return out;
}

// a * b to the order the factors actually determine: a known to order p with
// valuation u and b known to order q with valuation v give a * b to min(p + v, q + u).
template <typename S>
Series<S> product(const Series<S> &a, const Series<S> &b)
{
    const int T = std::min(a.trunc() + b.valuation(), b.trunc() + a.valuation());
    auto padded = [T](const Series<S> &f) {
        std::vector<Term<S>> terms(f.terms());
        return Series<S>::from_sorted(f.vars(), std::max(T, f.trunc()), f.tolerance(), std::move(terms));
    };
    return (padded(a) * padded(b)).truncated(T);
}

// The derivative of the basic identity G(z,Q) - Q(F(z,Q), Fbar, Gbar) at H, in
// the direction of a single monomial perturbation.
template <typename S>
struct Linearization {
    int n = 1;
    int N = 0;
    std::vector<Series<S>> Qpow;        // Q^b
    std::vector<Series<S>> Mz, Mchi;    // (dQ/dz_j)(F(z,Q), Fbar, Gbar), (dQ/dchi_j)(...)
    Series<S> Mtau;

    Linearization(const ComplexDefining<S> &h, const HoloMap<S> &H, int trunc) : n(h.n), N(trunc)
    {
        const VarList &v = q_vars(n);
        const Series<S> Q = h.Q.truncated(N);
        Qpow.push_back(Series<S>::constant(v, N, S(1)).with_tolerance(Q.tolerance()));
        for (int b = 1; b <= N; ++b) {
            Qpow.push_back(Qpow.back() * Q);
        }
        std::vector<Series<S>> args, bargs;
        for (int j = 1; j <= n; ++j) {
            args.push_back(var<S>(v, N, zname(j)));
            bargs.push_back(var<S>(v, N, chiname(j)));
        }
        args.push_back(Q);
        bargs.push_back(var<S>(v, N, "tau"));
        const auto Hf = apply_map(H, args, N);
        const auto Hb = apply_conjugate_map(H, bargs, N);
        Substitution<S> sub;
        for (int j = 1; j <= n; ++j) {
            sub.emplace(zname(j), Hf[static_cast<std::size_t>(j - 1)]);
            sub.emplace(chiname(j), Hb[static_cast<std::size_t>(j - 1)]);
        }
        sub.emplace("tau", Hb.back());
        // The partials of Q are known to order N - 1 only; they always multiply a
        // factor vanishing at the origin, so the products are known to order N.
        const ComposeOptions opts{N - 1, v, false};
        for (int j = 1; j <= n; ++j) {
            Mz.push_back(compose(partial(Q, zname(j)), sub, opts));
            Mchi.push_back(compose(partial(Q, chiname(j)), sub, opts));
        }
        Mtau = compose(partial(Q, "tau"), sub, opts);
    }

    Series<S> column(const Unknown<S> &u) const
    {
        const VarList &v = q_vars(n);
        const S c = u.imaginary ? imag_unit<S>() : S(1);
        const S cb = u.imaginary ? -imag_unit<S>() : S(1);
        Exponents za(v.size(), 0), chitau(v.size(), 0);
        for (int j = 0; j < n; ++j) {
            za[static_cast<std::size_t>(j)] = u.exps[static_cast<std::size_t>(j)];
            chitau[static_cast<std::size_t>(n + j)] = u.exps[static_cast<std::size_t>(j)];
        }
        const int b = u.exps.back();
        chitau.back() = b;
        const Series<S> zQ = multiply_by_monomial(Qpow[static_cast<std::size_t>(b)], za).truncated(N) * c;
        const Series<S> conjpart = Series<S>::monomial(v, N, chitau, cb).with_tolerance(Mtau.tolerance());
        if (u.comp == static_cast<std::size_t>(n)) {
            return zQ - product(Mtau, conjpart);
        }
        return -product(Mz[u.comp], zQ) - product(Mchi[u.comp], conjpart);
    }
};

template <typename S>
struct RowIndex {
    std::map<MonomialKey, std::size_t> index;
    std::vector<int> degree;

    std::size_t row_of(MonomialKey key, int deg)
    {
        auto it = index.find(key);
        if (it != index.end()) {
            return it->second;
        }
        const std::size_t r = degree.size();
        index.emplace(key, r);
        degree.push_back(deg);
        return r;
    }
};

using ExactKernel = KernelResult<Rational>;
using FloatKernel = KernelResult<Real128>;

KernelResult<Rational> kernel_of(const DenseMatrix<Rational> &A, double)
{
    return kernel_exact(A);
}

KernelResult<Real128> kernel_of(const DenseMatrix<Real128> &A, double tol)
{
    return kernel_float(A, Real128(tol));
}

// Real matrix of the columns restricted to rows of degree <= max_row_degree.
// Each complex row contributes a real and an imaginary row.
template <typename S>
DenseMatrix<RealOf<S>> real_matrix(const std::vector<Series<S>> &cols, std::size_t ncols, RowIndex<S> &rows,
                                   int max_row_degree, const Series<S> *rhs)
{
    for (std::size_t c = 0; c < ncols; ++c) {
        for (const auto &t : cols[c].terms()) {
            if (t.degree <= max_row_degree) {
                rows.row_of(t.key, t.degree);
            }
        }
    }
    if (rhs) {
        for (const auto &t : rhs->terms()) {
            if (t.degree <= max_row_degree) {
                rows.row_of(t.key, t.degree);
            }
        }
    }
    std::vector<std::size_t> live;
    for (std::size_t r = 0; r < rows.degree.size(); ++r) {
        if (rows.degree[r] <= max_row_degree) {
            live.push_back(r);
        }
    }
    std::map<std::size_t, std::size_t> compact;
    for (std::size_t k = 0; k < live.size(); ++k) {
        compact.emplace(live[k], k);
    }
    DenseMatrix<RealOf<S>> M(2 * live.size(), ncols + (rhs ? 1 : 0));
    auto fill = [&](const Series<S> &f, std::size_t col) {
        for (const auto &t : f.terms()) {
            if (t.degree > max_row_degree) {
                continue;
            }
            const std::size_t r = compact.at(rows.index.at(t.key));
            M(2 * r, col) = t.coeff.re;
            M(2 * r + 1, col) = t.coeff.im;
        }
    };
    for (std::size_t c = 0; c < ncols; ++c) {
        fill(cols[c], c);
    }
    if (rhs) {
        fill(*rhs, ncols);
    }
    return M;
}

// x with A x = -b for M = [A | b], or nothing when the system is inconsistent.
// A kernel vector with a nonzero last entry yields the solution; reduced form sets
// the free coordinates to zero.
template <typename F>
std::optional<std::vector<F>> augmented_solution(const DenseMatrix<F> &M, double tol)
{
    const auto ker = kernel_of(M, tol);
    const std::size_t last = M.cols - 1;
    for (const auto &vec : ker.kernel) {
        if (vec[last] != 0) {
            std::vector<F> x(vec.begin(), vec.begin() + static_cast<std::ptrdiff_t>(last));
            for (auto &xi : x) {
                xi /= vec[last];
            }
            return x;
        }
    }
    return std::nullopt;
}

// [A^T A | A^T b] for M = [A | b].
template <typename F>
DenseMatrix<F> normal_equations(const DenseMatrix<F> &M)
{
    const std::size_t k = M.cols - 1;
    DenseMatrix<F> out(k, k + 1);
    for (std::size_t r = 0; r < M.rows; ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            const F &a = M(r, i);
            if (a == 0) {
                continue;
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (M(r, j) != 0) {
                    out(i, j) += a * M(r, j);
                }
            }
        }
    }
    return out;
}

template <typename S>
HoloMap<S> perturbation_from(const std::vector<Unknown<S>> &unk, const std::vector<RealOf<S>> &x, int n, int trunc,
                             const RealOf<S> &tol)
{
    const VarList &v = map_vars(n);
    HoloMap<S> P;
    for (std::size_t c = 0; c < v.size(); ++c) {
        P.comps.push_back(Series<S>(v, trunc, tol));
    }
    for (std::size_t k = 0; k < unk.size(); ++k) {
        if (ScalarTraits<S>::negligible_real(x[k], tol)) {
            continue;
        }
        const S c = unk[k].imaginary ? S(RealOf<S>(0), x[k]) : S(x[k]);
        P.comps[unk[k].comp] += Series<S>::monomial(v, trunc, unk[k].exps, c).with_tolerance(tol);
    }
    return P;
}

} // namespace

template <typename S>
int probe_max_degree(const ComplexDefining<S> &h, int N)
{
    const Series<S> d = h.Q - var<S>(q_vars(h.n), h.Q.trunc(), "tau");
    const int v = d.is_zero() ? 2 : d.valuation();
    return N - 3 * (v - 1);
}

template <typename S>
std::string ProbeResult<S>::report() const
{
    std::ostringstream os;
    os << "probe: K=" << K << " N=" << N << " unknown degrees " << K + 1 << ".." << max_degree << "\n";
    for (const auto &d : degrees) {
        os << "degree " << d.degree << ": unknowns " << d.unknowns << " equations " << d.rows << " rank " << d.rank
           << " kernel " << d.kernel_dim << "\n";
    }
    if (vacuous) {
        os << "verdict: no unknowns in the window " << K + 1 << ".." << max_degree << " (uninformative)\n";
    } else if (determined) {
        os << "verdict: determined by " << K << "-jets at truncation " << N << "\n";
    } else {
        os << "verdict: free parameters at degree " << first_free_degree << " (dimension " << kernel.size()
           << ") at truncation " << N << "\n";
        for (std::size_t k = 0; k < kernel.size(); ++k) {
            os << "kernel vector " << k + 1 << ":\n" << format_map(kernel[k]);
        }
    }
    return os.str();
}

template <typename S>
ProbeResult<S> jet_determination_probe(const ComplexDefining<S> &h, int K, int N, const ProbeOptions &opts)
{
    if (K < 0) {
        throw DomainError("jet order K must be non-negative");
    }
    if (h.Q.trunc() < N) {
        throw TruncationError("defining function known to order " + std::to_string(h.Q.trunc())
                              + ", probe needs order " + std::to_string(N));
    }
    const auto normal = check_normal(h);
    if (!normal.ok) {
        throw DomainError("probe needs normal coordinates: " + normal.describe());
    }
    ProbeResult<S> res;
    res.K = K;
    res.N = N;
    res.max_degree = opts.max_degree ? std::min(*opts.max_degree, N) : probe_max_degree(h, N);
    const int n = h.n;
    const int top = res.max_degree;
    if (top < K + 1) {
        res.vacuous = true;
        return res;
    }
    const Linearization<S> lin(h, identity_map<S>(n, N), N);
    const auto unk = unknowns_between<S>(n, K + 1, top);
    std::vector<Series<S>> cols;
    for (const auto &u : unk) {
        cols.push_back(lin.column(u));
    }
    RowIndex<S> rows;
    std::size_t ncols = 0;
    for (int d = K + 1; d <= top; ++d) {
        while (ncols < unk.size() && unk[ncols].degree <= d) {
            ++ncols;
        }
        const int rmax = N;
        const auto M = real_matrix<S>(cols, ncols, rows, rmax, nullptr);
        const auto ker = kernel_of(M, opts.rank_tol);
        ProbeDegree info;
        info.degree = d;
        info.rows = static_cast<int>(M.rows);
        info.unknowns = static_cast<int>(ncols);
        info.rank = ker.rank;
        info.kernel_dim = static_cast<int>(ker.kernel.size());
        res.degrees.push_back(info);
        if (!ker.kernel.empty()) {
            res.determined = false;
            res.first_free_degree = d;
            const std::vector<Unknown<S>> used(unk.begin(), unk.begin() + static_cast<std::ptrdiff_t>(ncols));
            for (const auto &vec : ker.kernel) {
                res.kernel.push_back(perturbation_from<S>(used, vec, n, N, h.Q.tolerance()));
            }
            break;
        }
    }
    return res;
}

template <typename S>
HoloMap<S> generate_automorphism(const ComplexDefining<S> &h, int K, int N, const HoloMap<S> &direction,
                                 const ProbeOptions &opts)
{
    const int n = h.n;
    if (h.Q.trunc() < N) {
        throw TruncationError("defining function known to order " + std::to_string(h.Q.trunc())
                              + ", automorphism requested to order " + std::to_string(N));
    }
    HoloMap<S> H = identity_map<S>(n, N);
    for (auto &c : H.comps) {
        c = c.with_tolerance(h.Q.tolerance());
    }
    if (!direction.comps.empty()) {
        for (std::size_t c = 0; c < H.comps.size(); ++c) {
            const Series<S> &d = direction.comps[c];
            std::vector<Term<S>> low;
            for (const auto &t : d.terms()) {
                if (t.degree <= N) {
                    low.push_back(t);
                }
            }
            H.comps[c] += Series<S>::from_sorted(d.vars(), N, h.Q.tolerance(), std::move(low));
        }
    }
    if (!jet_is_identity(H, K)) {
        throw DomainError("direction changes the " + std::to_string(K) + "-jet of the identity");
    }
    // The free coordinates of the linearization at Id (the parameters of the
    // probe's kernel) keep the values given by the direction; without this the
    // iteration may drift to a degenerate solution such as G = 0.
    const int top = std::min(N, opts.max_degree ? *opts.max_degree : probe_max_degree(h, N));
    std::vector<Unknown<S>> unk;
    if (top >= K + 1) {
        const auto low = unknowns_between<S>(n, K + 1, top);
        const Linearization<S> lin0(h, identity_map<S>(n, N), N);
        std::vector<Series<S>> cols;
        for (const auto &u : low) {
            cols.push_back(lin0.column(u));
        }
        RowIndex<S> rows;
        const auto ker = kernel_of(real_matrix<S>(cols, cols.size(), rows, N, nullptr), opts.rank_tol);
        for (std::size_t c : ker.pivot_columns) {
            unk.push_back(low[c]);
        }
    }
    const auto high = unknowns_between<S>(n, std::max(K + 1, top + 1), N);
    unk.insert(unk.end(), high.begin(), high.end());
    // Highest degrees first: elimination then pivots on the high-degree unknowns and
    // leaves the already settled low degrees alone.
    std::stable_sort(unk.begin(), unk.end(), [](const Unknown<S> &a, const Unknown<S> &b) { return a.degree > b.degree; });
    RealOf<S> previous(-1);
    for (int iter = 0; iter <= 2 * N + 2; ++iter) {
        const Series<S> R = basic_identity_residual(H, h, h).truncated(N);
        if (R.is_zero()) {
            return H;
        }
        if constexpr (!ScalarTraits<S>::exact) {
            // Rounding can leave residuals a few orders above the coefficient
            // tolerance; stop once the iteration no longer improves them.
            const RealOf<S> size = max_abs_coeff(R);
            if (size <= h.Q.tolerance() * RealOf<S>(100000) && size * 2 >= previous) {
                return H;
            }
            previous = size;
        }
        const Linearization<S> lin(h, H, N);
        std::vector<Series<S>> cols;
        for (const auto &u : unk) {
            cols.push_back(lin.column(u));
        }
        RowIndex<S> rows;
        const auto M = real_matrix<S>(cols, cols.size(), rows, N, &R);
        auto x = augmented_solution(M, opts.rank_tol);
        if (!x) {
            if constexpr (ScalarTraits<S>::exact) {
                throw DomainError("linearized basic identity is inconsistent at order "
                                  + std::to_string(R.terms().front().degree)
                                  + " (no exact Newton step; the solution may need irrational coefficients)");
            } else {
                // Gauss-Newton step: the residual of a nearby non-automorphism need not lie
                // in the range of the truncated linearization.
                x = augmented_solution(normal_equations(M), opts.rank_tol);
                if (!x) {
                    throw DomainError("least-squares step failed at order " + std::to_string(R.terms().front().degree));
                }
            }
        }
        const HoloMap<S> P = perturbation_from<S>(unk, *x, n, N, h.Q.tolerance());
        for (std::size_t c = 0; c < H.comps.size(); ++c) {
            H.comps[c] += P.comps[c];
        }
    }
    throw DomainError("automorphism iteration did not close to order " + std::to_string(N));
}

#define CRJET_INSTANTIATE_CRSYSTEM(S)                                                                          \
    template CheckReport check_gw_real(const HoloMap<S> &, int);                                              \
    template AutomorphismSplit<S> split_automorphism(const HoloMap<S> &, int);                                \
    template ChartFunctions<S> chart_functions(const RealGraph<S> &, int);                                    \
    template Series<S> apply_field(const VectorField<S> &, const Series<S> &);                                \
    template VectorField<S> lie_bracket(const VectorField<S> &, const VectorField<S> &);                      \
    template CRFrame<S> cr_frame(const RealGraph<S> &, int);                                                  \
    template Commutators<S> commutators(const CRFrame<S> &);                                                  \
    template CheckReport reflection_check(const HoloMap<S> &, const RealGraph<S> &);                          \
    template int probe_max_degree(const ComplexDefining<S> &, int);                                           \
    template struct ProbeResult<S>;                                                                           \
    template ProbeResult<S> jet_determination_probe(const ComplexDefining<S> &, int, int, const ProbeOptions &); \
    template HoloMap<S> generate_automorphism(const ComplexDefining<S> &, int, int, const HoloMap<S> &,        \
                                              const ProbeOptions &);

CRJET_INSTANTIATE_CRSYSTEM(Gaussian)
CRJET_INSTANTIATE_CRSYSTEM(FloatComplex)

} // namespace crjet
