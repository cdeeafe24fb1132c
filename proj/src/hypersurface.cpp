#include <crjet/hypersurface.hpp>
#include <crjet/io.hpp>

namespace crjet
{

std::string CheckReport::describe() const
{
    if (ok) {
        return "holds to order " + std::to_string(trunc);
    }
    return identity + " fails at order " + std::to_string(defect_order) + " (monomial " + monomial + ", coefficient "
           + coefficient + "; checked to order " + std::to_string(trunc) + ")";
}

std::string InfiniteTypeResult::describe() const
{
    switch (kind) {
    case Kind::Minimal:
        return "minimal (Levi-nondegenerate part at s = 0) at truncation " + std::to_string(tested_trunc);
    case Kind::Order:
        return "infinite type of order m=" + std::to_string(m) + " at truncation " + std::to_string(tested_trunc);
    case Kind::Flat:
        break;
    }
    return "flat to truncation " + std::to_string(tested_trunc);
}

template <typename S>
CheckReport report_zero(const Series<S> &residual, const std::string &identity)
{
    CheckReport r;
    r.trunc = residual.trunc();
    if (residual.is_zero()) {
        return r;
    }
    const auto &t = residual.terms().front();
    r.ok = false;
    r.identity = identity;
    r.monomial = format_monomial(residual.vars(), t.key);
    r.defect_order = t.degree;
    r.coefficient = ScalarTraits<S>::format(t.coeff);
    return r;
}

namespace
{

template <typename S>
Series<S> var_of(const VarList &v, int trunc, const std::string &name)
{
    return Series<S>::variable(v, trunc, name);
}

std::vector<std::string> with_extra(const VarList &v, const std::string &extra)
{
    std::vector<std::string> names = v.names();
    names.push_back(extra);
    return names;
}

std::vector<std::string> z_names(int n)
{
    std::vector<std::string> out;
    for (int j = 1; j <= n; ++j) {
        out.push_back(zname(j));
    }
    return out;
}

std::vector<std::string> chi_names(int n)
{
    std::vector<std::string> out;
    for (int j = 1; j <= n; ++j) {
        out.push_back(chiname(j));
    }
    return out;
}

std::vector<std::string> zb_names(int n)
{
    std::vector<std::string> out;
    for (int j = 1; j <= n; ++j) {
        out.push_back(zbname(j));
    }
    return out;
}

template <typename S>
void require_vars(const Series<S> &f, const VarList &v, const std::string &what)
{
    if (f.vars() != v) {
        throw IncompatibleSeries(what + " must be a series over [" + v.joined() + "], got [" + f.vars().joined() + "]");
    }
}

} // namespace

template <typename S>
Series<S> conjugate_defining(const Series<S> &Q, int n)
{
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int j = 1; j <= n; ++j) {
        pairs.emplace_back(zname(j), chiname(j));
    }
    return formal_conjugate(Q, pairs);
}

template <typename S>
CheckReport check_normal(const ComplexDefining<S> &h)
{
    const VarList &v = q_vars(h.n);
    require_vars(h.Q, v, "Q");
    const Series<S> tau = var_of<S>(v, h.Q.trunc(), "tau");
    CheckReport r = report_zero(restrict_zero(h.Q, chi_names(h.n)) - tau, "Q(z,0,tau) = tau");
    if (!r.ok) {
        return r;
    }
    r = report_zero(restrict_zero(h.Q, z_names(h.n)) - tau, "Q(0,chi,tau) = tau");
    if (!r.ok) {
        return r;
    }
    const Series<S> Qbar = conjugate_defining(h.Q, h.n);
    return report_zero(compose(h.Q, Substitution<S>{{"tau", Qbar}}) - tau, "Q(z,chi,Qbar(chi,z,w)) = w");
}

template <typename S>
CheckReport check_reality(const RealGraph<S> &g)
{
    require_vars(g.phi, real_vars(g.n), "phi");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int j = 1; j <= g.n; ++j) {
        pairs.emplace_back(zname(j), zbname(j));
    }
    return report_zero(g.phi - formal_conjugate(g.phi, pairs), "phi = conj(phi)");
}

template <typename S>
CheckReport check_real_normal(const RealGraph<S> &g)
{
    require_vars(g.phi, real_vars(g.n), "phi");
    CheckReport r = report_zero(restrict_zero(g.phi, zb_names(g.n)), "phi(z,0,s) = 0");
    if (!r.ok) {
        return r;
    }
    return report_zero(restrict_zero(g.phi, z_names(g.n)), "phi(0,zb,s) = 0");
}

template <typename S>
ComplexDefining<S> real_to_complex(const RealGraph<S> &g)
{
    const int n = g.n;
    require_vars(g.phi, real_vars(n), "phi");
    if (!ScalarTraits<S>::negligible(g.phi.constant_term(), g.phi.tolerance())) {
        throw DomainError("phi(0) must vanish");
    }
    const int N = g.phi.trunc();
    const VarList ext(with_extra(q_vars(n), "u"));
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), var_of<S>(ext, N, zname(j)));
        sub.emplace(zbname(j), var_of<S>(ext, N, chiname(j)));
    }
    const S half = ScalarTraits<S>::from_rational(make_rational(1, 2));
    sub.emplace("s", var_of<S>(ext, N, "tau") + var_of<S>(ext, N, "u") * half);
    const Series<S> phi_ext = compose(g.phi, sub);
    // u - 2i phi(z, chi, tau + u/2) = 0, then Q = tau + u.
    const Series<S> F = var_of<S>(ext, N, "u") - phi_ext * (S(2) * imag_unit<S>());
    const Series<S> u = implicit_solve(F.with_tolerance(g.phi.tolerance()), "u");
    ComplexDefining<S> h;
    h.n = n;
    h.Q = var_of<S>(q_vars(n), N, "tau").with_tolerance(g.phi.tolerance()) + embed(u, q_vars(n));
    return h;
}

template <typename S>
RealGraph<S> complex_to_real(const ComplexDefining<S> &h)
{
    const int n = h.n;
    require_vars(h.Q, q_vars(n), "Q");
    const int N = h.Q.trunc();
    const VarList ext(with_extra(real_vars(n), "p"));
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), var_of<S>(ext, N, zname(j)));
        sub.emplace(chiname(j), var_of<S>(ext, N, zbname(j)));
    }
    const Series<S> s = var_of<S>(ext, N, "s");
    const Series<S> ip = var_of<S>(ext, N, "p") * imag_unit<S>();
    sub.emplace("tau", s - ip);
    // s + i p - Q(z, zb, s - i p) = 0.
    const Series<S> F = s + ip - compose(h.Q, sub);
    const Series<S> p = implicit_solve(F.with_tolerance(h.Q.tolerance()), "p");
    RealGraph<S> g;
    g.n = n;
    g.phi = embed(p, real_vars(n));
    return g;
}

template <typename S>
std::vector<std::vector<Series<S>>> levi_matrix_along_axis(const RealGraph<S> &g)
{
    const int n = g.n;
    require_vars(g.phi, real_vars(n), "phi");
    static const VarList svar{"s"};
    std::vector<std::string> zs = z_names(n), zbs = zb_names(n);
    std::vector<std::string> all = zs;
    all.insert(all.end(), zbs.begin(), zbs.end());
    std::vector<std::vector<Series<S>>> A(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const Series<S> dj = partial(g.phi, zname(j));
        for (int k = 1; k <= n; ++k) {
            const Series<S> djk = partial(dj, zbname(k));
            A[static_cast<std::size_t>(j - 1)].push_back(embed(restrict_zero(djk, all), svar));
        }
    }
    return A;
}

template <typename S>
InfiniteTypeResult infinite_type_order(const RealGraph<S> &g)
{
    require_vars(g.phi, real_vars(g.n), "phi");
    InfiniteTypeResult r;
    r.tested_trunc = g.phi.trunc();
    if (g.phi.is_zero()) {
        r.kind = InfiniteTypeResult::Kind::Flat;
        return r;
    }
    const int m = var_valuation(g.phi, "s");
    if (m == 0) {
        r.kind = InfiniteTypeResult::Kind::Minimal;
        return r;
    }
    r.kind = InfiniteTypeResult::Kind::Order;
    r.m = m;
    return r;
}

template <typename S>
std::optional<GoodNonminimalForm<S>> is_good_nonminimal(const ComplexDefining<S> &h)
{
    const int n = h.n;
    const VarList &v = q_vars(n);
    require_vars(h.Q, v, "Q");
    const int N = h.Q.trunc();
    const Series<S> rest = h.Q - var_of<S>(v, N, "tau");
    if (rest.is_zero()) {
        return std::nullopt;
    }
    const int m = var_valuation(rest, "tau");
    if (m < 1 || m + 2 > N) {
        return std::nullopt;
    }
    const Series<S> c = coefficient_of(rest, "tau", m);
    GoodNonminimalForm<S> f;
    f.m = m;
    Series<S> form(v, c.trunc());
    for (int j = 1; j <= n; ++j) {
        Exponents e(v.size(), 0);
        e[static_cast<std::size_t>(j - 1)] = 1;
        e[static_cast<std::size_t>(n + j - 1)] = 1;
        const S cj = c.coeff(e);
        if (cj == imag_unit<S>()) {
            f.epsilons.push_back(1);
        } else if (cj == -imag_unit<S>()) {
            f.epsilons.push_back(-1);
        } else {
            return std::nullopt;
        }
        form += Series<S>::monomial(v, c.trunc(), e, cj);
    }
    if (!(c - form).is_zero()) {
        return std::nullopt;
    }
    Exponents tm(v.size(), 0);
    tm.back() = m;
    const Series<S> tail = rest - multiply_by_monomial(form, tm).truncated(N);
    Exponents tm1(v.size(), 0);
    tm1.back() = m + 1;
    try {
        f.Theta = divide_by_monomial(tail, tm1);
    } catch (const DomainError &) {
        return std::nullopt;
    }
    return f;
}

template <typename S>
ComplexDefining<S> reconstruct_good(const GoodNonminimalForm<S> &f, int trunc)
{
    const int n = static_cast<int>(f.epsilons.size());
    const VarList &v = q_vars(n);
    Series<S> form(v, trunc);
    for (int j = 1; j <= n; ++j) {
        Exponents e(v.size(), 0);
        e[static_cast<std::size_t>(j - 1)] = 1;
        e[static_cast<std::size_t>(n + j - 1)] = 1;
        e.back() = f.m;
        form += Series<S>::monomial(v, trunc, e, imag_unit<S>() * S(f.epsilons[static_cast<std::size_t>(j - 1)]));
    }
    Exponents tm1(v.size(), 0);
    tm1.back() = f.m + 1;
    ComplexDefining<S> h;
    h.n = n;
    h.Q = var_of<S>(v, trunc, "tau") + form;
    const Series<S> t = multiply_by_monomial(f.Theta, tm1);
    if (t.trunc() < trunc) {
        throw TruncationError("Theta is not known to the requested order");
    }
    h.Q += t.truncated(trunc);
    return h;
}

template <typename S>
NormalizedGood<S> normalize_good(const ComplexDefining<S> &h)
{
    const int n = h.n;
    const VarList &v = q_vars(n);
    require_vars(h.Q, v, "Q");
    const int N = h.Q.trunc();
    const Series<S> rest = h.Q - var_of<S>(v, N, "tau");
    if (rest.is_zero()) {
        throw DomainError("Q = tau: no tau^m coefficient to normalize");
    }
    const int m = var_valuation(rest, "tau");
    if (m < 1) {
        throw DomainError("Q - tau has a tau-free part; the hypersurface is not nonminimal in this chart");
    }
    const Series<S> c = coefficient_of(rest, "tau", m);
    NormalizedGood<S> out;
    out.m = m;
    Series<S> diag(v, c.trunc());
    const RealOf<S> &tol = h.Q.tolerance();
    for (int j = 1; j <= n; ++j) {
        Exponents e(v.size(), 0);
        e[static_cast<std::size_t>(j - 1)] = 1;
        e[static_cast<std::size_t>(n + j - 1)] = 1;
        const S cj = c.coeff(e);
        // cj = i * eps_j * c_j with c_j > 0.
        const S r = cj / imag_unit<S>();
        if (!ScalarTraits<S>::negligible_real(r.im, tol)) {
            throw DomainError("tau^m coefficient of z" + std::to_string(j) + " chi" + std::to_string(j)
                              + " is not i times a real number");
        }
        if (ScalarTraits<S>::negligible_real(r.re, tol)) {
            throw DomainError("degenerate tau^m coefficient for z" + std::to_string(j));
        }
        const int eps = r.re < 0 ? -1 : 1;
        const RealOf<S> cmag = eps < 0 ? RealOf<S>(-r.re) : r.re;
        out.epsilons.push_back(eps);
        out.scales.push_back(cmag);
        diag += Series<S>::monomial(v, c.trunc(), e, cj);
    }
    if (!(c - diag).is_zero()) {
        throw DomainError("tau^m coefficient is not a diagonal Hermitian form in (z, chi)");
    }
    // Substitute z_j -> z_j / sqrt(c_j) (and chi_j likewise).
    const VarList &mv = map_vars(n);
    HoloMap<S> change = identity_map<S>(n, N);
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        auto root = ScalarTraits<S>::sqrt(out.scales[static_cast<std::size_t>(j - 1)]);
        if (!root) {
            throw BackendError("rescaling factor sqrt(" + ScalarTraits<S>::format(S(out.scales[j - 1]))
                               + ") is irrational; use the float backend");
        }
        const S inv = S(1) / S(*root);
        change.comps[static_cast<std::size_t>(j - 1)] = Series<S>::variable(mv, N, zname(j), inv);
        sub.emplace(zname(j), Series<S>::variable(v, N, zname(j), inv));
        sub.emplace(chiname(j), Series<S>::variable(v, N, chiname(j), inv));
    }
    out.h.n = n;
    out.h.Q = compose(h.Q, sub);
    out.change = change;
    return out;
}

template <typename S>
std::vector<Series<S>> apply_conjugate_map(const HoloMap<S> &H, const std::vector<Series<S>> &args,
                                           std::optional<int> trunc)
{
    HoloMap<S> Hb;
    for (const auto &c : H.comps) {
        Hb.comps.push_back(conj_series(c));
    }
    return apply_map(Hb, args, trunc);
}

template <typename S>
ComplexDefining<S> transform(const ComplexDefining<S> &h, const HoloMap<S> &Phi)
{
    const int n = h.n;
    require_vars(h.Q, q_vars(n), "Q");
    if (Phi.n() != n) {
        throw IncompatibleSeries("transform: map dimension does not match the hypersurface");
    }
    const int N = std::min(h.Q.trunc(), Phi.trunc());
    const VarList ext(with_extra(q_vars(n), "w"));
    std::vector<Series<S>> zw, chitau;
    for (int j = 1; j <= n; ++j) {
        zw.push_back(var_of<S>(ext, N, zname(j)));
        chitau.push_back(var_of<S>(ext, N, chiname(j)));
    }
    zw.push_back(var_of<S>(ext, N, "w"));
    chitau.push_back(var_of<S>(ext, N, "tau"));
    const auto P = apply_map(Phi, zw);
    const auto Pb = apply_conjugate_map(Phi, chitau);
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), P[static_cast<std::size_t>(j - 1)]);
        sub.emplace(chiname(j), Pb[static_cast<std::size_t>(j - 1)]);
    }
    sub.emplace("tau", Pb.back());
    const Series<S> E = P.back() - compose(h.Q, sub);
    const Series<S> w = implicit_solve(E.truncated(std::min(E.trunc(), N)).with_tolerance(h.Q.tolerance()), "w");
    ComplexDefining<S> out;
    out.n = n;
    out.Q = embed(w, q_vars(n));
    return out;
}

template <typename S>
RealGraph<S> transform_graph(const RealGraph<S> &g, const HoloMap<S> &Phi)
{
    const int n = g.n;
    require_vars(g.phi, real_vars(n), "phi");
    if (Phi.n() != n) {
        throw IncompatibleSeries("transform_graph: map dimension does not match the hypersurface");
    }
    const int N = std::min(g.phi.trunc(), Phi.trunc());
    const VarList ext(with_extra(real_vars(n), "p"));
    const Series<S> s = var_of<S>(ext, N, "s");
    const Series<S> ip = var_of<S>(ext, N, "p") * imag_unit<S>();
    std::vector<Series<S>> args, bargs;
    for (int j = 1; j <= n; ++j) {
        args.push_back(var_of<S>(ext, N, zname(j)));
        bargs.push_back(var_of<S>(ext, N, zbname(j)));
    }
    args.push_back(s + ip);
    bargs.push_back(s - ip);
    const auto P = apply_map(Phi, args);
    const auto Pb = apply_conjugate_map(Phi, bargs);
    const S half = ScalarTraits<S>::from_rational(make_rational(1, 2));
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), P[static_cast<std::size_t>(j - 1)]);
        sub.emplace(zbname(j), Pb[static_cast<std::size_t>(j - 1)]);
    }
    sub.emplace("s", (P.back() + Pb.back()) * half);
    const Series<S> E = (P.back() - Pb.back()) * (half / imag_unit<S>()) - compose(g.phi, sub);
    const Series<S> p = implicit_solve(E.truncated(std::min(E.trunc(), N)).with_tolerance(g.phi.tolerance()), "p");
    RealGraph<S> out;
    out.n = n;
    out.phi = embed(p, real_vars(n));
    return out;
}

template <typename S>
Series<S> basic_identity_residual(const HoloMap<S> &H, const ComplexDefining<S> &src, const ComplexDefining<S> &tgt)
{
    const int n = src.n;
    const VarList &v = q_vars(n);
    require_vars(src.Q, v, "source Q");
    require_vars(tgt.Q, v, "target Q");
    const int N = std::min({src.Q.trunc(), tgt.Q.trunc(), H.trunc()});
    std::vector<Series<S>> args, bargs;
    for (int j = 1; j <= n; ++j) {
        args.push_back(var_of<S>(v, N, zname(j)));
        bargs.push_back(var_of<S>(v, N, chiname(j)));
    }
    args.push_back(src.Q.truncated(N));
    bargs.push_back(var_of<S>(v, N, "tau"));
    const auto HF = apply_map(H, args);
    const auto HB = apply_conjugate_map(H, bargs);
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), HF[static_cast<std::size_t>(j - 1)]);
        sub.emplace(chiname(j), HB[static_cast<std::size_t>(j - 1)]);
    }
    sub.emplace("tau", HB.back());
    return HF.back() - compose(tgt.Q, sub);
}

template <typename S>
Series<S> graph_membership_residual(const HoloMap<S> &H, const RealGraph<S> &src, const RealGraph<S> &tgt)
{
    const int n = src.n;
    const VarList &v = real_vars(n);
    require_vars(src.phi, v, "source phi");
    require_vars(tgt.phi, v, "target phi");
    // The target enters through composition, which caps the result at the order
    // it determines; H may raise degrees, so tgt.phi.trunc() is not a bound here.
    const int N = std::min(src.phi.trunc(), H.trunc());
    const Series<S> s = var_of<S>(v, N, "s");
    const Series<S> iphi = src.phi.truncated(N) * imag_unit<S>();
    std::vector<Series<S>> args, bargs;
    for (int j = 1; j <= n; ++j) {
        args.push_back(var_of<S>(v, N, zname(j)));
        bargs.push_back(var_of<S>(v, N, zbname(j)));
    }
    args.push_back(s + iphi);
    bargs.push_back(s - iphi);
    const auto HF = apply_map(H, args);
    const auto HB = apply_conjugate_map(H, bargs);
    const S half = ScalarTraits<S>::from_rational(make_rational(1, 2));
    const Series<S> ImW = (HF.back() - HB.back()) * (half / imag_unit<S>());
    const Series<S> ReW = (HF.back() + HB.back()) * half;
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        sub.emplace(zname(j), HF[static_cast<std::size_t>(j - 1)]);
        sub.emplace(zbname(j), HB[static_cast<std::size_t>(j - 1)]);
    }
    sub.emplace("s", ReW);
    return ImW - compose(tgt.phi, sub);
}

template <typename S>
RealGraph<S> levi_model(const std::vector<int> &eps, int trunc)
{
    const int n = static_cast<int>(eps.size());
    const VarList &v = real_vars(n);
    RealGraph<S> g;
    g.n = n;
    g.phi = Series<S>(v, trunc);
    for (int j = 1; j <= n; ++j) {
        g.phi += var_of<S>(v, trunc, zname(j)) * var_of<S>(v, trunc, zbname(j)) * S(eps[j - 1]);
    }
    return g;
}

template <typename S>
RealGraph<S> nonminimal_model(int m, const std::vector<int> &eps, int trunc)
{
    RealGraph<S> g = levi_model<S>(eps, trunc);
    const VarList &v = real_vars(g.n);
    Exponents e(v.size(), 0);
    e.back() = m;
    g.phi = (g.phi * Series<S>::monomial(v, trunc, e, ScalarTraits<S>::from_rational(make_rational(1, 2))));
    return g;
}

template <typename S>
HypersurfaceFile<S> parse_hypersurface(const std::string &text)
{
    const Document doc = parse_document(text);
    HypersurfaceFile<S> f;
    f.n = doc.get_int("n");
    if (f.n < 1 || f.n > 7) {
        throw ParseError("n must be between 1 and 7", doc.get("n").line);
    }
    const DocEntry *q = doc.find("Q");
    const DocEntry *p = doc.find("phi");
    if ((q == nullptr) == (p == nullptr)) {
        throw ParseError("hypersurface file needs exactly one of 'Q:' or 'phi:'", 0);
    }
    const DocEntry &e = q ? *q : *p;
    Series<S> series = entry_series<S>(e);
    f.trunc = doc.find("trunc") ? doc.get_int("trunc") : series.trunc();
    if (f.trunc > series.trunc()) {
        throw ParseError("trunc header exceeds the series truncation order", doc.get("trunc").line);
    }
    if (f.trunc < 2) {
        throw ParseError("trunc must be at least 2", doc.find("trunc") ? doc.get("trunc").line : e.line);
    }
    const VarList &target = q ? q_vars(f.n) : real_vars(f.n);
    try {
        series = embed(series, target).truncated(f.trunc);
    } catch (const Error &err) {
        throw ParseError(std::string("series variables do not fit [") + target.joined() + "]: " + err.what(),
                         e.block_line);
    }
    if (q) {
        f.complex = ComplexDefining<S>{f.n, series};
    } else {
        f.real = RealGraph<S>{f.n, series};
    }
    return f;
}

template <typename S>
std::string format_hypersurface(const ComplexDefining<S> &h)
{
    return "n: " + std::to_string(h.n) + "\ntrunc: " + std::to_string(h.Q.trunc()) + "\n" + format_block("Q", h.Q);
}

template <typename S>
std::string format_hypersurface(const RealGraph<S> &g)
{
    return "n: " + std::to_string(g.n) + "\ntrunc: " + std::to_string(g.phi.trunc()) + "\n"
           + format_block("phi", g.phi);
}

#define CRJET_INSTANTIATE_HYPERSURFACE(S)                                                                        \
    template struct ComplexDefining<S>;                                                                        \
    template struct RealGraph<S>;                                                                              \
    template CheckReport report_zero(const Series<S> &, const std::string &);                                  \
    template CheckReport check_normal(const ComplexDefining<S> &);                                             \
    template CheckReport check_reality(const RealGraph<S> &);                                                  \
    template CheckReport check_real_normal(const RealGraph<S> &);                                              \
    template ComplexDefining<S> real_to_complex(const RealGraph<S> &);                                         \
    template RealGraph<S> complex_to_real(const ComplexDefining<S> &);                                         \
    template Series<S> conjugate_defining(const Series<S> &, int);                                             \
    template std::vector<std::vector<Series<S>>> levi_matrix_along_axis(const RealGraph<S> &);                 \
    template InfiniteTypeResult infinite_type_order(const RealGraph<S> &);                                     \
    template std::optional<GoodNonminimalForm<S>> is_good_nonminimal(const ComplexDefining<S> &);              \
    template ComplexDefining<S> reconstruct_good(const GoodNonminimalForm<S> &, int);                          \
    template NormalizedGood<S> normalize_good(const ComplexDefining<S> &);                                     \
    template ComplexDefining<S> transform(const ComplexDefining<S> &, const HoloMap<S> &);                     \
    template Series<S> basic_identity_residual(const HoloMap<S> &, const ComplexDefining<S> &,                 \
                                               const ComplexDefining<S> &);                                    \
    template Series<S> graph_membership_residual(const HoloMap<S> &, const RealGraph<S> &, const RealGraph<S> &); \
    template RealGraph<S> transform_graph(const RealGraph<S> &, const HoloMap<S> &);                           \
    template std::vector<Series<S>> apply_conjugate_map(const HoloMap<S> &, const std::vector<Series<S>> &,    \
                                                        std::optional<int>);                                   \
    template RealGraph<S> levi_model<S>(const std::vector<int> &, int);                                        \
    template RealGraph<S> nonminimal_model<S>(int, const std::vector<int> &, int);                             \
    template HypersurfaceFile<S> parse_hypersurface<S>(const std::string &);                                   \
    template std::string format_hypersurface(const ComplexDefining<S> &);                                      \
    template std::string format_hypersurface(const RealGraph<S> &);

CRJET_INSTANTIATE_HYPERSURFACE(Gaussian)
CRJET_INSTANTIATE_HYPERSURFACE(FloatComplex)

} // namespace crjet
