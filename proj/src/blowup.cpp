#include <crjet/blowup.hpp>
#include <crjet/errors.hpp>
#include <crjet/io.hpp>

#include <algorithm>

namespace crjet
{

BlowupExponents blowup_exponents(const std::vector<int> &b)
{
    if (b.empty()) {
        throw DomainError("blow-up exponents need at least one b_j");
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (b[j] < 0 || (j > 0 && b[j] > b[j - 1])) {
            throw DomainError("blow-up exponents need b_1 >= ... >= b_n >= 0");
        }
    }
    BlowupExponents e;
    e.threshold = 3 + 6 * b[0];
    for (int bj : b) {
        e.alphas.push_back(2 + 3 * b[0] - bj);
    }
    return e;
}

const VarList &preimage_vars(int n)
{
    static std::vector<VarList> cache;
    if (n < 1 || 2 * n + 2 > static_cast<int>(kMaxVars)) {
        throw DomainError("unsupported dimension " + std::to_string(n));
    }
    while (static_cast<int>(cache.size()) < n) {
        std::vector<std::string> names = real_vars(static_cast<int>(cache.size()) + 1).names();
        names.push_back("t");
        cache.emplace_back(std::move(names));
    }
    return cache[static_cast<std::size_t>(n - 1)];
}

namespace
{

template <typename S>
Series<S> var(const VarList &v, int trunc, const std::string &name)
{
    return Series<S>::variable(v, trunc, name);
}

template <typename S>
Series<S> padded(const Series<S> &f, int trunc)
{
    std::vector<Term<S>> terms = f.terms();
    return Series<S>::from_sorted(f.vars(), std::max(trunc, f.trunc()), f.tolerance(), std::move(terms));
}

template <typename S>
S half()
{
    return ScalarTraits<S>::from_rational(make_rational(1, 2));
}

// Order to which the preimage equation is determined by the data: theta_j and R
// enter through s' = s^2 - t^2 and z'_j = z_j w^{alpha_j}, each of degree >= 2.
template <typename S>
int preimage_trunc(const NormalFormData<S> &nf)
{
    return 2 * nf.R.trunc() + 1;
}

template <typename S>
void require_shape(const NormalFormData<S> &nf)
{
    if (static_cast<int>(nf.epsilons.size()) != nf.n || static_cast<int>(nf.exponents.size()) != nf.n
        || static_cast<int>(nf.thetas.size()) != nf.n) {
        throw IncompatibleSeries("normal-form data needs n epsilons, exponents and thetas");
    }
    if (nf.R.vars() != real_vars(nf.n)) {
        throw IncompatibleSeries("normal-form remainder must be a series over " + real_vars(nf.n).joined());
    }
}

} // namespace

template <typename S>
HoloMap<S> blowup_map(const std::vector<int> &alphas, int trunc)
{
    const int n = static_cast<int>(alphas.size());
    const VarList &v = map_vars(n);
    HoloMap<S> B;
    const Series<S> w = var<S>(v, trunc, "w");
    for (int j = 1; j <= n; ++j) {
        B.comps.push_back(var<S>(v, trunc, zname(j)) * power(w, alphas[static_cast<std::size_t>(j - 1)]));
    }
    B.comps.push_back(w * w);
    return B;
}

template <typename S>
Series<S> preimage_remainder(const NormalFormData<S> &nf)
{
    require_shape(nf);
    const int n = nf.n;
    const VarList &v = preimage_vars(n);
    const int Np = preimage_trunc(nf);
    const auto ex = blowup_exponents(nf.exponents);
    const Series<S> s = var<S>(v, Np, "s");
    const Series<S> t = var<S>(v, Np, "t");
    const Series<S> w = s + t * imag_unit<S>();
    const Series<S> wb = s - t * imag_unit<S>();
    Substitution<S> sub;
    for (int j = 1; j <= n; ++j) {
        const int a = ex.alphas[static_cast<std::size_t>(j - 1)];
        sub.emplace(zname(j), var<S>(v, Np, zname(j)) * power(w, a));
        sub.emplace(zbname(j), var<S>(v, Np, zbname(j)) * power(wb, a));
    }
    sub.emplace("s", s * s - t * t);
    return compose(nf.R, sub);
}

template <typename S>
Series<S> preimage_equation(const NormalFormData<S> &nf)
{
    require_shape(nf);
    const int n = nf.n;
    const VarList &v = preimage_vars(n);
    const int Np = preimage_trunc(nf);
    const auto ex = blowup_exponents(nf.exponents);
    const Series<S> s = var<S>(v, Np, "s");
    const Series<S> t = var<S>(v, Np, "t");
    const Series<S> sp = s * s - t * t;
    const Series<S> r2 = s * s + t * t;
    Series<S> P = s * t * S(2) - preimage_remainder(nf);
    for (int j = 1; j <= n; ++j) {
        const std::size_t k = static_cast<std::size_t>(j - 1);
        const int d = 2 + 2 * ex.alphas[k] + 2 * nf.exponents[k];
        // Homogeneous prefactor of degree d: the product is known to (order of theta(s')) + d.
        const Series<S> pre = var<S>(v, Np, zname(j)) * var<S>(v, Np, zbname(j)) * power(r2, ex.alphas[k])
                              * power(sp, nf.exponents[k]);
        const Series<S> th = compose(nf.thetas[k], Substitution<S>{{"s", sp}});
        const int known = std::min(Np, th.trunc() + d);
        P -= (pre * padded(th, Np)).truncated(known) * S(nf.epsilons[k]);
    }
    return P;
}

template <typename S>
BlowupData<S> solve_blowup(const NormalFormData<S> &nf)
{
    require_shape(nf);
    const int n = nf.n;
    const auto ex = blowup_exponents(nf.exponents);
    const int T = ex.threshold;
    const Series<S> P = preimage_equation(nf);
    // eta must be determined at least to degree 2 (its leading |z|^2 part).
    if (P.trunc() < T + 3) {
        throw TruncationError("blow-up needs the normal form to order at least "
                              + std::to_string((T + 3) / 2) + " (got " + std::to_string(nf.R.trunc()) + ")");
    }

    // E(z, zb, s, v) = P(z, zb, s, s^T v) / s^{T+1} = 2 v - (right-hand side).
    std::vector<std::string> names = real_vars(n).names();
    names.push_back("v");
    const VarList ev(names);
    Substitution<S> sub;
    for (const auto &name : real_vars(n).names()) {
        sub.emplace(name, var<S>(ev, P.trunc(), name));
    }
    Exponents sT(ev.size(), 0);
    sT[ev.index("s")] = T;
    sub.emplace("t", multiply_by_monomial(var<S>(ev, P.trunc() - T, "v"), sT));
    const Series<S> Pv = compose(P, sub);
    Exponents sT1(ev.size(), 0);
    sT1[ev.index("s")] = T + 1;
    const Series<S> E = divide_by_monomial(Pv, sT1);
    const int D = E.trunc();

    // Fixed point iteration v <- v - E(v)/2; the right-hand side depends on v
    // only through terms of positive order, so each step fixes at least one more degree.
    const VarList &rv = real_vars(n);
    Series<S> vk(rv, D, P.tolerance());
    int iterations = 0;
    for (; iterations <= D + 1; ++iterations) {
        Substitution<S> sv;
        for (const auto &name : rv.names()) {
            sv.emplace(name, var<S>(rv, D, name));
        }
        sv.emplace("v", vk);
        const Series<S> Ek = compose(E, sv);
        if (Ek.is_zero()) {
            break;
        }
        vk -= Ek * half<S>();
    }
    if (iterations > D + 1) {
        throw DomainError("blow-up fixed point iteration did not converge");
    }

    BlowupData<S> bd;
    bd.n = n;
    bd.epsilons = nf.epsilons;
    bd.alphas = ex.alphas;
    bd.threshold = T;
    bd.B = blowup_map<S>(ex.alphas, D + T);
    bd.eta = vk;
    Exponents e(rv.size(), 0);
    e.back() = T;
    bd.Mhat = RealGraph<S>{n, multiply_by_monomial(vk, e)};
    bd.certified_order = D;
    bd.fixed_point_iterations = iterations;
    return bd;
}

template <typename S>
CheckReport check_blowup_invariants(const BlowupData<S> &bd, const std::vector<int> &exponents)
{
    CheckReport r;
    r.trunc = bd.eta.trunc();
    auto fail = [&](const std::string &what) {
        r.ok = false;
        r.identity = what;
        return r;
    };
    if (exponents.size() != bd.alphas.size()) {
        return fail("one alpha per exponent");
    }
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        if (bd.alphas[j] < 2) {
            return fail("alpha_" + std::to_string(j + 1) + " >= 2");
        }
        if (2 * exponents[j] + 2 * bd.alphas[j] != 4 + 6 * exponents[0]) {
            return fail("2 b_" + std::to_string(j + 1) + " + 2 alpha_" + std::to_string(j + 1) + " = 4 + 6 b_1");
        }
    }
    if (bd.threshold != 3 + 6 * exponents[0]) {
        return fail("threshold = 3 + 6 b_1");
    }
    const int n = bd.n;
    const VarList &v = real_vars(n);
    const int N = bd.eta.trunc();
    Series<S> model(v, N, bd.eta.tolerance());
    for (int j = 1; j <= n; ++j) {
        model += var<S>(v, N, zname(j)) * var<S>(v, N, zbname(j))
                 * (half<S>() * S(bd.epsilons[static_cast<std::size_t>(j - 1)]));
    }
    auto at_s0 = report_zero(restrict_zero(bd.eta, {"s"}) - model, "eta(z, zb, 0) = 1/2 sum eps_j |z_j|^2");
    if (!at_s0.ok) {
        return at_s0;
    }
    std::vector<std::string> zs, zbs;
    for (int j = 1; j <= n; ++j) {
        zs.push_back(zname(j));
        zbs.push_back(zbname(j));
    }
    auto r1 = report_zero(restrict_zero(bd.eta, zbs), "eta(z, 0, s) = 0");
    if (!r1.ok) {
        return r1;
    }
    auto r2 = report_zero(restrict_zero(bd.eta, zs), "eta(0, zb, s) = 0");
    if (!r2.ok) {
        return r2;
    }
    return report_zero(bd.eta - formal_conjugate(bd.eta, [&] {
                           std::vector<std::pair<std::string, std::string>> p;
                           for (int j = 1; j <= n; ++j) {
                               p.emplace_back(zname(j), zbname(j));
                           }
                           return p;
                       }()),
                       "eta real");
}

template <typename S>
Series<S> blowup_membership_residual(const BlowupData<S> &bd, const NormalFormData<S> &nf)
{
    return graph_membership_residual(bd.B, bd.Mhat, normal_form_graph(nf));
}

template <typename S>
MhatForm<S> mhat_good_form(const BlowupData<S> &bd)
{
    MhatForm<S> out;
    const auto norm = normalize_good(real_to_complex(bd.Mhat));
    if (norm.m != bd.threshold) {
        throw DomainError("blown-up hypersurface has infinite type order " + std::to_string(norm.m) + ", expected "
                          + std::to_string(bd.threshold));
    }
    auto form = is_good_nonminimal(norm.h);
    if (!form) {
        throw DomainError("rescaled blown-up hypersurface is not in good nonminimal form");
    }
    out.h = norm.h;
    out.form = *form;
    out.scaling = norm.change;
    out.scales = norm.scales;
    return out;
}

template <typename S>
std::string format_blowup(const BlowupData<S> &bd)
{
    std::string out = "n: " + std::to_string(bd.n) + "\nepsilons: " + format_ints(bd.epsilons)
                      + "\nalphas: " + format_ints(bd.alphas) + "\nthreshold: " + std::to_string(bd.threshold)
                      + "\ncertified: " + std::to_string(bd.certified_order) + "\n";
    out += format_block("eta", bd.eta);
    out += format_block("phi", bd.Mhat.phi);
    return out;
}

template <typename S>
BlowupData<S> parse_blowup(const std::string &text)
{
    const Document doc = parse_document(text);
    BlowupData<S> bd;
    bd.n = doc.get_int("n");
    bd.epsilons = doc.get_ints("epsilons");
    bd.alphas = doc.get_ints("alphas");
    bd.threshold = doc.get_int("threshold");
    bd.certified_order = doc.get_int("certified");
    if (static_cast<int>(bd.alphas.size()) != bd.n || static_cast<int>(bd.epsilons.size()) != bd.n) {
        throw ParseError("epsilons and alphas need n entries each", doc.get("alphas").line);
    }
    const DocEntry &e = doc.get("eta");
    const DocEntry &p = doc.get("phi");
    try {
        bd.eta = embed(entry_series<S>(e), real_vars(bd.n));
        bd.Mhat = RealGraph<S>{bd.n, embed(entry_series<S>(p), real_vars(bd.n))};
    } catch (const ParseError &) {
        throw;
    } catch (const Error &err) {
        throw ParseError(std::string("eta and phi blocks must be series over ") + real_vars(bd.n).joined() + ": "
                             + err.what(),
                         e.block_line);
    }
    bd.B = blowup_map<S>(bd.alphas, bd.Mhat.phi.trunc());
    return bd;
}

#define CRJET_INSTANTIATE_BLOWUP(S)                                                                          \
    template HoloMap<S> blowup_map<S>(const std::vector<int> &, int);                                      \
    template Series<S> preimage_equation(const NormalFormData<S> &);                                        \
    template Series<S> preimage_remainder(const NormalFormData<S> &);                                       \
    template BlowupData<S> solve_blowup(const NormalFormData<S> &);                                         \
    template CheckReport check_blowup_invariants(const BlowupData<S> &, const std::vector<int> &);          \
    template Series<S> blowup_membership_residual(const BlowupData<S> &, const NormalFormData<S> &);        \
    template MhatForm<S> mhat_good_form(const BlowupData<S> &);                                             \
    template std::string format_blowup(const BlowupData<S> &);                                              \
    template BlowupData<S> parse_blowup<S>(const std::string &);

CRJET_INSTANTIATE_BLOWUP(Gaussian)
CRJET_INSTANTIATE_BLOWUP(FloatComplex)

} // namespace crjet
