#include <crjet/generators.hpp>

namespace crjet
{

FloatSeries to_float(const ExactSeries &f)
{
    std::vector<Term<FloatComplex>> terms;
    terms.reserve(f.size());
    for (const auto &t : f.terms()) {
        terms.push_back({t.key, t.degree,
                         FloatComplex(ScalarTraits<FloatComplex>::real_from_rational(t.coeff.re),
                                      ScalarTraits<FloatComplex>::real_from_rational(t.coeff.im))});
    }
    return FloatSeries::from_sorted(f.vars(), f.trunc(), ScalarTraits<FloatComplex>::default_tolerance(),
                                    std::move(terms));
}

HoloMap<FloatComplex> to_float(const HoloMap<Gaussian> &H)
{
    HoloMap<FloatComplex> out;
    for (const auto &c : H.comps) {
        out.comps.push_back(to_float(c));
    }
    return out;
}

RealGraph<FloatComplex> to_float(const RealGraph<Gaussian> &g)
{
    return {g.n, to_float(g.phi)};
}

ComplexDefining<FloatComplex> to_float(const ComplexDefining<Gaussian> &h)
{
    return {h.n, to_float(h.Q)};
}

SeriesMatrix<FloatComplex> to_float(const SeriesMatrix<Gaussian> &A)
{
    SeriesMatrix<FloatComplex> out(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (const auto &x : A[i]) {
            out[i].push_back(to_float(x));
        }
    }
    return out;
}

ExactSeries random_series(std::mt19937 &rng, const VarList &vars, int trunc, int nterms, int min_degree,
                          bool allow_complex)
{
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4), deg(min_degree, trunc);
    std::unordered_map<MonomialKey, Gaussian, MonomialKeyHash> acc;
    for (int k = 0; k < nterms; ++k) {
        const int d = deg(rng);
        Exponents e(vars.size(), 0);
        for (int j = 0; j < d; ++j) {
            e[std::uniform_int_distribution<std::size_t>(0, vars.size() - 1)(rng)]++;
        }
        Gaussian c(make_rational(num(rng), den(rng)), allow_complex ? make_rational(num(rng), den(rng)) : Rational(0));
        acc[pack_exponents(e)] += c;
    }
    return ExactSeries::from_terms(vars, trunc, Rational(0), std::move(acc));
}

RealGraph<Gaussian> random_normal_graph(std::mt19937 &rng, int n, int trunc, int nterms)
{
    const VarList &v = real_vars(n);
    ExactSeries phi(v, trunc);
    std::uniform_int_distribution<int> num(-3, 3), den(1, 3), deg(2, trunc);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (int j = 1; j <= n; ++j) {
        pairs.emplace_back(zname(j), zbname(j));
    }
    for (int k = 0; k < nterms; ++k) {
        Exponents e(v.size(), 0);
        const int d = deg(rng);
        e[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))] = 1;
        e[static_cast<std::size_t>(n + std::uniform_int_distribution<int>(0, n - 1)(rng))] = 1;
        for (int j = 2; j < d; ++j) {
            e[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]++;
        }
        Gaussian c(make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng)));
        const ExactSeries term = ExactSeries::monomial(v, trunc, e, c);
        phi += term + formal_conjugate(term, pairs);
    }
    return {n, phi};
}

SeriesMatrix<Gaussian> random_hermitian_family(std::mt19937 &rng, int n, int trunc)
{
    static const VarList s{"s"};
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    SeriesMatrix<Gaussian> A(static_cast<std::size_t>(n));
    for (auto &row : A) {
        row.assign(static_cast<std::size_t>(n), ExactSeries(s, trunc));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            ExactSeries x(s, trunc);
            for (int k = 0; k <= trunc; ++k) {
                Gaussian c(make_rational(num(rng), den(rng)), i == j ? Rational(0) : make_rational(num(rng), den(rng)));
                x += ExactSeries::monomial(s, trunc, Exponents{k}, c);
            }
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x;
            A[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = conj_series(x);
        }
    }
    return A;
}

RealGraph<Gaussian> graph_with_levi_matrix(const SeriesMatrix<Gaussian> &A, int trunc)
{
    const int n = static_cast<int>(A.size());
    const VarList &v = real_vars(n);
    ExactSeries phi(v, trunc);
    for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
            Exponents e(v.size(), 0);
            e[static_cast<std::size_t>(j - 1)] = 1;
            e[static_cast<std::size_t>(n + k - 1)] = 1;
            const ExactSeries a = rename(A[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)], {}, v);
            phi += multiply_by_monomial(a, e).truncated(trunc);
        }
    }
    return {n, phi};
}

} // namespace crjet
