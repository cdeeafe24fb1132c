#include <doctest.h>

#include <crjet/blowup.hpp>

#include "helpers.hpp"

using namespace crjet;
using namespace crjet::testing;

namespace
{

template <typename S>
Series<S> rv(int n, int trunc, const std::string &name)
{
    return Series<S>::variable(real_vars(n), trunc, name);
}

// n = 1 normal form data with a nontrivial theta and remainder.
NormalFormData<Gaussian> decorated_nf(int b, int N)
{
    auto nf = model_normal_form<Gaussian>({1}, {b}, N);
    const auto s = ExactSeries::variable(s_vars(), nf.thetas[0].trunc(), "s");
    nf.thetas[0] = nf.thetas[0] + s * q(1, 3);
    const auto z = rv<Gaussian>(1, N, "z1");
    const auto zb = rv<Gaussian>(1, N, "zb1");
    const auto sr = rv<Gaussian>(1, N, "s");
    nf.R = (z * z * zb + z * zb * zb) * sr + power(z, 2) * power(zb, 2) * q(2);
    return nf;
}

// Float normal form of a random perturbation of s^b |z1|^2 + eps s^b' |z2|^2.
NormalFormData<FloatComplex> random_float_nf(std::mt19937 &rng, int N)
{
    auto g = random_normal_graph(rng, 2, N);
    std::vector<Term<Gaussian>> high;
    for (const auto &t : g.phi.terms()) {
        if (t.degree >= 5) {
            high.push_back(t);
        }
    }
    auto tail = ExactSeries::from_sorted(real_vars(2), N, Rational(0), std::move(high));
    auto s = rv<Gaussian>(2, N, "s");
    auto phi = s * rv<Gaussian>(2, N, "z1") * rv<Gaussian>(2, N, "zb1")
               - s * rv<Gaussian>(2, N, "z2") * rv<Gaussian>(2, N, "zb2") * q(2) + tail;
    return normal_form(to_float(RealGraph<Gaussian>{2, phi}));
}

} // namespace

TEST_CASE("blow-up exponents")
{
    auto e0 = blowup_exponents(std::vector<int>{0});
    CHECK(e0.alphas == std::vector<int>{2});
    CHECK(e0.threshold == 3);
    auto e1 = blowup_exponents(std::vector<int>{1});
    CHECK(e1.alphas == std::vector<int>{4});
    CHECK(e1.threshold == 9);
    auto e31 = blowup_exponents(std::vector<int>{3, 1});
    CHECK(e31.alphas == std::vector<int>{8, 10});
    CHECK(e31.threshold == 21);
    for (const auto &b : {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{3, 1}, std::vector<int>{2, 2, 0}}) {
        auto e = blowup_exponents(b);
        for (std::size_t j = 0; j < b.size(); ++j) {
            CHECK(2 * b[j] + 2 * e.alphas[j] == 4 + 6 * b[0]);
            CHECK(e.alphas[j] >= 2);
        }
    }
    CHECK_THROWS_AS(blowup_exponents(std::vector<int>{1, 3}), DomainError);
    CHECK_THROWS_AS(blowup_exponents(std::vector<int>{}), DomainError);
}

TEST_CASE("preimage of the b = 0 model")
{
    const int N = 6;
    auto nf = model_normal_form<Gaussian>({1}, {0}, N);
    auto P = preimage_equation(nf);
    const VarList &v = preimage_vars(1);
    const int Np = P.trunc();
    CHECK(Np == 2 * N + 1);
    auto s = var<Gaussian>(v, Np, "s");
    auto t = var<Gaussian>(v, Np, "t");
    auto zz = var<Gaussian>(v, Np, "z1") * var<Gaussian>(v, Np, "zb1");
    CHECK(P == s * t * q(2) - zz * power(s * s + t * t, 2));
}

TEST_CASE("blow-up of the b = 1 model")
{
    auto nf = model_normal_form<Gaussian>({1}, {1}, 16);
    auto bd = solve_blowup(nf);
    CHECK(bd.threshold == 9);
    CHECK(bd.certified_order == 2 * 16 - 9);
    const int D = bd.certified_order;
    auto z = rv<Gaussian>(1, D, "z1");
    auto zb = rv<Gaussian>(1, D, "zb1");
    auto s = rv<Gaussian>(1, D, "s");
    // 2v = |z|^2 (1 - s^16 v^2)(1 + s^16 v^2)^4 gives v = |z|^2/2 + 3/8 s^16 |z|^6 + O(s^32).
    CHECK(bd.eta == z * zb * q(1, 2) + power(s, 16) * power(z * zb, 3) * q(3, 8));
    CHECK(var_valuation(bd.eta - z * zb * q(1, 2), "s") == 16);
    CHECK(check_blowup_invariants(bd, nf.exponents).ok);
    CHECK(blowup_membership_residual(bd, nf).is_zero());
    CHECK(bd.Mhat.phi.trunc() == D + 9);
}

TEST_CASE("blow-up with theta and remainder, exact")
{
    for (int b : {0, 1}) {
        const int N = 8 + 3 * b;
        auto nf = decorated_nf(b, N);
        REQUIRE(check_normal_form_shape(nf).ok);
        auto Rt = preimage_remainder(nf);
        CHECK(Rt.valuation() >= 6 + 6 * b);
        auto bd = solve_blowup(nf);
        CHECK(bd.certified_order == 2 * N + 1 - bd.threshold - 1);
        CHECK(check_blowup_invariants(bd, nf.exponents).ok);
        auto res = blowup_membership_residual(bd, nf);
        CHECK(res.trunc() >= bd.certified_order + bd.threshold);
        CHECK(res.is_zero());

        // Perturbing eta below its top degree breaks membership (the top degree
        // itself only reaches the residual one order beyond its truncation).
        auto bad = bd;
        const int k = bd.certified_order - 1;
        Exponents e(real_vars(1).size(), 0);
        e[0] = 1;
        e[1] = 1;
        e[2] = k - 2;
        bad.eta = bd.eta + ExactSeries::monomial(real_vars(1), bd.certified_order, e, q(1, 7));
        Exponents sT(real_vars(1).size(), 0);
        sT[2] = bd.threshold;
        bad.Mhat.phi = multiply_by_monomial(bad.eta, sT);
        auto r = report_zero(blowup_membership_residual(bad, nf), "membership");
        CHECK_FALSE(r.ok);
        CHECK(r.defect_order <= bd.certified_order + bd.threshold);
    }
}

TEST_CASE("blown-up hypersurface is good nonminimal without rescaling")
{
    for (int b : {0, 1}) {
        auto nf = decorated_nf(b, 8 + 3 * b);
        auto bd = solve_blowup(nf);
        auto mf = mhat_good_form(bd);
        CHECK(mf.form.m == 3 + 6 * b);
        CHECK(mf.form.epsilons == nf.epsilons);
        CHECK(jet_is_identity(mf.scaling, mf.scaling.trunc()));
        CHECK(mf.scales == std::vector<Rational>{Rational(1)});
        CHECK(check_normal(mf.h).ok);
    }
}

TEST_CASE("blow-up of random float normal forms")
{
    std::mt19937 rng(77);
    for (int k = 0; k < 3; ++k) {
        auto nf = random_float_nf(rng, 8);
        auto bd = solve_blowup(nf);
        CHECK(bd.alphas == std::vector<int>{2 + 2 * nf.exponents[0] + nf.exponents[0] - nf.exponents[0],
                                            2 + 3 * nf.exponents[0] - nf.exponents[1]});
        CHECK(check_blowup_invariants(bd, nf.exponents).ok);
        CHECK(max_abs_coeff(blowup_membership_residual(bd, nf)) < Real128("1e-25"));
        auto mf = mhat_good_form(bd);
        CHECK(mf.form.m == bd.threshold);
    }
}

TEST_CASE("blow-up needs enough normal-form order")
{
    CHECK_THROWS_AS(solve_blowup(model_normal_form<Gaussian>({1}, {1}, 5)), TruncationError);
    CHECK(solve_blowup(model_normal_form<Gaussian>({1}, {1}, 6)).certified_order == 3);
}

TEST_CASE("blow-up serialization")
{
    auto bd = solve_blowup(decorated_nf(0, 7));
    auto back = parse_blowup<Gaussian>(format_blowup(bd));
    CHECK(back.n == bd.n);
    CHECK(back.alphas == bd.alphas);
    CHECK(back.threshold == bd.threshold);
    CHECK(back.certified_order == bd.certified_order);
    CHECK(back.eta == bd.eta);
    CHECK(back.Mhat.phi == bd.Mhat.phi);
    CHECK(maps_equal(back.B, bd.B));
    CHECK_THROWS_AS(parse_blowup<Gaussian>("n: 1\nepsilons: 1\nalphas: 2 3\nthreshold: 3\ncertified: 1\n"), ParseError);
}
