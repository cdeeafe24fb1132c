#include <doctest.h>

#include <crjet/normalform.hpp>

#include "helpers.hpp"

using namespace crjet;
using namespace crjet::testing;

namespace
{

ExactSeries tv(int trunc, const Gaussian &c = q(1), int k = 1)
{
    return ExactSeries::monomial(t_vars(), trunc, Exponents{k}, c);
}

ExactSeries sv(int trunc, int k = 1, const Gaussian &c = q(1))
{
    return ExactSeries::monomial(s_vars(), trunc, Exponents{k}, c);
}

ComplexDefining<Gaussian> heisenberg(int trunc)
{
    return real_to_complex(levi_model<Gaussian>({1}, trunc));
}

const Real128 kFloatBound("1e-25");

} // namespace

TEST_CASE("curve membership and transversality")
{
    const int N = 6;
    auto g = levi_model<Gaussian>({1}, N);
    AnalyticCurve<Gaussian> on{{tv(N)}, tv(N) + tv(N, gq(0, 1, 1, 1), 2)};
    CHECK(curve_membership(g, on).ok);

    AnalyticCurve<Gaussian> off{{tv(N)}, tv(N)};
    auto r = curve_membership(g, off);
    CHECK_FALSE(r.ok);
    CHECK(r.defect_order == 2);
    CHECK(r.coefficient == "0 -1");
    CHECK_THROWS_AS(adapt_to_curve(heisenberg(N), off), DomainError);

    AnalyticCurve<Gaussian> tangent{{tv(N)}, tv(N, q(1), 2)};
    CHECK_THROWS_AS(adapt_to_curve(heisenberg(N), tangent), DomainError);

    // The same curve traversed at double speed is brought back to Re eta = t.
    AnalyticCurve<Gaussian> fast{{tv(N, q(2))}, tv(N, q(2)) + tv(N, gq(0, 1, 4, 1), 2)};
    auto norm = normalize_parametrization(fast);
    CHECK(norm.beta[0] == on.beta[0]);
    CHECK(norm.eta == on.eta);
}

TEST_CASE("adapt_to_curve")
{
    const int N = 6;
    SUBCASE("axis curve gives the identity change")
    {
        std::mt19937 rng(11);
        auto g = random_normal_graph(rng, 1, N);
        auto h = real_to_complex(g);
        AnalyticCurve<Gaussian> axis{{ExactSeries(t_vars(), N)}, tv(N)};
        auto out = adapt_to_curve(h, axis);
        CHECK(maps_equal(out.change, identity_map<Gaussian>(1, N)));
        CHECK(out.h.Q == h.Q);
    }
    SUBCASE("Heisenberg along beta = t")
    {
        auto h = heisenberg(N);
        AnalyticCurve<Gaussian> c{{tv(N)}, tv(N) + tv(N, gq(0, 1, 1, 1), 2)};
        auto out = adapt_to_curve(h, c);
        CHECK(out.normality.ok);
        CHECK(out.axis_image.ok);
        CHECK(check_normal(out.h).ok);
        CHECK(basic_identity_residual(out.change, out.h, h).is_zero());
    }
    SUBCASE("random graph and a curve on it")
    {
        std::mt19937 rng(3);
        auto g = random_normal_graph(rng, 2, N);
        auto h = real_to_complex(g);
        std::vector<ExactSeries> beta{tv(N, gq(1, 2, 1, 3)) + tv(N, q(2), 2), tv(N, q(-1, 3), 2)};
        // eta = t + i psi(beta, conj beta, t) puts the curve on the hypersurface.
        AnalyticCurve<Gaussian> c{beta, tv(N)};
        Substitution<Gaussian> sub;
        for (int j = 1; j <= 2; ++j) {
            sub.emplace(zname(j), beta[static_cast<std::size_t>(j - 1)]);
            sub.emplace(zbname(j), conj_series(beta[static_cast<std::size_t>(j - 1)]));
        }
        sub.emplace("s", tv(N));
        c.eta = tv(N) + compose(g.phi, sub) * Gaussian::i();
        auto out = adapt_to_curve(h, c);
        CHECK(out.normality.ok);
        CHECK(out.axis_image.ok);
        CHECK(basic_identity_residual(out.change, out.h, h).is_zero());
    }
}

TEST_CASE("Rellich: diagonal and closed-form families")
{
    const int N = 6;
    SUBCASE("diag(s, 1) is already diagonal")
    {
        SeriesMatrix<Gaussian> A{{sv(N), ExactSeries(s_vars(), N)}, {ExactSeries(s_vars(), N), sv(N, 0)}};
        auto r = rellich_diagonalize(A);
        CHECK(r.D[0] == sv(N));
        CHECK(r.D[1] == sv(N, 0));
        CHECK(r.U[0][0] == sv(N, 0));
        CHECK(r.U[0][1].is_zero());
        CHECK(unitarity_defect(r.U) == 0);
        CHECK(offdiagonal_defect(r.U, A) == 0);
    }
    SUBCASE("[[0,s],[s,0]] on the float backend")
    {
        SeriesMatrix<Gaussian> A{{ExactSeries(s_vars(), N), sv(N)}, {sv(N), ExactSeries(s_vars(), N)}};
        CHECK_THROWS_AS(rellich_diagonalize(A), BackendError);
        auto Af = to_float(A);
        auto r = rellich_diagonalize(Af);
        CHECK(unitarity_defect(r.U) < kFloatBound);
        CHECK(offdiagonal_defect(r.U, Af) < kFloatBound);
        CHECK(max_abs_coeff(r.D[0] - to_float(sv(N))) < kFloatBound);
        CHECK(max_abs_coeff(r.D[1] + to_float(sv(N))) < kFloatBound);
        // |U_jk| = 1/sqrt(2) for every entry.
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                auto u = r.U[i][j].constant_term();
                CHECK(boost::multiprecision::abs(norm2(u) - Real128("0.5")) < kFloatBound);
            }
        }
    }
    SUBCASE("[[1,s],[s,1]]")
    {
        SeriesMatrix<Gaussian> A{{sv(N, 0), sv(N)}, {sv(N), sv(N, 0)}};
        auto Af = to_float(A);
        auto r = rellich_diagonalize(Af);
        CHECK(offdiagonal_defect(r.U, Af) < kFloatBound);
        auto plus = to_float(sv(N, 0) + sv(N)), minus = to_float(sv(N, 0) - sv(N));
        const bool ordered = max_abs_coeff(r.D[0] - plus) < kFloatBound && max_abs_coeff(r.D[1] - minus) < kFloatBound;
        const bool swapped = max_abs_coeff(r.D[1] - plus) < kFloatBound && max_abs_coeff(r.D[0] - minus) < kFloatBound;
        CHECK((ordered || swapped));
    }
}

TEST_CASE("Rellich: random families and degeneracy")
{
    std::mt19937 rng(17);
    for (int k = 0; k < 6; ++k) {
        const int n = 2 + k % 2;
        auto A = to_float(random_hermitian_family(rng, n, 8));
        auto r = rellich_diagonalize(A);
        CHECK(unitarity_defect(r.U) < kFloatBound);
        CHECK(offdiagonal_defect(r.U, A) < kFloatBound);
        for (const auto &d : r.D) {
            CHECK(max_abs_coeff(d - conj_series(d)) < kFloatBound);
        }
    }
    // A crossing at s = 0 resolved at first order: s * [[1, 1], [1, 1]] + diag(0, s^2).
    SeriesMatrix<Gaussian> C{{sv(8), sv(8)}, {sv(8), sv(8) + sv(8, 2)}};
    auto Cf = to_float(C);
    auto rc = rellich_diagonalize(Cf);
    CHECK(offdiagonal_defect(rc.U, Cf) < kFloatBound);
    CHECK(unitarity_defect(rc.U) < kFloatBound);

    // V diag(1+s, 1+s, 2) V* with a non-diagonal constant unitary V: two
    // branches agree through the whole window.
    const int N = 6;
    CMatrix<Gaussian> V(3, 3);
    V(0, 0) = q(3, 5);
    V(0, 2) = q(4, 5);
    V(2, 0) = q(-4, 5);
    V(2, 2) = q(3, 5);
    V(1, 1) = q(1);
    SeriesMatrix<Gaussian> D = smat_zero<Gaussian>(s_vars(), N, 3);
    D[0][0] = sv(N, 0) + sv(N);
    D[1][1] = sv(N, 0) + sv(N);
    D[2][2] = sv(N, 0, q(2));
    auto Acoll = smat_mul_const(smat_const_mul(V, D), cmat_adjoint(V));
    REQUIRE_FALSE(Acoll[0][2].is_zero());
    CHECK_THROWS_AS(rellich_diagonalize(to_float(Acoll)), DegeneracyError);
    // Equal branches of a diagonal family are accepted as they stand.
    auto rd = rellich_diagonalize(D);
    CHECK(rd.persistent_clusters == std::vector<int>{2});
    CHECK(offdiagonal_defect(rd.U, D) == 0);
    // A near collision below the cluster tolerance cannot be split consistently.
    SeriesMatrix<Gaussian> Near{{sv(N, 0), sv(N)}, {sv(N), sv(N, 0) + ExactSeries::constant(s_vars(), N, Gaussian(Rational(1, 1) / Rational(mpz_class("1000000000000000000000000"))))}};
    CHECK_THROWS_AS(rellich_diagonalize(to_float(Near)), DegeneracyError);
}

TEST_CASE("normal form on diagonal inputs (exact)")
{
    const int N = 7;
    SUBCASE("Heisenberg")
    {
        auto g = levi_model<Gaussian>({1}, N);
        auto nf = normal_form(g);
        CHECK(nf.epsilons == std::vector<int>{1});
        CHECK(nf.exponents == std::vector<int>{0});
        CHECK(nf.thetas[0] == ExactSeries::constant(s_vars(), N - 2, q(1)));
        CHECK(nf.R.is_zero());
        CHECK(check_normal_form_shape(nf).ok);
        CHECK(normal_form_residual(nf, g).is_zero());
    }
    SUBCASE("s|z1|^2 - s^3|z2|^2 is sorted by interchanging z1 and z2")
    {
        const VarList &v = real_vars(2);
        auto s = ExactSeries::variable(v, N, "s");
        auto phi = s * ExactSeries::variable(v, N, "z1") * ExactSeries::variable(v, N, "zb1")
                   - power(s, 3) * ExactSeries::variable(v, N, "z2") * ExactSeries::variable(v, N, "zb2");
        RealGraph<Gaussian> g{2, phi};
        auto nf = normal_form(g);
        CHECK(nf.epsilons == std::vector<int>{-1, 1});
        CHECK(nf.exponents == std::vector<int>{3, 1});
        CHECK(nf.thetas[0] == ExactSeries::constant(s_vars(), N - 5, q(1)));
        CHECK(nf.thetas[1] == ExactSeries::constant(s_vars(), N - 3, q(1)));
        CHECK(nf.R.is_zero());
        // The change sends z1 to z2 and z2 to z1.
        CHECK(nf.change.F(0) == ExactSeries::variable(map_vars(2), N, "z2"));
        CHECK(nf.change.F(1) == ExactSeries::variable(map_vars(2), N, "z1"));
        CHECK(normal_form_residual(nf, g).is_zero());
    }
    SUBCASE("rescaling and a nontrivial theta and R")
    {
        const VarList &v = real_vars(1);
        auto s = ExactSeries::variable(v, N, "s");
        auto z = ExactSeries::variable(v, N, "z1"), zb = ExactSeries::variable(v, N, "zb1");
        auto phi = z * zb * s * s * (ExactSeries::constant(v, N, q(-4)) + s * q(3)) + z * z * zb * q(1, 2) + z * zb * zb * q(1, 2);
        RealGraph<Gaussian> g{1, phi};
        auto nf = normal_form(g);
        CHECK(nf.epsilons == std::vector<int>{-1});
        CHECK(nf.exponents == std::vector<int>{2});
        CHECK(nf.thetas[0] == sv(N - 4, 0) + sv(N - 4, 1, q(-3, 4)));
        CHECK(check_normal_form_shape(nf).ok);
        CHECK(normal_form_residual(nf, g).is_zero());
        CHECK_THROWS_AS(normal_form(RealGraph<Gaussian>{1, z * zb * q(2)}), BackendError);
    }
    SUBCASE("degenerate Levi form")
    {
        const VarList &v = real_vars(1);
        auto z = ExactSeries::variable(v, N, "z1"), zb = ExactSeries::variable(v, N, "zb1");
        CHECK_THROWS_AS(normal_form(RealGraph<Gaussian>{1, z * z * zb + z * zb * zb}), DomainError);
    }
}

TEST_CASE("normal form on the float backend")
{
    const int N = 7;
    SUBCASE("Levi head [[0,s],[s,0]]")
    {
        SeriesMatrix<Gaussian> A{{ExactSeries(s_vars(), N - 2), sv(N - 2)}, {sv(N - 2), ExactSeries(s_vars(), N - 2)}};
        auto g = graph_with_levi_matrix(A, N);
        std::mt19937 rng(23);
        auto tail = random_normal_graph(rng, 2, N, 4);
        // Keep only the (z, zb)-degree >= 3 part of the random tail.
        ExactSeries extra(real_vars(2), N);
        for (const auto &t : tail.phi.terms()) {
            int zdeg = 0;
            for (std::size_t i = 0; i < 4; ++i) {
                zdeg += key_exponent(t.key, i);
            }
            if (zdeg >= 3) {
                extra += ExactSeries::from_sorted(real_vars(2), N, Rational(0), {t});
            }
        }
        g.phi += extra;
        auto gf = to_float(g);
        auto nf = normal_form(gf);
        CHECK(nf.epsilons == std::vector<int>{1, -1});
        CHECK(nf.exponents == std::vector<int>{1, 1});
        CHECK(check_normal_form_shape(nf).ok);
        CHECK(max_abs_coeff(normal_form_residual(nf, gf)) < kFloatBound);
    }
    SUBCASE("random Hermitian Levi families")
    {
        std::mt19937 rng(29);
        for (int k = 0; k < 3; ++k) {
            auto A = random_hermitian_family(rng, 2, N - 2);
            auto gf = to_float(graph_with_levi_matrix(A, N));
            auto nf = normal_form(gf);
            CHECK(nf.exponents[0] >= nf.exponents[1]);
            CHECK(check_normal_form_shape(nf).ok);
            CHECK(max_abs_coeff(normal_form_residual(nf, gf)) < kFloatBound);
        }
    }
}

TEST_CASE("normal form serialization")
{
    const VarList &v = real_vars(2);
    const int N = 6;
    auto s = ExactSeries::variable(v, N, "s");
    auto phi = s * ExactSeries::variable(v, N, "z1") * ExactSeries::variable(v, N, "zb1")
               - power(s, 3) * ExactSeries::variable(v, N, "z2") * ExactSeries::variable(v, N, "zb2");
    auto nf = normal_form(RealGraph<Gaussian>{2, phi});
    auto back = parse_normal_form<Gaussian>(format_normal_form(nf));
    CHECK(back.epsilons == nf.epsilons);
    CHECK(back.exponents == nf.exponents);
    CHECK(back.thetas[0] == nf.thetas[0]);
    CHECK(back.R == nf.R);
    CHECK(maps_equal(back.change, nf.change));
}
