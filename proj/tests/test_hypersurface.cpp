#include <doctest.h>

#include <crjet/hypersurface.hpp>
#include <crjet/io.hpp>

#include "helpers.hpp"

using namespace crjet;
using namespace crjet::testing;

namespace
{

ExactSeries qv(int n, int trunc, const std::string &name)
{
    return ExactSeries::variable(q_vars(n), trunc, name);
}

ExactSeries rv(int n, int trunc, const std::string &name)
{
    return ExactSeries::variable(real_vars(n), trunc, name);
}

ComplexDefining<Gaussian> heisenberg_Q(int trunc)
{
    return {1, qv(1, trunc, "tau") + qv(1, trunc, "z1") * qv(1, trunc, "chi1") * gq(0, 1, 2, 1)};
}

} // namespace

TEST_CASE("check_normal on the basic examples")
{
    CHECK(check_normal(ComplexDefining<Gaussian>{1, qv(1, 6, "tau")}).ok);
    CHECK(check_normal(heisenberg_Q(6)).ok);
    auto bad = ComplexDefining<Gaussian>{1, qv(1, 6, "tau") + qv(1, 6, "z1") * qv(1, 6, "chi1")};
    auto r = check_normal(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.defect_order == 2);
    CHECK(r.monomial == "z1*chi1");
    CHECK(r.coefficient == "2 0");
}

TEST_CASE("real_to_complex and complex_to_real")
{
    auto g = levi_model<Gaussian>({1}, 6);
    auto h = real_to_complex(g);
    CHECK(h.Q == heisenberg_Q(6).Q);
    CHECK(complex_to_real(heisenberg_Q(6)).phi == g.phi);
    CHECK(real_to_complex(RealGraph<Gaussian>{1, ExactSeries(real_vars(1), 5)}).Q == qv(1, 5, "tau"));
    CHECK(complex_to_real(ComplexDefining<Gaussian>{1, qv(1, 5, "tau")}).phi.is_zero());
}

TEST_CASE("random normal graphs round trip exactly")
{
    std::mt19937 rng(2024);
    for (int k = 0; k < 10; ++k) {
        const int n = 1 + k % 2;
        auto g = random_normal_graph(rng, n, 6);
        REQUIRE(check_reality(g).ok);
        REQUIRE(check_real_normal(g).ok);
        auto h = real_to_complex(g);
        CHECK(check_normal(h).ok);
        CHECK(complex_to_real(h).phi == g.phi);
    }
}

TEST_CASE("nonminimal models")
{
    // m = 1: Q = tau (2 + i z chi) / (2 - i z chi). Its tau coefficient carries
    // (z chi)^2 terms, so the literal good-nonminimal shape is not met; for
    // m = 1 that shape is incompatible with normal coordinates altogether.
    auto h1 = real_to_complex(nonminimal_model<Gaussian>(1, {1}, 8));
    CHECK(check_normal(h1).ok);
    auto zc = qv(1, 8, "z1") * qv(1, 8, "chi1") * Gaussian::i();
    auto two = ExactSeries::constant(q_vars(1), 8, q(2));
    CHECK(h1.Q == qv(1, 8, "tau") * (two + zc) * reciprocal(two - zc));
    CHECK_FALSE(is_good_nonminimal(h1).has_value());

    // m = 2: literally good nonminimal.
    auto h2 = real_to_complex(nonminimal_model<Gaussian>(2, {1}, 8));
    CHECK(check_normal(h2).ok);
    auto f = is_good_nonminimal(h2);
    REQUIRE(f.has_value());
    CHECK(f->m == 2);
    CHECK(f->epsilons == std::vector<int>{1});
    CHECK(reconstruct_good(*f, 8).Q == h2.Q);
}

TEST_CASE("is_good_nonminimal examples")
{
    CHECK_FALSE(is_good_nonminimal(heisenberg_Q(6)).has_value());
    auto t1 = qv(1, 6, "tau");
    auto lit = is_good_nonminimal(ComplexDefining<Gaussian>{1, t1 + t1 * qv(1, 6, "z1") * qv(1, 6, "chi1") * Gaussian::i()});
    REQUIRE(lit.has_value());
    CHECK(lit->m == 1);
    CHECK(lit->Theta.is_zero());
    const int N = 8;
    auto tau = qv(2, N, "tau");
    auto form = (qv(2, N, "z1") * qv(2, N, "chi1") - qv(2, N, "z2") * qv(2, N, "chi2")) * Gaussian::i();
    auto Q = tau + tau * tau * form + power(tau, 3) * qv(2, N, "z1") * qv(2, N, "chi1") * q(5);
    auto f = is_good_nonminimal(ComplexDefining<Gaussian>{2, Q});
    REQUIRE(f.has_value());
    CHECK(f->m == 2);
    CHECK(f->epsilons == std::vector<int>{1, -1});
    CHECK(f->Theta == qv(2, N - 3, "z1") * qv(2, N - 3, "chi1") * q(5));
    // A tau^m coefficient with the wrong scale is not recognized.
    CHECK_FALSE(is_good_nonminimal(ComplexDefining<Gaussian>{2, tau + tau * tau * form * q(2)}).has_value());
}

TEST_CASE("normalize_good rescales")
{
    const int N = 8;
    auto tau = qv(1, N, "tau");
    auto zc = qv(1, N, "z1") * qv(1, N, "chi1");
    auto h = ComplexDefining<Gaussian>{1, tau + tau * zc * gq(0, 1, 4, 1)};
    auto out = normalize_good(h);
    CHECK(out.m == 1);
    CHECK(out.change.F(0) == ExactSeries::variable(map_vars(1), N, "z1", q(1, 2)));
    CHECK(is_good_nonminimal(out.h).has_value());

    auto already = normalize_good(ComplexDefining<Gaussian>{1, tau + tau * zc * Gaussian::i()});
    CHECK(jet_is_identity(already.change, N));

    auto irr = ComplexDefining<Gaussian>{1, tau + tau * zc * gq(0, 1, 1, 2)};
    CHECK_THROWS_AS(normalize_good(irr), BackendError);
}

TEST_CASE("Levi matrix along the axis")
{
    const int N = 8;
    auto phi = rv(2, N, "s") * rv(2, N, "z1") * rv(2, N, "zb1") - power(rv(2, N, "s"), 3) * rv(2, N, "z2") * rv(2, N, "zb2");
    auto A = levi_matrix_along_axis(RealGraph<Gaussian>{2, phi});
    const VarList s{"s"};
    CHECK(A[0][0] == ExactSeries::variable(s, N - 2, "s"));
    CHECK(A[1][1] == power(ExactSeries::variable(s, N - 2, "s"), 3) * q(-1));
    CHECK(A[0][1].is_zero());
    CHECK(levi_matrix_along_axis(levi_model<Gaussian>({1}, 4))[0][0] == ExactSeries::constant(s, 2, q(1)));

    std::mt19937 rng(5);
    auto g = random_normal_graph(rng, 2, 6);
    auto B = levi_matrix_along_axis(g);
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            CHECK(B[j][k] == conj_series(B[k][j]));
        }
    }
}

TEST_CASE("infinite type order")
{
    CHECK(infinite_type_order(levi_model<Gaussian>({1}, 6)).kind == InfiniteTypeResult::Kind::Minimal);
    auto r = infinite_type_order(nonminimal_model<Gaussian>(1, {1}, 6));
    CHECK(r.kind == InfiniteTypeResult::Kind::Order);
    CHECK(r.m == 1);
    CHECK(infinite_type_order(nonminimal_model<Gaussian>(9, {1}, 12)).m == 9);
    CHECK(infinite_type_order(RealGraph<Gaussian>{1, ExactSeries(real_vars(1), 6)}).kind
          == InfiniteTypeResult::Kind::Flat);
}

TEST_CASE("transform and membership residuals")
{
    const int N = 6;
    auto g = levi_model<Gaussian>({1}, N);
    auto h = real_to_complex(g);
    // Rotation by a rational point on the unit circle preserves the Heisenberg hypersurface.
    HoloMap<Gaussian> rot = identity_map<Gaussian>(1, N);
    rot.comps[0] = rot.comps[0] * gq(3, 5, 4, 5);
    CHECK(basic_identity_residual(rot, h, h).is_zero());
    CHECK(graph_membership_residual(rot, g, g).is_zero());
    CHECK(transform(h, rot).Q == h.Q);

    HoloMap<Gaussian> dil = identity_map<Gaussian>(1, N);
    dil.comps[0] = dil.comps[0] * q(2);
    auto res = basic_identity_residual(dil, h, h);
    auto rep = report_zero(res, "basic identity");
    CHECK_FALSE(rep.ok);
    CHECK(rep.defect_order == 2);
    // The transformed hypersurface is the image under the inverse change.
    auto h2 = transform(h, dil);
    CHECK(basic_identity_residual(dil, h2, h).is_zero());
}

TEST_CASE("map composition and inverse")
{
    const int N = 6;
    const VarList &v = map_vars(1);
    HoloMap<Gaussian> H = identity_map<Gaussian>(1, N);
    H.comps[0] += ExactSeries::variable(v, N, "z1") * ExactSeries::variable(v, N, "w") * q(3);
    H.comps[1] += power(ExactSeries::variable(v, N, "w"), 2) * gq(1, 2, 1, 1);
    auto Hi = inverse_map(H);
    CHECK(maps_equal(compose_maps(H, Hi), identity_map<Gaussian>(1, N)));
    CHECK(maps_equal(compose_maps(Hi, H), identity_map<Gaussian>(1, N)));
    CHECK(jet_is_identity(H, 1));
    CHECK_FALSE(jet_is_identity(H, 2));
    CHECK(maps_equal(parse_map<Gaussian>(format_map(H)), H));
}

TEST_CASE("hypersurface files")
{
    auto h = heisenberg_Q(4);
    auto f = parse_hypersurface<Gaussian>(format_hypersurface(h));
    REQUIRE(f.complex.has_value());
    CHECK(f.complex->Q == h.Q);
    CHECK(f.n == 1);
    auto g = parse_hypersurface<Gaussian>(format_hypersurface(levi_model<Gaussian>({1, -1}, 4)));
    REQUIRE(g.real.has_value());
    CHECK(g.n == 2);
    CHECK_THROWS_AS(parse_hypersurface<Gaussian>("n: 1\nQ:\nvars: z1 chi1 tau ; trunc: 3\n0 0 1 : 1\n"), ParseError);
    try {
        parse_hypersurface<Gaussian>("n: 1\ntrunc: 3\nQ:\nvars: z1 chi1 tau ; trunc: 3\n0 0 1 : 1 0\n1 1 : 2 0\n");
        FAIL("expected parse error");
    } catch (const ParseError &e) {
        CHECK(e.line() == 6);
    }
}
