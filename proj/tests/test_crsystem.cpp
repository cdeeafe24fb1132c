#include <doctest.h>

#include <crjet/crsystem.hpp>
#include <crjet/lifting.hpp>

#include "helpers.hpp"

using namespace crjet;
using namespace crjet::testing;

namespace
{

ExactSeries mv(int n, int trunc, const std::string &name)
{
    return ExactSeries::variable(map_vars(n), trunc, name);
}

ExactSeries rv(int n, int trunc, const std::string &name)
{
    return ExactSeries::variable(real_vars(n), trunc, name);
}

} // namespace

TEST_CASE("reality of the w-derivatives of G")
{
    const int N = 6;
    HoloMap<Gaussian> rot = identity_map<Gaussian>(1, N);
    rot.comps[0] = rot.comps[0] * gq(3, 5, 4, 5);
    CHECK(check_gw_real(rot, 3).ok);

    // (lambda z, 4w) preserves Im w = 1/2 s^3 |z|^2 exactly when |lambda|^2 = 4^{-2}.
    auto h3 = real_to_complex(nonminimal_model<Gaussian>(3, {1}, N));
    HoloMap<Gaussian> dil = identity_map<Gaussian>(1, N);
    dil.comps[0] = dil.comps[0] * q(1, 4);
    dil.comps[1] = dil.comps[1] * q(4);
    CHECK(check_preserves(dil, h3).ok);
    CHECK(check_gw_real(dil, 3).ok);

    HoloMap<Gaussian> bad = identity_map<Gaussian>(1, N);
    bad.comps[1] += mv(1, N, "z1") * mv(1, N, "w");
    auto r = check_gw_real(bad, 2);
    CHECK_FALSE(r.ok);
    CHECK(r.identity.find("l = 1") != std::string::npos);
    CHECK(r.monomial == "z1*w");

    HoloMap<Gaussian> cplx = identity_map<Gaussian>(1, N);
    cplx.comps[1] = cplx.comps[1] * gq(1, 1, 1, 1);
    CHECK_FALSE(check_gw_real(cplx, 1).ok);
    CHECK_THROWS_AS(split_automorphism(cplx, 1), DomainError);
}

TEST_CASE("splitting G into its polynomial head and tail")
{
    const int N = 6;
    auto Id = identity_map<Gaussian>(1, N);
    auto s1 = split_automorphism(Id, 1);
    CHECK(s1.P.is_zero());
    CHECK(s1.G2 == ExactSeries::constant(map_vars(1), N - 1, q(1)));
    CHECK(s1.Tpoly.is_zero());

    auto s3 = split_automorphism(Id, 3);
    CHECK(s3.P == ExactSeries::variable(w_vars(), N, "w"));
    CHECK(s3.G2.is_zero());
    CHECK(s3.Tpoly == ExactSeries::constant(w_vars(), N - 1, q(1)));
    CHECK(s3.Qpoly == ExactSeries::constant(wwb_vars(), N, q(1)));

    HoloMap<Gaussian> H = identity_map<Gaussian>(1, N);
    const auto w = mv(1, N, "w");
    H.comps[1] = w * q(2) + w * w * q(3) + w * w * w * mv(1, N, "z1") * q(5);
    auto s2 = split_automorphism(H, 2);
    CHECK(s2.P == ExactSeries::variable(w_vars(), N, "w", q(2)));
    CHECK(s2.Qpoly == ExactSeries::constant(wwb_vars(), N, q(2)));
    CHECK(s2.Tpoly == ExactSeries::constant(w_vars(), N - 1, q(2)));
    CHECK(s2.G2 == ExactSeries::constant(map_vars(1), N - 2, q(3)) + mv(1, N - 2, "z1") * mv(1, N - 2, "w") * q(5));
}

TEST_CASE("chart functions on the graph")
{
    const int N = 8;
    auto g = nonminimal_model<Gaussian>(1, {1}, N);
    auto ch = chart_functions(g, 1);
    const auto zz = rv(1, N, "z1") * rv(1, N, "zb1");
    const auto s = rv(1, N, "s");
    CHECK(ch.w_of_t == s + zz * s * gq(0, 1, 1, 2));
    // B = (conj w - w) / w = -i |z|^2 / (1 + i/2 |z|^2).
    const auto expectB = zz * gq(0, 1, -1, 1) * reciprocal(ExactSeries::constant(real_vars(1), N, q(1)) + zz * gq(0, 1, 1, 2));
    CHECK(ch.B.equals(expectB));
    CHECK(ch.B.truncated(3) == (zz * gq(0, 1, -1, 1)).truncated(3));
    // A = conj(w) / w, and A = 1 + B for m = 1.
    CHECK(ch.A.equals(ExactSeries::constant(real_vars(1), N, q(1)) + ch.B));

    auto flat = RealGraph<Gaussian>{1, ExactSeries(real_vars(1), N)};
    auto cf = chart_functions(flat, 2);
    CHECK(cf.A.equals(ExactSeries::constant(real_vars(1), N, q(1))));
    CHECK(cf.B.is_zero());

    CHECK_THROWS_AS(chart_functions(g, 2), DomainError);
    CHECK_THROWS_AS(chart_functions(levi_model<Gaussian>({1}, N), 1), DomainError);
}

TEST_CASE("CR vector fields annihilate w(t) and close under brackets")
{
    const int N = 8;
    for (int n = 1; n <= 2; ++n) {
        std::vector<int> eps(static_cast<std::size_t>(n), 1);
        if (n == 2) {
            eps[1] = -1;
        }
        auto g = nonminimal_model<Gaussian>(1, eps, N);
        auto fr = cr_frame(g, 1);
        auto ch = chart_functions(g, 1);
        for (int j = 0; j < n; ++j) {
            CHECK(apply_field(fr.L[static_cast<std::size_t>(j)], ch.w_of_t).is_zero());
            CHECK(apply_field(fr.L[static_cast<std::size_t>(j)], rv(n, N, zname(j + 1))).is_zero());
        }
        auto c = commutators(fr);
        CHECK(c.LL.ok);
        CHECK(c.aS.ok);
        CHECK(c.bS.ok);
        CHECK(c.a_diagonal_nonzero);
        // At the origin a_jk(0) = i eps_j delta_jk for phi = s/2 sum eps |z|^2.
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Gaussian c0 = c.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].constant_term();
                const Gaussian expect = j == k ? gq(0, 1, eps[static_cast<std::size_t>(j)], 1) : q(0);
                CHECK(ScalarTraits<Gaussian>::format(c0) == ScalarTraits<Gaussian>::format(expect));
            }
        }
    }
    // m = 2: brackets are divisible by s^2.
    auto g2 = nonminimal_model<Gaussian>(2, {1}, N);
    CHECK(commutators(cr_frame(g2, 2)).a_diagonal_nonzero);
    // Asking for more vanishing than the graph has is a division defect.
    CHECK_THROWS_AS(commutators(cr_frame(nonminimal_model<Gaussian>(1, {1}, N), 2)), DomainError);
    // Flat hypersurface: all brackets vanish and a_11(0) = 0.
    CHECK_THROWS_AS(commutators(cr_frame(RealGraph<Gaussian>{1, ExactSeries(real_vars(1), N)}, 1)), DomainError);
}

TEST_CASE("reflection identities along the hypersurface")
{
    const int N = 7;
    auto g = nonminimal_model<Gaussian>(1, {1}, N);
    CHECK(reflection_check(identity_map<Gaussian>(1, N), g).ok);
    HoloMap<Gaussian> lin = identity_map<Gaussian>(1, N);
    lin.comps[0] = lin.comps[0] * gq(0, 1, 1, 1);
    CHECK(reflection_check(lin, g).ok);
    HoloMap<Gaussian> bad = identity_map<Gaussian>(1, N);
    bad.comps[0] += mv(1, N, "z1") * mv(1, N, "z1");
    auto r = reflection_check(bad, g);
    CHECK_FALSE(r.ok);
    CHECK(r.defect_order > 0);
}

TEST_CASE("jet determination probe on the Heisenberg hypersurface")
{
    auto h = real_to_complex(levi_model<Gaussian>({1}, 6));
    CHECK(probe_max_degree(h, 6) == 3);
    auto det = jet_determination_probe(h, 2, 6);
    CHECK_FALSE(det.vacuous);
    CHECK(det.determined);
    CHECK(det.degrees.size() == 1);
    for (const auto &d : det.degrees) {
        CHECK(d.kernel_dim == 0);
        CHECK(d.rank == d.unknowns);
    }

    // At N = 4 no degree is fully visible with K = 1.
    CHECK(jet_determination_probe(h, 1, 4).vacuous);
    auto free1 = jet_determination_probe(h, 1, 6);
    CHECK_FALSE(free1.determined);
    CHECK(free1.first_free_degree == 2);
    REQUIRE(free1.kernel.size() == 1);
    // The real one-parameter family of 1-jet-trivial automorphisms: (z + r z w, w + r w^2) to second order.
    const auto &k = free1.kernel.front();
    const Gaussian r = k.G().coeff({0, 2});
    CHECK(r != q(0));
    CHECK(r.im == 0);
    CHECK(k.F(0).coeff({1, 1}) == r);
    CHECK(report_zero(basic_identity_residual(identity_map<Gaussian>(1, 6), h, h), "Id").ok);

    // Probing beyond the visible window produces a spurious direction.
    ProbeOptions wide;
    wide.max_degree = 5;
    auto spurious = jet_determination_probe(h, 2, 6, wide);
    CHECK_FALSE(spurious.determined);
    CHECK(spurious.first_free_degree == 4);

    auto vac = jet_determination_probe(h, 4, 5);
    CHECK(vac.vacuous);
    CHECK(vac.report().find("uninformative") != std::string::npos);

    // Enlarging K can only remove free directions.
    for (int K = 0; K <= 3; ++K) {
        auto a = jet_determination_probe(h, K, 6);
        auto b = jet_determination_probe(h, K + 1, 6);
        if (a.determined && !a.vacuous) {
            CHECK(b.determined);
        }
    }
    CHECK(jet_determination_probe(h, 0, 4).first_free_degree == 1);
    CHECK_THROWS_AS(jet_determination_probe(h, 2, 9), TruncationError);
}

TEST_CASE("probe on infinite-type models")
{
    auto h1 = real_to_complex(nonminimal_model<Gaussian>(1, {1}, 10));
    CHECK(probe_max_degree(h1, 10) == 4);
    auto p1 = jet_determination_probe(h1, 1, 10);
    CHECK_FALSE(p1.vacuous);
    CHECK(p1.determined);
    CHECK(p1.report().find("probe: K=1 N=10 unknown degrees 2..4") != std::string::npos);
    // Linear automorphisms (lambda z, mu w) with |lambda|^2 = 1 are free at K = 0.
    auto p0 = jet_determination_probe(h1, 0, 10);
    CHECK(p0.first_free_degree == 1);

    auto h2 = real_to_complex(nonminimal_model<Gaussian>(2, {1}, 12));
    auto p2 = jet_determination_probe(h2, 1, 12);
    CHECK(p2.max_degree == 3);
    CHECK(p2.determined);

    auto hf = real_to_complex(nonminimal_model<FloatComplex>(1, {1}, 10));
    auto pf = jet_determination_probe(hf, 1, 10);
    CHECK(pf.determined == p1.determined);
    CHECK(pf.first_free_degree == p1.first_free_degree);
}

TEST_CASE("automorphisms generated from free directions")
{
    const int N = 6;
    auto h = real_to_complex(levi_model<Gaussian>({1}, N));
    auto pr = jet_determination_probe(h, 1, N);
    REQUIRE(pr.kernel.size() == 1);
    auto H = generate_automorphism(h, 1, N, pr.kernel.front());
    CHECK(check_preserves(H, h).ok);
    CHECK(jet_is_identity(H, 1));
    CHECK_FALSE(jet_is_identity(H, 2));
    CHECK(check_gw_real(H, 1).ok);

    // Linear automorphisms of the m = 2 model: (lambda z, mu w), |lambda|^2 = 1/mu.
    auto h2 = real_to_complex(nonminimal_model<Gaussian>(2, {1}, N));
    HoloMap<Gaussian> dir = identity_map<Gaussian>(1, N);
    dir.comps[0] = ExactSeries(map_vars(1), N);
    dir.comps[1] = ExactSeries(map_vars(1), N);
    auto A2 = generate_automorphism(h2, 0, N, HoloMap<Gaussian>{});
    CHECK(maps_equal(A2, identity_map<Gaussian>(1, N)));

    HoloMap<Gaussian> lin = identity_map<Gaussian>(1, N);
    lin.comps[0] = lin.comps[0] * q(1, 2);
    lin.comps[1] = lin.comps[1] * q(4);
    CHECK(check_preserves(lin, h2).ok);
    CHECK(check_gw_real(lin, 2).ok);
    auto sp = split_automorphism(lin, 2);
    CHECK(sp.Qpoly == ExactSeries::constant(wwb_vars(), N, q(4)));

    // A direction that breaks the identity jet is rejected.
    HoloMap<Gaussian> jump = dir;
    jump.comps[0] = mv(1, N, "z1");
    CHECK_THROWS_AS(generate_automorphism(h, 1, N, jump), DomainError);

    // Float backend agrees.
    auto hf = real_to_complex(levi_model<FloatComplex>({1}, N));
    auto prf = jet_determination_probe(hf, 1, N);
    REQUIRE(prf.kernel.size() == 1);
    auto Hf = generate_automorphism(hf, 1, N, prf.kernel.front());
    CHECK(max_abs_coeff(basic_identity_residual(Hf, hf, hf)) < RealOf<FloatComplex>("1e-24"));
}
