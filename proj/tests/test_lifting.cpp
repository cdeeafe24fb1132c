#include <doctest.h>

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

// Id + random terms of degree l+1 .. trunc.
HoloMap<Gaussian> random_tangent_map(std::mt19937 &rng, int n, int l, int trunc)
{
    HoloMap<Gaussian> H = identity_map<Gaussian>(n, trunc);
    for (auto &c : H.comps) {
        c += random_series(rng, map_vars(n), trunc, 3, l + 1);
    }
    return H;
}

NormalFormData<Gaussian> decorated_nf(int b, int N)
{
    auto nf = model_normal_form<Gaussian>({1}, {b}, N);
    nf.thetas[0] = nf.thetas[0] + ExactSeries::variable(s_vars(), nf.thetas[0].trunc(), "s") * q(1, 3);
    const auto z = ExactSeries::variable(real_vars(1), N, "z1");
    const auto zb = ExactSeries::variable(real_vars(1), N, "zb1");
    nf.R = (z * z * zb + z * zb * zb) * ExactSeries::variable(real_vars(1), N, "s");
    return nf;
}

} // namespace

TEST_CASE("lift of the identity")
{
    const std::vector<int> alphas{4};
    auto Hhat = lift_map(identity_map<Gaussian>(1, 12), alphas, 9);
    CHECK(Hhat.trunc() == lift_trunc(12, alphas));
    CHECK(Hhat.trunc() == 21);
    CHECK(maps_equal(Hhat, identity_map<Gaussian>(1, 21)));
    CHECK(check_commuting_square(identity_map<Gaussian>(1, 12), Hhat, alphas).ok);
    CHECK(minimal_lift_order(blowup_exponents(std::vector<int>{1})) == 9);
    CHECK(minimal_lift_order(blowup_exponents(std::vector<int>{0})) == 3);
    CHECK(minimal_lift_order(blowup_exponents(std::vector<int>{3, 1})) == 21);
}

TEST_CASE("worked example H = (z, w + w^10) with alpha = 4")
{
    const int N = 12;
    const int l = 9;
    const std::vector<int> alphas{4};
    HoloMap<Gaussian> H = identity_map<Gaussian>(1, N);
    H.comps[1] += power(mv(1, N, "w"), l + 1);
    auto Hhat = lift_map(H, alphas, l);
    const int L = Hhat.trunc();
    REQUIRE(L == 21);
    auto z = mv(1, L, "z1");
    auto w = mv(1, L, "w");
    // Ghat = w (1 + w^18)^{1/2}, Fhat = z (1 + w^18)^{-2}, to order 21.
    CHECK(Hhat.G() == w + power(w, 19) * q(1, 2));
    CHECK(Hhat.F(0) == z - z * power(w, 18) * q(2));
    CHECK(check_commuting_square(H, Hhat, alphas).ok);
    CHECK(check_jet_identity(Hhat, l).ok);
    // The valuation of Ghat - w in w is 2l + 1, one short of 2(l + 1).
    auto shape = check_ghat_shape(Hhat, 2 * (l + 1));
    CHECK_FALSE(shape.ok);
    CHECK(shape.monomial == "w^19");
    CHECK(check_ghat_shape(Hhat, 2 * l + 1).ok);
}

TEST_CASE("lift of (z + z^{l+1}, w) with alpha = 2")
{
    const int N = 8;
    const int l = 3;
    const std::vector<int> alphas{2};
    HoloMap<Gaussian> H = identity_map<Gaussian>(1, N);
    H.comps[0] += power(mv(1, N, "z1"), l + 1);
    auto Hhat = lift_map(H, alphas, l);
    const int L = Hhat.trunc();
    CHECK(L == 15);
    CHECK(Hhat.F(0) == mv(1, L, "z1") + power(mv(1, L, "z1"), 4) * power(mv(1, L, "w"), 6));
    CHECK(Hhat.G() == mv(1, L, "w"));
    CHECK(check_jet_identity(Hhat, 2 * l + 1 - alphas.back()).ok);
    CHECK(check_commuting_square(H, Hhat, alphas).ok);
}

TEST_CASE("the other square-root branch commutes but fails the jet criterion")
{
    std::mt19937 rng(31);
    for (const auto &alphas : {std::vector<int>{2}, std::vector<int>{4}, std::vector<int>{2, 3}}) {
        const int n = static_cast<int>(alphas.size());
        const int l = std::max(alphas.back(), 3 * alphas.front() - 3);
        const int N = l + 3;
        auto H = random_tangent_map(rng, n, l, N);
        auto good = lift_map(H, alphas, l, 1);
        auto bad = lift_map(H, alphas, l, -1);
        CHECK(check_commuting_square(H, good, alphas).ok);
        CHECK(check_commuting_square(H, bad, alphas).ok);
        CHECK(check_jet_identity(good, l).ok);
        auto r = check_jet_identity(bad, 1);
        CHECK_FALSE(r.ok);
        CHECK(r.defect_order == 1);
    }
}

TEST_CASE("lift hypotheses and truncation budget")
{
    const std::vector<int> alphas{4};
    HoloMap<Gaussian> H = identity_map<Gaussian>(1, 12);
    CHECK_THROWS_AS(lift_map(H, alphas, 8), DomainError);
    H.comps[0] += mv(1, 12, "z1") * mv(1, 12, "w");
    CHECK_THROWS_AS(lift_map(H, alphas, 9), DomainError);
    CHECK(check_lift_hypothesis(H, alphas, 9).defect_order == 2);
    CHECK_THROWS_AS(lift_map(identity_map<Gaussian>(1, 5), alphas, 9), TruncationError);
    HoloMap<Gaussian> shifted = identity_map<Gaussian>(1, 12);
    shifted.comps[0] += ExactSeries::constant(map_vars(1), 12, q(1));
    CHECK_FALSE(check_lift_hypothesis(shifted, alphas, 9).ok);
}

TEST_CASE("random tangent maps lift exactly")
{
    std::mt19937 rng(8);
    for (int k = 0; k < 5; ++k) {
        const std::vector<int> alphas = k % 2 == 0 ? std::vector<int>{4} : std::vector<int>{2, 3};
        const int n = static_cast<int>(alphas.size());
        const int l = std::max(alphas.back(), 3 * alphas.front() - 3);
        auto H = random_tangent_map(rng, n, l, l + 3);
        auto Hhat = lift_map(H, alphas, l);
        CHECK(check_commuting_square(H, Hhat, alphas).ok);
        CHECK(check_jet_identity(Hhat, l).ok);
        CHECK(check_ghat_shape(Hhat, 2 * l + 1).ok);
    }
}

TEST_CASE("functoriality of the lift")
{
    std::mt19937 rng(12);
    const std::vector<int> alphas{2};
    const int l = 3;
    const int N = 8;
    auto H1 = random_tangent_map(rng, 1, l, N);
    auto H2 = random_tangent_map(rng, 1, l, N);
    auto lhs = lift_map(compose_maps(H1, H2), alphas, l);
    auto rhs = compose_maps(lift_map(H1, alphas, l), lift_map(H2, alphas, l));
    const int t = std::min(lhs.trunc(), rhs.trunc());
    CHECK(maps_equal(lhs.truncated(t), rhs.truncated(t)));
}

TEST_CASE("check_preserves examples")
{
    const int N = 6;
    auto g = levi_model<Gaussian>({1}, N);
    auto h = real_to_complex(g);
    HoloMap<Gaussian> rot = identity_map<Gaussian>(1, N);
    rot.comps[0] = rot.comps[0] * gq(3, 5, 4, 5);
    CHECK(check_preserves(rot, h).ok);
    CHECK(check_preserves(rot, g).ok);
    HoloMap<Gaussian> dil = identity_map<Gaussian>(1, N);
    dil.comps[0] = dil.comps[0] * q(2);
    auto r = check_preserves(dil, h);
    CHECK_FALSE(r.ok);
    CHECK(r.defect_order == 2);
    CHECK(r.monomial == "z1*chi1");
    CHECK(r.coefficient == "0 -6"); // (tau + 2i z chi) - (tau + 8i z chi)
    CHECK(check_preserves(identity_map<Gaussian>(1, N), h).ok);
}

TEST_CASE("lift pipeline")
{
    auto nf = decorated_nf(0, 8);
    auto rep = lift_pipeline(identity_map<Gaussian>(1, 8), nf, 3);
    CHECK(rep.ok());
    CHECK(rep.shape.ok);
    CHECK(maps_equal(rep.Hhat, identity_map<Gaussian>(1, rep.lift_order)));

    HoloMap<Gaussian> H = identity_map<Gaussian>(1, 8);
    H.comps[1] += power(mv(1, 8, "w"), 4);
    CHECK_THROWS_AS(lift_pipeline(H, nf, 3), DomainError);
}

TEST_CASE("the image of the blown-up hypersurface is the blow-up of the image")
{
    // H does not preserve M; the image of Mhat under Hhat must still lie in the
    // preimage of H(M) and keep the s^threshold factor.
    auto nf = decorated_nf(0, 8);
    auto bd = solve_blowup(nf);
    HoloMap<Gaussian> H = identity_map<Gaussian>(1, 8);
    H.comps[0] += power(mv(1, 8, "z1"), 2) * power(mv(1, 8, "w"), 2) * q(3);
    H.comps[1] += power(mv(1, 8, "w"), 4) * q(-2);
    auto Hhat = lift_map(H, bd.alphas, 3);
    auto M = normal_form_graph(nf);
    auto image = transform_graph(M, inverse_map(H));
    auto image_hat = transform_graph(bd.Mhat, inverse_map(Hhat));
    CHECK(graph_membership_residual(bd.B, image_hat, image).is_zero());
    CHECK(var_valuation(image_hat.phi, "s") >= bd.threshold);
    CHECK_FALSE(image_hat.phi == bd.Mhat.phi);
}
