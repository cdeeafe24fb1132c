#include <doctest.h>

#include <crjet/io.hpp>
#include <crjet/series.hpp>

#include "helpers.hpp"

using namespace crjet;
using namespace crjet::testing;

namespace
{
const VarList X{"x"};
const VarList XY{"x", "y"};
} // namespace

TEST_CASE("add: coefficientwise sum and zero pruning")
{
    auto x = var<Gaussian>(X, 3, "x");
    auto one = cst<Gaussian>(X, 3, q(1));
    CHECK((one + x) + (x - one) == x * q(2));
    CHECK((x + ExactSeries(X, 3)) == x);

    auto xx = var<Gaussian>(XY, 2, "x"), yy = var<Gaussian>(XY, 2, "y");
    auto s = (xx + yy * yy) + (yy - yy * yy);
    CHECK(s == xx + yy);
    CHECK(s.size() == 2);
}

TEST_CASE("add: incompatible variable lists throw")
{
    auto x = var<Gaussian>(X, 3, "x");
    auto y = var<Gaussian>(XY, 3, "y");
    CHECK_THROWS_AS(x + y, IncompatibleSeries);
}

TEST_CASE("add: mixed truncation restricts to the minimum")
{
    auto a = var<Gaussian>(X, 5, "x");
    auto b = power(var<Gaussian>(X, 2, "x"), 2);
    CHECK((a + b).trunc() == 2);
}

TEST_CASE("mul: Cauchy product with truncation")
{
    auto x = var<Gaussian>(X, 3, "x");
    auto one = cst<Gaussian>(X, 3, q(1));
    CHECK((one + x) * (one - x) == one - x * x);

    auto x2 = var<Gaussian>(X, 2, "x");
    auto one2 = cst<Gaussian>(X, 2, q(1));
    CHECK((one2 + x2 + x2 * x2) * (one2 - x2) == one2);

    auto a = var<Gaussian>(XY, 1, "x"), b = var<Gaussian>(XY, 1, "y");
    CHECK((a * b).is_zero());
}

TEST_CASE("compose: substitution examples")
{
    auto x = var<Gaussian>(X, 4, "x");
    auto f = x + x * x;
    auto g = compose(f, {{"x", x * q(2)}});
    CHECK(g == x * q(2) + x * x * q(4));
    CHECK(compose(f, {{"x", x}}) == f);

    // R = z^3 pulled back by z -> z w^4 gives z^3 w^12.
    const VarList zw{"z", "w"};
    auto z = var<Gaussian>(zw, 20, "z");
    auto w = var<Gaussian>(zw, 20, "w");
    auto R = power(var<Gaussian>(zw, 20, "z"), 3);
    auto pulled = compose(R, {{"z", z * power(w, 4)}}, ComposeOptions{15, std::nullopt, false});
    CHECK(pulled == power(z, 3) * power(w, 12));
}

TEST_CASE("compose: constant terms need explicit permission")
{
    auto x = var<Gaussian>(X, 3, "x");
    auto one = cst<Gaussian>(X, 3, q(1));
    auto f = x * x;
    CHECK_THROWS_AS(compose(f, {{"x", one + x}}), DomainError);
    auto g = compose(f, {{"x", one + x}}, ComposeOptions{std::nullopt, std::nullopt, true});
    CHECK(g == one + x * q(2) + x * x);
}

TEST_CASE("compose: requesting more order than determined throws")
{
    auto x = var<Gaussian>(X, 3, "x");
    CHECK_THROWS_AS(compose(x, {{"x", x * x}}, ComposeOptions{10, std::nullopt, false}), TruncationError);
    // x -> x^2 doubles the known order of a degree-3 series: (3+1)*2-1 = 7.
    auto x7 = var<Gaussian>(X, 7, "x");
    CHECK(compose(x, {{"x", x7 * x7}}).trunc() == 7);
}

TEST_CASE("reciprocal")
{
    auto x = var<Gaussian>(X, 3, "x");
    auto one = cst<Gaussian>(X, 3, q(1));
    CHECK(reciprocal(one - x) == one + x + x * x + x * x * x);
    CHECK(reciprocal(one) == one);
    auto x2 = var<Gaussian>(X, 2, "x");
    auto one2 = cst<Gaussian>(X, 2, q(1));
    CHECK(reciprocal(one2 + x2 * q(2)) == one2 - x2 * q(2) + x2 * x2 * q(4));
    CHECK_THROWS_AS(reciprocal(x), DomainError);
}

TEST_CASE("sqrt_unit")
{
    auto x = var<Gaussian>(X, 4, "x");
    auto one = cst<Gaussian>(X, 4, q(1));
    CHECK(sqrt_unit(one + x * q(2) + x * x) == one + x);
    CHECK(sqrt_unit(one) == one);
    auto x2 = var<Gaussian>(X, 2, "x");
    auto one2 = cst<Gaussian>(X, 2, q(1));
    CHECK(sqrt_unit(one2 + x2) == one2 + x2 * q(1, 2) - x2 * x2 * q(1, 8));
    CHECK_THROWS_AS(sqrt_unit(one * q(2)), DomainError);
}

TEST_CASE("implicit_solve")
{
    auto x = var<Gaussian>(XY, 4, "x");
    auto y = var<Gaussian>(XY, 4, "y");
    auto sol = implicit_solve(y - x - y * y, "y");
    auto t = var<Gaussian>(X, 4, "x");
    CHECK(sol == t + t * t + power(t, 3) * q(2) + power(t, 4) * q(5));

    // Fixed-point oracle y_{k+1} = x + y_k^2.
    ExactSeries it(X, 4);
    for (int k = 0; k < 5; ++k) {
        it = t + it * it;
    }
    CHECK(sol == it);

    CHECK(implicit_solve(y - x, "y") == t);
    CHECK_THROWS_AS(implicit_solve(y * y - x, "y"), DomainError);
}

TEST_CASE("implicit_solve: the blow-up equation shape gives half the Levi form at s = 0")
{
    const VarList vars{"z", "zb", "s", "v"};
    const int N = 6;
    auto z = var<Gaussian>(vars, N, "z"), zb = var<Gaussian>(vars, N, "zb"), s = var<Gaussian>(vars, N, "s"),
         v = var<Gaussian>(vars, N, "v");
    auto S = s * s * (z * zb * v + v * v);
    auto F = v * q(2) - z * zb - S;
    auto sol = implicit_solve(F, "v");
    auto at0 = restrict_zero(sol, {"s"});
    const VarList t{"z", "zb", "s"};
    CHECK(at0 == var<Gaussian>(t, N, "z") * var<Gaussian>(t, N, "zb") * q(1, 2));
}

TEST_CASE("conjugation")
{
    auto x = var<Gaussian>(X, 3, "x");
    CHECK(conj_series(x * Gaussian::i()) == x * (-Gaussian::i()));
    CHECK(conj_series(x * q(3)) == x * q(3));
    const VarList zz{"z", "zb"};
    auto f = var<Gaussian>(zz, 3, "z") * gq(1, 1, 2, 1);
    CHECK(conj_series(conj_series(f)) == f);
    CHECK(formal_conjugate(f, {{"z", "zb"}}) == var<Gaussian>(zz, 3, "zb") * gq(1, 1, -2, 1));
}

TEST_CASE("partial derivatives")
{
    auto x = var<Gaussian>(X, 4, "x");
    CHECK(partial(x * x, "x") == x * q(2));
    CHECK(partial(cst<Gaussian>(X, 4, q(7)), "x").is_zero());
    auto w = var<Gaussian>(X, 4, "x");
    auto f = w * (cst<Gaussian>(X, 4, q(1)) + w);
    CHECK(partial(f, "x", 2).constant_term() == q(2));
    CHECK(partial(x, "x").trunc() == 3);
}

TEST_CASE("jets")
{
    auto x = var<Gaussian>(X, 4, "x");
    auto f = x + power(x, 3);
    auto j = jet(f, 2);
    REQUIRE(j.coeffs.size() == 3);
    CHECK(j.coeffs[0] == q(0));
    CHECK(j.coeffs[1] == q(1));
    CHECK(j.coeffs[2] == q(0));
    CHECK(jet(f, 2) == jet(x, 2));
    CHECK(jet(f, 3) != jet(x, 3));
    CHECK_THROWS_AS(jet(f, 5), TruncationError);
}

TEST_CASE("monomial helpers")
{
    const VarList zw{"z", "w"};
    auto z = var<Gaussian>(zw, 6, "z"), w = var<Gaussian>(zw, 6, "w");
    auto f = z * w * w + z * z * w;
    CHECK(divide_by_monomial(f, {1, 1}) == (w + z).truncated(4));
    CHECK_THROWS_AS(divide_by_monomial(f, {0, 2}), DomainError);
    CHECK(var_valuation(f, "w") == 1);
    CHECK(coefficient_of(f, "w", 2) == z.truncated(4));
    CHECK(multiply_by_monomial(z, {0, 3}).trunc() == 9);
}

TEST_CASE("text serialization round trip")
{
    std::mt19937 rng(7);
    auto f = random_series(rng, XY, 5, 12);
    auto text = format_series(f);
    CHECK(parse_series<Gaussian>(text) == f);
    CHECK(text.rfind("vars: x y ; trunc: 5\n", 0) == 0);

    CHECK_THROWS_AS(parse_series<Gaussian>("vars: x ; trunc: 2\n1 : 1/2\n"), ParseError);
    try {
        parse_series<Gaussian>("vars: x ; trunc: 2\n1 : 1 0\n7 : 1 0\n");
        FAIL("expected parse error");
    } catch (const ParseError &e) {
        CHECK(e.line() == 3);
    }

    FloatSeries g = FloatSeries::variable(X, 3, "x", FloatComplex(Real128("0.1"), Real128(0)));
    CHECK(parse_series<FloatComplex>(format_series(g)) == g);
}

TEST_CASE("graded-lex order of stored terms")
{
    const VarList v{"a", "b"};
    auto a = var<Gaussian>(v, 3, "a"), b = var<Gaussian>(v, 3, "b");
    auto f = b * b + a + b + a * b + a * a + cst<Gaussian>(v, 3, q(1));
    std::vector<std::string> order;
    for (const auto &t : f.terms()) {
        order.push_back(format_monomial(v, t.key));
    }
    CHECK(order == std::vector<std::string>{"1", "a", "b", "a^2", "a*b", "b^2"});
}

TEST_CASE("ring axioms and solver residuals on random inputs")
{
    std::mt19937 rng(12345);
    const VarList v{"x", "y", "z"};
    for (int k = 0; k < 20; ++k) {
        auto f = random_series(rng, v, 6, 8);
        auto g = random_series(rng, v, 6, 8);
        auto h = random_series(rng, v, 6, 8);
        CHECK((f * g) * h == f * (g * h));
        CHECK(f * (g + h) == f * g + f * h);
        auto u = cst<Gaussian>(v, 6, q(1)) + random_series(rng, v, 6, 6, 1);
        CHECK(u * reciprocal(u) == cst<Gaussian>(v, 6, q(1)));
        auto r = sqrt_unit(u);
        CHECK(r * r == u);
        CHECK(conj_series(f * g) == conj_series(f) * conj_series(g));
    }
}

TEST_CASE("compose associativity")
{
    std::mt19937 rng(99);
    const VarList v{"x", "y"};
    for (int k = 0; k < 10; ++k) {
        auto f = random_series(rng, v, 5, 6);
        Substitution<Gaussian> sigma{{"x", random_series(rng, v, 5, 4, 1)}, {"y", random_series(rng, v, 5, 4, 1)}};
        Substitution<Gaussian> rho{{"x", random_series(rng, v, 5, 4, 1)}, {"y", random_series(rng, v, 5, 4, 1)}};
        Substitution<Gaussian> sr{{"x", compose(sigma.at("x"), rho)}, {"y", compose(sigma.at("y"), rho)}};
        CHECK(compose(compose(f, sigma), rho) == compose(f, sr));
    }
}
