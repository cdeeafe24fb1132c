#ifndef CRJET_TEST_HELPERS_HPP
#define CRJET_TEST_HELPERS_HPP

#include <random>

#include <crjet/generators.hpp>
#include <crjet/series.hpp>

namespace crjet::testing
{

inline Gaussian q(long n, long d = 1)
{
    return Gaussian(make_rational(n, d));
}

inline Gaussian gq(long rn, long rd, long in, long id)
{
    return Gaussian(make_rational(rn, rd), make_rational(in, id));
}

template <typename S>
Series<S> var(const VarList &vars, int trunc, const std::string &name)
{
    return Series<S>::variable(vars, trunc, name);
}

template <typename S>
Series<S> cst(const VarList &vars, int trunc, const S &c)
{
    return Series<S>::constant(vars, trunc, c);
}

} // namespace crjet::testing

#endif
