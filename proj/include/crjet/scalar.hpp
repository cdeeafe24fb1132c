#ifndef CRJET_SCALAR_HPP
#define CRJET_SCALAR_HPP

#include <optional>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gmpxx.h>

namespace crjet
{

using Rational = mpq_class;
using Real128 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

// A complex number over an ordered real field R. Instantiated with exact
// rationals (Gaussian rationals) and with 128-bit binary floats.
template <typename R>
struct Complex {
    R re{0};
    R im{0};

    Complex() = default;
    Complex(R r) : re(std::move(r)), im(0) {}
    Complex(R r, R i) : re(std::move(r)), im(std::move(i)) {}
    Complex(int r) : re(r), im(0) {}

    static Complex i() { return Complex(R(0), R(1)); }

    Complex &operator+=(const Complex &o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex &operator-=(const Complex &o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex &operator*=(const Complex &o)
    {
        *this = *this * o;
        return *this;
    }
    Complex &operator/=(const Complex &o)
    {
        *this = *this / o;
        return *this;
    }

    friend Complex operator+(Complex a, const Complex &b) { return a += b; }
    friend Complex operator-(Complex a, const Complex &b) { return a -= b; }
    friend Complex operator-(const Complex &a) { return Complex(R(-a.re), R(-a.im)); }
    friend Complex operator*(const Complex &a, const Complex &b)
    {
        const bool ar = is_zero_part(a.im), br = is_zero_part(b.im);
        if (ar && br) {
            return Complex(R(a.re * b.re), R(0));
        }
        if (ar) {
            return Complex(R(a.re * b.re), R(a.re * b.im));
        }
        if (br) {
            return Complex(R(a.re * b.re), R(a.im * b.re));
        }
        return Complex(R(a.re * b.re - a.im * b.im), R(a.re * b.im + a.im * b.re));
    }
    friend Complex operator/(const Complex &a, const Complex &b)
    {
        if (is_zero_part(b.im)) {
            return Complex(R(a.re / b.re), R(a.im / b.re));
        }
        const R d = b.re * b.re + b.im * b.im;
        return Complex(R((a.re * b.re + a.im * b.im) / d), R((a.im * b.re - a.re * b.im) / d));
    }
    friend bool operator==(const Complex &a, const Complex &b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Complex &a, const Complex &b) { return !(a == b); }

private:
    static bool is_zero_part(const R &x) { return x == 0; }
};

template <typename R>
Complex<R> conj(const Complex<R> &x)
{
    return Complex<R>(x.re, R(-x.im));
}

template <typename R>
R norm2(const Complex<R> &x)
{
    return x.re * x.re + x.im * x.im;
}

using Gaussian = Complex<Rational>;
using FloatComplex = Complex<Real128>;

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<Gaussian> {
    using Real = Rational;
    static constexpr bool exact = true;
    static constexpr const char *name = "exact";

    static Real default_tolerance() { return Real(0); }
    static bool negligible(const Gaussian &x, const Real &) { return sgn(x.re) == 0 && sgn(x.im) == 0; }
    static bool negligible_real(const Real &x, const Real &) { return sgn(x) == 0; }
    // Square root of a non-negative rational, available only for perfect squares.
    static std::optional<Real> sqrt(const Real &x);
    static Gaussian from_rational(const Rational &q) { return Gaussian(q); }
    static Real real_from_rational(const Rational &q) { return q; }
    static double to_double(const Real &x) { return x.get_d(); }
    static std::string format(const Gaussian &x);
    static Gaussian parse(const std::string &re, const std::string &im);
};

template <>
struct ScalarTraits<FloatComplex> {
    using Real = Real128;
    static constexpr bool exact = false;
    static constexpr const char *name = "float";

    static Real default_tolerance() { return Real("1e-30"); }
    static bool negligible(const FloatComplex &x, const Real &tol)
    {
        return boost::multiprecision::abs(x.re) <= tol && boost::multiprecision::abs(x.im) <= tol;
    }
    static bool negligible_real(const Real &x, const Real &tol) { return boost::multiprecision::abs(x) <= tol; }
    static std::optional<Real> sqrt(const Real &x)
    {
        if (x < 0) {
            return std::nullopt;
        }
        return boost::multiprecision::sqrt(x);
    }
    static FloatComplex from_rational(const Rational &q);
    static Real real_from_rational(const Rational &q);
    static double to_double(const Real &x) { return static_cast<double>(x); }
    static std::string format(const FloatComplex &x);
    static FloatComplex parse(const std::string &re, const std::string &im);
};

template <typename S>
using RealOf = typename ScalarTraits<S>::Real;

template <typename S>
S imag_unit()
{
    return S::i();
}

// Canonicalized num/den.
Rational make_rational(long num, long den = 1);

template <typename S>
S from_ratio(long num, long den = 1)
{
    return ScalarTraits<S>::from_rational(make_rational(num, den));
}

} // namespace crjet

#endif
