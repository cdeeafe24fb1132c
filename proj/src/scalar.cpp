#include <crjet/errors.hpp>
#include <crjet/scalar.hpp>

#include <cctype>
#include <iomanip>
#include <sstream>

namespace crjet
{

Rational make_rational(long num, long den)
{
    if (den == 0) {
        throw DomainError("zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

namespace
{

std::string trim(const std::string &s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return s.substr(a, b - a);
}

// Parses "a", "a/b", or a decimal literal like "-1.25e-3" into an exact rational.
Rational parse_rational(const std::string &text)
{
    const std::string s = trim(text);
    if (s.empty()) {
        throw DomainError("empty number");
    }
    if (s.find_first_of(".eE") != std::string::npos) {
        std::size_t pos = 0;
        bool neg = false;
        if (s[pos] == '+' || s[pos] == '-') {
            neg = s[pos] == '-';
            ++pos;
        }
        std::string digits;
        long scale = 0;
        bool seen_point = false, any = false;
        for (; pos < s.size() && s[pos] != 'e' && s[pos] != 'E'; ++pos) {
            const char c = s[pos];
            if (c == '.') {
                if (seen_point) {
                    throw DomainError("malformed number: " + s);
                }
                seen_point = true;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                any = true;
                if (seen_point) {
                    --scale;
                }
            } else {
                throw DomainError("malformed number: " + s);
            }
        }
        if (!any) {
            throw DomainError("malformed number: " + s);
        }
        if (pos < s.size()) {
            const std::string ex = s.substr(pos + 1);
            if (ex.empty()) {
                throw DomainError("malformed number: " + s);
            }
            std::size_t used = 0;
            long e = 0;
            try {
                e = std::stol(ex, &used);
            } catch (const std::exception &) {
                throw DomainError("malformed number: " + s);
            }
            if (used != ex.size()) {
                throw DomainError("malformed number: " + s);
            }
            scale += e;
        }
        mpz_class num(digits, 10);
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
        Rational q = scale < 0 ? Rational(num, p) : Rational(num * p);
        q.canonicalize();
        return neg ? Rational(-q) : q;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || ((c == '-' || c == '+') && i == 0))) {
            throw DomainError("malformed number: " + s);
        }
    }
    const auto slash = s.find('/');
    if (slash == 0 || slash + 1 == s.size() || (slash != std::string::npos && s.find('/', slash + 1) != std::string::npos)) {
        throw DomainError("malformed number: " + s);
    }
    std::string t = s[0] == '+' ? s.substr(1) : s;
    Rational q;
    if (q.set_str(t, 10) != 0) {
        throw DomainError("malformed number: " + s);
    }
    if (q.get_den() == 0) {
        throw DomainError("zero denominator: " + s);
    }
    q.canonicalize();
    return q;
}

std::string format_rational(const Rational &q)
{
    return q.get_str();
}

std::string format_real128(const Real128 &x)
{
    if (x == 0) {
        return "0";
    }
    std::ostringstream os;
    os << std::scientific << std::setprecision(36) << x;
    return os.str();
}

} // namespace

std::optional<Rational> ScalarTraits<Gaussian>::sqrt(const Rational &x)
{
    if (sgn(x) < 0) {
        return std::nullopt;
    }
    if (!mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t())) {
        return std::nullopt;
    }
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string ScalarTraits<Gaussian>::format(const Gaussian &x)
{
    return format_rational(x.re) + " " + format_rational(x.im);
}

Gaussian ScalarTraits<Gaussian>::parse(const std::string &re, const std::string &im)
{
    return Gaussian(parse_rational(re), parse_rational(im));
}

FloatComplex ScalarTraits<FloatComplex>::from_rational(const Rational &q)
{
    return FloatComplex(real_from_rational(q));
}

Real128 ScalarTraits<FloatComplex>::real_from_rational(const Rational &q)
{
    return Real128(q.get_num().get_str()) / Real128(q.get_den().get_str());
}

std::string ScalarTraits<FloatComplex>::format(const FloatComplex &x)
{
    return format_real128(x.re) + " " + format_real128(x.im);
}

FloatComplex ScalarTraits<FloatComplex>::parse(const std::string &re, const std::string &im)
{
    return FloatComplex(real_from_rational(parse_rational(re)), real_from_rational(parse_rational(im)));
}

} // namespace crjet
