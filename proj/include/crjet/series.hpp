#ifndef CRJET_SERIES_HPP
#define CRJET_SERIES_HPP

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <crjet/errors.hpp>
#include <crjet/scalar.hpp>

namespace crjet
{

// Exponent vectors are packed into a 128-bit key, one byte per variable with
// the first declared variable in the most significant byte. Adding keys adds
// exponents as long as no exponent exceeds kMaxExponent.
inline constexpr std::size_t kMaxVars = 16;
inline constexpr int kMaxExponent = 255;

using MonomialKey = unsigned __int128;
using Exponents = std::vector<int>;

MonomialKey pack_exponents(const Exponents &e);
Exponents unpack_exponents(MonomialKey key, std::size_t nvars);

inline int key_exponent(MonomialKey key, std::size_t index)
{
    return static_cast<int>((key >> (8 * (kMaxVars - 1 - index))) & 0xFF);
}

inline MonomialKey unit_key(std::size_t index, int power = 1)
{
    return static_cast<MonomialKey>(power) << (8 * (kMaxVars - 1 - index));
}

struct MonomialKeyHash {
    std::size_t operator()(MonomialKey k) const noexcept
    {
        const auto lo = static_cast<std::uint64_t>(k);
        const auto hi = static_cast<std::uint64_t>(k >> 64);
        return std::hash<std::uint64_t>{}(lo ^ (hi * 0x9E3779B97F4A7C15ULL));
    }
};

// Ordered list of variable names shared between series.
class VarList
{
public:
    VarList();
    VarList(std::vector<std::string> names);
    VarList(std::initializer_list<std::string> names);

    std::size_t size() const { return names_->size(); }
    const std::string &operator[](std::size_t i) const { return (*names_)[i]; }
    const std::vector<std::string> &names() const { return *names_; }

    std::optional<std::size_t> find(const std::string &name) const;
    std::size_t index(const std::string &name) const;
    bool contains(const std::string &name) const { return find(name).has_value(); }
    std::string joined() const;

    friend bool operator==(const VarList &a, const VarList &b)
    {
        return a.names_ == b.names_ || *a.names_ == *b.names_;
    }
    friend bool operator!=(const VarList &a, const VarList &b) { return !(a == b); }

private:
    std::shared_ptr<const std::vector<std::string>> names_;
};

template <typename S>
struct Term {
    MonomialKey key;
    int degree;
    S coeff;
};

// Multivariate power series truncated at total degree trunc. Stored terms are
// sorted in graded-lex order (degree ascending, then exponents lexicographically
// descending in declared variable order) and are never negligible.
template <typename S>
class Series
{
public:
    using Scalar = S;
    using Real = RealOf<S>;

    Series();
    Series(VarList vars, int trunc);
    Series(VarList vars, int trunc, Real tol);

    static Series constant(VarList vars, int trunc, const S &c);
    static Series variable(VarList vars, int trunc, const std::string &name, const S &c = S(1));
    static Series monomial(VarList vars, int trunc, const Exponents &e, const S &c = S(1));

    const VarList &vars() const { return vars_; }
    int trunc() const { return trunc_; }
    const Real &tolerance() const { return tol_; }
    const std::vector<Term<S>> &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    // Lowest degree carrying a nonzero coefficient; trunc + 1 for the zero series.
    int valuation() const;
    int max_degree() const;
    S coeff(const Exponents &e) const;
    S coeff_key(MonomialKey key) const;
    S constant_term() const;

    Series truncated(int n) const;
    Series with_tolerance(Real tol) const;

    Series &operator+=(const Series &o);
    Series &operator-=(const Series &o);
    Series &operator*=(const Series &o);
    Series &operator*=(const S &c);

    friend Series operator+(Series a, const Series &b) { return a += b; }
    friend Series operator-(Series a, const Series &b) { return a -= b; }
    friend Series operator*(Series a, const S &c) { return a *= c; }
    friend Series operator*(const S &c, Series a) { return a *= c; }
    friend Series operator-(const Series &a)
    {
        Series r = a;
        for (auto &t : r.terms_) {
            t.coeff = -t.coeff;
        }
        return r;
    }

    // Equality to truncation: same variables, differences negligible up to the
    // smaller truncation order.
    bool equals(const Series &o) const;

    // Builds a series from unsorted (key, coeff) pairs; drops negligible terms
    // and terms above trunc.
    static Series from_terms(VarList vars, int trunc, Real tol,
                             std::unordered_map<MonomialKey, S, MonomialKeyHash> &&acc);
    static Series from_sorted(VarList vars, int trunc, Real tol, std::vector<Term<S>> &&terms);

private:
    VarList vars_;
    int trunc_ = 0;
    Real tol_;
    std::vector<Term<S>> terms_;
};

template <typename S>
Series<S> operator*(const Series<S> &a, const Series<S> &b);

template <typename S>
bool operator==(const Series<S> &a, const Series<S> &b)
{
    return a.equals(b);
}

template <typename S>
bool operator!=(const Series<S> &a, const Series<S> &b)
{
    return !a.equals(b);
}

struct ComposeOptions {
    // Truncation order of the result; defaults to the largest order the inputs
    // determine.
    std::optional<int> trunc;
    // Target variable list, needed when no substitution is given.
    std::optional<VarList> target;
    // Allow substituted series with nonzero constant term. The caller asserts
    // that the outer series is polynomial in those variables.
    bool allow_constant_terms = false;
};

template <typename S>
using Substitution = std::map<std::string, Series<S>>;

template <typename S>
Series<S> compose(const Series<S> &f, const Substitution<S> &subst, const ComposeOptions &opts = {});

template <typename S>
Series<S> power(const Series<S> &f, int k);

// g with f g = 1 to trunc. Requires f(0) != 0.
template <typename S>
Series<S> reciprocal(const Series<S> &f);

// The square root with value 1 at the origin. Requires f(0) = 1.
template <typename S>
Series<S> sqrt_unit(const Series<S> &f);

// Solves F(x, y) = 0 for y = y(x) with y(0) = 0. Requires F(0) = 0 and
// dF/dy(0) != 0. The result lives on the variables of F minus y.
template <typename S>
Series<S> implicit_solve(const Series<S> &F, const std::string &y);

template <typename S>
Series<S> conj_series(const Series<S> &f);

// Conjugates coefficients and swaps each variable pair.
template <typename S>
Series<S> formal_conjugate(const Series<S> &f, const std::vector<std::pair<std::string, std::string>> &pairs);

template <typename S>
Series<S> partial(const Series<S> &f, const std::string &var, int k = 1);

// Re-expresses f over a variable list containing all variables of f that
// occur in some term. Missing variables are an error.
template <typename S>
Series<S> embed(const Series<S> &f, const VarList &target);

template <typename S>
Series<S> rename(const Series<S> &f, const std::map<std::string, std::string> &names, const VarList &target);

// Sets the listed variables to zero.
template <typename S>
Series<S> restrict_zero(const Series<S> &f, const std::vector<std::string> &vars);

// Coefficient of var^k, as a series in the same variables (no var dependence).
template <typename S>
Series<S> coefficient_of(const Series<S> &f, const std::string &var, int k);

// Smallest exponent of var over all terms; trunc + 1 for the zero series.
template <typename S>
int var_valuation(const Series<S> &f, const std::string &var);

// Exact division by a monomial; throws DomainError if some term is not divisible.
template <typename S>
Series<S> divide_by_monomial(const Series<S> &f, const Exponents &e);

template <typename S>
Series<S> multiply_by_monomial(const Series<S> &f, const Exponents &e);

template <typename S>
RealOf<S> max_abs_coeff(const Series<S> &f);

// Lowest-order term in graded-lex order, if any.
template <typename S>
std::optional<Term<S>> leading_term(const Series<S> &f);

std::string format_monomial(const VarList &vars, MonomialKey key);

// All monomials in nvars variables with total degree <= k, graded-lex order.
std::vector<Exponents> monomials_up_to(std::size_t nvars, int k);
std::vector<Exponents> monomials_of_degree(std::size_t nvars, int k);

template <typename S>
struct Jet {
    VarList vars;
    int order = 0;
    std::vector<Exponents> monomials;
    std::vector<S> coeffs;
    RealOf<S> tol;

    bool operator==(const Jet &o) const;
    bool operator!=(const Jet &o) const { return !(*this == o); }
};

template <typename S>
Jet<S> jet(const Series<S> &f, int k);

#define CRJET_EXTERN_SERIES(S)                                                                                        \
    extern template class Series<S>;                                                                                  \
    extern template Series<S> operator*(const Series<S> &, const Series<S> &);                                      \
    extern template Series<S> compose(const Series<S> &, const Substitution<S> &, const ComposeOptions &);          \
    extern template Series<S> power(const Series<S> &, int);                                                        \
    extern template Series<S> reciprocal(const Series<S> &);                                                        \
    extern template Series<S> sqrt_unit(const Series<S> &);                                                         \
    extern template Series<S> implicit_solve(const Series<S> &, const std::string &);                               \
    extern template Series<S> conj_series(const Series<S> &);                                                       \
    extern template Series<S> formal_conjugate(const Series<S> &,                                                   \
                                               const std::vector<std::pair<std::string, std::string>> &);           \
    extern template Series<S> partial(const Series<S> &, const std::string &, int);                                 \
    extern template Series<S> embed(const Series<S> &, const VarList &);                                            \
    extern template Series<S> rename(const Series<S> &, const std::map<std::string, std::string> &, const VarList &); \
    extern template Series<S> restrict_zero(const Series<S> &, const std::vector<std::string> &);                  \
    extern template Series<S> coefficient_of(const Series<S> &, const std::string &, int);                          \
    extern template int var_valuation(const Series<S> &, const std::string &);                                      \
    extern template Series<S> divide_by_monomial(const Series<S> &, const Exponents &);                             \
    extern template Series<S> multiply_by_monomial(const Series<S> &, const Exponents &);                           \
    extern template RealOf<S> max_abs_coeff(const Series<S> &);                                                     \
    extern template std::optional<Term<S>> leading_term(const Series<S> &);                                         \
    extern template struct Jet<S>;                                                                                    \
    extern template Jet<S> jet(const Series<S> &, int);

CRJET_EXTERN_SERIES(Gaussian)
CRJET_EXTERN_SERIES(FloatComplex)

#undef CRJET_EXTERN_SERIES

using ExactSeries = Series<Gaussian>;
using FloatSeries = Series<FloatComplex>;

} // namespace crjet

#endif
