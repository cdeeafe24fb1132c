#include <crjet/series.hpp>

#include <algorithm>
#include <climits>
#include <sstream>

namespace crjet
{

MonomialKey pack_exponents(const Exponents &e)
{
    if (e.size() > kMaxVars) {
        throw DomainError("too many variables for a monomial key");
    }
    MonomialKey key = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0 || e[i] > kMaxExponent) {
            throw DomainError("exponent out of range: " + std::to_string(e[i]));
        }
        key |= unit_key(i, e[i]);
    }
    return key;
}

Exponents unpack_exponents(MonomialKey key, std::size_t nvars)
{
    Exponents e(nvars);
    for (std::size_t i = 0; i < nvars; ++i) {
        e[i] = key_exponent(key, i);
    }
    return e;
}

namespace
{

int key_degree(MonomialKey key)
{
    int d = 0;
    while (key != 0) {
        d += static_cast<int>(key & 0xFF);
        key >>= 8;
    }
    return d;
}

template <typename S>
bool term_less(const Term<S> &a, const Term<S> &b)
{
    return a.degree < b.degree || (a.degree == b.degree && a.key > b.key);
}

template <typename S>
RealOf<S> max_tol(const RealOf<S> &a, const RealOf<S> &b)
{
    return a < b ? b : a;
}

template <typename S>
void check_compatible(const Series<S> &a, const Series<S> &b)
{
    if (a.vars() != b.vars()) {
        throw IncompatibleSeries("incompatible variable lists: [" + a.vars().joined() + "] vs [" + b.vars().joined()
                                 + "]");
    }
}

// a * b accumulated into acc, keeping degrees <= trunc.
template <typename S>
void accumulate_product(std::unordered_map<MonomialKey, S, MonomialKeyHash> &acc, const std::vector<Term<S>> &a,
                        const std::vector<Term<S>> &b, int trunc)
{
    if (a.empty() || b.empty()) {
        return;
    }
    const int bmin = b.front().degree;
    for (const auto &ta : a) {
        if (ta.degree + bmin > trunc) {
            break;
        }
        const int room = trunc - ta.degree;
        for (const auto &tb : b) {
            if (tb.degree > room) {
                break;
            }
            auto [it, inserted] = acc.try_emplace(ta.key + tb.key);
            it->second += ta.coeff * tb.coeff;
        }
    }
}

} // namespace

VarList::VarList() : names_(std::make_shared<const std::vector<std::string>>()) {}

VarList::VarList(std::vector<std::string> names)
{
    if (names.size() > kMaxVars) {
        throw DomainError("at most " + std::to_string(kMaxVars) + " variables are supported");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (names[i] == names[j]) {
                throw DomainError("duplicate variable name: " + names[i]);
            }
        }
    }
    names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

VarList::VarList(std::initializer_list<std::string> names) : VarList(std::vector<std::string>(names)) {}

std::optional<std::size_t> VarList::find(const std::string &name) const
{
    for (std::size_t i = 0; i < names_->size(); ++i) {
        if ((*names_)[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t VarList::index(const std::string &name) const
{
    auto i = find(name);
    if (!i) {
        throw IncompatibleSeries("unknown variable '" + name + "' in [" + joined() + "]");
    }
    return *i;
}

std::string VarList::joined() const
{
    std::string out;
    for (std::size_t i = 0; i < names_->size(); ++i) {
        if (i) {
            out += ' ';
        }
        out += (*names_)[i];
    }
    return out;
}

std::string format_monomial(const VarList &vars, MonomialKey key)
{
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const int e = key_exponent(key, i);
        if (e == 0) {
            continue;
        }
        if (!out.empty()) {
            out += '*';
        }
        out += vars[i];
        if (e > 1) {
            out += '^' + std::to_string(e);
        }
    }
    return out.empty() ? "1" : out;
}

std::vector<Exponents> monomials_of_degree(std::size_t nvars, int k)
{
    std::vector<Exponents> out;
    if (nvars == 0) {
        if (k == 0) {
            out.emplace_back();
        }
        return out;
    }
    Exponents e(nvars, 0);
    // Lexicographically descending enumeration of compositions of k.
    auto rec = [&](auto &&self, std::size_t i, int left) -> void {
        if (i + 1 == nvars) {
            e[i] = left;
            out.push_back(e);
            return;
        }
        for (int v = left; v >= 0; --v) {
            e[i] = v;
            self(self, i + 1, left - v);
        }
    };
    rec(rec, 0, k);
    return out;
}

std::vector<Exponents> monomials_up_to(std::size_t nvars, int k)
{
    std::vector<Exponents> out;
    for (int d = 0; d <= k; ++d) {
        auto m = monomials_of_degree(nvars, d);
        out.insert(out.end(), m.begin(), m.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Series members

template <typename S>
Series<S>::Series() : tol_(ScalarTraits<S>::default_tolerance())
{
}

template <typename S>
Series<S>::Series(VarList vars, int trunc) : Series(std::move(vars), trunc, ScalarTraits<S>::default_tolerance())
{
}

template <typename S>
Series<S>::Series(VarList vars, int trunc, Real tol) : vars_(std::move(vars)), trunc_(trunc), tol_(std::move(tol))
{
    if (trunc < 0) {
        throw TruncationError("negative truncation order");
    }
}

template <typename S>
Series<S> Series<S>::constant(VarList vars, int trunc, const S &c)
{
    Series r(std::move(vars), trunc);
    if (!ScalarTraits<S>::negligible(c, r.tol_)) {
        r.terms_.push_back({0, 0, c});
    }
    return r;
}

template <typename S>
Series<S> Series<S>::variable(VarList vars, int trunc, const std::string &name, const S &c)
{
    Exponents e(vars.size(), 0);
    e[vars.index(name)] = 1;
    return monomial(std::move(vars), trunc, e, c);
}

template <typename S>
Series<S> Series<S>::monomial(VarList vars, int trunc, const Exponents &e, const S &c)
{
    if (e.size() != vars.size()) {
        throw IncompatibleSeries("exponent vector length does not match variable count");
    }
    Series r(std::move(vars), trunc);
    const MonomialKey key = pack_exponents(e);
    const int d = key_degree(key);
    if (d <= trunc && !ScalarTraits<S>::negligible(c, r.tol_)) {
        r.terms_.push_back({key, d, c});
    }
    return r;
}

template <typename S>
int Series<S>::valuation() const
{
    return terms_.empty() ? trunc_ + 1 : terms_.front().degree;
}

template <typename S>
int Series<S>::max_degree() const
{
    return terms_.empty() ? -1 : terms_.back().degree;
}

template <typename S>
S Series<S>::coeff_key(MonomialKey key) const
{
    const int d = key_degree(key);
    Term<S> probe{key, d, S{}};
    auto it = std::lower_bound(terms_.begin(), terms_.end(), probe, term_less<S>);
    if (it != terms_.end() && it->key == key) {
        return it->coeff;
    }
    return S{};
}

template <typename S>
S Series<S>::coeff(const Exponents &e) const
{
    if (e.size() != vars_.size()) {
        throw IncompatibleSeries("exponent vector length does not match variable count");
    }
    return coeff_key(pack_exponents(e));
}

template <typename S>
S Series<S>::constant_term() const
{
    if (!terms_.empty() && terms_.front().degree == 0) {
        return terms_.front().coeff;
    }
    return S{};
}

template <typename S>
Series<S> Series<S>::truncated(int n) const
{
    if (n > trunc_) {
        throw TruncationError("cannot raise truncation order from " + std::to_string(trunc_) + " to "
                              + std::to_string(n));
    }
    Series r(vars_, n, tol_);
    for (const auto &t : terms_) {
        if (t.degree > n) {
            break;
        }
        r.terms_.push_back(t);
    }
    return r;
}

template <typename S>
Series<S> Series<S>::with_tolerance(Real tol) const
{
    Series r(vars_, trunc_, std::move(tol));
    for (const auto &t : terms_) {
        if (!ScalarTraits<S>::negligible(t.coeff, r.tol_)) {
            r.terms_.push_back(t);
        }
    }
    return r;
}

template <typename S>
Series<S> &Series<S>::operator+=(const Series &o)
{
    check_compatible(*this, o);
    const int n = std::min(trunc_, o.trunc_);
    const Real tol = max_tol<S>(tol_, o.tol_);
    std::vector<Term<S>> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin(), ae = terms_.end();
    auto b = o.terms_.begin(), be = o.terms_.end();
    while (a != ae || b != be) {
        if (a != ae && a->degree > n) {
            a = ae;
            continue;
        }
        if (b != be && b->degree > n) {
            b = be;
            continue;
        }
        if (b == be || (a != ae && term_less(*a, *b))) {
            out.push_back(std::move(*a));
            ++a;
        } else if (a == ae || term_less(*b, *a)) {
            out.push_back(*b);
            ++b;
        } else {
            S c = a->coeff + b->coeff;
            if (!ScalarTraits<S>::negligible(c, tol)) {
                out.push_back({a->key, a->degree, std::move(c)});
            }
            ++a;
            ++b;
        }
    }
    terms_ = std::move(out);
    trunc_ = n;
    tol_ = tol;
    return *this;
}

template <typename S>
Series<S> &Series<S>::operator-=(const Series &o)
{
    return *this += -o;
}

template <typename S>
Series<S> &Series<S>::operator*=(const Series &o)
{
    *this = *this * o;
    return *this;
}

template <typename S>
Series<S> &Series<S>::operator*=(const S &c)
{
    std::vector<Term<S>> out;
    out.reserve(terms_.size());
    for (auto &t : terms_) {
        S v = t.coeff * c;
        if (!ScalarTraits<S>::negligible(v, tol_)) {
            out.push_back({t.key, t.degree, std::move(v)});
        }
    }
    terms_ = std::move(out);
    return *this;
}

template <typename S>
bool Series<S>::equals(const Series &o) const
{
    if (vars_ != o.vars_) {
        return false;
    }
    const int n = std::min(trunc_, o.trunc_);
    Series a = truncated(n);
    a -= o.truncated(n);
    return a.is_zero();
}

template <typename S>
Series<S> Series<S>::from_terms(VarList vars, int trunc, Real tol,
                                std::unordered_map<MonomialKey, S, MonomialKeyHash> &&acc)
{
    Series r(std::move(vars), trunc, std::move(tol));
    r.terms_.reserve(acc.size());
    for (auto &[key, c] : acc) {
        const int d = key_degree(key);
        if (d <= trunc && !ScalarTraits<S>::negligible(c, r.tol_)) {
            r.terms_.push_back({key, d, std::move(c)});
        }
    }
    std::sort(r.terms_.begin(), r.terms_.end(), term_less<S>);
    return r;
}

template <typename S>
Series<S> Series<S>::from_sorted(VarList vars, int trunc, Real tol, std::vector<Term<S>> &&terms)
{
    Series r(std::move(vars), trunc, std::move(tol));
    r.terms_ = std::move(terms);
    return r;
}

template <typename S>
Series<S> operator*(const Series<S> &a, const Series<S> &b)
{
    check_compatible(a, b);
    const int n = std::min(a.trunc(), b.trunc());
    std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
    acc.reserve(std::min<std::size_t>(a.size() * b.size(), 1u << 20));
    accumulate_product(acc, a.terms(), b.terms(), n);
    return Series<S>::from_terms(a.vars(), n, max_tol<S>(a.tolerance(), b.tolerance()), std::move(acc));
}

// ---------------------------------------------------------------------------
// Free operations

template <typename S>
Series<S> power(const Series<S> &f, int k)
{
    if (k < 0) {
        throw DomainError("negative power");
    }
    Series<S> result = Series<S>::constant(f.vars(), f.trunc(), S(1)).with_tolerance(f.tolerance());
    Series<S> base = f;
    while (k > 0) {
        if (k & 1) {
            result *= base;
        }
        k >>= 1;
        if (k > 0) {
            base *= base;
        }
    }
    return result;
}

template <typename S>
Series<S> compose(const Series<S> &f, const Substitution<S> &subst, const ComposeOptions &opts)
{
    VarList target;
    if (opts.target) {
        target = *opts.target;
    } else if (!subst.empty()) {
        target = subst.begin()->second.vars();
    } else {
        target = f.vars();
    }

    RealOf<S> tol = f.tolerance();
    int subst_trunc = INT_MAX;
    for (const auto &[name, g] : subst) {
        if (g.vars() != target) {
            throw IncompatibleSeries("substitution for '" + name + "' is over [" + g.vars().joined() + "], expected ["
                                     + target.joined() + "]");
        }
        subst_trunc = std::min(subst_trunc, g.trunc());
        tol = max_tol<S>(tol, g.tolerance());
    }

    const std::size_t nf = f.vars().size();
    std::vector<int> sub_slot(nf, -1);
    std::vector<int> target_slot(nf, -1);
    std::vector<const Series<S> *> sigma;
    std::vector<int> nu;
    int min_nu = INT_MAX;
    bool has_constants = false;

    // Variables of f that never occur need no image.
    std::vector<bool> used(nf, false);
    for (const auto &t : f.terms()) {
        for (std::size_t i = 0; i < nf; ++i) {
            if (key_exponent(t.key, i) != 0) {
                used[i] = true;
            }
        }
    }

    for (std::size_t i = 0; i < nf; ++i) {
        const std::string &name = f.vars()[i];
        auto it = subst.find(name);
        if (it != subst.end()) {
            sub_slot[i] = static_cast<int>(sigma.size());
            sigma.push_back(&it->second);
            int v = it->second.valuation();
            if (v == 0) {
                if (!opts.allow_constant_terms && used[i]) {
                    throw DomainError("substitution for '" + name + "' has a nonzero constant term");
                }
                has_constants = true;
            }
            nu.push_back(v);
            if (used[i]) {
                min_nu = std::min(min_nu, v);
            }
        } else if (used[i]) {
            auto idx = target.find(name);
            if (!idx) {
                throw IncompatibleSeries("variable '" + name + "' has no image in [" + target.joined() + "]");
            }
            target_slot[i] = static_cast<int>(*idx);
            min_nu = std::min(min_nu, 1);
        }
    }

    int natural = subst_trunc;
    if (min_nu == INT_MAX) {
        // f is constant.
        natural = std::min(natural, subst.empty() ? f.trunc() : INT_MAX);
        if (natural == INT_MAX) {
            natural = f.trunc();
        }
    } else if (min_nu > 0) {
        const long bound = static_cast<long>(f.trunc() + 1) * min_nu - 1;
        natural = static_cast<int>(std::min<long>(natural, bound));
    } else {
        (void)has_constants;
        if (natural == INT_MAX) {
            natural = f.trunc();
        }
    }
    int n = natural;
    if (opts.trunc) {
        if (*opts.trunc > natural) {
            throw TruncationError("composition is determined only to order " + std::to_string(natural)
                                  + ", requested " + std::to_string(*opts.trunc));
        }
        n = *opts.trunc;
    }

    // Group the terms of f by their exponents in the substituted variables.
    std::map<MonomialKey, std::unordered_map<MonomialKey, S, MonomialKeyHash>> groups;
    std::map<MonomialKey, int> group_min_degree;
    for (const auto &t : f.terms()) {
        MonomialKey skey = 0, tkey = 0;
        int tdeg = 0;
        for (std::size_t i = 0; i < nf; ++i) {
            const int e = key_exponent(t.key, i);
            if (e == 0) {
                continue;
            }
            if (sub_slot[i] >= 0) {
                skey += unit_key(static_cast<std::size_t>(sub_slot[i]), e);
            } else {
                tkey += unit_key(static_cast<std::size_t>(target_slot[i]), e);
                tdeg += e;
            }
        }
        auto &g = groups[skey];
        auto [it, inserted] = g.try_emplace(tkey);
        it->second += t.coeff;
        auto [mit, minserted] = group_min_degree.try_emplace(skey, tdeg);
        if (!minserted) {
            mit->second = std::min(mit->second, tdeg);
        }
    }

    const Series<S> one = Series<S>::constant(target, n, S(1)).with_tolerance(tol);
    const Series<S> zero(target, n, tol);

    std::vector<std::vector<Series<S>>> powers(sigma.size());
    auto get_power = [&](std::size_t j, int e) -> const Series<S> & {
        auto &pw = powers[j];
        if (pw.empty()) {
            pw.push_back(one);
        }
        while (static_cast<int>(pw.size()) <= e) {
            if (static_cast<long>(pw.size()) * std::max(nu[j], 0) > n) {
                pw.push_back(zero);
            } else {
                Series<S> base = sigma[j]->trunc() > n ? sigma[j]->truncated(n) : *sigma[j];
                pw.push_back(pw.back() * base.with_tolerance(tol));
            }
        }
        return pw[static_cast<std::size_t>(e)];
    };

    std::map<MonomialKey, Series<S>> memo;
    auto product = [&](auto &&self, MonomialKey skey) -> Series<S> {
        if (skey == 0) {
            return one;
        }
        auto it = memo.find(skey);
        if (it != memo.end()) {
            return it->second;
        }
        std::size_t last = 0;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            if (key_exponent(skey, j) != 0) {
                last = j;
            }
        }
        const int e = key_exponent(skey, last);
        const MonomialKey prefix = skey - unit_key(last, e);
        Series<S> r = self(self, prefix) * get_power(last, e);
        memo.emplace(skey, r);
        return r;
    };

    std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
    for (auto &[skey, part] : groups) {
        long lower = group_min_degree[skey];
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            lower += static_cast<long>(key_exponent(skey, j)) * std::max(nu[j], 0);
        }
        if (lower > n) {
            continue;
        }
        Series<S> c = Series<S>::from_terms(target, n, tol, std::move(part));
        if (c.is_zero()) {
            continue;
        }
        if (skey == 0) {
            for (const auto &t : c.terms()) {
                auto [it, inserted] = acc.try_emplace(t.key);
                it->second += t.coeff;
            }
            continue;
        }
        Series<S> p = product(product, skey);
        accumulate_product(acc, c.terms(), p.terms(), n);
    }
    return Series<S>::from_terms(target, n, tol, std::move(acc));
}

template <typename S>
Series<S> reciprocal(const Series<S> &f)
{
    const S c = f.constant_term();
    if (ScalarTraits<S>::negligible(c, f.tolerance())) {
        throw DomainError("reciprocal of a series with zero constant term");
    }
    const Series<S> one = Series<S>::constant(f.vars(), f.trunc(), S(1)).with_tolerance(f.tolerance());
    Series<S> g = Series<S>::constant(f.vars(), f.trunc(), S(1) / c).with_tolerance(f.tolerance());
    // Newton: g <- g (2 - f g); the error valuation doubles each step.
    for (int iter = 0; iter < 64; ++iter) {
        Series<S> e = one - f * g;
        if (e.is_zero()) {
            return g;
        }
        g += g * e;
    }
    throw DomainError("reciprocal iteration did not converge");
}

template <typename S>
Series<S> sqrt_unit(const Series<S> &f)
{
    const S c = f.constant_term();
    if (!ScalarTraits<S>::negligible(c - S(1), f.tolerance())) {
        throw DomainError("sqrt_unit requires constant term 1");
    }
    const Series<S> one = Series<S>::constant(f.vars(), f.trunc(), S(1)).with_tolerance(f.tolerance());
    const S half = ScalarTraits<S>::from_rational(make_rational(1, 2));
    // Newton on the inverse square root h: h <- h + h (1 - f h^2) / 2.
    Series<S> h = one;
    for (int iter = 0; iter < 64; ++iter) {
        Series<S> e = one - f * h * h;
        if (e.is_zero()) {
            return f * h;
        }
        h += (h * e) * half;
    }
    throw DomainError("square root iteration did not converge");
}

template <typename S>
Series<S> implicit_solve(const Series<S> &F, const std::string &y)
{
    const VarList &vars = F.vars();
    const std::size_t yi = vars.index(y);
    const RealOf<S> &tol = F.tolerance();
    if (!ScalarTraits<S>::negligible(F.constant_term(), tol)) {
        throw DomainError("implicit_solve requires F(0) = 0");
    }
    const S dy = F.coeff_key(unit_key(yi));
    if (ScalarTraits<S>::negligible(dy, tol)) {
        throw DomainError("implicit_solve: dF/d" + y + " vanishes at the origin");
    }
    const int n = F.trunc();
    const Series<S> Fy = partial(F, y);

    std::vector<std::string> xs;
    for (const auto &name : vars.names()) {
        if (name != y) {
            xs.push_back(name);
        }
    }
    const VarList xvars(xs);

    Series<S> Y(vars, n, tol);
    for (int iter = 0; iter <= n + 2; ++iter) {
        Series<S> r = compose(F, Substitution<S>{{y, Y}}, ComposeOptions{n, vars, false});
        if (r.is_zero()) {
            return embed(Y, xvars);
        }
        // Newton step with the derivative evaluated along the current iterate.
        // Fy is known to n - 1 and r vanishes at 0, so r / Fy is known to n.
        Series<S> d = compose(Fy, Substitution<S>{{y, Y}}, ComposeOptions{n - 1 >= 0 ? n - 1 : 0, vars, false});
        Series<S> inv = reciprocal(d);
        std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
        accumulate_product(acc, r.terms(), inv.terms(), n);
        Series<S> step = Series<S>::from_terms(vars, n, tol, std::move(acc));
        Y -= step;
    }
    throw DomainError("implicit_solve did not converge");
}

template <typename S>
Series<S> conj_series(const Series<S> &f)
{
    std::vector<Term<S>> terms = f.terms();
    for (auto &t : terms) {
        t.coeff = conj(t.coeff);
    }
    return Series<S>::from_sorted(f.vars(), f.trunc(), f.tolerance(), std::move(terms));
}

template <typename S>
Series<S> formal_conjugate(const Series<S> &f, const std::vector<std::pair<std::string, std::string>> &pairs)
{
    std::map<std::string, std::string> names;
    for (const auto &name : f.vars().names()) {
        names[name] = name;
    }
    for (const auto &[a, b] : pairs) {
        names[a] = b;
        names[b] = a;
    }
    return rename(conj_series(f), names, f.vars());
}

template <typename S>
Series<S> partial(const Series<S> &f, const std::string &var, int k)
{
    if (k < 0) {
        throw DomainError("negative derivative order");
    }
    const std::size_t vi = f.vars().index(var);
    if (f.trunc() - k < 0) {
        throw TruncationError("derivative of order " + std::to_string(k) + " exceeds truncation order "
                              + std::to_string(f.trunc()));
    }
    std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
    for (const auto &t : f.terms()) {
        const int e = key_exponent(t.key, vi);
        if (e < k) {
            continue;
        }
        long factor = 1;
        for (int j = 0; j < k; ++j) {
            factor *= (e - j);
        }
        acc.emplace(t.key - unit_key(vi, k), t.coeff * S(static_cast<int>(factor)));
    }
    return Series<S>::from_terms(f.vars(), f.trunc() - k, f.tolerance(), std::move(acc));
}

template <typename S>
Series<S> rename(const Series<S> &f, const std::map<std::string, std::string> &names, const VarList &target)
{
    const std::size_t nf = f.vars().size();
    std::vector<int> slot(nf, -1);
    for (std::size_t i = 0; i < nf; ++i) {
        auto it = names.find(f.vars()[i]);
        const std::string &to = it == names.end() ? f.vars()[i] : it->second;
        if (auto idx = target.find(to)) {
            slot[i] = static_cast<int>(*idx);
        }
    }
    std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
    for (const auto &t : f.terms()) {
        MonomialKey key = 0;
        for (std::size_t i = 0; i < nf; ++i) {
            const int e = key_exponent(t.key, i);
            if (e == 0) {
                continue;
            }
            if (slot[i] < 0) {
                throw IncompatibleSeries("variable '" + f.vars()[i] + "' is not available in [" + target.joined()
                                         + "]");
            }
            key += unit_key(static_cast<std::size_t>(slot[i]), e);
        }
        auto [it, inserted] = acc.try_emplace(key);
        it->second += t.coeff;
    }
    return Series<S>::from_terms(target, f.trunc(), f.tolerance(), std::move(acc));
}

template <typename S>
Series<S> embed(const Series<S> &f, const VarList &target)
{
    if (f.vars() == target) {
        return f;
    }
    return rename(f, {}, target);
}

template <typename S>
Series<S> restrict_zero(const Series<S> &f, const std::vector<std::string> &vars)
{
    std::vector<std::size_t> idx;
    for (const auto &v : vars) {
        idx.push_back(f.vars().index(v));
    }
    std::vector<Term<S>> out;
    for (const auto &t : f.terms()) {
        bool keep = true;
        for (auto i : idx) {
            if (key_exponent(t.key, i) != 0) {
                keep = false;
                break;
            }
        }
        if (keep) {
            out.push_back(t);
        }
    }
    return Series<S>::from_sorted(f.vars(), f.trunc(), f.tolerance(), std::move(out));
}

template <typename S>
Series<S> coefficient_of(const Series<S> &f, const std::string &var, int k)
{
    const std::size_t vi = f.vars().index(var);
    if (f.trunc() - k < 0) {
        throw TruncationError("coefficient of " + var + "^" + std::to_string(k) + " is beyond truncation order");
    }
    std::unordered_map<MonomialKey, S, MonomialKeyHash> acc;
    for (const auto &t : f.terms()) {
        if (key_exponent(t.key, vi) == k) {
            acc.emplace(t.key - unit_key(vi, k), t.coeff);
        }
    }
    return Series<S>::from_terms(f.vars(), f.trunc() - k, f.tolerance(), std::move(acc));
}

template <typename S>
int var_valuation(const Series<S> &f, const std::string &var)
{
    const std::size_t vi = f.vars().index(var);
    int v = f.trunc() + 1;
    for (const auto &t : f.terms()) {
        v = std::min(v, key_exponent(t.key, vi));
    }
    return v;
}

template <typename S>
Series<S> divide_by_monomial(const Series<S> &f, const Exponents &e)
{
    const MonomialKey mk = pack_exponents(e);
    int d = 0;
    for (int x : e) {
        d += x;
    }
    if (f.trunc() - d < 0) {
        throw TruncationError("division by a monomial of degree " + std::to_string(d) + " exceeds truncation order");
    }
    std::vector<Term<S>> out;
    out.reserve(f.size());
    for (const auto &t : f.terms()) {
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (key_exponent(t.key, i) < e[i]) {
                throw DomainError("term " + format_monomial(f.vars(), t.key) + " is not divisible by "
                                  + format_monomial(f.vars(), mk));
            }
        }
        out.push_back({t.key - mk, t.degree - d, t.coeff});
    }
    return Series<S>::from_sorted(f.vars(), f.trunc() - d, f.tolerance(), std::move(out));
}

template <typename S>
Series<S> multiply_by_monomial(const Series<S> &f, const Exponents &e)
{
    const MonomialKey mk = pack_exponents(e);
    int d = 0;
    for (int x : e) {
        d += x;
    }
    std::vector<Term<S>> out;
    out.reserve(f.size());
    for (const auto &t : f.terms()) {
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (key_exponent(t.key, i) + e[i] > kMaxExponent) {
                throw DomainError("exponent overflow");
            }
        }
        out.push_back({t.key + mk, t.degree + d, t.coeff});
    }
    return Series<S>::from_sorted(f.vars(), f.trunc() + d, f.tolerance(), std::move(out));
}

template <typename S>
RealOf<S> max_abs_coeff(const Series<S> &f)
{
    using std::abs;
    RealOf<S> m(0);
    for (const auto &t : f.terms()) {
        RealOf<S> a = t.coeff.re < 0 ? RealOf<S>(-t.coeff.re) : t.coeff.re;
        RealOf<S> b = t.coeff.im < 0 ? RealOf<S>(-t.coeff.im) : t.coeff.im;
        if (m < a) {
            m = a;
        }
        if (m < b) {
            m = b;
        }
    }
    return m;
}

template <typename S>
std::optional<Term<S>> leading_term(const Series<S> &f)
{
    if (f.is_zero()) {
        return std::nullopt;
    }
    return f.terms().front();
}

template <typename S>
bool Jet<S>::operator==(const Jet &o) const
{
    if (vars != o.vars || order != o.order || monomials != o.monomials) {
        return false;
    }
    const RealOf<S> t = tol < o.tol ? o.tol : tol;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!ScalarTraits<S>::negligible(coeffs[i] - o.coeffs[i], t)) {
            return false;
        }
    }
    return true;
}

template <typename S>
Jet<S> jet(const Series<S> &f, int k)
{
    if (k > f.trunc()) {
        throw TruncationError("jet order " + std::to_string(k) + " exceeds truncation order "
                              + std::to_string(f.trunc()));
    }
    Jet<S> j;
    j.vars = f.vars();
    j.order = k;
    j.tol = f.tolerance();
    j.monomials = monomials_up_to(f.vars().size(), k);
    j.coeffs.reserve(j.monomials.size());
    for (const auto &m : j.monomials) {
        j.coeffs.push_back(f.coeff(m));
    }
    return j;
}

#define CRJET_INSTANTIATE_SERIES(S)                                                                          \
    template class Series<S>;                                                                                \
    template Series<S> operator*(const Series<S> &, const Series<S> &);                                    \
    template Series<S> compose(const Series<S> &, const Substitution<S> &, const ComposeOptions &);        \
    template Series<S> power(const Series<S> &, int);                                                      \
    template Series<S> reciprocal(const Series<S> &);                                                      \
    template Series<S> sqrt_unit(const Series<S> &);                                                       \
    template Series<S> implicit_solve(const Series<S> &, const std::string &);                             \
    template Series<S> conj_series(const Series<S> &);                                                     \
    template Series<S> formal_conjugate(const Series<S> &,                                                 \
                                        const std::vector<std::pair<std::string, std::string>> &);         \
    template Series<S> partial(const Series<S> &, const std::string &, int);                               \
    template Series<S> embed(const Series<S> &, const VarList &);                                          \
    template Series<S> rename(const Series<S> &, const std::map<std::string, std::string> &,               \
                              const VarList &);                                                            \
    template Series<S> restrict_zero(const Series<S> &, const std::vector<std::string> &);                \
    template Series<S> coefficient_of(const Series<S> &, const std::string &, int);                        \
    template int var_valuation(const Series<S> &, const std::string &);                                    \
    template Series<S> divide_by_monomial(const Series<S> &, const Exponents &);                           \
    template Series<S> multiply_by_monomial(const Series<S> &, const Exponents &);                         \
    template RealOf<S> max_abs_coeff(const Series<S> &);                                                   \
    template std::optional<Term<S>> leading_term(const Series<S> &);                                       \
    template struct Jet<S>;                                                                                  \
    template Jet<S> jet(const Series<S> &, int);

CRJET_INSTANTIATE_SERIES(Gaussian)
CRJET_INSTANTIATE_SERIES(FloatComplex)

} // namespace crjet
