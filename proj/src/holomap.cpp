#include <crjet/holomap.hpp>
#include <crjet/io.hpp>

#include <map>
#include <mutex>

namespace crjet
{

std::string zname(int j)
{
    return "z" + std::to_string(j);
}

std::string zbname(int j)
{
    return "zb" + std::to_string(j);
}

std::string chiname(int j)
{
    return "chi" + std::to_string(j);
}

namespace
{

const VarList &cached(std::map<int, VarList> &cache, int n, const std::vector<std::string> &names)
{
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, VarList(names)).first;
    }
    return it->second;
}

} // namespace

const VarList &map_vars(int n)
{
    static std::map<int, VarList> cache;
    std::vector<std::string> names;
    for (int j = 1; j <= n; ++j) {
        names.push_back(zname(j));
    }
    names.push_back("w");
    return cached(cache, n, names);
}

const VarList &real_vars(int n)
{
    static std::map<int, VarList> cache;
    std::vector<std::string> names;
    for (int j = 1; j <= n; ++j) {
        names.push_back(zname(j));
    }
    for (int j = 1; j <= n; ++j) {
        names.push_back(zbname(j));
    }
    names.push_back("s");
    return cached(cache, n, names);
}

const VarList &q_vars(int n)
{
    static std::map<int, VarList> cache;
    std::vector<std::string> names;
    for (int j = 1; j <= n; ++j) {
        names.push_back(zname(j));
    }
    for (int j = 1; j <= n; ++j) {
        names.push_back(chiname(j));
    }
    names.push_back("tau");
    return cached(cache, n, names);
}

template <typename S>
int HoloMap<S>::trunc() const
{
    int t = comps.empty() ? 0 : comps.front().trunc();
    for (const auto &c : comps) {
        t = std::min(t, c.trunc());
    }
    return t;
}

template <typename S>
HoloMap<S> HoloMap<S>::truncated(int t) const
{
    HoloMap out;
    for (const auto &c : comps) {
        out.comps.push_back(c.truncated(t));
    }
    return out;
}

template <typename S>
HoloMap<S> identity_map(int n, int trunc)
{
    HoloMap<S> H;
    const VarList &v = map_vars(n);
    for (std::size_t i = 0; i < v.size(); ++i) {
        H.comps.push_back(Series<S>::variable(v, trunc, v[i]));
    }
    return H;
}

template <typename S>
std::vector<Series<S>> apply_map(const HoloMap<S> &H, const std::vector<Series<S>> &args, std::optional<int> trunc)
{
    const VarList &v = map_vars(H.n());
    if (args.size() != v.size()) {
        throw IncompatibleSeries("apply_map: expected " + std::to_string(v.size()) + " arguments");
    }
    Substitution<S> sub;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sub.emplace(v[i], args[i]);
    }
    std::vector<Series<S>> out;
    for (const auto &c : H.comps) {
        out.push_back(compose(embed(c, v), sub, ComposeOptions{trunc, args.front().vars(), false}));
    }
    return out;
}

template <typename S>
HoloMap<S> compose_maps(const HoloMap<S> &H1, const HoloMap<S> &H2)
{
    if (H1.n() != H2.n()) {
        throw IncompatibleSeries("compose_maps: dimension mismatch");
    }
    HoloMap<S> out;
    out.comps = apply_map(H1, H2.comps);
    return out;
}

template <typename S>
CMatrix<S> linear_part(const HoloMap<S> &H)
{
    const std::size_t m = H.comps.size();
    CMatrix<S> L(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            L(i, j) = H.comps[i].coeff_key(unit_key(j));
        }
    }
    return L;
}

template <typename S>
HoloMap<S> linear_map(const CMatrix<S> &L, int trunc)
{
    const int n = static_cast<int>(L.rows) - 1;
    const VarList &v = map_vars(n);
    HoloMap<S> H;
    for (std::size_t i = 0; i < L.rows; ++i) {
        Series<S> c(v, trunc);
        for (std::size_t j = 0; j < L.cols; ++j) {
            c += Series<S>::variable(v, trunc, v[j], L(i, j));
        }
        H.comps.push_back(c);
    }
    return H;
}

template <typename S>
HoloMap<S> inverse_map(const HoloMap<S> &H)
{
    const int n = H.n();
    const int trunc = H.trunc();
    for (const auto &c : H.comps) {
        if (!ScalarTraits<S>::negligible(c.constant_term(), c.tolerance())) {
            throw DomainError("inverse_map: the map does not fix the origin");
        }
    }
    const CMatrix<S> L = linear_part(H);
    const CMatrix<S> Linv = cmat_inverse(L, H.comps.front().tolerance());
    // Nonlinear part N = H - L; the inverse K solves K = Linv (x - N(K)).
    HoloMap<S> Lmap = linear_map(L, trunc);
    HoloMap<S> N;
    for (std::size_t i = 0; i < H.comps.size(); ++i) {
        N.comps.push_back(H.comps[i].truncated(trunc) - Lmap.comps[i]);
    }
    const HoloMap<S> Linvmap = linear_map(Linv, trunc);
    const HoloMap<S> id = identity_map<S>(n, trunc);
    HoloMap<S> K = Linvmap;
    for (int iter = 0; iter <= trunc; ++iter) {
        auto NK = apply_map(N, K.comps, trunc);
        HoloMap<S> rhs;
        for (std::size_t i = 0; i < id.comps.size(); ++i) {
            rhs.comps.push_back(id.comps[i] - NK[i]);
        }
        HoloMap<S> next;
        next.comps = apply_map(Linvmap, rhs.comps, trunc);
        if (maps_equal(next, K)) {
            return next;
        }
        K = next;
    }
    return K;
}

template <typename S>
bool jet_is_identity(const HoloMap<S> &H, int k)
{
    const HoloMap<S> id = identity_map<S>(H.n(), H.trunc());
    for (std::size_t i = 0; i < H.comps.size(); ++i) {
        if (jet(H.comps[i], k) != jet(id.comps[i], k)) {
            return false;
        }
    }
    return true;
}

template <typename S>
bool maps_equal(const HoloMap<S> &A, const HoloMap<S> &B)
{
    if (A.comps.size() != B.comps.size()) {
        return false;
    }
    for (std::size_t i = 0; i < A.comps.size(); ++i) {
        if (A.comps[i] != B.comps[i]) {
            return false;
        }
    }
    return true;
}

template <typename S>
std::string format_map(const HoloMap<S> &H)
{
    std::string out;
    for (int j = 0; j < H.n(); ++j) {
        out += format_block("F" + std::to_string(j + 1), H.comps[static_cast<std::size_t>(j)]);
    }
    out += format_block("G", H.G());
    return out;
}

template <typename S>
HoloMap<S> parse_map(const std::string &text)
{
    const Document doc = parse_document(text);
    std::vector<Series<S>> Fs;
    for (int j = 1;; ++j) {
        const DocEntry *e = doc.find("F" + std::to_string(j));
        if (!e) {
            break;
        }
        Fs.push_back(entry_series<S>(*e));
    }
    const DocEntry *g = doc.find("G");
    if (!g) {
        throw ParseError("map file lacks a 'G:' block", 0);
    }
    Fs.push_back(entry_series<S>(*g));
    const int n = static_cast<int>(Fs.size()) - 1;
    HoloMap<S> H;
    for (std::size_t i = 0; i < Fs.size(); ++i) {
        try {
            H.comps.push_back(embed(Fs[i], map_vars(n)));
        } catch (const Error &err) {
            throw ParseError(std::string("map component uses unexpected variables: ") + err.what(), 0);
        }
    }
    return H;
}

#define CRJET_INSTANTIATE_HOLOMAP(S)                                                                             \
    template struct HoloMap<S>;                                                                                \
    template HoloMap<S> identity_map<S>(int, int);                                                             \
    template std::vector<Series<S>> apply_map(const HoloMap<S> &, const std::vector<Series<S>> &,              \
                                              std::optional<int>);                                             \
    template HoloMap<S> compose_maps(const HoloMap<S> &, const HoloMap<S> &);                                  \
    template CMatrix<S> linear_part(const HoloMap<S> &);                                                       \
    template HoloMap<S> linear_map(const CMatrix<S> &, int);                                                   \
    template HoloMap<S> inverse_map(const HoloMap<S> &);                                                       \
    template bool jet_is_identity(const HoloMap<S> &, int);                                                    \
    template bool maps_equal(const HoloMap<S> &, const HoloMap<S> &);                                          \
    template std::string format_map(const HoloMap<S> &);                                                       \
    template HoloMap<S> parse_map<S>(const std::string &);

CRJET_INSTANTIATE_HOLOMAP(Gaussian)
CRJET_INSTANTIATE_HOLOMAP(FloatComplex)

} // namespace crjet
