#include <crjet/errors.hpp>
#include <crjet/lifting.hpp>

#include <algorithm>

namespace crjet
{

int minimal_lift_order(const BlowupExponents &ex)
{
    return std::max(ex.alphas.back(), ex.threshold);
}

int lift_trunc(int map_trunc, const std::vector<int> &alphas)
{
    const int amax = *std::max_element(alphas.begin(), alphas.end());
    return std::min(2 * map_trunc, 2 * map_trunc + 1 - amax);
}

namespace
{

// 3 + 6 b_1 recovered from alpha_1 = 2 + 2 b_1.
int threshold_of(const std::vector<int> &alphas)
{
    return 3 * alphas.front() - 3;
}

template <typename S>
Exponents w_power(int n, int k)
{
    Exponents e(map_vars(n).size(), 0);
    e.back() = k;
    return e;
}

CheckReport failed(const std::string &identity)
{
    CheckReport r;
    r.ok = false;
    r.identity = identity;
    return r;
}

} // namespace

template <typename S>
CheckReport check_jet_identity(const HoloMap<S> &H, int k)
{
    if (H.trunc() < k) {
        throw TruncationError("map known to order " + std::to_string(H.trunc()) + ", jet of order "
                              + std::to_string(k) + " requested");
    }
    const HoloMap<S> id = identity_map<S>(H.n(), H.trunc());
    for (std::size_t i = 0; i < H.comps.size(); ++i) {
        const std::string name = i + 1 < H.comps.size() ? "F" + std::to_string(i + 1) : std::string("G");
        auto r = report_zero((H.comps[i] - id.comps[i]).truncated(k),
                             "jet(" + name + ", " + std::to_string(k) + ") = jet(Id, " + std::to_string(k) + ")");
        if (!r.ok) {
            return r;
        }
    }
    CheckReport ok;
    ok.trunc = k;
    return ok;
}

template <typename S>
CheckReport check_lift_hypothesis(const HoloMap<S> &H, const std::vector<int> &alphas, int l)
{
    if (static_cast<int>(alphas.size()) != H.n()) {
        return failed("one alpha per z-component");
    }
    const int need = std::max(alphas.back(), threshold_of(alphas));
    if (l < need) {
        return failed("l >= max(alpha_n, 3 + 6 b_1) = " + std::to_string(need));
    }
    for (std::size_t i = 0; i < H.comps.size(); ++i) {
        if (!ScalarTraits<S>::negligible(H.comps[i].constant_term(), H.comps[i].tolerance())) {
            return failed("H(0) = 0");
        }
    }
    return check_jet_identity(H, l);
}

template <typename S>
HoloMap<S> lift_map(const HoloMap<S> &H, const std::vector<int> &alphas, int l, int branch)
{
    if (branch != 1 && branch != -1) {
        throw DomainError("square-root branch must be +1 or -1");
    }
    const int n = H.n();
    const int L = lift_trunc(H.trunc(), alphas);
    if (L < l) {
        throw TruncationError("a map known to order " + std::to_string(H.trunc()) + " determines the lift only to order "
                              + std::to_string(L) + " < " + std::to_string(l));
    }
    const auto hyp = check_lift_hypothesis(H, alphas, l);
    if (!hyp.ok) {
        throw DomainError("lift hypothesis violated: " + hyp.describe());
    }
    const HoloMap<S> B = blowup_map<S>(alphas, 2 * H.trunc() + 1);
    const HoloMap<S> HB = compose_maps(H, B);

    // G o B = w^2 (1 + Psi o B); Ghat = branch * w * sqrt(1 + Psi o B).
    Series<S> U;
    try {
        U = divide_by_monomial(HB.G(), w_power<S>(n, 2));
    } catch (const DomainError &) {
        throw DomainError("G o B is not divisible by w^2");
    }
    const Series<S> root = sqrt_unit(U);
    const Series<S> Ghat = multiply_by_monomial(root, w_power<S>(n, 1)) * S(branch);
    const Series<S> rinv = reciprocal(root);

    HoloMap<S> Hhat;
    for (int j = 1; j <= n; ++j) {
        const int a = alphas[static_cast<std::size_t>(j - 1)];
        Series<S> q;
        try {
            q = divide_by_monomial(HB.F(j - 1), w_power<S>(n, a));
        } catch (const DomainError &) {
            throw DomainError("F" + std::to_string(j) + " o B is not divisible by w^" + std::to_string(a));
        }
        Series<S> Fhat = q * power(rinv, a);
        if (a % 2 == 1 && branch == -1) {
            Fhat = -Fhat;
        }
        Hhat.comps.push_back(Fhat.truncated(L));
    }
    Hhat.comps.push_back(Ghat.truncated(L));
    return Hhat;
}

template <typename S>
CheckReport check_commuting_square(const HoloMap<S> &H, const HoloMap<S> &Hhat, const std::vector<int> &alphas)
{
    const int big = 2 * std::max(H.trunc(), Hhat.trunc()) + 1;
    const HoloMap<S> B = blowup_map<S>(alphas, big);
    const HoloMap<S> left = compose_maps(B, Hhat);
    const HoloMap<S> right = compose_maps(H, B);
    CheckReport out;
    out.trunc = big;
    for (std::size_t i = 0; i < left.comps.size(); ++i) {
        const std::string name = i + 1 < left.comps.size() ? "F" + std::to_string(i + 1) : std::string("G");
        auto r = report_zero(left.comps[i] - right.comps[i], "B o Hhat = H o B (" + name + ")");
        if (!r.ok) {
            return r;
        }
        out.trunc = std::min(out.trunc, r.trunc);
    }
    return out;
}

template <typename S>
CheckReport check_ghat_shape(const HoloMap<S> &Hhat, int k)
{
    const int n = Hhat.n();
    const Series<S> D = Hhat.G() - Series<S>::variable(map_vars(n), Hhat.G().trunc(), "w");
    std::vector<Term<S>> low;
    for (const auto &t : D.terms()) {
        if (key_exponent(t.key, static_cast<std::size_t>(n)) < k) {
            low.push_back(t);
        }
    }
    const Series<S> lowpart = Series<S>::from_sorted(D.vars(), D.trunc(), D.tolerance(), std::move(low));
    return report_zero(lowpart, "Ghat - w = O(w^" + std::to_string(k) + ")");
}

template <typename S>
CheckReport check_preserves(const HoloMap<S> &H, const ComplexDefining<S> &h)
{
    return report_zero(basic_identity_residual(H, h, h), "G(z,Q) = Q(F(z,Q), Fbar, Gbar)");
}

template <typename S>
CheckReport check_preserves(const HoloMap<S> &H, const RealGraph<S> &g)
{
    return report_zero(graph_membership_residual(H, g, g), "Im G = phi(F, conj F, Re G)");
}

template <typename S>
LiftReport<S> lift_pipeline(const HoloMap<S> &H, const NormalFormData<S> &nf, int l)
{
    LiftReport<S> rep;
    const RealGraph<S> g = normal_form_graph(nf);
    rep.source_preserved = check_preserves(H, real_to_complex(g));
    if (!rep.source_preserved.ok) {
        throw DomainError("map does not preserve the hypersurface: " + rep.source_preserved.describe());
    }
    rep.blowup = solve_blowup(nf);
    rep.Hhat = lift_map(H, rep.blowup.alphas, l);
    rep.lift_order = rep.Hhat.trunc();
    rep.square = check_commuting_square(H, rep.Hhat, rep.blowup.alphas);
    rep.jet = check_jet_identity(rep.Hhat, l);
    rep.shape = check_ghat_shape(rep.Hhat, 2 * (l + 1));
    rep.preserves = check_preserves(rep.Hhat, real_to_complex(rep.blowup.Mhat));
    const RealGraph<S> image = transform_graph(rep.blowup.Mhat, inverse_map(rep.Hhat));
    rep.image_graph = report_zero(image.phi - rep.blowup.Mhat.phi, "image of Mhat under Hhat = Mhat");
    return rep;
}

#define CRJET_INSTANTIATE_LIFTING(S)                                                                          \
    template CheckReport check_lift_hypothesis(const HoloMap<S> &, const std::vector<int> &, int);          \
    template HoloMap<S> lift_map(const HoloMap<S> &, const std::vector<int> &, int, int);                   \
    template CheckReport check_commuting_square(const HoloMap<S> &, const HoloMap<S> &,                     \
                                                const std::vector<int> &);                                  \
    template CheckReport check_jet_identity(const HoloMap<S> &, int);                                       \
    template CheckReport check_ghat_shape(const HoloMap<S> &, int);                                         \
    template CheckReport check_preserves(const HoloMap<S> &, const ComplexDefining<S> &);                   \
    template CheckReport check_preserves(const HoloMap<S> &, const RealGraph<S> &);                         \
    template LiftReport<S> lift_pipeline(const HoloMap<S> &, const NormalFormData<S> &, int);

CRJET_INSTANTIATE_LIFTING(Gaussian)
CRJET_INSTANTIATE_LIFTING(FloatComplex)

} // namespace crjet
