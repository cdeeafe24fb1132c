#ifndef CRJET_BLOWUP_HPP
#define CRJET_BLOWUP_HPP

#include <string>
#include <vector>

#include <crjet/holomap.hpp>
#include <crjet/hypersurface.hpp>
#include <crjet/normalform.hpp>

namespace crjet
{

struct BlowupExponents {
    std::vector<int> alphas; // alpha_j = 2 + 3 b_1 - b_j
    int threshold = 0;       // 3 + 6 b_1
};

BlowupExponents blowup_exponents(const std::vector<int> &b);
template <typename S>
BlowupExponents blowup_exponents(const NormalFormData<S> &nf)
{
    return blowup_exponents(nf.exponents);
}

// (z, w) -> (z_1 w^{alpha_1}, ..., z_n w^{alpha_n}, w^2), declared at the given
// truncation order.
template <typename S>
HoloMap<S> blowup_map(const std::vector<int> &alphas, int trunc);

// z1..zn, zb1..zbn, s, t.
const VarList &preimage_vars(int n);

// 2 s t - sum_j eps_j |z_j|^2 (s^2 - t^2)^{b_j} (s^2 + t^2)^{alpha_j} theta_j(s^2 - t^2) - Rtilde,
// with Rtilde = R(z_j w^{alpha_j}, zb_j wb^{alpha_j}, Re w^2), w = s + i t: its
// zero set is the preimage of the normal-form hypersurface under the blow-up.
template <typename S>
Series<S> preimage_equation(const NormalFormData<S> &nf);

// Rtilde alone.
template <typename S>
Series<S> preimage_remainder(const NormalFormData<S> &nf);

template <typename S>
struct BlowupData {
    int n = 1;
    std::vector<int> epsilons;
    std::vector<int> alphas;
    int threshold = 0;
    HoloMap<S> B;
    Series<S> eta;   // over real_vars(n)
    RealGraph<S> Mhat; // Im w = s^threshold eta
    // eta is determined up to this total degree by the input data.
    int certified_order = 0;
    int fixed_point_iterations = 0;
};

// Solves the preimage equation for t = s^threshold v(z, zb, s) by the fixed
// point iteration v <- v - E(v)/2, where E = 2v - (right-hand side) is the
// preimage equation divided by s^{threshold+1}.
template <typename S>
BlowupData<S> solve_blowup(const NormalFormData<S> &nf);

// eta(z, zb, 0) = 1/2 sum eps_j |z_j|^2, eta(z, 0, s) = eta(0, zb, s) = 0,
// 2 b_j + 2 alpha_j = 4 + 6 b_1 and alpha_j >= 2.
template <typename S>
CheckReport check_blowup_invariants(const BlowupData<S> &bd, const std::vector<int> &exponents);

// Im W - phi(Z, conj Z, Re W) along the blown-up graph, (Z, W) = B(z, w): zero
// iff the blown-up hypersurface lies in the preimage of M.
template <typename S>
Series<S> blowup_membership_residual(const BlowupData<S> &bd, const NormalFormData<S> &nf);

template <typename S>
struct MhatForm {
    ComplexDefining<S> h;        // complex defining function of the blown-up hypersurface
    GoodNonminimalForm<S> form;  // its literal good nonminimal data
    HoloMap<S> scaling;          // the rescaling that was needed (identity when none)
    std::vector<RealOf<S>> scales;
};

template <typename S>
MhatForm<S> mhat_good_form(const BlowupData<S> &bd);

template <typename S>
std::string format_blowup(const BlowupData<S> &bd);
template <typename S>
BlowupData<S> parse_blowup(const std::string &text);

} // namespace crjet

#endif
