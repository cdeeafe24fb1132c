#ifndef CRJET_LIFTING_HPP
#define CRJET_LIFTING_HPP

#include <vector>

#include <crjet/blowup.hpp>
#include <crjet/holomap.hpp>
#include <crjet/hypersurface.hpp>

namespace crjet
{

// The smallest jet order for which lifting through the blow-up is guaranteed:
// max(alpha_n, 3 + 6 b_1).
int minimal_lift_order(const BlowupExponents &ex);

// Order to which the lift is determined by a map known to the given order.
// B raises degrees by at least a factor 2, and F_j o B is divided by w^{alpha_j}.
int lift_trunc(int map_trunc, const std::vector<int> &alphas);

// Checks the hypotheses of lift_map: H(0) = 0, jet(H, l) = jet(Id, l), and
// l >= max(alpha_n, 3 + 6 b_1). The jet condition makes G o B = w^2 (1 + Psi o B)
// with Psi o B of order >= 2l, so the square root below is defined.
template <typename S>
CheckReport check_lift_hypothesis(const HoloMap<S> &H, const std::vector<int> &alphas, int l);

// The unique Hhat with B o Hhat = H o B and linear part of Ghat equal to +w:
//   Ghat = w sqrt(1 + Psi o B),  Fhat_j = (F_j o B) / Ghat^{alpha_j}.
// branch = -1 selects the other square root (used to exhibit the uniqueness
// argument; such a lift fails the jet criterion).
// DomainError when the hypothesis fails (message names the failing identity) or
// some F_j o B is not divisible by w^{alpha_j}; TruncationError when H is too
// short to determine the lift through degree l.
template <typename S>
HoloMap<S> lift_map(const HoloMap<S> &H, const std::vector<int> &alphas, int l, int branch = 1);

// B o Hhat - H o B, componentwise, to the common order.
template <typename S>
CheckReport check_commuting_square(const HoloMap<S> &H, const HoloMap<S> &Hhat, const std::vector<int> &alphas);

// jet(H, k) = jet(Id, k), reported at the first differing monomial.
template <typename S>
CheckReport check_jet_identity(const HoloMap<S> &H, int k);

// w-valuation of Ghat - w is at least k.
template <typename S>
CheckReport check_ghat_shape(const HoloMap<S> &Hhat, int k);

// H maps the hypersurface into itself (the basic identity), to the truncation order.
template <typename S>
CheckReport check_preserves(const HoloMap<S> &H, const ComplexDefining<S> &h);
template <typename S>
CheckReport check_preserves(const HoloMap<S> &H, const RealGraph<S> &g);

template <typename S>
struct LiftReport {
    BlowupData<S> blowup;
    HoloMap<S> Hhat;
    int lift_order = 0;
    CheckReport source_preserved; // H maps M into itself
    CheckReport square;           // B o Hhat = H o B
    CheckReport jet;              // jet(Hhat, l) = jet(Id, l)
    CheckReport shape;            // Ghat - w = O(w^{2(l+1)})
    CheckReport preserves;        // Hhat maps Mhat into itself (direct check)
    CheckReport image_graph;      // the image graph of Mhat under Hhat, recomputed, equals phihat

    bool ok() const { return square.ok && jet.ok && preserves.ok && image_graph.ok; }
};

// Lifts an automorphism H of the normal-form hypersurface through its blow-up
// and certifies that the lift preserves the blown-up hypersurface. DomainError
// when H does not preserve the hypersurface (message carries the defect order).
template <typename S>
LiftReport<S> lift_pipeline(const HoloMap<S> &H, const NormalFormData<S> &nf, int l);

} // namespace crjet

#endif
