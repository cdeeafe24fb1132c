#ifndef CRJET_CRSYSTEM_HPP
#define CRJET_CRSYSTEM_HPP

#include <optional>
#include <string>
#include <vector>

#include <crjet/holomap.hpp>
#include <crjet/hypersurface.hpp>

namespace crjet
{

// For l = 0..m, d^l G / dw^l (z, 0) is a real constant. Reports the first l
// that fails.
template <typename S>
CheckReport check_gw_real(const HoloMap<S> &H, int m);

// G = P(w) + w^m G2(z, w) with P(w) = sum_{j=1}^{m-1} G_{w^j}(0)/j! w^j.
template <typename S>
struct AutomorphismSplit {
    int m = 1;
    Series<S> P;     // over {w}
    Series<S> G2;    // over map_vars(n)
    Series<S> Qpoly; // over {w, wb}: P(wb) - P(w) = (wb - w) Qpoly
    Series<S> Tpoly; // over {w}: P(w) = w Tpoly (zero for m = 1)
};

// DomainError when the reality conditions fail.
template <typename S>
AutomorphismSplit<S> split_automorphism(const HoloMap<S> &H, int m);

const VarList &w_vars();
const VarList &wwb_vars();

// On the graph Im w = phi: w(t) = s + i phi, A = conj(w)/w and B = (conj(w) - w)/w^m,
// all over real_vars(n). DomainError when phi is not divisible by s^m.
template <typename S>
struct ChartFunctions {
    int m = 1;
    Series<S> w_of_t;
    Series<S> A;
    Series<S> B;
};

template <typename S>
ChartFunctions<S> chart_functions(const RealGraph<S> &g, int m);

// A first-order operator sum_v coeffs[v] d/dv on real_vars(n).
template <typename S>
struct VectorField {
    std::vector<Series<S>> coeffs;
};

template <typename S>
Series<S> apply_field(const VectorField<S> &X, const Series<S> &f);
template <typename S>
VectorField<S> lie_bracket(const VectorField<S> &X, const VectorField<S> &Y);

// L_j = d/dzb_j - phi_{zb_j} / (phi_s - i) d/ds, their conjugates, and S = s^m d/ds.
template <typename S>
struct CRFrame {
    int n = 1;
    int m = 1;
    std::vector<VectorField<S>> L;
    std::vector<VectorField<S>> Lbar;
    VectorField<S> S_field;
};

template <typename S>
CRFrame<S> cr_frame(const RealGraph<S> &g, int m);

// [L_j, Lbar_k] = a_jk S, [L_j, S] = b_j S, [L_j, L_k] = 0.
template <typename S>
struct Commutators {
    std::vector<std::vector<Series<S>>> a;
    std::vector<Series<S>> b;
    CheckReport LL;   // [L_j, L_k] = 0
    CheckReport aS;   // [L_j, Lbar_k] - a_jk S = 0
    CheckReport bS;   // [L_j, S] - b_j S = 0
    bool a_diagonal_nonzero = false;
};

// DomainError when a bracket has components off d/ds or its d/ds coefficient is
// not divisible by s^m (the graph is not of infinite type m at this order), or
// when some a_jj(0) vanishes.
template <typename S>
Commutators<S> commutators(const CRFrame<S> &frame);

// The basic identity restricted to the hypersurface, as a function of t = (z, zb, s):
//   G(z, w(t)) - Q(F(z, w(t)), conj F(zb, conj w(t)), conj G(zb, conj w(t))),
// and its images under the L_j, which involve conj F, conj G and their L_j
// derivatives. Reports the first failing equation.
template <typename S>
CheckReport reflection_check(const HoloMap<S> &H, const RealGraph<S> &g);

// Jet determination probe. Unknowns are the coefficients of H - Id of degree
// K+1 .. N - 3(v - 1), v = ord(Q - tau). The basic identity is linearized at
// H = Id and imposed to degree N for the unknowns of degree K+1 .. d,
// d = K+1, K+2, ...; the first d with a nonzero solution is reported.
//
// The window is narrower than N because perturbations can cancel the identity
// far beyond their own degree: on the Heisenberg hypersurface (3/2 z w^2, w^3)
// cancels every term below degree 6, and on the models Im w = 1/2 s^m |z|^2
// the analogous (c z w^{d-1}, w^d) survive to degree d + 3(m + 1) - 1. Probing
// such unknowns at a smaller N would report spurious free directions. The shift
// 3(v - 1) is exactly the one observed on these model families for d <= 6.
struct ProbeOptions {
    // Relative rank tolerance for the float backend.
    double rank_tol = 1e-20;
    // Overrides the highest unknown degree (default probe_max_degree(h, N)).
    std::optional<int> max_degree;
};

struct ProbeDegree {
    int degree = 0;     // unknowns of degree K+1 .. degree
    int rows = 0;       // real equations, residual degree <= N
    int unknowns = 0;   // real unknowns
    int rank = 0;
    int kernel_dim = 0;
};

template <typename S>
struct ProbeResult {
    bool determined = true;
    // No unknown fits the window K+1 .. max_degree: "determined" carries no information.
    bool vacuous = false;
    int K = 0;
    int N = 0;
    int max_degree = 0;
    int first_free_degree = -1;
    std::vector<ProbeDegree> degrees;
    std::vector<HoloMap<S>> kernel; // free directions, as perturbations of Id
    std::string report() const;
};

// Highest unknown degree probed at truncation N: N - 3(v - 1) with
// v = ord(Q - tau) (v = 2 when Q = tau).
template <typename S>
int probe_max_degree(const ComplexDefining<S> &h, int N);

template <typename S>
ProbeResult<S> jet_determination_probe(const ComplexDefining<S> &h, int K, int N, const ProbeOptions &opts = {});

// Newton iteration on the basic identity starting from Id + direction, with
// corrections of degree K+1..N. Returns H with jet(H, K) = jet(Id, K) solving the
// basic identity to order N; DomainError when a linear step is inconsistent or
// the iteration does not close.
template <typename S>
HoloMap<S> generate_automorphism(const ComplexDefining<S> &h, int K, int N, const HoloMap<S> &direction,
                                 const ProbeOptions &opts = {});

} // namespace crjet

#endif
