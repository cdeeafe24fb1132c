#ifndef CRJET_HYPERSURFACE_HPP
#define CRJET_HYPERSURFACE_HPP

#include <optional>
#include <string>
#include <vector>

#include <crjet/holomap.hpp>
#include <crjet/series.hpp>

namespace crjet
{

// w = Q(z, chi, tau) with chi = conj(z), tau = conj(w); Q over q_vars(n).
template <typename S>
struct ComplexDefining {
    int n = 1;
    Series<S> Q;
};

// Im w = phi(z, zb, s) with s = Re w; phi over real_vars(n).
template <typename S>
struct RealGraph {
    int n = 1;
    Series<S> phi;
};

// Outcome of an identity check carried out to a truncation order.
struct CheckReport {
    bool ok = true;
    int trunc = 0;
    std::string identity;   // which identity failed
    std::string monomial;   // first failing monomial in graded-lex order
    int defect_order = -1;  // degree of the first failing monomial
    std::string coefficient;

    std::string describe() const;
};

template <typename S>
CheckReport report_zero(const Series<S> &residual, const std::string &identity);

template <typename S>
CheckReport check_normal(const ComplexDefining<S> &h);

// phi equals its formal conjugate under z_j <-> zb_j.
template <typename S>
CheckReport check_reality(const RealGraph<S> &g);

// phi(z,0,s) = phi(0,zb,s) = 0.
template <typename S>
CheckReport check_real_normal(const RealGraph<S> &g);

template <typename S>
ComplexDefining<S> real_to_complex(const RealGraph<S> &g);

template <typename S>
RealGraph<S> complex_to_real(const ComplexDefining<S> &h);

// Qbar(chi, z, tau): conjugate coefficients and swap z_j <-> chi_j.
template <typename S>
Series<S> conjugate_defining(const Series<S> &Q, int n);

// n x n matrix of series in the single variable s: A_jk(s) = phi_{z_j zb_k}(0, s).
template <typename S>
std::vector<std::vector<Series<S>>> levi_matrix_along_axis(const RealGraph<S> &g);

struct InfiniteTypeResult {
    enum class Kind { Minimal, Order, Flat } kind = Kind::Flat;
    int m = 0;
    int tested_trunc = 0;
    std::string describe() const;
};

template <typename S>
InfiniteTypeResult infinite_type_order(const RealGraph<S> &g);

template <typename S>
struct GoodNonminimalForm {
    int m = 1;
    std::vector<int> epsilons;
    Series<S> Theta; // over q_vars(n)
};

template <typename S>
std::optional<GoodNonminimalForm<S>> is_good_nonminimal(const ComplexDefining<S> &h);

template <typename S>
ComplexDefining<S> reconstruct_good(const GoodNonminimalForm<S> &f, int trunc);

// Rescales z_j -> z_j / sqrt(c_j) so that the tau^m coefficient becomes exactly
// i <z, chi>. The returned map expresses the old coordinates in terms of the new
// ones.
template <typename S>
struct NormalizedGood {
    ComplexDefining<S> h;
    HoloMap<S> change;
    std::vector<RealOf<S>> scales; // c_j
    int m = 0;
    std::vector<int> epsilons;
};

template <typename S>
NormalizedGood<S> normalize_good(const ComplexDefining<S> &h);

// New defining function after the coordinate change Phi (new -> old):
// solves Phi_G(z,w) = Q(Phi_F(z,w), conj(Phi_F)(chi,tau), conj(Phi_G)(chi,tau)) for w.
template <typename S>
ComplexDefining<S> transform(const ComplexDefining<S> &h, const HoloMap<S> &Phi);

// Real-graph counterpart of transform: the graph Im w = phi'(z, zb, Re w) of the
// same hypersurface in the new coordinates, solved from
// Im Phi_G = phi(Phi_F, conj Phi_F, Re Phi_G) along w = s + i p.
template <typename S>
RealGraph<S> transform_graph(const RealGraph<S> &g, const HoloMap<S> &Phi);

// G(z,Qs) - Qt(F(z,Qs), Fbar(chi,tau), Gbar(chi,tau)) with Qs = Q_src(z,chi,tau):
// vanishes iff H maps the source hypersurface into the target one.
template <typename S>
Series<S> basic_identity_residual(const HoloMap<S> &H, const ComplexDefining<S> &src, const ComplexDefining<S> &tgt);

// Im W - phi_tgt(Z, conj Z, Re W) along w = s + i phi_src(z, zb, s), (Z, W) = H(z, w).
template <typename S>
Series<S> graph_membership_residual(const HoloMap<S> &H, const RealGraph<S> &src, const RealGraph<S> &tgt);

// The components of conj(H) evaluated at the given arguments.
template <typename S>
std::vector<Series<S>> apply_conjugate_map(const HoloMap<S> &H, const std::vector<Series<S>> &args,
                                           std::optional<int> trunc = std::nullopt);

// Model hypersurfaces.
//   levi_model:        phi = sum eps_j |z_j|^2 (Heisenberg for n = 1, eps = (1))
//   nonminimal_model:  phi = 1/2 s^m sum eps_j |z_j|^2, good nonminimal of order m
template <typename S>
RealGraph<S> levi_model(const std::vector<int> &eps, int trunc);
template <typename S>
RealGraph<S> nonminimal_model(int m, const std::vector<int> &eps, int trunc);

// Hypersurface file: headers n:, trunc:, and a Q: or phi: series block.
template <typename S>
struct HypersurfaceFile {
    int n = 1;
    int trunc = 0;
    std::optional<ComplexDefining<S>> complex;
    std::optional<RealGraph<S>> real;
};

template <typename S>
HypersurfaceFile<S> parse_hypersurface(const std::string &text);
template <typename S>
std::string format_hypersurface(const ComplexDefining<S> &h);
template <typename S>
std::string format_hypersurface(const RealGraph<S> &g);

} // namespace crjet

#endif
