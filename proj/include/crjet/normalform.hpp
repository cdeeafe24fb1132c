#ifndef CRJET_NORMALFORM_HPP
#define CRJET_NORMALFORM_HPP

#include <string>
#include <vector>

#include <crjet/holomap.hpp>
#include <crjet/hypersurface.hpp>
#include <crjet/linalg.hpp>

namespace crjet
{

// The variable list {t} used for curve parametrizations and {s} used for
// families along the axis.
const VarList &t_vars();
const VarList &s_vars();

// A real-analytic curve t -> (beta(t), eta(t)) through the origin; all series
// are over t_vars().
template <typename S>
struct AnalyticCurve {
    std::vector<Series<S>> beta;
    Series<S> eta;
};

// eta(t) - t - i psi(beta(t), conj(beta)(t), t): vanishes iff the curve, in the
// normalized parametrization, lies on the graph Im w = psi.
template <typename S>
CheckReport curve_membership(const RealGraph<S> &g, const AnalyticCurve<S> &c);

// Reparametrizes a transverse curve by Re eta, so that Re eta(t) = t.
// DomainError if the curve is not transverse to {w = 0}.
template <typename S>
AnalyticCurve<S> normalize_parametrization(const AnalyticCurve<S> &c);

template <typename S>
struct AdaptedChart {
    ComplexDefining<S> h;
    // Old coordinates as functions of the new ones:
    //   z' = z + beta(w),  w' = Q'(z + beta(w), conj(beta)(w), conj(eta)(w)).
    HoloMap<S> change;
    CheckReport normality;
    CheckReport axis_image; // change(0, t) = (beta(t), eta(t))
};

// Normal coordinates in which the given curve becomes the axis {(0, s)}.
// DomainError when the curve is not transverse or does not lie on the
// hypersurface (the message names the first failing order).
template <typename S>
AdaptedChart<S> adapt_to_curve(const ComplexDefining<S> &h, const AnalyticCurve<S> &c);

// Analytic diagonalization of a Hermitian family A(s) (entries over s_vars()):
// U A U* = diag(D) with U unitary, to the truncation order of A.
struct RellichOptions {
    // Eigenvalues of a constant matrix closer than this are treated as one cluster.
    double cluster_tol = 1e-20;
};

template <typename S>
struct RellichResult {
    SeriesMatrix<S> U;
    std::vector<Series<S>> D;
    // Sizes of eigenvalue clusters that stayed together through the whole
    // truncation window (accepted only for diagonal input).
    std::vector<int> persistent_clusters;
};

template <typename S>
RellichResult<S> rellich_diagonalize(const SeriesMatrix<S> &A, const RellichOptions &opts = {});

// Largest coefficient of U U* - I, and of the off-diagonal part of U A U*.
template <typename S>
RealOf<S> unitarity_defect(const SeriesMatrix<S> &U);
template <typename S>
RealOf<S> offdiagonal_defect(const SeriesMatrix<S> &U, const SeriesMatrix<S> &A);

// Im w = sum_j eps_j |z_j|^2 s^{b_j} theta_j(s) + R(z, zb, s).
template <typename S>
struct NormalFormData {
    int n = 1;
    std::vector<int> epsilons;
    std::vector<int> exponents;       // b_1 >= ... >= b_n
    std::vector<Series<S>> thetas;    // over s_vars(), theta_j(0) = 1
    Series<S> R;                      // over real_vars(n), O(|z|^3)
    HoloMap<S> change;                // original coordinates as functions of the new ones
};

// The data for a given shape with theta_j = 1, R = 0 and identity change.
template <typename S>
NormalFormData<S> model_normal_form(const std::vector<int> &epsilons, const std::vector<int> &exponents, int trunc);

// The graph determined by the data.
template <typename S>
RealGraph<S> normal_form_graph(const NormalFormData<S> &nf);

// Structural checks on the data: sorting of b, theta_j(0) = 1, R normal and
// free of (z, zb)-bidegree (1,1) terms.
template <typename S>
CheckReport check_normal_form_shape(const NormalFormData<S> &nf);

// Pulls the reconstructed graph back through nf.change and compares it with the
// original graph: the residual of the coordinate identity.
template <typename S>
Series<S> normal_form_residual(const NormalFormData<S> &nf, const RealGraph<S> &original);

// Normal form along the axis curve {(0, s)} of the given normal chart.
// DomainError when some diagonal Levi entry vanishes to the truncation order.
template <typename S>
NormalFormData<S> normal_form(const RealGraph<S> &g, const RellichOptions &opts = {});

template <typename S>
std::string format_normal_form(const NormalFormData<S> &nf);
template <typename S>
NormalFormData<S> parse_normal_form(const std::string &text);

} // namespace crjet

#endif
