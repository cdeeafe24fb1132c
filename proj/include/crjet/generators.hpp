#ifndef CRJET_GENERATORS_HPP
#define CRJET_GENERATORS_HPP

#include <random>

#include <crjet/holomap.hpp>
#include <crjet/hypersurface.hpp>
#include <crjet/linalg.hpp>
#include <crjet/series.hpp>

namespace crjet
{

// Exact -> float conversion of series and the containers built from them.
FloatSeries to_float(const ExactSeries &f);
HoloMap<FloatComplex> to_float(const HoloMap<Gaussian> &H);
RealGraph<FloatComplex> to_float(const RealGraph<Gaussian> &g);
ComplexDefining<FloatComplex> to_float(const ComplexDefining<Gaussian> &h);
SeriesMatrix<FloatComplex> to_float(const SeriesMatrix<Gaussian> &A);

// Random Gaussian-rational series with small numerators and denominators:
// nterms monomials of degree in [min_degree, trunc].
ExactSeries random_series(std::mt19937 &rng, const VarList &vars, int trunc, int nterms, int min_degree = 0,
                          bool allow_complex = true);

// Random real graph in normal coordinates: a sum of real monomials each
// containing at least one z and one zb.
RealGraph<Gaussian> random_normal_graph(std::mt19937 &rng, int n, int trunc, int nterms = 5);

// Random Hermitian n x n family over s with rational coefficients.
SeriesMatrix<Gaussian> random_hermitian_family(std::mt19937 &rng, int n, int trunc);

// The real graph phi = sum_{jk} A_jk(s) z_j zb_k (+ tail), whose Levi matrix
// along the axis is A.
RealGraph<Gaussian> graph_with_levi_matrix(const SeriesMatrix<Gaussian> &A, int trunc);

} // namespace crjet

#endif
