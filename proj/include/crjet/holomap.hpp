#ifndef CRJET_HOLOMAP_HPP
#define CRJET_HOLOMAP_HPP

#include <string>
#include <vector>

#include <crjet/linalg.hpp>
#include <crjet/series.hpp>

namespace crjet
{

// Standard variable lists. Indices are 1-based in names.
//   map_vars(n)  = z1..zn, w             (holomorphic coordinates)
//   real_vars(n) = z1..zn, zb1..zbn, s   (real-graph coordinates, s = Re w)
//   q_vars(n)    = z1..zn, chi1..chin, tau (complexified defining function)
const VarList &map_vars(int n);
const VarList &real_vars(int n);
const VarList &q_vars(int n);
std::string zname(int j);
std::string zbname(int j);
std::string chiname(int j);

// A germ of a holomorphic map (C^{n+1},0) -> (C^{n+1},0): components
// F1..Fn, G, each a series over map_vars(n).
template <typename S>
struct HoloMap {
    std::vector<Series<S>> comps;

    int n() const { return static_cast<int>(comps.size()) - 1; }
    int trunc() const;
    const Series<S> &F(int j) const { return comps.at(static_cast<std::size_t>(j)); }
    const Series<S> &G() const { return comps.back(); }
    HoloMap truncated(int t) const;
};

template <typename S>
HoloMap<S> identity_map(int n, int trunc);

// Components of H evaluated at the given arguments (n+1 series over a common
// variable list): H(args).
template <typename S>
std::vector<Series<S>> apply_map(const HoloMap<S> &H, const std::vector<Series<S>> &args,
                                 std::optional<int> trunc = std::nullopt);

// H1 o H2.
template <typename S>
HoloMap<S> compose_maps(const HoloMap<S> &H1, const HoloMap<S> &H2);

// Linear part as an (n+1)x(n+1) matrix: row i holds the coefficients of
// component i.
template <typename S>
CMatrix<S> linear_part(const HoloMap<S> &H);

template <typename S>
HoloMap<S> linear_map(const CMatrix<S> &L, int trunc);

// Formal inverse; requires an invertible linear part and H(0) = 0.
template <typename S>
HoloMap<S> inverse_map(const HoloMap<S> &H);

// True iff every component agrees with the identity up to degree k.
template <typename S>
bool jet_is_identity(const HoloMap<S> &H, int k);

template <typename S>
bool maps_equal(const HoloMap<S> &A, const HoloMap<S> &B);

// Map file format: blocks F1: ... Fn: and G:, each a series over z1..zn, w.
template <typename S>
std::string format_map(const HoloMap<S> &H);
template <typename S>
HoloMap<S> parse_map(const std::string &text);

} // namespace crjet

#endif
