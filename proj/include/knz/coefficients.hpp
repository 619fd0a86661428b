#pragma once

#include <complex>
#include <vector>

#include "knz/algebra.hpp"
#include "knz/basis.hpp"
#include "knz/section.hpp"

namespace knz {

/// l^{(n,p)(m,s)}[e] = sum over in-points of res omega^{n,p} omega^{m,s} e.
inline cplx l_coefficient(const KNBasis& B, int n, int p, int m, int s, const Section& e, Route route, int samples = 512) {
  if (e.weight() != -1) fail(ErrorKind::precondition, "l_coefficient needs a vector field");
  const Section a = B.omega(n, p).section, b = B.omega(m, s).section;
  if (route == Route::closed_form) return closed_residue_sum(a * b * e);
  return quadrature_residue_sum([&](cplx z) { return a(z) * b(z) * e(z); }, B.curve(), samples);
}

/// Closed form where it reaches, quadrature otherwise.
inline cplx l_coefficient(const KNBasis& B, int n, int p, int m, int s, const Section& e) {
  const Section a = B.omega(n, p).section, b = B.omega(m, s).section;
  const Section prod = a * b * e;
  if (closed_form_available(prod)) return closed_residue_sum(prod);
  return quadrature_residue_sum([&](cplx z) { return a(z) * b(z) * e(z); }, B.curve());
}

/// Genus 0: minus the residue at infinity of the same 1-form.
inline cplx l_coefficient_at_infinity(const KNBasis& B, int n, int p, int m, int s, const Section& e, int samples = 512) {
  const Section prod = B.omega(n, p).section * B.omega(m, s).section * e;
  return -quadrature_out_residue(prod.fn(), B.curve(), samples);
}

/// Derivative of a genus-0 section as a section: each factor (z-a)^k
/// contributes k (z-a)^{-1} times the monomial.
inline Section derivative_section(const Section& s) {
  if (s.curve().genus() != 0) fail(ErrorKind::internal, "derivative_section is rational only");
  std::vector<Monomial> out;
  for (const auto& t : s.terms())
    for (const auto& f : t.factors()) out.push_back(t * Monomial(std::log(cplx(static_cast<double>(f.exponent), 0.0)),{{f.shift, -1}}));
  return Section(s.curve_ptr(), s.weight() + 1, std::move(out));
}

/// Orders of a section used to bound Sugawara sums: minimum nominal order at
/// the in-points and nominal order at the out-point.
struct OrderProfile {
  int in_min = 0;
  int out = 0;
};

inline OrderProfile order_profile(const Section& e) {
  const auto& c = e.curve();
  OrderProfile o;
  o.in_min = 1 << 20;
  for (const auto& z : c.points()) o.in_min = std::min(o.in_min, e.nominal_order(z));
  if (c.genus() == 1) {
    o.out = e.nominal_order(c.out_point());
  } else {
    // f(z) dz^l at infinity: order -deg f - 2 l, minimized over terms
    int best = 1 << 20;
    for (const auto& t : e.terms()) {
      int deg = 0;
      for (const auto& f : t.factors()) deg += f.exponent;
      best = std::min(best, -deg - 2 * e.weight());
    }
    o.out = best;
  }
  return o;
}

}  // namespace knz
