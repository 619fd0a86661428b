#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knz/curve.hpp"
#include "knz/error.hpp"
#include "knz/laurent.hpp"
#include "knz/quadrature.hpp"
#include "knz/section.hpp"

namespace knz {

enum class FormKind {
  standard,  // generic closed form
  constant,  // A_0 = 1 for a single in-point in genus 1
  primed,    // genus-1 A'_{-1,p} before the duality correction
  adjusted   // genus-1 A_{-1,p} = A'_{-1,p} - sum_s gamma_{p,s} A_{0,s}
};

inline const char* to_string(FormKind k) {
  switch (k) {
    case FormKind::standard: return "standard";
    case FormKind::constant: return "constant";
    case FormKind::primed: return "primed";
    case FormKind::adjusted: return "adjusted";
  }
  return "?";
}

/// Basis element f^lambda_{n,p} together with the data that produced it.
struct KNForm {
  int weight = 0;
  int degree = 0;
  int point = 0;
  FormKind kind = FormKind::standard;
  Section section;
  cplx log_normalization{};               // log of the constant divided out (C_{n,p} in genus 1)
  std::optional<cplx> extra_zero;         // b_{n,p}
  std::vector<cplx> aux_points;           // w_1, w_2 for primed elements
  std::vector<std::pair<int, cplx>> correction;  // (s, gamma_{p,s})

  cplx operator()(cplx z) const { return section(z); }
  cplx normalization() const { return std::exp(log_normalization); }
};

/// Genus-0 element (z-z_p)^{n-l} prod_{i!=p} (z-z_i)^{n-l+1} (z_p-z_i)^{-n+l-1} dz^l,
/// unscaled.
inline KNForm make_form_g0(const CurvePtr& curve, int lambda, int n, int p) {
  const auto& c = *curve;
  if (c.genus() != 0) fail(ErrorKind::internal, "make_form_g0 needs a genus-0 curve");
  const int e = n - lambda;
  std::vector<Factor> f{{c.point(p), e}};
  cplx logc{};
  for (int i = 0; i < c.size(); ++i) {
    if (i == p) continue;
    f.push_back({c.point(i), e + 1});
    logc += static_cast<double>(-e - 1) * std::log(c.point(p) - c.point(i));
  }
  KNForm k;
  k.weight = lambda;
  k.degree = n;
  k.point = p;
  k.section = Section(curve, lambda, {Monomial(logc, std::move(f))});
  k.log_normalization = -logc;
  return k;
}

namespace detail {

inline void require_generic(const MarkedCurve& c, cplx a, const std::string& what) {
  for (const auto& s : c.singular_points())
    if (c.distance(a, s) < 1e-8) fail(ErrorKind::precondition, "nongeneric configuration: " + what);
}

inline KNForm normalized_at(const CurvePtr& curve, std::vector<Factor> f, int p) {
  Monomial raw(cplx{}, std::move(f));
  auto j = raw.jet(*curve, curve->point(p), 1);
  KNForm k;
  k.point = p;
  k.log_normalization = j->log_lead;
  k.section = Section(curve, 0, {Monomial(-j->log_lead, raw.factors())});
  return k;
}

}  // namespace detail

/// Genus-1 primed element A'_{-1,p} with auxiliary points w_1, w_2 = z_p + z_0 - w_1.
inline KNForm make_primed_g1(const CurvePtr& curve, int p) {
  const auto& c = *curve;
  const cplx zp = c.point(p);
  const cplx z0 = c.out_point();
  const double gap = c.min_gap();
  cplx offset = cplx{0.37, 0.21} * gap;
  for (int attempt = 0; attempt < 12; ++attempt) {
    const cplx w1 = zp + offset;
    const cplx w2 = zp + z0 - w1;
    bool ok = true;
    for (const auto& s : c.singular_points())
      if (c.distance(w1, s) < 1e-3 * gap || c.distance(w2, s) < 1e-3 * gap) ok = false;
    if (ok) {
      auto k = detail::normalized_at(curve, {{zp, -1}, {z0, -1}, {w1, 1}, {w2, 1}}, p);
      k.degree = -1;
      k.kind = FormKind::primed;
      k.aux_points = {w1, w2};
      return k;
    }
    offset *= std::polar(1.0, std::numbers::pi / 6.0);
  }
  fail(ErrorKind::precondition, "nongeneric configuration: no admissible auxiliary point for degree -1");
}

/// Genus-1 element A_{n,p} from the sigma-product formula, unscaled. Degree -1
/// returns the primed element; use KNBasis for the adjusted one.
inline KNForm make_function_g1(const CurvePtr& curve, int n, int p) {
  const auto& c = *curve;
  if (c.genus() != 1) fail(ErrorKind::internal, "make_function_g1 needs a genus-1 curve");
  const int N = c.size();
  if (N == 1 && n == 0) {
    KNForm k;
    k.degree = 0;
    k.point = p;
    k.kind = FormKind::constant;
    k.section = Section(curve, 0, {Monomial()});
    return k;
  }
  if (n == -1) return make_primed_g1(curve, p);
  cplx sum{};
  for (const auto& z : c.points()) sum += z;
  const cplx z0 = c.out_point();
  const cplx b = -static_cast<double>(n + 1) * sum + c.point(p) + static_cast<double>(N * (n + 1)) * z0;
  detail::require_generic(c, b, "extra zero of degree " + std::to_string(n) + " element at point " + std::to_string(p + 1) +
                                    " meets a marked point");
  std::vector<Factor> f;
  for (int i = 0; i < N; ++i) f.push_back({c.point(i), n + 1 - (i == p ? 1 : 0)});
  f.push_back({z0, -N * (n + 1)});
  f.push_back({b, 1});
  auto k = detail::normalized_at(curve, std::move(f), p);
  k.degree = n;
  k.extra_zero = b;
  return k;
}

/// Smallest distance from the extra zeros of the genus-1 elements with
/// degrees in [nmin, nmax] to the marked points. Small margins mean badly
/// conditioned elements even though they are formally defined.
inline double extra_zero_margin(const MarkedCurve& c, int nmin, int nmax) {
  if (c.genus() != 1) return std::numeric_limits<double>::infinity();
  const int N = c.size();
  cplx sum{};
  for (const auto& z : c.points()) sum += z;
  double m = std::numeric_limits<double>::infinity();
  for (int n = nmin; n <= nmax; ++n) {
    if (n == -1 || (N == 1 && n == 0)) continue;
    for (int p = 0; p < N; ++p) {
      const cplx b = -static_cast<double>(n + 1) * sum + c.point(p) + static_cast<double>(N * (n + 1)) * c.out_point();
      for (const auto& s : c.singular_points()) m = std::min(m, c.distance(b, s));
    }
  }
  return m;
}

/// f^lambda_{m+lambda,p} = A_{m,p} dz^lambda.
inline KNForm lift_weight(const KNForm& a, int lambda) {
  if (a.weight != 0) fail(ErrorKind::internal, "lift_weight expects a function");
  KNForm k = a;
  k.weight = lambda;
  k.degree = a.degree + lambda;
  k.section = Section(a.section.curve_ptr(), lambda, a.section.terms());
  return k;
}

enum class Route { closed_form, quadrature };

inline const char* to_string(Route r) { return r == Route::closed_form ? "closed_form" : "quadrature"; }

/// Sum of residues of a 1-form over the in-points by the closed form.
/// Throws if a residue is beyond the closed-form reach.
inline cplx closed_residue_sum(const Section& s) {
  cplx acc{};
  for (const auto& z : s.curve().points()) {
    auto r = s.closed_residue(z);
    if (!r) fail(ErrorKind::numerical, "pole order beyond closed-form reach");
    acc += *r;
  }
  return acc;
}

inline bool closed_form_available(const Section& s) {
  for (const auto& z : s.curve().points())
    if (!s.closed_residue(z)) return false;
  return true;
}

/// Sum over in-points of (1/2 pi i) \oint f dz on the default small circles.
inline cplx quadrature_residue_sum(const ComplexFn& f, const MarkedCurve& c, int samples = 512) {
  cplx acc{};
  for (const auto& z : c.points()) acc += contour_integral_checked(f, c.contour_at(z, samples)).value;
  return acc;
}

/// Residue sum over the out-point: at infinity in genus 0, at z_0 in genus 1.
inline cplx quadrature_out_residue(const ComplexFn& f, const MarkedCurve& c, int samples = 512) {
  if (c.genus() == 0) return -contour_integral_checked(f, c.outer_contour(samples)).value;
  return contour_integral_checked(f, c.contour_at(c.out_point(), samples)).value;
}

struct BasisOptions {
  Route gamma_route = Route::closed_form;
  int samples = 512;
};

/// Basis of all weights on one curve, including the genus-1 duality
/// corrections and the per-point coordinate scales.
class KNBasis {
 public:
  explicit KNBasis(const MarkedCurve& curve, BasisOptions opt = {})
      : curve_(std::make_shared<const MarkedCurve>(curve)), opt_(opt) {
    if (curve_->genus() == 1) adjust();
  }

  const MarkedCurve& curve() const { return *curve_; }
  const CurvePtr& curve_ptr() const { return curve_; }
  const BasisOptions& options() const { return opt_; }
  int size() const { return curve_->size(); }

  /// f^lambda_{n,p}, scaled by alpha_p^n.
  KNForm form(int lambda, int n, int p) const {
    KNForm k = unscaled(lambda, n, p);
    const cplx a = curve_->scale(p);
    if (a != cplx{1.0, 0.0}) k.section = k.section.scaled(std::pow(a, n));
    return k;
  }

  KNForm function(int n, int p) const { return form(0, n, p); }
  KNForm vector_field(int n, int p) const { return form(-1, n, p); }
  /// omega^{n,p} = f^1_{-n,p}.
  KNForm omega(int n, int p) const { return form(1, -n, p); }
  /// Omega^{n,p} = f^2_{-n,p}.
  KNForm quadratic(int n, int p) const { return form(2, -n, p); }

  KNForm primed(int p) const {
    if (curve_->genus() != 1) fail(ErrorKind::internal, "primed elements exist only in genus 1");
    return make_primed_g1(curve_, p);
  }

  /// gamma_{r,s} = (1/2) sum_in res A'_{-1,r} A'_{-1,s} dz, unscaled.
  const std::vector<std::vector<cplx>>& gamma() const { return gamma_; }

  Section constant(cplx v, int weight = 0) const { return Section(curve_, weight, {Monomial::constant(v)}); }

 private:
  KNForm unscaled(int lambda, int n, int p) const {
    if (p < 0 || p >= curve_->size()) fail(ErrorKind::config, "point index out of range");
    if (curve_->genus() == 0) return make_form_g0(curve_, lambda, n, p);
    const int m = n - lambda;
    KNForm a;
    if (m == -1) {
      a = adjusted_[static_cast<std::size_t>(p)];
    } else {
      a = make_function_g1(curve_, m, p);
    }
    return lift_weight(a, lambda);
  }

  void adjust() {
    const int N = curve_->size();
    std::vector<KNForm> primed;
    for (int p = 0; p < N; ++p) primed.push_back(make_primed_g1(curve_, p));
    gamma_.assign(static_cast<std::size_t>(N), std::vector<cplx>(static_cast<std::size_t>(N)));
    for (int r = 0; r < N; ++r)
      for (int s = r; s < N; ++s) {
        const Section prod = primed[static_cast<std::size_t>(r)].section * primed[static_cast<std::size_t>(s)].section;
        const cplx v = opt_.gamma_route == Route::closed_form ? closed_residue_sum(prod)
                                                              : quadrature_residue_sum(prod.fn(), *curve_, opt_.samples);
        gamma_[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = 0.5 * v;
        gamma_[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] = 0.5 * v;
      }
    for (int r = 0; r < N; ++r) {
      KNForm k = primed[static_cast<std::size_t>(r)];
      Section sec = k.section;
      for (int s = 0; s < N; ++s) {
        const cplx g = gamma_[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
        sec = sec - make_function_g1(curve_, 0, s).section.scaled(g);
        k.correction.emplace_back(s, g);
      }
      k.section = sec;
      k.kind = FormKind::adjusted;
      adjusted_.push_back(std::move(k));
    }
  }

  CurvePtr curve_;
  BasisOptions opt_;
  std::vector<std::vector<cplx>> gamma_;
  std::vector<KNForm> adjusted_;
};

/// Laurent expansion of a form's coefficient function around `point` by
/// circle quadrature on the default contour.
inline LaurentExpansion local_expansion(const Section& form, cplx point, int min_exp, int max_exp, int samples = 512) {
  return expand_at(form.fn(), form.curve().contour_at(point, samples), min_exp, max_exp);
}

inline LaurentExpansion local_expansion(const KNForm& form, cplx point, int min_exp, int max_exp, int samples = 512) {
  return local_expansion(form.section, point, min_exp, max_exp, samples);
}

/// Order at `point` read off a quadrature expansion: the first exponent whose
/// coefficient exceeds 1e-9 of the window maximum.
inline int numerical_order(const Section& form, cplx point, int min_exp, int max_exp, int samples = 512) {
  return local_expansion(form, point, min_exp, max_exp, samples).leading_exponent(1e-9);
}

/// Order at infinity of a genus-0 form, via w = 1/z: f(z) dz^l = f(1/w) (-1)^l w^{-2l} dw^l.
inline int order_at_infinity(const Section& form, int min_exp, int max_exp, int samples = 512) {
  const int l = form.weight();
  auto g = [form, l](cplx w) {
    const cplx z = 1.0 / w;
    return form(z) * std::pow(w, -2 * l) * ((l % 2 == 0) ? 1.0 : -1.0);
  };
  double rad = 0.0;
  for (const auto& z : form.curve().points()) rad = std::max(rad, std::abs(z));
  ContourSpec c{0.0, 1.0 / (3.0 * rad + 3.0), samples};
  return expand_at(g, c, min_exp, max_exp).leading_exponent(1e-9);
}

}  // namespace knz
