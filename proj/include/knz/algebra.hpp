#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "knz/basis.hpp"
#include "knz/error.hpp"
#include "knz/quadrature.hpp"
#include "knz/section.hpp"

namespace knz {

/// A value together with how it was obtained.
struct Valued {
  cplx value{};
  std::string provenance;  // closed_form, quadrature, both
  double residual = 0.0;   // |closed - quadrature| when both were computed
};

/// Circle samples at every in-point, taken once per function so that whole
/// pairing matrices cost one evaluation pass per form. The base count M is
/// sampled at 2M points; the even subset gives the M-point rule for free and
/// the pair is compared as the escalation trigger.
class ContourSampler {
 public:
  ContourSampler(const MarkedCurve& c, int samples = 512) : curve_(&c) {
    for (const auto& z : c.points()) {
      contours_.push_back(c.contour_at(z, 2 * samples));
      std::vector<cplx> u;
      for (int j = 0; j < 2 * samples; ++j) u.push_back(contours_.back().unit(j));
      units_.push_back(std::move(u));
    }
  }

  using Samples = std::vector<std::vector<cplx>>;

  Samples sample(const ComplexFn& f) const {
    Samples s;
    for (const auto& c : contours_) s.push_back(sample_on(f, c));
    return s;
  }

  /// (1/2 pi i) sum_p \oint a b dz. `fa`, `fb` are used only on escalation.
  cplx pair(const Samples& a, const Samples& b, const ComplexFn& fa, const ComplexFn& fb, double tol = 1e-10) const {
    cplx full{}, half{};
    for (std::size_t p = 0; p < contours_.size(); ++p) {
      const auto& c = contours_[p];
      cplx s2{}, s1{};
      for (int j = 0; j < c.sample_count; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const cplx t = a[p][jj] * b[p][jj] * units_[p][jj];
        s2 += t;
        if (j % 2 == 0) s1 += t;
      }
      full += s2 * (c.radius / static_cast<double>(c.sample_count));
      half += s1 * (2.0 * c.radius / static_cast<double>(c.sample_count));
    }
    if (std::abs(full - half) <= tol * std::max(1.0, std::abs(full))) return full;
    cplx acc{};
    for (const auto& c0 : contours_) {
      ContourSpec c = c0;
      c.sample_count = std::max(4096, c.sample_count);
      acc += contour_integral([&](cplx z) { return fa(z) * fb(z); }, c);
    }
    return acc;
  }

  const MarkedCurve& curve() const { return *curve_; }

 private:
  const MarkedCurve* curve_;
  std::vector<ContourSpec> contours_;
  std::vector<std::vector<cplx>> units_;
};

inline void require_dual_weights(int a, int b) {
  if (a + b != 1) fail(ErrorKind::precondition, "pairing needs weights summing to 1");
}

/// <f, g> = sum over in-points of res(f g).
inline cplx kn_pairing(const Section& f, const Section& g, Route route = Route::closed_form, int samples = 512) {
  require_dual_weights(f.weight(), g.weight());
  const Section prod = f * g;
  if (route == Route::closed_form) return closed_residue_sum(prod);
  return quadrature_residue_sum(prod.fn(), f.curve(), samples);
}

inline cplx kn_pairing(const EvalForm& f, const EvalForm& g, const MarkedCurve& c, int samples = 512) {
  require_dual_weights(f.weight, g.weight);
  return quadrature_residue_sum([&](cplx z) { return f(z) * g(z); }, c, samples);
}

/// Both routes when the closed form reaches, otherwise quadrature alone.
inline Valued kn_pairing_checked(const Section& f, const Section& g, int samples = 512) {
  require_dual_weights(f.weight(), g.weight());
  const Section prod = f * g;
  Valued v;
  const cplx q = quadrature_residue_sum(prod.fn(), f.curve(), samples);
  if (closed_form_available(prod)) {
    v.value = closed_residue_sum(prod);
    v.provenance = "both";
    v.residual = std::abs(v.value - q);
  } else {
    v.value = q;
    v.provenance = "quadrature";
  }
  return v;
}

/// Minus the residue at the out-point; equals the in-point sum for a global 1-form.
inline cplx kn_pairing_out(const Section& f, const Section& g, int samples = 512) {
  require_dual_weights(f.weight(), g.weight());
  const Section prod = f * g;
  return -quadrature_out_residue(prod.fn(), f.curve(), samples);
}

/// L_e g = e g' + lambda g e' for a vector field e and a lambda-form g, with
/// analytic derivatives of the closed-form factors.
inline EvalForm lie_derivative(const Section& e, const Section& g) {
  if (e.weight() != -1) fail(ErrorKind::precondition, "lie_derivative needs a vector field");
  const double l = g.weight();
  return {g.weight(), [e, g, l](cplx z) { return e(z) * g.derivative(z) + l * g(z) * e.derivative(z); }};
}

/// Central differences at step h and h/2 combined by Richardson extrapolation.
inline cplx richardson_derivative(const ComplexFn& f, cplx z, double h = 1e-3) {
  auto d = [&](double s) { return (f(z + s) - f(z - s)) / (2.0 * s); };
  const cplx a = d(h), b = d(h / 2), c = d(h / 4);
  const cplx r1 = (4.0 * b - a) / 3.0, r2 = (4.0 * c - b) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

inline EvalForm lie_derivative_fd(const Section& e, const Section& g) {
  if (e.weight() != -1) fail(ErrorKind::precondition, "lie_derivative needs a vector field");
  const double l = g.weight();
  return {g.weight(), [e, g, l](cplx z) {
            return e(z) * richardson_derivative(g.fn(), z) + l * g(z) * richardson_derivative(e.fn(), z);
          }};
}

/// [e, f] = e f' - f e'.
inline EvalForm vector_bracket(const Section& e, const Section& f) { return lie_derivative(e, f); }

struct BasisIndex {
  int degree;
  int point;
  auto operator<=>(const BasisIndex&) const = default;
};

struct BasisTerm {
  BasisIndex index;
  cplx coeff;
};

struct BasisExpansion {
  int weight = 0;
  std::vector<BasisTerm> terms;  // every index in the window, zeros included
  double residual = 0.0;         // max pointwise reconstruction error
  int hmin = 0, hmax = 0;

  cplx coeff(int h, int s) const {
    for (const auto& t : terms)
      if (t.index.degree == h && t.index.point == s) return t.coeff;
    return {};
  }
};

namespace detail {

/// Points away from every singularity at which reconstructions are compared.
inline std::vector<cplx> probe_points(const MarkedCurve& c) {
  std::vector<cplx> out;
  for (int p = 0; p < c.size(); ++p) {
    const double r = c.separation(c.point(p)) * 0.45;
    out.push_back(c.point(p) + std::polar(r, 0.7 + 1.3 * p));
    out.push_back(c.point(p) + std::polar(0.6 * r, 2.9 + 0.4 * p));
  }
  return out;
}

}  // namespace detail

/// Samples of basis elements on the in-point circles, filled on demand.
class BasisSampler {
 public:
  BasisSampler(const KNBasis& basis, int samples = 512) : basis_(&basis), S_(basis.curve(), samples) {}

  const ContourSampler::Samples& get(int lambda, int n, int p) {
    const auto key = std::make_tuple(lambda, n, p);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, S_.sample(basis_->form(lambda, n, p).section.fn())).first->second;
  }

  const ContourSampler& sampler() const { return S_; }
  const KNBasis& basis() const { return *basis_; }

 private:
  const KNBasis* basis_;
  ContourSampler S_;
  std::map<std::tuple<int, int, int>, ContourSampler::Samples> cache_;
};

/// Coefficients <form, f^{1-lambda}_{-h,s}> for h in [hmin, hmax].
inline BasisExpansion expand_in_basis(BasisSampler& B, const EvalForm& form, int hmin, int hmax) {
  const auto& basis = B.basis();
  const auto& c = basis.curve();
  const auto& S = B.sampler();
  const auto fs = S.sample(form.f);
  BasisExpansion out;
  out.weight = form.weight;
  out.hmin = hmin;
  out.hmax = hmax;
  for (int h = hmin; h <= hmax; ++h)
    for (int s = 0; s < c.size(); ++s) {
      const int dl = 1 - form.weight;
      const auto& ds = B.get(dl, -h, s);
      const auto dfn = [&basis, dl, h, s](cplx z) { return basis.form(dl, -h, s)(z); };
      out.terms.push_back({{h, s}, S.pair(fs, ds, form.f, dfn)});
    }
  double res = 0.0;
  for (const auto& z : detail::probe_points(c)) {
    cplx acc{};
    for (const auto& t : out.terms) acc += t.coeff * basis.form(form.weight, t.index.degree, t.index.point)(z);
    res = std::max(res, std::abs(acc - form(z)) / std::max(1.0, std::abs(form(z))));
  }
  out.residual = res;
  return out;
}

inline BasisExpansion expand_in_basis(const KNBasis& basis, const EvalForm& form, int hmin, int hmax, int samples = 512) {
  BasisSampler B(basis, samples);
  return expand_in_basis(B, form, hmin, hmax);
}

/// Reassembles an expansion as a closed-form section.
inline Section resum(const KNBasis& basis, const BasisExpansion& e, double drop = 0.0) {
  Section acc(basis.curve_ptr(), e.weight, {});
  for (const auto& t : e.terms)
    if (std::abs(t.coeff) > drop) acc = acc + basis.form(e.weight, t.index.degree, t.index.point).section.scaled(t.coeff);
  return acc;
}

enum class AlgebraTag { function, vector_field };

inline const char* to_string(AlgebraTag t) { return t == AlgebraTag::function ? "function" : "vector_field"; }

/// Band width (largest h - (n+m)) in genus 0 for generic degrees: K for
/// functions, L for vector fields. Returns nullopt in genus 1, where only the
/// observed band is reported.
inline std::optional<int> band_bound(int genus, int N, AlgebraTag tag) {
  if (genus == 1) return std::nullopt;
  auto floor_div = [](int a, int b) { return static_cast<int>(std::floor(static_cast<double>(a) / b)); };
  if (tag == AlgebraTag::function) return N == 1 ? genus : 2 + floor_div(genus - 2, N);
  return N == 1 ? 3 * genus : 3 + floor_div(3 * genus - 3, N);
}

struct StructureTensor {
  AlgebraTag tag = AlgebraTag::function;
  int nmin = 0, nmax = 0;
  std::map<std::pair<BasisIndex, BasisIndex>, BasisExpansion> entries;
  int band_observed = 0;   // max h - (n+m) with a nonzero coefficient
  int below_observed = 0;  // count of nonzero coefficients below n+m
  double max_residual = 0.0;

  const BasisExpansion& at(BasisIndex a, BasisIndex b) const { return entries.at({a, b}); }
};

/// Product (functions) or bracket (vector fields) of every pair of basis
/// elements with degrees in [nmin, nmax], expanded over [n+m-1, n+m+K_guess].
/// The window grows while its top coefficient is nonzero.
inline StructureTensor structure_constants(const KNBasis& basis, AlgebraTag tag, int nmin, int nmax, double zero_tol = 1e-9,
                                           int samples = 512) {
  const auto& c = basis.curve();
  const int lambda = tag == AlgebraTag::function ? 0 : -1;
  const auto bound = band_bound(c.genus(), c.size(), tag);
  const int kguess = 5 + (bound ? std::abs(*bound) : 0);
  BasisSampler B(basis, samples);
  StructureTensor T;
  T.tag = tag;
  T.nmin = nmin;
  T.nmax = nmax;
  for (int n = nmin; n <= nmax; ++n)
    for (int p = 0; p < c.size(); ++p)
      for (int m = nmin; m <= nmax; ++m)
        for (int r = 0; r < c.size(); ++r) {
          const Section a = basis.form(lambda, n, p).section;
          const Section b = basis.form(lambda, m, r).section;
          EvalForm f = tag == AlgebraTag::function ? EvalForm::from(a * b) : vector_bracket(a, b);
          int top = n + m + kguess;
          BasisExpansion e;
          for (int grow = 0; grow < 4; ++grow) {
            e = expand_in_basis(B, f, n + m - 1, top);
            double tail = 0.0;
            for (int s = 0; s < c.size(); ++s) tail = std::max(tail, std::abs(e.coeff(top, s)));
            if (tail <= zero_tol) break;
            top += 3;
          }
          for (const auto& t : e.terms) {
            if (std::abs(t.coeff) <= zero_tol) continue;
            if (t.index.degree < n + m) ++T.below_observed;
            T.band_observed = std::max(T.band_observed, t.index.degree - (n + m));
          }
          T.max_residual = std::max(T.max_residual, e.residual);
          T.entries.emplace(std::make_pair(BasisIndex{n, p}, BasisIndex{m, r}), std::move(e));
        }
  return T;
}

/// gamma(f, g) = sum over in-points of res f dg.
inline cplx cocycle_gamma(const Section& f, const Section& g, int samples = 512) {
  return quadrature_residue_sum([&](cplx z) { return f(z) * g.derivative(z); }, f.curve(), samples);
}

/// chi(e, f) = (1/12) sum res [ (e''' f - e f''') / 2 - R (e' f - e f') ] with R = 0.
inline cplx cocycle_chi(const Section& e, const Section& f, int samples = 512) {
  return quadrature_residue_sum(
             [&](cplx z) { return 0.5 * (e.derivative(z, 3) * f(z) - e(z) * f.derivative(z, 3)); }, e.curve(), samples) /
         12.0;
}

}  // namespace knz
