#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <vector>

#include "knz/curve.hpp"
#include "knz/error.hpp"
#include "knz/laurent.hpp"
#include "knz/quadrature.hpp"

namespace knz {

/// (z - shift)^exponent in genus 0, sigma(z - shift)^exponent in genus 1.
struct Factor {
  cplx shift;
  int exponent;
};

/// Local data of a monomial at a point P: the monomial equals
/// (z - P)^order * sum_j taylor[j] (z - P)^j near P.
struct Jet {
  int order = 0;
  cplx log_lead{};  // log taylor[0], finite even when taylor[0] overflows
  std::vector<cplx> taylor;
};

namespace detail {

/// Truncated product of power series; an empty operand is the constant 1.
inline std::vector<cplx> series_product(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  const std::size_t n = std::min(a.size(), b.size());
  std::vector<cplx> out(n, cplx{});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k + i < n; ++k) out[i + k] += a[i] * b[k];
  return out;
}

}  // namespace detail

/// Genus-1 zeros nearer than this to the expansion point are expanded
/// directly instead of through the logarithm.
inline constexpr double kNearZero = 0.3;

/// exp(log_coeff) * prod of factors. The coefficient is kept in log form so
/// that normalizations of high-degree elliptic elements do not overflow
/// before they cancel against the sigma factors.
class Monomial {
 public:
  Monomial() = default;
  Monomial(cplx log_coeff, std::vector<Factor> factors) : log_coeff_(log_coeff), factors_(std::move(factors)) {
    merge();
  }

  static Monomial constant(cplx c) { return Monomial(std::log(c), {}); }

  cplx log_coeff() const { return log_coeff_; }
  cplx coeff() const { return std::exp(log_coeff_); }
  const std::vector<Factor>& factors() const { return factors_; }

  Monomial scaled(cplx s) const { return Monomial(log_coeff_ + std::log(s), factors_); }

  Monomial operator*(const Monomial& o) const {
    auto f = factors_;
    f.insert(f.end(), o.factors_.begin(), o.factors_.end());
    return Monomial(log_coeff_ + o.log_coeff_, std::move(f));
  }

  cplx log_value(const MarkedCurve& c, cplx z) const {
    cplx s = log_coeff_;
    if (c.genus() == 0) {
      for (const auto& f : factors_) s += static_cast<double>(f.exponent) * std::log(z - f.shift);
    } else {
      const auto& L = c.lattice();
      for (const auto& f : factors_) s += static_cast<double>(f.exponent) * L.log_sigma(z - f.shift);
    }
    return s;
  }

  cplx value(const MarkedCurve& c, cplx z) const { return std::exp(log_value(c, z)); }

  /// d/dz log of the monomial.
  cplx log_derivative(const MarkedCurve& c, cplx z) const {
    cplx s{};
    if (c.genus() == 0) {
      for (const auto& f : factors_) s += static_cast<double>(f.exponent) / (z - f.shift);
    } else {
      const auto& L = c.lattice();
      for (const auto& f : factors_) s += static_cast<double>(f.exponent) * L.zeta(z - f.shift);
    }
    return s;
  }

  /// Order of vanishing at P (negative for poles).
  int order_at(const MarkedCurve& c, cplx p) const {
    int r = 0;
    for (const auto& f : factors_)
      if (c.congruent(p, f.shift, 1e-12)) r += f.exponent;
    return r;
  }

  /// Closed-form local data at P with `depth` Taylor coefficients.
  std::optional<Jet> jet(const MarkedCurve& c, cplx p, int depth) const {
    if (depth < 1) depth = 1;
    Jet j;
    std::vector<cplx> ell(static_cast<std::size_t>(depth), cplx{});  // Taylor of log G, ell[0] = log G(P)
    ell[0] = log_coeff_;
    std::vector<cplx> direct;  // factors expanded as plain power series, multiplied at the end
    if (c.genus() == 0) {
      for (const auto& f : factors_) {
        const cplx d = p - f.shift;
        const double k = f.exponent;
        if (std::abs(d) <= 1e-12) {
          j.order += f.exponent;
          continue;
        }
        ell[0] += k * std::log(d);
        cplx dj = d;
        for (int q = 1; q < depth; ++q) {
          ell[static_cast<std::size_t>(q)] += k * ((q % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(q) * dj);
          dj *= d;
        }
      }
    } else {
      const auto& L = c.lattice();
      std::vector<cplx> ratio;  // log(sigma(u)/u), filled on first use
      for (const auto& f : factors_) {
        const cplx d = p - f.shift;
        const double k = f.exponent;
        const auto r = L.reduce(d);
        if (f.exponent > 0 && std::abs(r.w) > 1e-12 && std::abs(r.w) < kNearZero) {
          // a zero close to P: its log expansion converges slowly, so expand sigma itself
          if (r.m != 0 || r.n != 0) {
            const cplx lam = static_cast<double>(r.m) + static_cast<double>(r.n) * L.tau();
            const cplx eta = L.quasi_period(r.m, r.n);
            ell[0] += k * eta * (r.w + 0.5 * lam);
            if ((r.m + r.n + r.m * r.n) % 2 != 0) ell[0] += k * cplx{0.0, std::numbers::pi};
            if (depth > 1) ell[1] += k * eta;
          }
          const auto s = L.sigma_taylor(r.w, depth);
          for (int e = 0; e < f.exponent; ++e) direct = detail::series_product(direct, s);
          continue;
        }
        if (std::abs(r.w) <= 1e-12) {
          // sigma(u + lam) = eps exp(eta(lam)(u + lam/2)) sigma(u)
          j.order += f.exponent;
          if (depth > 4) {
            if (ratio.empty()) ratio = L.log_sigma_ratio_taylor(depth);
            for (int q = 4; q < depth; ++q) ell[static_cast<std::size_t>(q)] += k * ratio[static_cast<std::size_t>(q)];
          }
          if (r.m != 0 || r.n != 0) {
            const cplx lam = static_cast<double>(r.m) + static_cast<double>(r.n) * L.tau();
            const cplx eta = L.quasi_period(r.m, r.n);
            ell[0] += k * eta * 0.5 * lam;
            if ((r.m + r.n + r.m * r.n) % 2 != 0) ell[0] += k * cplx{0.0, std::numbers::pi};
            if (depth > 1) ell[1] += k * eta;
          }
          continue;
        }
        ell[0] += k * L.log_sigma(d);
        if (depth > 1) ell[1] += k * L.zeta(d);
        if (depth > 2) {
          // (log sigma)'' = -wp
          const auto P = L.wp_taylor(d, depth - 2);
          for (int q = 2; q < depth; ++q)
            ell[static_cast<std::size_t>(q)] += -k * P[static_cast<std::size_t>(q - 2)] / (static_cast<double>(q) * (q - 1));
        }
      }
    }
    j.log_lead = ell[0];
    j.taylor.assign(static_cast<std::size_t>(depth), cplx{});
    j.taylor[0] = std::exp(ell[0]);
    for (int n = 1; n < depth; ++n) {
      cplx s{};
      for (int q = 1; q <= n; ++q) s += static_cast<double>(q) * ell[static_cast<std::size_t>(q)] * j.taylor[static_cast<std::size_t>(n - q)];
      j.taylor[static_cast<std::size_t>(n)] = s / static_cast<double>(n);
    }
    if (!direct.empty()) {
      j.taylor = detail::series_product(j.taylor, direct);
      j.log_lead += std::log(direct[0]);
    }
    return j;
  }

 private:
  void merge() {
    std::vector<Factor> out;
    for (const auto& f : factors_) {
      auto it = std::find_if(out.begin(), out.end(), [&](const Factor& g) { return g.shift == f.shift; });
      if (it == out.end()) out.push_back(f);
      else it->exponent += f.exponent;
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Factor& g) { return g.exponent == 0; }), out.end());
    factors_ = std::move(out);
  }

  cplx log_coeff_{};
  std::vector<Factor> factors_;
};

using CurvePtr = std::shared_ptr<const MarkedCurve>;

/// A meromorphic lambda-form written as a finite sum of monomials times dz^lambda.
class Section {
 public:
  Section() = default;
  Section(CurvePtr curve, int weight, std::vector<Monomial> terms)
      : curve_(std::move(curve)), weight_(weight), terms_(std::move(terms)) {}

  const MarkedCurve& curve() const { return *curve_; }
  const CurvePtr& curve_ptr() const { return curve_; }
  int weight() const { return weight_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  cplx operator()(cplx z) const {
    cplx s{};
    for (const auto& t : terms_) s += t.value(*curve_, z);
    return s;
  }

  cplx derivative(cplx z) const {
    cplx s{};
    for (const auto& t : terms_) s += t.value(*curve_, z) * t.log_derivative(*curve_, z);
    return s;
  }

  /// k-th derivative of the coefficient function, 0 <= k <= 3.
  cplx derivative(cplx z, int k) const {
    if (k == 0) return (*this)(z);
    if (k == 1) return derivative(z);
    cplx s{};
    const auto& c = *curve_;
    for (const auto& t : terms_) {
      cplx l1{}, l2{}, l3{};
      for (const auto& f : t.factors()) {
        const double e = f.exponent;
        const cplx d = z - f.shift;
        if (c.genus() == 0) {
          l1 += e / d;
          l2 += -e / (d * d);
          l3 += 2.0 * e / (d * d * d);
        } else {
          const auto& L = c.lattice();
          l1 += e * L.zeta(d);
          l2 += -e * L.wp(d);
          if (k == 3) l3 += -e * L.wp_prime(d);
        }
      }
      const cplx v = t.value(c, z);
      if (k == 2) s += v * (l1 * l1 + l2);
      else if (k == 3) s += v * (l1 * l1 * l1 + 3.0 * l1 * l2 + l3);
      else fail(ErrorKind::internal, "derivative order above 3");
    }
    return s;
  }

  Section scaled(cplx s) const {
    Section r = *this;
    if (s == cplx{}) {
      r.terms_.clear();
      return r;
    }
    for (auto& t : r.terms_) t = t.scaled(s);
    return r;
  }

  Section operator*(const Section& o) const {
    std::vector<Monomial> t;
    t.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
      for (const auto& b : o.terms_) t.push_back(a * b);
    return Section(curve_, weight_ + o.weight_, std::move(t));
  }

  Section operator+(const Section& o) const {
    if (weight_ != o.weight_) fail(ErrorKind::precondition, "adding forms of different weight");
    auto t = terms_;
    t.insert(t.end(), o.terms_.begin(), o.terms_.end());
    return Section(curve_, weight_, std::move(t));
  }

  Section operator-(const Section& o) const { return *this + o.scaled(-1.0); }

  ComplexFn fn() const {
    auto self = *this;
    return [self](cplx z) { return self(z); };
  }

  /// Closed-form Laurent expansion at P through exponent max_exp; nullopt if
  /// the closed form does not reach that far.
  std::optional<LaurentExpansion> closed_expansion(cplx p, int max_exp) const {
    std::optional<LaurentExpansion> acc;
    for (const auto& t : terms_) {
      const int r = t.order_at(*curve_, p);
      int depth = max_exp - r + 1;
      if (depth < 1) depth = 1;
      auto j = t.jet(*curve_, p, depth);
      if (!j) return std::nullopt;
      LaurentExpansion e(p, j->order, j->taylor);
      if (e.truncation_order() < max_exp) return std::nullopt;
      acc = acc ? *acc + e : e;
    }
    if (!acc) return LaurentExpansion::zero(p, max_exp);
    return acc;
  }

  /// Residue at P by the closed form, or nullopt if out of reach.
  std::optional<cplx> closed_residue(cplx p) const {
    cplx s{};
    for (const auto& t : terms_) {
      const int r = t.order_at(*curve_, p);
      if (r >= 0) continue;
      const int idx = -1 - r;
      auto j = t.jet(*curve_, p, idx + 1);
      if (!j) return std::nullopt;
      s += j->taylor[static_cast<std::size_t>(idx)];
    }
    return s;
  }

  /// Lowest order among the terms at P (the true order can be higher if the
  /// leading parts cancel).
  int nominal_order(cplx p) const {
    int best = 1 << 20;
    for (const auto& t : terms_) best = std::min(best, t.order_at(*curve_, p));
    return best;
  }

 private:
  CurvePtr curve_;
  int weight_ = 0;
  std::vector<Monomial> terms_;
};

/// A lambda-form given only by an evaluator, used for derivatives and
/// brackets that leave the monomial class.
struct EvalForm {
  int weight = 0;
  ComplexFn f;

  cplx operator()(cplx z) const { return f(z); }

  static EvalForm from(const Section& s) { return {s.weight(), s.fn()}; }
};

}  // namespace knz
