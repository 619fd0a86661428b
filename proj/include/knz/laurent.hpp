#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "knz/error.hpp"

namespace knz {

using cplx = std::complex<double>;

/// Truncated Laurent series sum_{k=min}^{trunc} c_k (z - center)^k.
///
/// Exponents above the truncation order are unknown, not zero. A series whose
/// coefficients are all zero is stored canonically with no coefficients and
/// min_exponent == truncation_order + 1, so two zero series with the same
/// truncation compare equal.
class LaurentExpansion {
 public:
  LaurentExpansion() = default;

  LaurentExpansion(cplx center, int min_exponent, std::vector<cplx> coefficients)
      : center_(center),
        min_exp_(min_exponent),
        trunc_(min_exponent + static_cast<int>(coefficients.size()) - 1),
        coeffs_(std::move(coefficients)) {
    canonicalize();
  }

  static LaurentExpansion zero(cplx center, int truncation_order) {
    LaurentExpansion s;
    s.center_ = center;
    s.trunc_ = truncation_order;
    s.min_exp_ = truncation_order + 1;
    return s;
  }

  static LaurentExpansion monomial(cplx center, int exponent, cplx coeff, int truncation_order) {
    if (truncation_order < exponent) return zero(center, truncation_order);
    std::vector<cplx> c(static_cast<std::size_t>(truncation_order - exponent + 1), cplx{});
    c[0] = coeff;
    return LaurentExpansion(center, exponent, std::move(c));
  }

  cplx center() const { return center_; }
  int min_exponent() const { return min_exp_; }
  int truncation_order() const { return trunc_; }
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of (z - center)^k; zero below the leading exponent.
  cplx coefficient(int k) const {
    if (k > trunc_) fail(ErrorKind::internal, "coefficient requested beyond truncation order");
    if (k < min_exp_) return {};
    return coeffs_[static_cast<std::size_t>(k - min_exp_)];
  }

  /// Smallest exponent whose coefficient exceeds rel_tol times the largest
  /// coefficient magnitude in the window. Returns truncation_order + 1 if none.
  int leading_exponent(double rel_tol) const {
    double mx = 0.0;
    for (const auto& c : coeffs_) mx = std::max(mx, std::abs(c));
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (std::abs(coeffs_[i]) > rel_tol * mx) return min_exp_ + static_cast<int>(i);
    return trunc_ + 1;
  }

  LaurentExpansion derivative() const {
    if (is_zero()) return zero(center_, trunc_ - 1);
    std::vector<cplx> d;
    d.reserve(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      d.push_back(static_cast<double>(min_exp_ + static_cast<int>(i)) * coeffs_[i]);
    return LaurentExpansion(center_, min_exp_ - 1, std::move(d));
  }

  LaurentExpansion scaled(cplx s) const {
    auto c = coeffs_;
    for (auto& x : c) x *= s;
    LaurentExpansion r(center_, min_exp_, std::move(c));
    r.trunc_ = trunc_;
    if (r.coeffs_.empty()) r.min_exp_ = trunc_ + 1;
    return r;
  }

  bool operator==(const LaurentExpansion& o) const {
    return center_ == o.center_ && min_exp_ == o.min_exp_ && trunc_ == o.trunc_ && coeffs_ == o.coeffs_;
  }

 private:
  void canonicalize() {
    std::size_t lead = 0;
    while (lead < coeffs_.size() && coeffs_[lead] == cplx{}) ++lead;
    if (lead == coeffs_.size()) {
      coeffs_.clear();
      min_exp_ = trunc_ + 1;
      return;
    }
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
    min_exp_ += static_cast<int>(lead);
  }

  cplx center_{};
  int min_exp_ = 1;
  int trunc_ = 0;
  std::vector<cplx> coeffs_;
};

enum class LaurentOp { add, mul };

inline LaurentExpansion laurent_arith(const LaurentExpansion& a, const LaurentExpansion& b, LaurentOp op) {
  if (a.center() != b.center()) fail(ErrorKind::internal, "center mismatch");
  if (op == LaurentOp::add) {
    const int trunc = std::min(a.truncation_order(), b.truncation_order());
    const int lo = std::min(a.min_exponent(), b.min_exponent());
    if (lo > trunc) return LaurentExpansion::zero(a.center(), trunc);
    std::vector<cplx> c(static_cast<std::size_t>(trunc - lo + 1));
    for (int k = lo; k <= trunc; ++k) c[static_cast<std::size_t>(k - lo)] = a.coefficient(k) + b.coefficient(k);
    auto r = LaurentExpansion(a.center(), lo, std::move(c));
    return r.is_zero() ? LaurentExpansion::zero(a.center(), trunc) : r;
  }
  const int trunc = std::min(a.truncation_order() + b.min_exponent(), b.truncation_order() + a.min_exponent());
  if (a.is_zero() || b.is_zero()) return LaurentExpansion::zero(a.center(), trunc);
  const int lo = a.min_exponent() + b.min_exponent();
  if (lo > trunc) return LaurentExpansion::zero(a.center(), trunc);
  std::vector<cplx> c(static_cast<std::size_t>(trunc - lo + 1));
  for (int k = lo; k <= trunc; ++k) {
    cplx s{};
    for (int i = a.min_exponent(); i <= k - b.min_exponent(); ++i) s += a.coefficient(i) * b.coefficient(k - i);
    c[static_cast<std::size_t>(k - lo)] = s;
  }
  auto r = LaurentExpansion(a.center(), lo, std::move(c));
  return r.is_zero() ? LaurentExpansion::zero(a.center(), trunc) : r;
}

inline LaurentExpansion operator+(const LaurentExpansion& a, const LaurentExpansion& b) {
  return laurent_arith(a, b, LaurentOp::add);
}
inline LaurentExpansion operator*(const LaurentExpansion& a, const LaurentExpansion& b) {
  return laurent_arith(a, b, LaurentOp::mul);
}

/// Coefficient at exponent -1.
inline cplx residue(const LaurentExpansion& s) {
  if (s.is_zero() || s.min_exponent() > -1) return {};
  if (s.truncation_order() < -1) fail(ErrorKind::internal, "residue requested beyond truncation order");
  return s.coefficient(-1);
}

}  // namespace knz
