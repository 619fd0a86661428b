#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "knz/error.hpp"
#include "knz/laurent.hpp"

namespace knz {

using ComplexFn = std::function<cplx(cplx)>;

/// Circle |z - center| = radius sampled at sample_count equispaced points.
struct ContourSpec {
  cplx center{};
  double radius = 0.25;
  int sample_count = 512;

  void validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorKind::internal, "contour radius must be positive");
    if (sample_count < 64 || (sample_count & (sample_count - 1)) != 0)
      fail(ErrorKind::internal, "contour sample_count must be a power of two >= 64");
  }

  /// Sample point j and the unit phase e^{i theta_j}.
  cplx node(int j) const { return center + radius * unit(j); }
  cplx unit(int j) const {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(sample_count);
    return {std::cos(th), std::sin(th)};
  }
};

inline std::vector<cplx> sample_on(const ComplexFn& f, const ContourSpec& c) {
  c.validate();
  std::vector<cplx> v(static_cast<std::size_t>(c.sample_count));
  for (int j = 0; j < c.sample_count; ++j) {
    const cplx fz = f(c.node(j));
    if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag())) fail(ErrorKind::numerical, "sample on singularity");
    v[static_cast<std::size_t>(j)] = fz;
  }
  return v;
}

/// (1/2 pi i) \oint f dz from precomputed samples (trapezoid rule).
inline cplx integrate_samples(const std::vector<cplx>& samples, const ContourSpec& c) {
  cplx s{};
  for (int j = 0; j < c.sample_count; ++j) s += samples[static_cast<std::size_t>(j)] * c.unit(j);
  return s * (c.radius / static_cast<double>(c.sample_count));
}

/// Laurent coefficients c_k, min_exp <= k <= max_exp, by the discrete Fourier
/// sum over the contour. Leading coefficients at the roundoff floor are
/// treated as zero.
inline LaurentExpansion expand_at(const ComplexFn& f, const ContourSpec& c, int min_exp, int max_exp) {
  const auto v = sample_on(f, c);
  double fmax = 0.0;
  for (const auto& x : v) fmax = std::max(fmax, std::abs(x));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * fmax;
  std::vector<cplx> coeffs;
  coeffs.reserve(static_cast<std::size_t>(max_exp - min_exp + 1));
  bool leading = true;
  for (int k = min_exp; k <= max_exp; ++k) {
    cplx s{};
    const long long m = c.sample_count;
    for (int j = 0; j < c.sample_count; ++j) {
      const long long idx = ((-static_cast<long long>(k) * j) % m + m) % m;
      s += v[static_cast<std::size_t>(j)] * c.unit(static_cast<int>(idx));
    }
    s /= static_cast<double>(c.sample_count);
    const double rk = std::pow(c.radius, -k);
    if (leading && std::abs(s) <= floor) s = {};
    else leading = false;
    coeffs.push_back(s * rk);
  }
  return LaurentExpansion(c.center, min_exp, std::move(coeffs));
}

inline cplx contour_integral(const ComplexFn& f, const ContourSpec& c) {
  return integrate_samples(sample_on(f, c), c);
}

struct CheckedIntegral {
  cplx value;
  int samples_used;
  double discrepancy;
};

/// Integrates at the requested count and at twice that; if the two disagree
/// by more than tol the integral is redone with 4096 samples.
inline CheckedIntegral contour_integral_checked(const ComplexFn& f, ContourSpec c, double tol = 1e-10) {
  const cplx a = contour_integral(f, c);
  ContourSpec d = c;
  d.sample_count *= 2;
  const cplx b = contour_integral(f, d);
  const double disc = std::abs(a - b);
  if (disc <= tol * std::max(1.0, std::abs(b))) return {b, d.sample_count, disc};
  ContourSpec e = c;
  e.sample_count = std::max(4096, c.sample_count);
  const cplx r = contour_integral(f, e);
  return {r, e.sample_count, std::abs(r - b)};
}

}  // namespace knz
