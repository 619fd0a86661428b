#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "knz/error.hpp"
#include "knz/laurent.hpp"

namespace knz {

/// Weierstrass functions for the normalized lattice <1, tau>.
///
/// sigma is evaluated through the odd Jacobi theta function,
///   sigma(z) = exp(eta1 z^2) theta1(pi z) / (pi theta1'(0)),
/// after reducing z into the centered period parallelogram and restoring the
/// quasi-periodicity factor. Everything is carried in logarithmic form so that
/// products of many sigma factors with far-away arguments do not overflow.
class Lattice {
 public:
  explicit Lattice(cplx tau) : tau_(tau) {
    if (!(tau.imag() > 0.0)) fail(ErrorKind::config, "lattice parameter tau must have positive imaginary part");
    q_ = std::exp(cplx{0.0, std::numbers::pi} * tau);
    if (std::abs(q_) >= 0.9) fail(ErrorKind::precondition, "tau too close to the real axis (|q| >= 0.9)");
    cplx d1{}, d3{};
    for (int n = 0; n < kMaxTerms; ++n) {
      const double k = 2.0 * n + 1.0;
      const cplx t = nome_power(n) * (n % 2 == 0 ? 1.0 : -1.0);
      d1 += t * k;
      d3 += t * (k * k * k);
      if (n > 1 && std::abs(t) * k * k * k < 1e-17 * std::abs(d3)) break;
    }
    theta1_prime0_ = 2.0 * d1;
    const cplx theta1_triple0 = -2.0 * d3;
    eta1_ = -(std::numbers::pi * std::numbers::pi / 6.0) * theta1_triple0 / theta1_prime0_;
    // Legendre relation eta1 * tau - eta2 = pi i with eta1 = zeta(1/2), eta2 = zeta(tau/2).
    eta2_ = eta1_ * tau_ - cplx{0.0, std::numbers::pi};
    log_norm_ = std::log(std::numbers::pi * theta1_prime0_);
    // Eisenstein series in x = exp(2 pi i tau)
    const cplx x = q_ * q_;
    cplx s3{}, s5{}, xn = x;
    for (int n = 1; n < kMaxTerms; ++n) {
      const double d = n;
      const cplx t = xn / (1.0 - xn);
      s3 += d * d * d * t;
      s5 += d * d * d * d * d * t;
      if (std::abs(t) * d * d * d * d * d < 1e-18 * std::max(1.0, std::abs(s5))) break;
      xn *= x;
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    g2_ = (4.0 / 3.0) * pi2 * pi2 * (1.0 + 240.0 * s3);
    g3_ = (8.0 / 27.0) * pi2 * pi2 * pi2 * (1.0 - 504.0 * s5);
    for (int n = 0; n < kMaxTerms; ++n) {
      const double e = (n + 0.5) * (n + 0.5);
      theta_coeff_.push_back(std::exp(cplx{0.0, std::numbers::pi * e} * tau_) * (n % 2 == 0 ? 2.0 : -2.0));
      if (n > 2 && std::exp(-std::numbers::pi * tau_.imag() * (e - 2.0 * (n + 0.5))) < 1e-24) break;
    }
  }

  cplx tau() const { return tau_; }
  cplx nome() const { return q_; }
  cplx eta1() const { return eta1_; }
  cplx eta2() const { return eta2_; }
  /// Invariants of wp'^2 = 4 wp^3 - g2 wp - g3.
  cplx g2() const { return g2_; }
  cplx g3() const { return g3_; }

  /// zeta(z + m + n tau) - zeta(z).
  cplx quasi_period(int m, int n) const { return 2.0 * (static_cast<double>(m) * eta1_ + static_cast<double>(n) * eta2_); }

  struct Reduced {
    cplx w;
    int m;
    int n;
  };

  /// z = w + m + n tau with w in the centered parallelogram.
  Reduced reduce(cplx z) const {
    const int n = static_cast<int>(std::lround(z.imag() / tau_.imag()));
    const cplx z1 = z - static_cast<double>(n) * tau_;
    const int m = static_cast<int>(std::lround(z1.real()));
    return {z1 - static_cast<double>(m), m, n};
  }

  /// Representative of z in {a + b tau : 0 <= a, b < 1}.
  cplx normalize(cplx z) const {
    double b = z.imag() / tau_.imag();
    double a = z.real() - b * tau_.real();
    a -= std::floor(a);
    b -= std::floor(b);
    if (a >= 1.0) a = 0.0;
    if (b >= 1.0) b = 0.0;
    return a + b * tau_;
  }

  /// Lattice coordinates (m, n) if z is within tol of m + n tau.
  std::optional<std::pair<int, int>> lattice_point(cplx z, double tol = 1e-12) const {
    const auto r = reduce(z);
    if (std::abs(r.w) <= tol) return std::make_pair(r.m, r.n);
    return std::nullopt;
  }

  /// Smallest |z - lambda| over lattice vectors lambda.
  double distance_to_lattice(cplx z) const {
    const auto r = reduce(z);
    double best = std::abs(r.w);
    for (int dm = -1; dm <= 1; ++dm)
      for (int dn = -1; dn <= 1; ++dn) best = std::min(best, std::abs(r.w + static_cast<double>(dm) + static_cast<double>(dn) * tau_));
    return best;
  }

  /// log sigma(z), any branch. -inf real part at lattice points.
  cplx log_sigma(cplx z) const {
    const auto r = reduce(z);
    const auto th = theta_values(std::numbers::pi * r.w);
    cplx out = std::log(th.t0) - log_norm_ + eta1_ * r.w * r.w;
    if (r.m == 0 && r.n == 0) return out;
    const cplx lam = static_cast<double>(r.m) + static_cast<double>(r.n) * tau_;
    const bool odd = ((r.m + r.n + r.m * r.n) % 2) != 0;
    out += quasi_period(r.m, r.n) * (r.w + 0.5 * lam);
    if (odd) out += cplx{0.0, std::numbers::pi};
    return out;
  }

  cplx sigma(cplx z) const {
    const auto r = reduce(z);
    if (r.w == cplx{}) return {};
    return std::exp(log_sigma(z));
  }

  cplx zeta(cplx z) const {
    const auto r = reduce(z);
    const auto th = theta_values(std::numbers::pi * r.w);
    if (th.t0 == cplx{} || std::abs(r.w) < 1e-300) fail(ErrorKind::precondition, "pole of zeta");
    return 2.0 * eta1_ * r.w + std::numbers::pi * th.t1 / th.t0 + quasi_period(r.m, r.n);
  }

  /// Weierstrass p = -zeta'.
  cplx wp(cplx z) const {
    const auto r = reduce(z);
    const auto th = theta_values(std::numbers::pi * r.w);
    if (th.t0 == cplx{}) fail(ErrorKind::precondition, "pole of zeta");
    const cplx l1 = th.t1 / th.t0;
    const cplx l2 = th.t2 / th.t0 - l1 * l1;
    return -2.0 * eta1_ - std::numbers::pi * std::numbers::pi * l2;
  }

  /// Derivative of wp.
  cplx wp_prime(cplx z) const {
    const auto r = reduce(z);
    const auto th = theta_values(std::numbers::pi * r.w);
    if (th.t0 == cplx{}) fail(ErrorKind::precondition, "pole of zeta");
    const cplx l1 = th.t1 / th.t0;
    const cplx l3 = th.t3 / th.t0 - 3.0 * th.t2 * th.t1 / (th.t0 * th.t0) + 2.0 * l1 * l1 * l1;
    return -std::numbers::pi * std::numbers::pi * std::numbers::pi * l3;
  }

  /// Taylor coefficients p_0..p_{n-1} of wp(d + u) in u, from wp'' = 6 wp^2 - g2/2.
  std::vector<cplx> wp_taylor(cplx d, int n) const {
    std::vector<cplx> p(static_cast<std::size_t>(std::max(n, 2)));
    p[0] = wp(d);
    p[1] = wp_prime(d);
    for (int k = 0; k + 2 < n; ++k) {
      cplx s{};
      for (int i = 0; i <= k; ++i) s += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(k - i)];
      s *= 6.0;
      if (k == 0) s -= 0.5 * g2_;
      p[static_cast<std::size_t>(k + 2)] = s / (static_cast<double>(k + 2) * static_cast<double>(k + 1));
    }
    p.resize(static_cast<std::size_t>(n));
    return p;
  }

  /// Taylor coefficients c_0..c_{n-1} of log(sigma(u)/u). With
  /// wp(u) = u^-2 + sum_{k>=1} a_k u^{2k}, log(sigma(u)/u) = -sum a_k u^{2k+2} / ((2k+1)(2k+2)).
  std::vector<cplx> log_sigma_ratio_taylor(int n) const {
    std::vector<cplx> c(static_cast<std::size_t>(std::max(n, 0)));
    std::vector<cplx> a{0.0, g2_ / 20.0, g3_ / 28.0};
    for (int k = 1; 2 * k + 2 < n; ++k) {
      while (static_cast<int>(a.size()) <= k) {
        const int m = static_cast<int>(a.size());
        cplx s{};
        for (int i = 1; i <= m - 2; ++i) s += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(m - 1 - i)];
        a.push_back(3.0 * s / (static_cast<double>(2 * m + 3) * static_cast<double>(m - 2)));
      }
      c[static_cast<std::size_t>(2 * k + 2)] = -a[static_cast<std::size_t>(k)] / (static_cast<double>(2 * k + 1) * static_cast<double>(2 * k + 2));
    }
    return c;
  }

  /// Taylor coefficients c_0..c_{n-1} of sigma(d + u) in u, re-expanded from
  /// the series at 0. Meant for small |d|.
  std::vector<cplx> sigma_taylor(cplx d, int n) const {
    const int M = std::max(n, 1) + 40;
    const auto R = log_sigma_ratio_taylor(M);
    std::vector<cplx> e(static_cast<std::size_t>(M), cplx{});  // exp(R)
    e[0] = 1.0;
    for (int i = 1; i < M; ++i) {
      cplx acc{};
      for (int q = 1; q <= i; ++q) acc += static_cast<double>(q) * R[static_cast<std::size_t>(q)] * e[static_cast<std::size_t>(i - q)];
      e[static_cast<std::size_t>(i)] = acc / static_cast<double>(i);
    }
    // sigma(w) = sum_{i>=1} e_{i-1} w^i; c_j = sum_i s_i C(i, j) d^{i-j}
    std::vector<cplx> out(static_cast<std::size_t>(std::max(n, 0)), cplx{});
    for (int j = 0; j < n; ++j) {
      cplx acc{}, dp = 1.0;
      double binom = 1.0;
      for (int i = j; i <= M; ++i) {
        if (i >= 1) acc += e[static_cast<std::size_t>(i - 1)] * binom * dp;
        binom *= static_cast<double>(i + 1) / static_cast<double>(i + 1 - j);
        dp *= d;
      }
      out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
  }

  struct Bundle {
    cplx sigma;
    cplx zeta;
    cplx zeta_prime;  // = -wp
  };

  Bundle log_derivative_bundle(cplx z) const {
    const auto r = reduce(z);
    const auto th = theta_values(std::numbers::pi * r.w);
    if (th.t0 == cplx{}) fail(ErrorKind::precondition, "pole of zeta");
    const cplx l1 = th.t1 / th.t0;
    const cplx l2 = th.t2 / th.t0 - l1 * l1;
    Bundle b;
    b.sigma = std::exp(log_sigma(z));
    b.zeta = 2.0 * eta1_ * r.w + std::numbers::pi * l1 + quasi_period(r.m, r.n);
    b.zeta_prime = 2.0 * eta1_ + std::numbers::pi * std::numbers::pi * l2;
    return b;
  }

 private:
  static constexpr int kMaxTerms = 10000;

  cplx nome_power(int n) const {
    const double e = (n + 0.5) * (n + 0.5);
    return std::exp(cplx{0.0, std::numbers::pi * e} * tau_);
  }

  struct Theta {
    cplx t0, t1, t2, t3;  // theta1 and its first three derivatives in v
  };

  Theta theta_values(cplx v) const {
    Theta t{{}, {}, {}, {}};
    // e^{+-i k v} for k = 1, 3, 5, ... by repeated multiplication
    const cplx e1 = std::exp(cplx{0.0, 1.0} * v);
    const cplx step = e1 * e1, istep = 1.0 / step;
    cplx ep = e1, em = 1.0 / e1;
    for (std::size_t n = 0; n < theta_coeff_.size(); ++n) {
      const double k = 2.0 * static_cast<double>(n) + 1.0;
      const cplx& c = theta_coeff_[n];
      const cplx s = (ep - em) * cplx{0.0, -0.5};
      const cplx co = 0.5 * (ep + em);
      t.t0 += c * s;
      t.t1 += c * k * co;
      t.t2 += -c * k * k * s;
      t.t3 += -c * k * k * k * co;
      ep *= step;
      em *= istep;
    }
    return t;
  }

  cplx tau_;
  cplx q_;
  cplx theta1_prime0_;
  cplx eta1_;
  cplx eta2_;
  cplx log_norm_;
  cplx g2_{}, g3_{};
  std::vector<cplx> theta_coeff_;  // +-2 q^{(n+1/2)^2}
};

}  // namespace knz
