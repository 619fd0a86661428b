#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "knz/affine_module.hpp"
#include "knz/algebra.hpp"
#include "knz/basis.hpp"
#include "knz/coefficients.hpp"
#include "knz/config.hpp"
#include "knz/curve.hpp"
#include "knz/elliptic.hpp"
#include "knz/lie_algebra.hpp"
#include "knz/sugawara_kz.hpp"

namespace knz {

/// One line of a verification report. Upper-bound checks pass when
/// value <= bound, lower-bound checks when value > bound. Non-finite values fail.
struct CheckResult {
  int criterion = 0;
  std::string name;
  std::string label;  // which configuration or family
  double value = 0.0;
  double bound = 0.0;
  bool lower = false;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int samples = 512;
  std::optional<double> tol;  // replaces every upper bound when set
};

class CheckList {
 public:
  explicit CheckList(const VerifyOptions& o) : opt_(o) {}

  void upper(int crit, std::string name, std::string label, double value, double bound, std::string detail = {}) {
    if (opt_.tol) bound = *opt_.tol;
    push({crit, std::move(name), std::move(label), value, bound, false, std::isfinite(value) && value <= bound, std::move(detail)});
  }

  void lower(int crit, std::string name, std::string label, double value, double bound, std::string detail = {}) {
    push({crit, std::move(name), std::move(label), value, bound, true, std::isfinite(value) && value > bound, std::move(detail)});
  }

  void error(int crit, std::string name, const std::string& what) {
    push({crit, std::move(name), "error", std::numeric_limits<double>::quiet_NaN(), 0.0, false, false, what});
  }

  const std::vector<CheckResult>& results() const { return out_; }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  void push(CheckResult r) { out_.push_back(std::move(r)); }

  VerifyOptions opt_;
  std::vector<CheckResult> out_;
};

/// Seeded source of generic configurations. Every criterion draws from its
/// own stream so that running one criterion alone reproduces the full run.
class ConfigSampler {
 public:
  ConfigSampler(std::uint64_t seed, int stream) : rng_(seed + 1000003ULL * static_cast<std::uint64_t>(stream)) {}

  double uniform() { return U_(rng_); }

  /// N points in the disk of radius 1.5 with pairwise distance >= 1.
  std::vector<cplx> rational_points(int N) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      std::vector<cplx> pts;
      bool ok = true;
      for (int i = 0; i < N && ok; ++i) {
        const cplx z = std::polar(1.5 * std::sqrt(uniform()), 2.0 * std::numbers::pi * uniform());
        for (const auto& w : pts) ok = ok && std::abs(z - w) >= 1.0;
        pts.push_back(z);
      }
      if (ok) return pts;
    }
    fail(ErrorKind::internal, "could not place separated points");
  }

  cplx tau() {
    const double re = uniform() - 0.5;
    return {re, 0.8 + 0.6 * uniform()};
  }

  cplx cell_point(cplx tau) { return (uniform() - 0.5) + (uniform() - 0.5) * tau; }

  /// Random marked torus: out-point and N in-points in the centered cell,
  /// pairwise gaps >= 0.25, extra zeros of the degree [-4, 4] elements away
  /// from the marked points, and a basis that builds.
  MarkedCurve elliptic(cplx tau, int N) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const cplx z0 = cell_point(tau);
      std::vector<cplx> pts;
      for (int i = 0; i < N; ++i) pts.push_back(cell_point(tau));
      try {
        auto c = MarkedCurve::elliptic(tau, z0, pts);
        if (c.min_gap() < 0.25 || extra_zero_margin(c, -4, 4) < 0.05) continue;
        KNBasis B(c);
        (void)moduli_field(B);
        if (c.separation(mean_point(c)) < 0.1) continue;
        return c;
      } catch (const Error&) {
      }
    }
    fail(ErrorKind::internal, "could not draw a generic elliptic configuration");
  }

  /// A point at distance >= margin from every singular point.
  cplx point_away(const MarkedCurve& c, double margin) {
    cplx mid{};
    for (const auto& z : c.points()) mid += z;
    mid /= static_cast<double>(c.size());
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const cplx z = c.genus() == 0 ? mid + std::polar(2.5 * std::sqrt(uniform()), 2.0 * std::numbers::pi * uniform())
                                    : cell_point(c.lattice().tau());
      double d = std::numeric_limits<double>::infinity();
      for (const auto& s : c.singular_points()) d = std::min(d, c.distance(z, s));
      if (d >= margin) return z;
    }
    fail(ErrorKind::internal, "no point away from the marked points");
  }

  static cplx mean_point(const MarkedCurve& c) {
    cplx E = c.out_point();
    for (const auto& z : c.points()) E += z;
    return E / static_cast<double>(c.size() + 1);
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> U_{0.0, 1.0};
};

namespace detail {

/// Largest per-point closed residue of the products paired by the duality
/// check. Large values mean cancellation in the residue sum.
inline double residue_scale(const KNBasis& B, const std::vector<int>& weights, const std::vector<int>& degrees, bool all_pairs) {
  const auto& c = B.curve();
  const int N = c.size();
  double sc = 0.0;
  for (int l : weights)
    for (int n : degrees)
      for (int p = 0; p < N; ++p)
        for (int m : degrees) {
          if (!all_pairs && m != n) continue;
          for (int r = 0; r < N; ++r) {
            const Section prod = B.form(l, n, p).section * B.form(1 - l, -m, r).section;
            for (const auto& z : c.points()) {
              const auto v = prod.closed_residue(z);
              sc = std::max(sc, v ? std::abs(*v) : std::numeric_limits<double>::infinity());
            }
          }
        }
  return sc;
}

}  // namespace detail

/// Picks among `draws` random configurations with gaps >= min_gap the one
/// whose duality residues cancel least: rank by a cheap proxy, then the full
/// residue scale of the top `finalists`.
inline MarkedCurve well_conditioned_elliptic(ConfigSampler& S, cplx tau, int N, int draws = 3000, int finalists = 30,
                                             double min_gap = 0.4) {
  std::vector<std::pair<double, MarkedCurve>> cand;
  for (int t = 0; t < draws; ++t) {
    const cplx z0 = S.cell_point(tau);
    std::vector<cplx> pts;
    for (int i = 0; i < N; ++i) pts.push_back(S.cell_point(tau));
    try {
      auto c = MarkedCurve::elliptic(tau, z0, pts);
      if (c.min_gap() < min_gap) continue;
      KNBasis B(c);
      cand.emplace_back(detail::residue_scale(B, {-1, 2}, {-4, -3, 3, 4}, false), c);
    } catch (const Error&) {
    }
  }
  if (cand.empty()) fail(ErrorKind::internal, "no admissible elliptic configuration");
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::optional<MarkedCurve> best;
  double best_scale = std::numeric_limits<double>::infinity();
  for (int k = 0; k < std::min<int>(finalists, static_cast<int>(cand.size())); ++k) {
    KNBasis B(cand[static_cast<std::size_t>(k)].second);
    const double f = detail::residue_scale(B, {-1, 0, 1, 2}, {-4, -3, -2, -1, 0, 1, 2, 3, 4}, true);
    if (f < best_scale) {
      best_scale = f;
      best = cand[static_cast<std::size_t>(k)].second;
    }
  }
  return *best;
}

struct DualityDeviation {
  double closed = 0.0;
  double quadrature = 0.0;
};

/// max |<f^l_{n,p}, f^{1-l}_{-m,r}> - delta_{nm} delta_{pr}| by both routes.
inline DualityDeviation duality_deviation(const KNBasis& B, const std::vector<int>& weights, int nmin, int nmax, int samples = 512) {
  BasisSampler S(B, samples);
  const int N = B.size();
  DualityDeviation d;
  for (int l : weights)
    for (int n = nmin; n <= nmax; ++n)
      for (int p = 0; p < N; ++p)
        for (int m = nmin; m <= nmax; ++m)
          for (int r = 0; r < N; ++r) {
            const Section f = B.form(l, n, p).section, g = B.form(1 - l, -m, r).section;
            const double want = (n == m && p == r) ? 1.0 : 0.0;
            d.closed = std::max(d.closed, std::abs(kn_pairing(f, g, Route::closed_form) - want));
            const cplx q = S.sampler().pair(S.get(l, n, p), S.get(1 - l, -m, r), f.fn(), g.fn());
            d.quadrature = std::max(d.quadrature, std::abs(q - want));
          }
  return d;
}

/// Weierstrass functions of the lattice <1, tau> from the Jacobi product,
/// without lattice reduction. Serves as an oracle for the theta route.
class SigmaProduct {
 public:
  SigmaProduct(cplx tau, cplx eta1) : x_(std::exp(cplx{0.0, 2.0 * std::numbers::pi} * tau)), eta1_(eta1) {}

  cplx sigma(cplx z) const {
    const cplx c = std::cos(2.0 * std::numbers::pi * z);
    cplx prod = 1.0, xn = x_;
    const double grow = std::exp(2.0 * std::numbers::pi * std::abs(z.imag()));
    for (int n = 1; n < 100000; ++n) {
      prod *= (1.0 - 2.0 * xn * c + xn * xn) / ((1.0 - xn) * (1.0 - xn));
      if (std::abs(xn) * grow < 1e-18) break;
      xn *= x_;
    }
    return std::exp(eta1_ * z * z) * std::sin(std::numbers::pi * z) / std::numbers::pi * prod;
  }

  cplx zeta(cplx z) const {
    const double pi = std::numbers::pi;
    const cplx c = std::cos(2.0 * pi * z), s = std::sin(2.0 * pi * z);
    cplx acc = 2.0 * eta1_ * z + pi * std::cos(pi * z) / std::sin(pi * z), xn = x_;
    const double grow = std::exp(2.0 * pi * std::abs(z.imag()));
    for (int n = 1; n < 100000; ++n) {
      acc += 4.0 * pi * xn * s / (1.0 - 2.0 * xn * c + xn * xn);
      if (std::abs(xn) * grow < 1e-18) break;
      xn *= x_;
    }
    return acc;
  }

 private:
  cplx x_;
  cplx eta1_;
};

/// eta1 = (pi^2/6) E2(tau), E2 = 1 - 24 sum sigma_1(n) x^n.
inline cplx eta1_from_e2(cplx tau) {
  const cplx x = std::exp(cplx{0.0, 2.0 * std::numbers::pi} * tau);
  cplx s{}, xn = x;
  for (int n = 1; n < 100000; ++n) {
    int s1 = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) s1 += d;
    s += static_cast<double>(s1) * xn;
    if (std::abs(xn) * n * n < 1e-20) break;
    xn *= x;
  }
  return std::numbers::pi * std::numbers::pi / 6.0 * (1.0 - 24.0 * s);
}

namespace detail {

inline std::string curve_label(const MarkedCurve& c) {
  std::string s = "g" + std::to_string(c.genus()) + ",N=" + std::to_string(c.size());
  if (c.genus() == 1) {
    const cplx t = c.lattice().tau();
    char buf[64];
    std::snprintf(buf, sizeof buf, ",tau=%.6g%+.6gi", t.real(), t.imag());
    s += buf;
  }
  return s;
}

inline std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Vector-field bracket as a section: genus 0 by differentiating the
/// monomials, genus 1 by expanding in the basis and resumming.
inline Section bracket_section(const KNBasis& B, BasisSampler& S, const Section& e, const Section& f, int degree_sum, double* residual) {
  if (B.curve().genus() == 0) {
    *residual = 0.0;
    return e * derivative_section(f) - derivative_section(e) * f;
  }
  const auto ex = expand_in_basis(S, vector_bracket(e, f), degree_sum - 3, degree_sum + 8);
  *residual = ex.residual;
  return resum(B, ex, 1e-13);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// criteria

/// 1: duality of the pairing, both routes.
inline void verify_duality(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 1);
  const std::vector<int> weights{-1, 0, 1, 2};
  for (int N = 1; N <= 3; ++N) {
    const KNBasis B(MarkedCurve::rational(S.rational_points(N)));
    const auto d = duality_deviation(B, weights, -4, 4, o.samples);
    out.upper(1, "duality_edu", detail::curve_label(B.curve()) + ",closed", d.closed, 1e-9);
    out.upper(1, "duality_edu", detail::curve_label(B.curve()) + ",quadrature", d.quadrature, 1e-9);
  }
  const cplx random_tau = S.tau();
  for (cplx tau : {cplx{0.3, 1.1}, random_tau})
    for (int N = 1; N <= 2; ++N) {
      const KNBasis B(well_conditioned_elliptic(S, tau, N));
      const auto d = duality_deviation(B, weights, -4, 4, o.samples);
      out.upper(1, "duality_edu", detail::curve_label(B.curve()) + ",closed", d.closed, 1e-8);
      out.upper(1, "duality_edu", detail::curve_label(B.curve()) + ",quadrature", d.quadrature, 1e-8);
    }
}

/// 2: one point at the origin gives the Witt algebra.
inline void verify_witt(CheckList& out, const VerifyOptions& o) {
  const KNBasis B(MarkedCurve::rational({0.0}));
  const auto T = structure_constants(B, AlgebraTag::vector_field, -5, 5, 1e-9, o.samples);
  double off = 0.0, lead = 0.0;
  for (const auto& [key, e] : T.entries) {
    const int n = key.first.degree, m = key.second.degree;
    for (const auto& t : e.terms) {
      if (t.index.degree == n + m) lead = std::max(lead, std::abs(t.coeff - static_cast<double>(m - n)));
      else off = std::max(off, std::abs(t.coeff));
    }
  }
  out.upper(2, "witt_classical", "off_terms", off, 1e-11);
  out.upper(2, "witt_classical", "leading_coefficient", lead, 1e-11);
}

/// 3: sum_p A_{0,p} = 1.
inline void verify_partition_of_unity(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 3);
  std::vector<MarkedCurve> curves{MarkedCurve::rational(S.rational_points(2)), MarkedCurve::rational(S.rational_points(3))};
  curves.push_back(S.elliptic({0.3, 1.1}, 2));
  curves.push_back(S.elliptic(S.tau(), 3));
  for (const auto& c : curves) {
    const KNBasis B(c);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const cplx z = S.point_away(c, 0.1);
      cplx s{};
      for (int p = 0; p < c.size(); ++p) s += B.function(0, p)(z);
      worst = std::max(worst, std::abs(s - 1.0));
    }
    out.upper(3, "partition_of_unity", detail::curve_label(c), worst, 1e-10);
  }
}

/// 4: genus-0 coefficients, the adjusted diagonal and <Omega~^i, E_j>.
inline void verify_kz_g0_coefficients(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 4);
  for (int N = 2; N <= 4; ++N) {
    const KNBasis B(MarkedCurve::rational(S.rational_points(N)));
    const auto label = detail::curve_label(B.curve());
    const auto raw = coefficient_table(B, -2, 1, false, o.samples);
    out.upper(4, "kz_g0_closed_forms", label, raw.max_residual, 1e-9);
    const auto adj = coefficient_table(B, -2, 1, true, o.samples);
    out.upper(4, "kz_g0_closed_forms", label + ",adjusted", adj.max_residual, 1e-9);
    double diag = 0.0;
    for (const auto& e : adj.entries)
      if (e.n == 0 && e.m == 0 && e.i == e.j) diag = std::max(diag, std::abs(e.quadrature));
    out.upper(4, "kz_g0_adjusted_diagonal", label, diag, 1e-9);
    double dual = 0.0, dual_q = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Section prod = tilde_omega(B, i) * corrector_field(B, j);
        const double want = i == j ? 1.0 : 0.0;
        dual = std::max(dual, std::abs(closed_residue_sum(prod) - want));
        dual_q = std::max(dual_q, std::abs(quadrature_residue_sum(prod.fn(), B.curve(), o.samples) - want));
      }
    out.upper(4, "corrector_duality", label + ",closed", dual, 1e-10);
    out.upper(4, "corrector_duality", label + ",quadrature", dual_q, 1e-10);
  }
}

/// 5: the reduced genus-0 system and the braid relation.
inline void verify_kz_g0_reduction(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 5);
  for (int N = 2; N <= 3; ++N) {
    const KNBasis B(MarkedCurve::rational(S.rational_points(N)));
    const auto label = detail::curve_label(B.curve());
    const WeightedTensorSpace V(make_sl2(), std::vector<int>(static_cast<std::size_t>(N), 1), {}, 1.0);
    const auto sys = assemble_kz_g0(B, V, o.samples);
    const cplx ck = V.level() + V.algebra().kappa;
    double coef = 0.0, mat = 0.0;
    for (int i = 0; i < N; ++i) {
      Mat want = Mat::Zero(V.dim(), V.dim());
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        const cplx r = 2.0 / (ck * (B.curve().point(i) - B.curve().point(j)));
        coef = std::max(coef, std::abs(sys.r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - r));
        want += r * casimir_two_site(V, i, j);
      }
      mat = std::max(mat, detail::max_abs(sys.reduced[static_cast<std::size_t>(i)] - want));
    }
    out.upper(5, "kz_g0_reduction", label + ",coefficients", coef, 1e-10);
    out.upper(5, "kz_g0_reduction", label + ",matrices", mat, 1e-10);
    out.upper(5, "kz_g0_antisymmetry", label, sys.antisymmetry_residual, 1e-10);
    out.upper(5, "kz_g0_flatness", label, sys.flatness_residual, 1e-10);
  }
  {
    const WeightedTensorSpace V(make_sl2(), {1, 1, 1}, {}, 1.0);
    const Mat O12 = casimir_two_site(V, 0, 1), O13 = casimir_two_site(V, 0, 2), O23 = casimir_two_site(V, 1, 2);
    const Mat C = O12 * (O13 + O23) - (O13 + O23) * O12;
    out.upper(5, "braid_relation", "sl2,N=3,weights=(1,1,1)", detail::max_abs(C), 0.0, "exact zero required");
  }
  {
    // the worked example: z = (0, 1), sl2 weights (1, 1), level 1
    const KNBasis B(MarkedCurve::rational({0.0, 1.0}));
    const WeightedTensorSpace V(make_sl2(), {1, 1}, {}, 1.0);
    const auto sys = assemble_kz_g0(B, V, o.samples);
    out.upper(5, "kz_g0_reduction", "z=(0,1),r_12", std::abs(sys.r[0][1] - cplx{-2.0 / 3.0, 0.0}), 1e-10);
  }
}

/// 6 and 7: genus-1 coefficient families and elimination soundness.
inline void verify_kz_g1_coefficients(CheckList& out, const VerifyOptions& o, bool families, bool elimination) {
  ConfigSampler S(o.seed, 6);
  const std::vector<int> sizes{1, 2, 3, 1, 2, 3};
  struct Family {
    const char* name;
    std::function<bool(const CoefficientEntry&)> match;
  };
  const std::vector<Family> fams{
      {"kz_g1_coef0", [](const CoefficientEntry& e) { return e.k != kModuliDirection && e.n + e.m == -1 && e.i == e.j && e.j == e.k; }},
      {"kz_g1_coef1", [](const CoefficientEntry& e) { return e.k != kModuliDirection && e.n == 0 && e.m == 0 && e.i != e.j; }},
      {"kz_g1_new1", [](const CoefficientEntry& e) { return e.k == kModuliDirection && e.n == -1 && e.m == -1 && e.i == e.j; }},
      {"kz_g1_co2_2", [](const CoefficientEntry& e) { return e.k == kModuliDirection && e.n + e.m == -1 && e.n * e.m == 0; }},
      {"kz_g1_new2", [](const CoefficientEntry& e) { return e.k == kModuliDirection && e.n + e.m == -2 && e.n * e.m == 0 && e.i == e.j; }},
      {"kz_g1_co2_3", [](const CoefficientEntry& e) { return e.k == kModuliDirection && e.n == 0 && e.m == 0; }},
  };
  std::vector<double> worst(fams.size(), 0.0);
  std::vector<int> count(fams.size(), 0);
  double coef0_value = 0.0, eliminated = 0.0;
  int configs = 0;
  for (int N : sizes) {
    const MarkedCurve c = S.elliptic(S.tau(), N);
    const KNBasis B(c);
    ++configs;
    if (families) {
      const auto T = coefficient_table(B, -2, 0, true, o.samples);
      for (const auto& e : T.entries)
        for (std::size_t f = 0; f < fams.size(); ++f) {
          if (!e.closed || !fams[f].match(e)) continue;
          if (N == 1 && f == 1) continue;
          worst[f] = std::max(worst[f], e.residual);
          ++count[f];
          if (f == 0) coef0_value = std::max(coef0_value, std::abs(*e.closed - 1.0));
        }
      const WeightedTensorSpace V(make_sl2(), std::vector<int>(static_cast<std::size_t>(N), 1), {}, 1.0);
      const auto sys = assemble_kz_g1(B, V, o.samples);
      out.upper(6, "kz_g1_equation_count", detail::curve_label(c),
                std::abs(static_cast<double>(sys.equations.size()) - static_cast<double>(N + 1)), 0.0);
    }
    if (elimination) {
      for (bool adjusted : {false, true}) {
        const auto T = coefficient_table(B, -3, 1, adjusted, o.samples);
        eliminated = std::max(eliminated, T.max_eliminated);
      }
    }
  }
  if (families) {
    for (std::size_t f = 0; f < fams.size(); ++f) {
      if (count[f] == 0) {
        out.error(6, fams[f].name, "no entries of this family were produced");
        continue;
      }
      out.upper(6, fams[f].name, std::to_string(configs) + " configurations", worst[f], 1e-8,
                std::to_string(count[f]) + " entries");
    }
    out.upper(6, "kz_g1_coef0", "exact_value", coef0_value, 0.0, "closed value must be exactly 1");
  }
  if (elimination) {
    ConfigSampler S0(o.seed, 7);
    for (int N = 2; N <= 4; ++N) {
      const KNBasis B(MarkedCurve::rational(S0.rational_points(N)));
      for (bool adjusted : {false, true}) eliminated = std::max(eliminated, coefficient_table(B, -3, 1, adjusted, o.samples).max_eliminated);
    }
    out.upper(7, "elimination_soundness", "genus 0 and 1", eliminated, 1e-9);
  }
}

/// 8: elliptic layer and periodicity of the genus-1 basis.
inline void verify_elliptic(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 8);
  for (cplx tau : {cplx{0.3, 1.1}, S.tau()}) {
    const Lattice L(tau);
    const SigmaProduct P(tau, L.eta1());
    const auto label = detail::fmt("tau=%.6g%+.6gi", tau.real(), tau.imag());
    double agree = 0.0, qp_sigma = 0.0, qp_zeta = 0.0, legendre = 0.0, ode = 0.0;
    for (int t = 0; t < 12; ++t) {
      cplx z = S.cell_point(tau);
      if (std::abs(z) < 0.05) z += 0.1;
      const cplx s = P.sigma(z);
      agree = std::max(agree, std::abs(L.sigma(z) - s) / std::abs(s));
      // oracle quasi-periodicity against the library quasi-period constants
      const cplx s1 = P.sigma(z + 1.0), st = P.sigma(z + tau);
      qp_sigma = std::max(qp_sigma, std::abs(s1 + std::exp(2.0 * L.eta1() * (z + 0.5)) * s) / std::abs(s1));
      qp_sigma = std::max(qp_sigma, std::abs(st + std::exp(2.0 * L.eta2() * (z + 0.5 * tau)) * s) / std::abs(st));
      qp_sigma = std::max(qp_sigma, std::abs(L.sigma(z + tau) - st) / std::abs(st));
      const cplx zl = L.zeta(z), zo = P.zeta(z);
      qp_zeta = std::max(qp_zeta, std::abs(zl - zo) / std::max(1.0, std::abs(zo)));
      qp_zeta = std::max(qp_zeta, std::abs(P.zeta(z + 1.0) - zo - 2.0 * L.eta1()));
      qp_zeta = std::max(qp_zeta, std::abs(P.zeta(z + tau) - zo - 2.0 * L.eta2()));
      const cplx eta2 = 0.5 * (P.zeta(z + tau) - zo);
      legendre = std::max(legendre, std::abs(L.eta1() * tau - eta2 - cplx{0.0, std::numbers::pi}));
      const cplx w = L.wp(z), wp = L.wp_prime(z);
      const cplx rhs = 4.0 * w * w * w - L.g2() * w - L.g3();
      ode = std::max(ode, std::abs(wp * wp - rhs) / std::max(1.0, std::abs(rhs)));
    }
    out.upper(8, "sigma_product_agreement", label, agree, 1e-10);
    out.upper(8, "sigma_quasi_periodicity", label, qp_sigma, 1e-10);
    out.upper(8, "zeta_quasi_periodicity", label, qp_zeta, 1e-10);
    out.upper(8, "legendre_relation", label, legendre, 1e-10);
    out.upper(8, "eta1_series", label, std::abs(L.eta1() - eta1_from_e2(tau)), 1e-10);
    out.upper(8, "wp_differential_equation", label, ode, 1e-10);
  }
  for (int N = 1; N <= 3; ++N) {
    const MarkedCurve c = S.elliptic(S.tau(), N);
    const KNBasis B(c);
    const cplx tau = c.lattice().tau();
    double worst = 0.0;
    for (int l = -1; l <= 2; ++l)
      for (int n = -4; n <= 4; ++n)
        for (int p = 0; p < N; ++p) {
          const Section f = B.form(l, n, p).section;
          for (int t = 0; t < 3; ++t) {
            const cplx z = S.point_away(c, 0.15);
            const cplx v = f(z);
            const double sc = std::max(1.0, std::abs(v));
            worst = std::max(worst, std::abs(f(z + 1.0) - v) / sc);
            worst = std::max(worst, std::abs(f(z + tau) - v) / sc);
          }
        }
    out.upper(8, "basis_periodicity", detail::curve_label(c), worst, 1e-9);
  }
}

/// 9: the cocycles gamma and chi (R = 0).
inline void verify_cocycles(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 9);
  std::vector<MarkedCurve> curves{MarkedCurve::rational({0.0}), MarkedCurve::rational(S.rational_points(2)),
                                  MarkedCurve::rational(S.rational_points(3))};
  curves.push_back(S.elliptic({0.3, 1.1}, 1));
  curves.push_back(S.elliptic(S.tau(), 2));
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(S.uniform() * (hi - lo + 1)) % (hi - lo + 1); };
  for (const auto& c : curves) {
    const KNBasis B(c);
    const int N = c.size();
    const auto label = detail::curve_label(c);
    BasisSampler bs(B, o.samples);
    auto A = [&](int n, int p) { return B.function(n, p).section; };
    auto e = [&](int n, int p) { return B.vector_field(n, p).section; };
    double anti_g = 0.0, anti_x = 0.0, cyc_g = 0.0, cyc_x = 0.0, expand = 0.0;
    for (int t = 0; t < 8; ++t) {
      const int n1 = pick(-3, 3), n2 = pick(-3, 3), n3 = pick(-3, 3);
      const int p1 = pick(0, N - 1), p2 = pick(0, N - 1), p3 = pick(0, N - 1);
      anti_g = std::max(anti_g, std::abs(cocycle_gamma(A(n1, p1), A(n2, p2), o.samples) + cocycle_gamma(A(n2, p2), A(n1, p1), o.samples)));
      anti_x = std::max(anti_x, std::abs(cocycle_chi(e(n1, p1), e(n2, p2), o.samples) + cocycle_chi(e(n2, p2), e(n1, p1), o.samples)));
      const Section f = A(n1, p1), g = A(n2, p2), h = A(n3, p3);
      const cplx cg = cocycle_gamma(f * g, h, o.samples) + cocycle_gamma(g * h, f, o.samples) + cocycle_gamma(h * f, g, o.samples);
      cyc_g = std::max(cyc_g, std::abs(cg));
      const Section x = e(n1, p1), y = e(n2, p2), z = e(n3, p3);
      double r1 = 0.0, r2 = 0.0, r3 = 0.0;
      const Section xy = detail::bracket_section(B, bs, x, y, n1 + n2, &r1);
      const Section yz = detail::bracket_section(B, bs, y, z, n2 + n3, &r2);
      const Section zx = detail::bracket_section(B, bs, z, x, n3 + n1, &r3);
      expand = std::max({expand, r1, r2, r3});
      const cplx cx = cocycle_chi(xy, z, o.samples) + cocycle_chi(yz, x, o.samples) + cocycle_chi(zx, y, o.samples);
      cyc_x = std::max(cyc_x, std::abs(cx));
    }
    out.upper(9, "gamma_antisymmetry", label, anti_g, 1e-8);
    out.upper(9, "chi_antisymmetry", label, anti_x, 1e-8);
    out.upper(9, "gamma_cocycle_identity", label, cyc_g, 1e-8);
    out.upper(9, "chi_cocycle_identity", label, cyc_x, 1e-8,
              c.genus() == 1 ? detail::fmt("bracket expansion residual %.3g", expand) : std::string{});

    // locality and vanishing on the window [-3, 3]
    const int W = 3;
    int glo = 1 << 20, ghi = -(1 << 20), xlo = 1 << 20, xhi = -(1 << 20);
    double a_plus = 0.0, a_minus = 0.0, l_plus = 0.0, l_minus = 0.0;
    const int a_cut = c.genus() == 0 ? -1 : -2;
    const int l_cut = c.genus() == 0 ? -2 : -3;
    std::vector<std::pair<std::pair<int, int>, double>> gv, xv;
    double gmax = 0.0, xmax = 0.0;
    for (int n = -W; n <= W; ++n)
      for (int m = -W; m <= W; ++m)
        for (int p = 0; p < N; ++p)
          for (int r = 0; r < N; ++r) {
            const double g = std::abs(cocycle_gamma(A(n, p), A(m, r), o.samples));
            const double x = std::abs(cocycle_chi(e(n, p), e(m, r), o.samples));
            gv.push_back({{n, m}, g});
            xv.push_back({{n, m}, x});
            gmax = std::max(gmax, g);
            xmax = std::max(xmax, x);
            if (n >= 0 && m >= 0) {
              a_plus = std::max(a_plus, g);
              l_plus = std::max(l_plus, x);
            }
            if (n <= a_cut && m <= a_cut) a_minus = std::max(a_minus, g);
            if (n <= l_cut && m <= l_cut) l_minus = std::max(l_minus, x);
          }
    for (const auto& [nm, v] : gv)
      if (v > 1e-9 * std::max(1.0, gmax)) {
        glo = std::min(glo, nm.first + nm.second);
        ghi = std::max(ghi, nm.first + nm.second);
      }
    for (const auto& [nm, v] : xv)
      if (v > 1e-9 * std::max(1.0, xmax)) {
        xlo = std::min(xlo, nm.first + nm.second);
        xhi = std::max(xhi, nm.first + nm.second);
      }
    // nonzero only for -K <= n + m <= 0; K from the pole orders at the out-point
    const int gK = c.genus() == 0 ? 1 : 3, xK = c.genus() == 0 ? 2 : 7;
    auto outside = [](int lo, int hi, int K) {
      if (lo > hi) return 0.0;
      return static_cast<double>(std::max(0, hi) + std::max(0, -K - lo));
    };
    out.upper(9, "cocycle_locality", label + ",gamma", outside(glo, ghi, gK), 0.0,
              "observed n+m band [" + std::to_string(glo) + "," + std::to_string(ghi) + "], allowed [" + std::to_string(-gK) + ",0]");
    out.upper(9, "cocycle_locality", label + ",chi", outside(xlo, xhi, xK), 0.0,
              "observed n+m band [" + std::to_string(xlo) + "," + std::to_string(xhi) + "], allowed [" + std::to_string(-xK) + ",0]");
    out.upper(9, "cocycle_vanishing", label + ",A+", a_plus, 1e-9);
    out.upper(9, "cocycle_vanishing", label + ",A-", a_minus, 1e-9, "degrees <= " + std::to_string(a_cut));
    out.upper(9, "cocycle_vanishing", label + ",L+", l_plus, 1e-9);
    out.upper(9, "cocycle_vanishing", label + ",L-", l_minus, 1e-9, "degrees <= " + std::to_string(l_cut));
  }
}

/// 10: Sugawara operators on truncated modules.
inline void verify_sugawara(CheckList& out, const VerifyOptions& o) {
  {
    // abelian, one point at the origin: [T_k, T_m] - (m-k) T_{k+m} is scalar
    const KNBasis B(MarkedCurve::rational({0.0}));
    TruncatedAdmissibleModule M(B, WeightedTensorSpace(make_abelian(1), {1}, {}, 1.0), 6, o.samples);
    const int W = 2, cols = M.window_dim(W);
    double worst = 0.0;
    for (int k = -2; k <= 2; ++k)
      for (int m = -2; m <= 2; ++m) {
        if (std::abs(k + m) > 2) continue;
        const Section ek = B.vector_field(k, 0).section, em = B.vector_field(m, 0).section, ekm = B.vector_field(k + m, 0).section;
        LCache lk(B, ek), lm(B, em), lkm(B, ekm);
        const auto bk = sugawara_band(ek), bm = sugawara_band(em), bkm = sugawara_band(ekm);
        Mat C = Mat::Zero(M.dim(), cols);
        for (int j = 0; j < cols; ++j) {
          Vec w = Vec::Zero(M.dim());
          w(j) = 1.0;
          const Vec a = sugawara_apply(M, lk, bk, sugawara_apply(M, lm, bm, w));
          const Vec b = sugawara_apply(M, lm, bm, sugawara_apply(M, lk, bk, w));
          C.col(j) = a - b - static_cast<double>(m - k) * sugawara_apply(M, lkm, bkm, w);
        }
        const cplx sc = C(0, 0);
        Mat R = C;
        R.topRows(cols) -= sc * Mat::Identity(cols, cols);
        worst = std::max(worst, detail::max_abs(R));
      }
    out.upper(10, "sugawara_central", "abelian,depth 6,window 2", worst, 1e-9);
  }
  {
    // sl2 level 1: [T[e], x(A)] = x(e . A) on the degree-0 part
    ConfigSampler S(o.seed, 10);
    for (int N = 1; N <= 2; ++N) {
      const KNBasis B(N == 1 ? MarkedCurve::rational({0.0}) : MarkedCurve::rational(S.rational_points(2)));
      TruncatedAdmissibleModule M(B, WeightedTensorSpace(make_sl2(), std::vector<int>(static_cast<std::size_t>(N), 1), {}, 1.0), 3,
                                  o.samples);
      BasisSampler bs(B, o.samples);
      double worst = 0.0;
      for (int k = -1; k <= 1; ++k)
        for (int q = 0; q < N; ++q) {
          const Section e = B.vector_field(k, q).section;
          LCache l(B, e);
          const auto band = sugawara_band(e);
          for (int m = -1; m <= 1; ++m)
            for (int p = 0; p < N; ++p) {
              const auto ex = expand_in_basis(bs, lie_derivative(e, B.function(m, p).section), k + m - 2, k + m + 4);
              for (int a = 0; a < 3; ++a)
                for (int v = 0; v < M.space().dim(); ++v) {
                  const Vec w = M.state(0, v);
                  const Mode x{m, p, a};
                  const Vec lhs = sugawara_apply(M, l, band, M.apply(x, w)) - M.apply(x, sugawara_apply(M, l, band, w));
                  Vec rhs = Vec::Zero(M.dim());
                  for (const auto& t : ex.terms)
                    if (std::abs(t.coeff) > 1e-12) rhs += t.coeff * M.apply(Mode{t.index.degree, t.index.point, a}, w);
                  worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
                }
            }
        }
      out.upper(10, "sugawara_current", "sl2,level 1," + detail::curve_label(B.curve()), worst, 1e-8);
    }
  }
  {
    // rescaling the local coordinates
    const std::vector<cplx> alpha{std::polar(1.3, 0.4), std::polar(0.7, -1.1)};
    const MarkedCurve c = MarkedCurve::rational({cplx{0.2, -0.3}, cplx{-0.6, 0.9}});
    const MarkedCurve cs = c.with_scales(alpha);
    const KNBasis B(c), Bs(cs);
    const Section e = motion_field(B, 0), es = motion_field(Bs, 0);
    double lrel = 0.0;
    for (int n = -2; n <= 1; ++n)
      for (int p = 0; p < 2; ++p)
        for (int m = -2; m <= 1; ++m)
          for (int s = 0; s < 2; ++s) {
            const cplx l = l_coefficient(B, n, p, m, s, e), ls = l_coefficient(Bs, n, p, m, s, es);
            const cplx want = std::pow(alpha[static_cast<std::size_t>(p)], -n) * std::pow(alpha[static_cast<std::size_t>(s)], -m) * l;
            lrel = std::max(lrel, std::abs(ls - want) / std::max(1.0, std::abs(want)));
          }
    out.upper(10, "sugawara_covariance", "l_coefficients", lrel, 1e-10);
    const WeightedTensorSpace V(make_sl2(), {1, 1}, {}, 1.0);
    TruncatedAdmissibleModule M(B, V, 2, o.samples), Ms(Bs, V, 2, o.samples);
    const Vec D = rescaling_diagonal(M, alpha);
    double modes = 0.0;
    for (int n = -2; n <= 1; ++n)
      for (int p = 0; p < 2; ++p)
        for (int a = 0; a < 3; ++a) {
          const Mode x{n, p, a};
          const cplx an = std::pow(alpha[static_cast<std::size_t>(p)], n);
          // states the mode keeps inside the truncation
          for (int j = 0; j < M.window_dim(M.depth() + std::min(n, 0)); ++j) {
            Vec w = Vec::Zero(M.dim());
            w(j) = 1.0;
            const Vec base = M.apply(x, w), got = Ms.apply(x, w);
            for (int i = 0; i < M.dim(); ++i) {
              const cplx want = an * base(i) * D(j) / D(i);
              modes = std::max(modes, std::abs(got(i) - want) / std::max(1.0, std::abs(want)));
            }
          }
        }
    out.upper(10, "sugawara_covariance", "modes", modes, 1e-10);
    const Mat T = sugawara_action(M, e, 1), Ts = sugawara_action(Ms, es, 1);
    Mat Tc = T;
    for (int i = 0; i < T.rows(); ++i)
      for (int j = 0; j < T.cols(); ++j) Tc(i, j) *= D(j) / D(i);
    out.upper(10, "sugawara_covariance", "sugawara_action", detail::max_abs(Ts - Tc) / std::max(1.0, detail::max_abs(Tc)), 1e-10);
    const auto k0 = assemble_kz_g0(B, V, o.samples), k1 = assemble_kz_g0(Bs, V, o.samples);
    double conn = 0.0;
    for (std::size_t i = 0; i < k0.reduced.size(); ++i) conn = std::max(conn, detail::max_abs(k0.reduced[i] - k1.reduced[i]));
    out.upper(10, "sugawara_covariance", "connection", conn, 1e-10);
  }
}

/// 11: residues at the out-point of e_0, of e_1..e_N and of the correctors.
inline void verify_moduli_independence(CheckList& out, const VerifyOptions& o) {
  ConfigSampler S(o.seed, 11);
  const std::vector<int> sizes{1, 2, 3, 2, 3};
  for (int N : sizes) {
    const MarkedCurve c = S.elliptic(S.tau(), N);
    const KNBasis B(c);
    const auto r = moduli_independence(B, o.samples);
    const auto label = detail::curve_label(c);
    out.lower(11, "moduli_e0_residue", label, std::abs(r.e0_residue), 1e-6);
    out.upper(11, "moduli_e0_residue", label + ",closed_vs_quadrature",
              std::abs(r.e0_residue - r.e0_residue_closed) / std::max(1.0, std::abs(r.e0_residue_closed)), 1e-9);
    double others = 0.0;
    for (const auto& v : r.motion_residues) others = std::max(others, std::abs(v));
    for (const auto& v : r.corrector_residues) others = std::max(others, std::abs(v));
    out.upper(11, "moduli_other_residues", label, others, 1e-9);
  }
}

/// Lie data and module invariants that no criterion names.
inline void verify_lie_modules(CheckList& out, const VerifyOptions& o) {
  const auto g = make_sl2();
  double inv = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < g.dim; ++b)
      for (int c = 0; c < g.dim; ++c) {
        const Vec x = Vec::Unit(g.dim, a), y = Vec::Unit(g.dim, b), z = Vec::Unit(g.dim, c);
        inv = std::max(inv, std::abs(g.pairing(g.bracket(x, y), z) - g.pairing(x, g.bracket(y, z))));
      }
  out.upper(0, "form_invariance", "sl2", inv, 1e-14);
  out.upper(0, "dual_coxeter", "sl2", std::abs(g.kappa - 2.0), 1e-14);
  Mat t1(2, 2), t2(2, 2), t3(2, 2);
  t1 << 1.0, 0.5, 0.0, 1.0;
  t2 << 2.0, 0.0, 1.0, 0.5;
  t3 << 0.0, 1.0, -1.0, 0.0;
  const WeightedTensorSpace V(g, {1, 2, 1}, {t1, t2, t3}, 1.0);
  double comm = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    Mat diag = Mat::Zero(V.dim(), V.dim());
    for (int p = 0; p < V.sites(); ++p) diag += V.action(a, p);
    for (int i = 0; i < V.sites(); ++i)
      for (int j = i + 1; j < V.sites(); ++j) {
        const Mat O = casimir_two_site(V, i, j);
        comm = std::max(comm, detail::max_abs(O * diag - diag * O));
      }
  }
  out.upper(0, "casimir_invariance", "twisted sl2 weights (1,2,1)", comm, 1e-12);
  double rep = 0.0;
  for (int p = 0; p < V.sites(); ++p)
    for (int a = 0; a < g.dim; ++a)
      for (int b = 0; b < g.dim; ++b) {
        const Mat lhs = V.action(a, p) * V.action(b, p) - V.action(b, p) * V.action(a, p);
        rep = std::max(rep, detail::max_abs(lhs - V.action(g.bracket(Vec::Unit(g.dim, a), Vec::Unit(g.dim, b)), p)));
      }
  out.upper(0, "twisted_representation", "twisted sl2 weights (1,2,1)", rep, 1e-12);
  // positive modes kill the top space, degree 0 acts by the site modules
  const KNBasis B(MarkedCurve::rational({0.0, 1.0}));
  TruncatedAdmissibleModule M(B, WeightedTensorSpace(g, {1, 1}, {}, 1.0), 2, o.samples);
  double hw = 0.0;
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < 3; ++a)
      for (int v = 0; v < M.space().dim(); ++v) hw = std::max(hw, M.apply(Mode{1, p, a}, M.state(0, v)).cwiseAbs().maxCoeff());
  out.upper(0, "module_admissibility", "sl2,depth 2", hw, 0.0);
  double deg0 = 0.0;
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < 3; ++a)
      for (int v = 0; v < M.space().dim(); ++v) {
        const Vec got = M.apply(Mode{0, p, a}, M.state(0, v)).head(M.space().dim());
        deg0 = std::max(deg0, (got - M.space().action(a, p).col(v)).cwiseAbs().maxCoeff());
      }
  out.upper(0, "module_degree_zero", "sl2,depth 2", deg0, 0.0);
}

/// Checks on the configured curve itself: duality over its weights and degree window.
inline void verify_configured(CheckList& out, const RunConfig& cfg, const VerifyOptions& o) {
  const KNBasis B(cfg.curve());
  const auto d = duality_deviation(B, cfg.weights, cfg.degree_min, cfg.degree_max, o.samples);
  const double bound = cfg.genus == 0 ? 1e-9 : 1e-8;
  out.upper(1, "duality_edu", "configured," + detail::curve_label(B.curve()) + ",closed", d.closed, bound);
  out.upper(1, "duality_edu", "configured," + detail::curve_label(B.curve()) + ",quadrature", d.quadrature, bound);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(CheckList&, const VerifyOptions&)> run;
};

inline std::vector<Criterion> criteria() {
  return {
      {1, "pairing duality", verify_duality},
      {2, "classical degeneration", verify_witt},
      {3, "partition of unity", verify_partition_of_unity},
      {4, "genus-0 KZ coefficients", verify_kz_g0_coefficients},
      {5, "genus-0 reduction and braid relation", verify_kz_g0_reduction},
      {6, "genus-1 coefficient families", [](CheckList& c, const VerifyOptions& o) { verify_kz_g1_coefficients(c, o, true, false); }},
      {7, "elimination soundness", [](CheckList& c, const VerifyOptions& o) { verify_kz_g1_coefficients(c, o, false, true); }},
      {8, "elliptic layer", verify_elliptic},
      {9, "cocycles", verify_cocycles},
      {10, "Sugawara on truncations", verify_sugawara},
      {11, "moduli independence", verify_moduli_independence},
  };
}

/// Runs one criterion; an exception becomes a failed check.
inline std::vector<CheckResult> run_criterion(const Criterion& c, const VerifyOptions& o) {
  CheckList out(o);
  try {
    c.run(out, o);
  } catch (const std::exception& e) {
    out.error(c.id, "criterion_" + std::to_string(c.id), e.what());
  }
  return out.take();
}

struct VerifyReport {
  VerifyOptions options;
  std::vector<CheckResult> checks;

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& r) { return !r.pass; }));
  }
  bool passed() const { return failures() == 0; }
};

/// Every check. `only` restricts to the listed criterion ids (0 = Lie data
/// and module invariants) when not empty.
inline VerifyReport run_verification(const RunConfig& cfg, VerifyOptions o, const std::vector<int>& only = {}) {
  VerifyReport rep;
  rep.options = o;
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  if (wanted(0)) {
    CheckList out(o);
    try {
      verify_lie_modules(out, o);
    } catch (const std::exception& e) {
      out.error(0, "criterion_0", e.what());
    }
    for (auto& r : out.take()) rep.checks.push_back(std::move(r));
  }
  if (wanted(1)) {
    CheckList out(o);
    try {
      verify_configured(out, cfg, o);
    } catch (const std::exception& e) {
      out.error(1, "duality_edu", e.what());
    }
    for (auto& r : out.take()) rep.checks.push_back(std::move(r));
  }
  for (const auto& c : criteria()) {
    if (!wanted(c.id)) continue;
    for (auto& r : run_criterion(c, o)) rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace knz
