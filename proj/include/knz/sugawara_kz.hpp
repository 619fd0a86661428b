#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knz/algebra.hpp"
#include "knz/basis.hpp"
#include "knz/coefficients.hpp"
#include "knz/error.hpp"
#include "knz/lie_algebra.hpp"
#include "knz/section.hpp"

namespace knz {

/// Direction label of the genus-1 complex-structure deformation.
inline constexpr int kModuliDirection = -1;

inline std::string direction_label(int k) { return k == kModuliDirection ? "0" : std::to_string(k + 1); }

enum class Contribution {
  survives,
  killed_by_annihilation,     // both degrees >= 0, one positive
  killed_by_normal_ordering,  // a positive degree is moved to the right
  killed_by_factorization,    // quotient by the u(n<0) action on the degree-0 part
  holomorphic_zero,           // the 1-form has no poles at the in-points
  cancelled_by_adjustment     // removed by adding degree-0 correctors to e_k
};

inline const char* to_string(Contribution c) {
  switch (c) {
    case Contribution::survives: return "survives";
    case Contribution::killed_by_annihilation: return "killed-by-annihilation";
    case Contribution::killed_by_normal_ordering: return "killed-by-normal-ordering";
    case Contribution::killed_by_factorization: return "killed-by-factorization";
    case Contribution::holomorphic_zero: return "holomorphic-zero";
    case Contribution::cancelled_by_adjustment: return "cancelled-by-adjustment";
  }
  return "?";
}

enum class Stage { formal, reduced };

/// Fate of the term l^{(n,i)(m,j)}_k :u(n,i)u(m,j): acting on a vector
/// annihilated by positive degrees. Points and k are 0-based; k may be
/// kModuliDirection in genus 1.
inline Contribution classify_contribution(int genus, int n, int i, int m, int j, int k, Stage stage = Stage::formal) {
  if (std::max(n, m) > 0) return std::min(n, m) < 0 ? Contribution::killed_by_normal_ordering : Contribution::killed_by_annihilation;
  const int s = n + m;
  Contribution c = Contribution::holomorphic_zero;
  if (k != kModuliDirection) {
    if (s == -1) c = (i == j && j == k) ? Contribution::survives : Contribution::holomorphic_zero;
    else if (s == 0) {
      if (i == j) c = Contribution::cancelled_by_adjustment;
      else c = (k == i || k == j) ? Contribution::survives : Contribution::holomorphic_zero;
    }
    if (stage == Stage::reduced && genus == 0 && c == Contribution::survives && s == -1) c = Contribution::killed_by_factorization;
    return c;
  }
  if (genus != 1) fail(ErrorKind::precondition, "the moduli direction exists only in genus 1");
  if (n != 0 && m != 0) {
    if (s == -2 && i == j) c = Contribution::survives;
  } else if (n == 0 && m == 0) {
    c = Contribution::survives;
  } else {
    const int d = n == 0 ? m : n;
    if (d == -1) c = Contribution::survives;
    else if (d == -2) c = i == j ? Contribution::survives : Contribution::holomorphic_zero;
  }
  if (stage == Stage::reduced && c == Contribution::survives && std::min(n, m) <= -2) c = Contribution::killed_by_factorization;
  return c;
}

/// e_k = f^{-1}_{-1,k}, unscaled: e_k(z_k) = 1 and zeros at the other in-points.
inline Section motion_field(const KNBasis& B, int k) {
  const auto& cp = B.curve_ptr();
  if (cp->genus() == 0) return make_form_g0(cp, -1, -1, k).section;
  return lift_weight(make_function_g1(cp, 0, k), -1).section;
}

/// E_i = f^{-1}_{0,i}, unscaled: vanishes at every in-point, simply at z_i.
inline Section corrector_field(const KNBasis& B, int i) {
  const auto& cp = B.curve_ptr();
  if (cp->genus() == 0) return make_form_g0(cp, -1, 0, i).section;
  return lift_weight(make_function_g1(cp, 1, i), -1).section;
}

/// Genus-1 e_0 = sigma(z-E)^{N+1} sigma(z-z_0)^{-1} prod_s sigma(z-z_s)^{-1} d/dz,
/// E the mean of z_0..z_N.
inline Section moduli_field(const KNBasis& B) {
  const auto& c = B.curve();
  if (c.genus() != 1) fail(ErrorKind::precondition, "the moduli field exists only in genus 1");
  const int N = c.size();
  cplx E = c.out_point();
  for (const auto& z : c.points()) E += z;
  E /= static_cast<double>(N + 1);
  detail::require_generic(c, E, "mean point of the moduli field meets a marked point");
  std::vector<Factor> f{{E, N + 1}, {c.out_point(), -1}};
  for (const auto& z : c.points()) f.push_back({z, -1});
  return Section(B.curve_ptr(), -1, {Monomial(cplx{}, std::move(f))});
}

/// The direction field for label k.
inline Section direction_field(const KNBasis& B, int k) { return k == kModuliDirection ? moduli_field(B) : motion_field(B, k); }

/// Omega~^i = omega^{0,i} omega^{0,i}.
inline Section tilde_omega(const KNBasis& B, int i) { return B.omega(0, i).section * B.omega(0, i).section; }

struct AdjustedField {
  Section field;
  std::vector<cplx> lambda;  // e'_k = e_k + sum_i lambda_i E_i
};

/// e'_k = e_k + sum_i lambda_{ki} E_i with lambda_{ki} = -<e_k, Omega~^i>; the
/// pairing <Omega~^i, E_j> is the identity so <e'_k, Omega~^i> = 0.
inline AdjustedField adjust_vector_field(const KNBasis& B, int k, Route route = Route::closed_form, int samples = 512) {
  const int N = B.size();
  AdjustedField out;
  out.field = motion_field(B, k);
  Section acc = out.field;
  for (int i = 0; i < N; ++i) {
    const Section prod = out.field * tilde_omega(B, i);
    const cplx v = route == Route::closed_form ? closed_residue_sum(prod) : quadrature_residue_sum(prod.fn(), B.curve(), samples);
    out.lambda.push_back(-v);
    acc = acc + corrector_field(B, i).scaled(-v);
  }
  out.field = acc;
  return out;
}

namespace detail {

inline cplx scale_factor(const KNBasis& B, int n, int i, int m, int j) {
  const auto& c = B.curve();
  return std::pow(c.scale(i), -n) * std::pow(c.scale(j), -m);
}

/// e_k'(z_i) for the genus-0 motion field, i != k.
inline cplx motion_field_slope_g0(const MarkedCurve& c, int k, int i) {
  cplx num = 1.0, den = 1.0;
  for (int s = 0; s < c.size(); ++s) {
    if (s == k) continue;
    den *= c.point(k) - c.point(s);
    if (s != i) num *= c.point(i) - c.point(s);
  }
  return num / den;
}

/// new1 = sigma(z_i-E)^{N+1} sigma(z_i-z_0)^{-1} prod_{s!=i} sigma(z_i-z_s)^{-1}.
inline cplx moduli_residue_g1(const MarkedCurve& c, int i) {
  const auto& L = c.lattice();
  const int N = c.size();
  cplx E = c.out_point();
  for (const auto& z : c.points()) E += z;
  E /= static_cast<double>(N + 1);
  const cplx zi = c.point(i);
  cplx lg = static_cast<double>(N + 1) * L.log_sigma(zi - E) - L.log_sigma(zi - c.out_point());
  for (int s = 0; s < N; ++s)
    if (s != i) lg -= L.log_sigma(zi - c.point(s));
  return std::exp(lg);
}

inline Monomial single(const Section& s) {
  if (s.terms().size() != 1) fail(ErrorKind::internal, "expected a single monomial");
  return s.terms().front();
}

/// co2.2 without the gamma correction: <A'_{-1,i} A_{0,j}, e_0>.
inline cplx moduli_mixed_bare_g1(const KNBasis& B, int i, int j) {
  const auto& c = B.curve();
  const auto& cp = B.curve_ptr();
  const Monomial Ai = single(B.primed(i).section);
  const Monomial A0j = single(make_function_g1(cp, 0, j).section);
  const Monomial e0 = single(moduli_field(B));
  const cplx zi = c.point(i), zj = c.point(j);
  if (i != j) {
    const Monomial F = Ai * A0j * e0 * Monomial(cplx{}, {{zi, 1}, {zj, 1}});
    const auto ji = F.jet(c, zi, 1), jj = F.jet(c, zj, 1);
    if (ji->order != 0 || jj->order != 0) fail(ErrorKind::internal, "F must have order zero at z_i and z_j");
    return (ji->taylor[0] - jj->taylor[0]) / c.lattice().sigma(zi - zj);
  }
  // double pole: 1/sigma(u)^2 = u^{-2} (1 + O(u^4)), so the residue is F'(z_i)
  const Monomial F = Ai * A0j * e0 * Monomial(cplx{}, {{zi, 2}});
  const auto jt = F.jet(c, zi, 2);
  if (jt->order != 0) fail(ErrorKind::internal, "F must have order zero at z_i");
  return jt->taylor[1];
}

}  // namespace detail

/// Closed form of l^{(n,i)(m,j)}_k where one is known, for the raw direction
/// field (adjusted = false) or the adjusted one. Values include the scale
/// factors alpha_i^{-n} alpha_j^{-m} of the omegas.
inline std::optional<cplx> closed_l(const KNBasis& B, int n, int i, int m, int j, int k, bool adjusted) {
  const auto& c = B.curve();
  const int N = c.size();
  const cplx sf = detail::scale_factor(B, n, i, m, j);
  if (std::max(n, m) > 0) return std::nullopt;
  if (k != kModuliDirection) {
    const auto cls = classify_contribution(c.genus(), n, i, m, j, k);
    if (cls == Contribution::holomorphic_zero) return cplx{};
    if (n + m == -1 && i == j && j == k) return sf;  // coef0 / lequ
    if (n == 0 && m == 0) {
      if (i == j) {
        if (adjusted) return cplx{};
        if (c.genus() != 0) return std::nullopt;
        if (i == k) {  // <Omega~^k, e_k> = sum_{s!=k} 1/(z_k - z_s)
          cplx s{};
          for (int q = 0; q < N; ++q)
            if (q != k) s += 1.0 / (c.point(k) - c.point(q));
          return s;
        }
        return detail::motion_field_slope_g0(c, k, i);
      }
      const int other = i == k ? j : i;
      if (c.genus() == 0) return sf / (c.point(k) - c.point(other));  // lequ
      // coef1: A'_{-1,other}(z_k) - gamma_{other,k}
      const cplx v = B.primed(other)(c.point(k)) - B.gamma()[static_cast<std::size_t>(other)][static_cast<std::size_t>(k)];
      return sf * v;
    }
    return std::nullopt;
  }
  if (c.genus() != 1) fail(ErrorKind::precondition, "the moduli direction exists only in genus 1");
  const auto cls = classify_contribution(1, n, i, m, j, k);
  if (cls == Contribution::holomorphic_zero) return cplx{};
  const auto& G = B.gamma();
  auto g = [&](int a, int b) { return G[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
  auto new1 = [&](int a) { return detail::moduli_residue_g1(c, a); };
  auto mixed = [&](int a, int b) { return detail::moduli_mixed_bare_g1(B, a, b) - g(a, b) * new1(b); };  // co2.2, unscaled
  if (n == -1 && m == -1 && i == j) return sf * new1(i);                             // new1
  if ((n == 0 && m == -2) || (n == -2 && m == 0)) return sf * new1(i);               // new2
  if (n == 0 && m == -1) return sf * mixed(i, j);
  if (n == -1 && m == 0) return sf * mixed(j, i);
  if (n == 0 && m == 0) {  // co2.3
    const Section prod = B.primed(i).section * B.primed(j).section * moduli_field(B);
    cplx v = closed_residue_sum(prod);
    for (int s = 0; s < N; ++s) v -= g(i, s) * mixed(j, s) + g(j, s) * mixed(i, s) + g(i, s) * g(j, s) * new1(s);
    return sf * v;
  }
  return std::nullopt;
}

struct CoefficientEntry {
  int n = 0, i = 0, m = 0, j = 0, k = 0;
  cplx value{};                // closed form when available, quadrature otherwise
  std::optional<cplx> closed;
  cplx quadrature{};
  double residual = 0.0;       // relative |closed - quadrature|
  Contribution formal = Contribution::survives;
  Contribution reduced = Contribution::survives;

  std::string provenance() const { return closed ? "both" : "quadrature"; }
};

struct CoefficientTable {
  int genus = 0;
  bool adjusted = false;
  int nmin = 0, nmax = 0;
  std::vector<int> directions;
  std::vector<CoefficientEntry> entries;
  double max_residual = 0.0;    // over entries with a closed form
  double max_eliminated = 0.0;  // largest |quadrature| over entries declared zero
  double max_asymmetry = 0.0;   // |l^{(n,i)(m,j)} - l^{(m,j)(n,i)}|

  const CoefficientEntry* find(int n, int i, int m, int j, int k) const {
    for (const auto& e : entries)
      if (e.n == n && e.i == i && e.m == m && e.j == j && e.k == k) return &e;
    return nullptr;
  }
};

inline double relative_gap(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

/// Every l^{(n,i)(m,j)}_k with n, m in [nmin, nmax], by quadrature and,
/// where available, by the closed form.
inline CoefficientTable coefficient_table(const KNBasis& B, int nmin, int nmax, bool adjusted, int samples = 512) {
  const auto& c = B.curve();
  const int N = c.size();
  CoefficientTable T;
  T.genus = c.genus();
  T.adjusted = adjusted;
  T.nmin = nmin;
  T.nmax = nmax;
  if (c.genus() == 1) T.directions.push_back(kModuliDirection);
  for (int k = 0; k < N; ++k) T.directions.push_back(k);
  // contour samples of every omega in the window, taken once
  const ContourSampler S(c, samples);
  std::map<std::pair<int, int>, ContourSampler::Samples> om;
  for (int n = nmin; n <= nmax; ++n)
    for (int i = 0; i < N; ++i) om.emplace(std::make_pair(n, i), S.sample(B.omega(n, i).section.fn()));
  for (int k : T.directions) {
    const Section e = k == kModuliDirection ? moduli_field(B) : adjusted ? adjust_vector_field(B, k).field : motion_field(B, k);
    const auto es = S.sample(e.fn());
    auto quad = [&](int n, int i, int m, int j) {
      auto ab = om.at({n, i});
      const auto& b = om.at({m, j});
      for (std::size_t p = 0; p < ab.size(); ++p)
        for (std::size_t q = 0; q < ab[p].size(); ++q) ab[p][q] *= b[p][q];
      const Section fa = B.omega(n, i).section, fb = B.omega(m, j).section;
      return S.pair(ab, es, [&](cplx z) { return fa(z) * fb(z); }, e.fn());
    };
    for (int n = nmin; n <= nmax; ++n)
      for (int i = 0; i < N; ++i)
        for (int m = nmin; m <= nmax; ++m)
          for (int j = 0; j < N; ++j) {
            CoefficientEntry en;
            en.n = n, en.i = i, en.m = m, en.j = j, en.k = k;
            if (const auto* sym = T.find(m, j, n, i, k)) {
              en.quadrature = sym->quadrature;
              en.closed = closed_l(B, n, i, m, j, k, adjusted);
            } else {
              en.quadrature = quad(n, i, m, j);
              en.closed = closed_l(B, n, i, m, j, k, adjusted);
            }
            en.value = en.closed ? *en.closed : en.quadrature;
            if (en.closed) {
              en.residual = relative_gap(*en.closed, en.quadrature);
              T.max_residual = std::max(T.max_residual, en.residual);
            }
            en.formal = classify_contribution(c.genus(), n, i, m, j, k, Stage::formal);
            en.reduced = classify_contribution(c.genus(), n, i, m, j, k, Stage::reduced);
            const bool declared_zero = en.formal == Contribution::holomorphic_zero ||
                                       (adjusted && en.formal == Contribution::cancelled_by_adjustment);
            if (declared_zero) T.max_eliminated = std::max(T.max_eliminated, std::abs(en.quadrature));
            T.entries.push_back(en);
          }
  }
  for (const auto& e : T.entries)
    if (const auto* s = T.find(e.m, e.j, e.n, e.i, e.k)) T.max_asymmetry = std::max(T.max_asymmetry, std::abs(e.value - s->value));
  return T;
}

/// One term coeff * :u(n,i) u(m,j): of a formal KZ equation.
struct KZTerm {
  int n = 0, i = 0, m = 0, j = 0;
  cplx coeff{};
  std::string provenance;  // closed_form, quadrature, both
  double residual = 0.0;
  Contribution reduced = Contribution::survives;

  std::string label() const {
    return ":u(" + std::to_string(n) + "," + std::to_string(i + 1) + ")u(" + std::to_string(m) + "," + std::to_string(j + 1) + "):";
  }
};

struct KZEquation {
  int direction = 0;  // 0-based point, or kModuliDirection
  std::vector<KZTerm> terms;
};

/// d_k Phi + prefactor * sum_terms coeff :uu: Phi = 0 for every direction;
/// genus 0 also carries the reduced form nabla_i = d_i - A_i on the tensor space.
struct KZSystem {
  int genus = 0;
  int points = 0;
  cplx level{};
  double kappa = 0.0;
  cplx prefactor{};  // -1/(c + kappa)
  std::vector<KZEquation> equations;
  // genus 0, reduced: A_i = sum_{j!=i} r_ij Omega_ij with r_ij = 2/((c+kappa)(z_i-z_j))
  std::vector<std::vector<cplx>> r;
  // the same with the 1/2 of the Sugawara operator kept: 1/((c+kappa)(z_i-z_j))
  std::vector<std::vector<cplx>> r_sugawara;
  std::vector<Mat> reduced;
  double flatness_residual = 0.0;
  double antisymmetry_residual = 0.0;
  double max_residual = 0.0;
  std::vector<std::string> notes;
};

namespace detail {

inline KZTerm make_term(const KNBasis& B, int n, int i, int m, int j, int k, const Section& e, bool adjusted, int samples) {
  KZTerm t;
  t.n = n, t.i = i, t.m = m, t.j = j;
  const auto cl = closed_l(B, n, i, m, j, k, adjusted);
  const cplx q = l_coefficient(B, n, i, m, j, e, Route::quadrature, samples);
  if (cl) {
    t.coeff = *cl;
    t.provenance = "both";
    t.residual = relative_gap(*cl, q);
  } else {
    t.coeff = q;
    t.provenance = "quadrature";
  }
  t.reduced = classify_contribution(B.curve().genus(), n, i, m, j, k, Stage::reduced);
  return t;
}

}  // namespace detail

inline KZSystem assemble_kz_g0(const KNBasis& B, const WeightedTensorSpace& V, int samples = 512) {
  const auto& c = B.curve();
  if (c.genus() != 0) fail(ErrorKind::precondition, "assemble_kz_g0 needs a genus-0 curve");
  if (V.sites() != c.size()) fail(ErrorKind::config, "one highest weight per in-point is required");
  const double kappa = V.algebra().kappa;
  require_noncritical(V.level(), kappa);
  const int N = c.size();
  KZSystem S;
  S.genus = 0;
  S.points = N;
  S.level = V.level();
  S.kappa = kappa;
  S.prefactor = -1.0 / (V.level() + kappa);
  for (int k = 0; k < N; ++k) {
    KZEquation eq;
    eq.direction = k;
    const Section e = adjust_vector_field(B, k).field;
    for (int i = 0; i < N; ++i) {
      if (i == k) continue;
      eq.terms.push_back(detail::make_term(B, 0, k, 0, i, k, e, true, samples));
      eq.terms.push_back(detail::make_term(B, 0, i, 0, k, k, e, true, samples));
    }
    eq.terms.push_back(detail::make_term(B, 0, k, -1, k, k, e, true, samples));
    eq.terms.push_back(detail::make_term(B, -1, k, 0, k, k, e, true, samples));
    for (const auto& t : eq.terms) S.max_residual = std::max(S.max_residual, t.residual);
    S.equations.push_back(std::move(eq));
  }
  // reduced form: on the degree-0 part :u(0,i)u(0,j): + :u(0,j)u(0,i): = 2 Omega_ij
  const cplx ck = V.level() + kappa;
  S.r.assign(static_cast<std::size_t>(N), std::vector<cplx>(static_cast<std::size_t>(N)));
  S.r_sugawara = S.r;
  for (int i = 0; i < N; ++i) {
    Mat A = Mat::Zero(V.dim(), V.dim());
    for (const auto& t : S.equations[static_cast<std::size_t>(i)].terms) {
      if (t.reduced != Contribution::survives || t.n != 0 || t.m != 0 || t.i != i) continue;
      const int j = t.j;
      const cplx l = t.coeff;  // l^{(0,i)(0,j)}_i; its mirror gives the same value
      S.r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 2.0 * l / ck;
      S.r_sugawara[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = l / ck;
      A += (2.0 * l / ck) * casimir_two_site(V, i, j);
    }
    S.reduced.push_back(std::move(A));
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j)
        S.antisymmetry_residual = std::max(S.antisymmetry_residual, std::abs(S.r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                                                                             S.r[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]));
  // [nabla_i, nabla_j] = d_j A_i - d_i A_j + [A_i, A_j]; d_j r_ij = 2/((c+kappa)(z_i-z_j)^2)
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const cplx d = c.point(i) - c.point(j);
      const Mat Oij = casimir_two_site(V, i, j);
      const Mat dj_Ai = (2.0 / (ck * d * d)) * Oij;
      const Mat di_Aj = (2.0 / (ck * d * d)) * Oij;
      const Mat& Ai = S.reduced[static_cast<std::size_t>(i)];
      const Mat& Aj = S.reduced[static_cast<std::size_t>(j)];
      const Mat curv = dj_Ai - di_Aj + Ai * Aj - Aj * Ai;
      S.flatness_residual = std::max(S.flatness_residual, curv.norm());
    }
  S.notes.push_back("reduced r_ij uses 2/(c+kappa); r_sugawara keeps the 1/2 of the Sugawara operator");
  return S;
}

inline KZSystem assemble_kz_g1(const KNBasis& B, const WeightedTensorSpace& V, int samples = 512) {
  const auto& c = B.curve();
  if (c.genus() != 1) fail(ErrorKind::precondition, "assemble_kz_g1 needs a genus-1 curve");
  if (V.sites() != c.size()) fail(ErrorKind::config, "one highest weight per in-point is required");
  const double kappa = V.algebra().kappa;
  require_noncritical(V.level(), kappa);
  const int N = c.size();
  KZSystem S;
  S.genus = 1;
  S.points = N;
  S.level = V.level();
  S.kappa = kappa;
  S.prefactor = -1.0 / (V.level() + kappa);
  auto push = [&](KZEquation& eq, KZTerm t) {
    S.max_residual = std::max(S.max_residual, t.residual);
    eq.terms.push_back(std::move(t));
  };
  for (int k = 0; k < N; ++k) {
    KZEquation eq;
    eq.direction = k;
    const Section e = adjust_vector_field(B, k).field;
    for (int i = 0; i < N; ++i) {
      if (i == k) continue;
      push(eq, detail::make_term(B, 0, k, 0, i, k, e, true, samples));
      push(eq, detail::make_term(B, 0, i, 0, k, k, e, true, samples));
    }
    push(eq, detail::make_term(B, 0, k, -1, k, k, e, true, samples));
    push(eq, detail::make_term(B, -1, k, 0, k, k, e, true, samples));
    S.equations.push_back(std::move(eq));
  }
  KZEquation eq;
  eq.direction = kModuliDirection;
  const Section e0 = moduli_field(B);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) push(eq, detail::make_term(B, 0, i, 0, j, kModuliDirection, e0, false, samples));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      push(eq, detail::make_term(B, 0, i, -1, j, kModuliDirection, e0, false, samples));
      push(eq, detail::make_term(B, -1, j, 0, i, kModuliDirection, e0, false, samples));
    }
  for (int i = 0; i < N; ++i) {
    push(eq, detail::make_term(B, -1, i, -1, i, kModuliDirection, e0, false, samples));
    push(eq, detail::make_term(B, 0, i, -2, i, kModuliDirection, e0, false, samples));
    push(eq, detail::make_term(B, -2, i, 0, i, kModuliDirection, e0, false, samples));
  }
  S.equations.insert(S.equations.begin(), std::move(eq));
  S.notes.push_back("diagonal gamma_ii from the same residue integral as the off-diagonal entries");
  S.notes.push_back("second-order pole term for i = j read as the residue F'(z_i)");
  return S;
}

/// Residues at z_0 of the coefficient functions of e_0, of e_1..e_N and of
/// the degree-0 correctors.
struct ModuliIndependence {
  cplx e0_residue{};         // quadrature
  cplx e0_residue_closed{};  // sigma(z_0-E)^{N+1} prod_s sigma(z_0-z_s)^{-1}
  std::vector<cplx> motion_residues;
  std::vector<cplx> corrector_residues;
};

inline ModuliIndependence moduli_independence(const KNBasis& B, int samples = 512) {
  const auto& c = B.curve();
  if (c.genus() != 1) fail(ErrorKind::precondition, "moduli independence is a genus-1 statement");
  ModuliIndependence r;
  const Section e0 = moduli_field(B);
  r.e0_residue = quadrature_out_residue(e0.fn(), c, samples);
  const Monomial m = detail::single(e0);
  r.e0_residue_closed = m.jet(c, c.out_point(), 1)->taylor[0];
  for (int k = 0; k < c.size(); ++k) {
    r.motion_residues.push_back(quadrature_out_residue(motion_field(B, k).fn(), c, samples));
    r.corrector_residues.push_back(quadrature_out_residue(corrector_field(B, k).fn(), c, samples));
  }
  return r;
}

}  // namespace knz
