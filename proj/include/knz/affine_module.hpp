#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "knz/algebra.hpp"
#include "knz/basis.hpp"
#include "knz/coefficients.hpp"
#include "knz/error.hpp"
#include "knz/lie_algebra.hpp"

namespace knz {

/// u_a (x) A_{degree,point}.
struct Mode {
  int degree = 0;
  int point = 0;
  int a = 0;
  auto operator<=>(const Mode&) const = default;
};

inline std::string to_string(const Mode& m) {
  return "u" + std::to_string(m.a) + "(" + std::to_string(m.degree) + "," + std::to_string(m.point + 1) + ")";
}

/// Structure of the current algebra g (x) A with its central extension,
/// computed lazily from the basis:
/// [x (x) f, y (x) g] = [x,y] (x) fg - (x|y) gamma(f,g) t.
class CurrentAlgebra {
 public:
  CurrentAlgebra(const KNBasis& basis, const SimpleLieAlgebraData& g, int samples = 512, double zero_tol = 1e-10)
      : basis_(&basis), g_(&g), samples_(samples), zero_tol_(zero_tol) {}

  using Terms = std::vector<std::pair<BasisIndex, cplx>>;

  /// Nonzero coefficients of A_x A_y in the function basis.
  const Terms& product(BasisIndex x, BasisIndex y) {
    const auto key = std::make_pair(x, y);
    if (auto it = products_.find(key); it != products_.end()) return it->second;
    const auto& c = basis_->curve();
    const Section f = basis_->function(x.degree, x.point).section * basis_->function(y.degree, y.point).section;
    const int lo = x.degree + y.degree - 1;
    int hi = x.degree + y.degree + 3;
    std::map<BasisIndex, cplx> coeffs;
    auto coefficient = [&](int h, int s) {
      const Section prod = f * basis_->omega(h, s).section;
      if (closed_form_available(prod)) return closed_residue_sum(prod);
      return quadrature_residue_sum(prod.fn(), c, samples_);
    };
    for (int h = lo; h <= hi; ++h)
      for (int s = 0; s < c.size(); ++s) coeffs[{h, s}] = coefficient(h, s);
    for (int grow = 0; grow < 8; ++grow) {
      double top = 0.0, scale = 1.0;
      for (const auto& [k, v] : coeffs) scale = std::max(scale, std::abs(v));
      for (int s = 0; s < c.size(); ++s) top = std::max(top, std::abs(coeffs[{hi, s}]));
      if (top <= zero_tol_ * scale) break;
      for (int h = hi + 1; h <= hi + 2; ++h)
        for (int s = 0; s < c.size(); ++s) coeffs[{h, s}] = coefficient(h, s);
      hi += 2;
    }
    double scale = 1.0;
    for (const auto& [k, v] : coeffs) scale = std::max(scale, std::abs(v));
    Terms out;
    for (const auto& [k, v] : coeffs)
      if (std::abs(v) > zero_tol_ * scale) out.emplace_back(k, v);
    return products_.emplace(key, std::move(out)).first->second;
  }

  /// gamma(A_x, A_y) = sum over in-points of res A_x dA_y.
  cplx gamma(BasisIndex x, BasisIndex y) {
    const auto key = std::make_pair(x, y);
    if (auto it = gammas_.find(key); it != gammas_.end()) return it->second;
    const Section f = basis_->function(x.degree, x.point).section;
    const Section g = basis_->function(y.degree, y.point).section;
    cplx v;
    if (basis_->curve().genus() == 0) v = closed_residue_sum(f * derivative_section(g));
    else v = cocycle_gamma(f, g, samples_);
    if (std::abs(v) <= zero_tol_) v = 0.0;
    return gammas_.emplace(key, v).first->second;
  }

  struct Bracket {
    std::vector<std::pair<Mode, cplx>> terms;
    cplx central{};
  };

  Bracket bracket(const Mode& x, const Mode& y) {
    Bracket b;
    const BasisIndex ix{x.degree, x.point}, iy{y.degree, y.point};
    const Mat& ad = g_->structure[static_cast<std::size_t>(x.a)];
    bool any = false;
    for (int c = 0; c < g_->dim; ++c) any = any || ad(c, y.a) != cplx{};
    if (any) {
      for (const auto& [h, v] : product(ix, iy))
        for (int c = 0; c < g_->dim; ++c)
          if (ad(c, y.a) != cplx{}) b.terms.push_back({Mode{h.degree, h.point, c}, ad(c, y.a) * v});
    }
    const cplx form = g_->form(x.a, y.a);
    if (form != cplx{}) b.central = -form * gamma(ix, iy);
    return b;
  }

  const KNBasis& basis() const { return *basis_; }
  const SimpleLieAlgebraData& algebra() const { return *g_; }
  int samples() const { return samples_; }

 private:
  const KNBasis* basis_;
  const SimpleLieAlgebraData* g_;
  int samples_;
  double zero_tol_;
  std::map<std::pair<BasisIndex, BasisIndex>, Terms> products_;
  std::map<std::pair<BasisIndex, BasisIndex>, cplx> gammas_;
};

/// Generalized Verma module induced from the tensor space V (degree-0 part
/// acting by the twisted site representations, positive degrees by zero, the
/// center by the level), truncated to PBW monomials of total depth <= D.
/// States are monomial (x) V-basis vector, index = monomial * dim V + v.
class TruncatedAdmissibleModule {
 public:
  TruncatedAdmissibleModule(const KNBasis& basis, WeightedTensorSpace V, int depth, int samples = 512)
      : basis_(&basis), V_(std::move(V)), depth_(depth), currents_(basis, V_.algebra(), samples) {
    if (depth < 0) fail(ErrorKind::config, "module depth must be nonnegative");
    if (V_.sites() != basis.size()) fail(ErrorKind::config, "one highest weight per in-point is required");
    enumerate();
  }

  TruncatedAdmissibleModule(const TruncatedAdmissibleModule&) = delete;
  TruncatedAdmissibleModule& operator=(const TruncatedAdmissibleModule&) = delete;

  const KNBasis& basis() const { return *basis_; }
  const WeightedTensorSpace& space() const { return V_; }
  const SimpleLieAlgebraData& algebra() const { return V_.algebra(); }
  CurrentAlgebra& currents() { return currents_; }
  cplx level() const { return V_.level(); }
  int depth() const { return depth_; }
  int monomial_count() const { return static_cast<int>(monos_.size()); }
  int dim() const { return monomial_count() * V_.dim(); }
  const std::vector<Mode>& monomial(int i) const { return monos_[static_cast<std::size_t>(i)]; }
  int monomial_depth(int i) const { return mono_depth_[static_cast<std::size_t>(i)]; }
  int state_depth(int state) const { return monomial_depth(state / V_.dim()); }

  /// Number of states of depth <= d (they come first in the ordering).
  int window_dim(int d) const {
    int n = 0;
    for (int i = 0; i < monomial_count(); ++i)
      if (monomial_depth(i) <= d) ++n;
    return n * V_.dim();
  }

  /// Index of an ordered monomial, or -1.
  int find_monomial(const std::vector<Mode>& m) const {
    auto it = index_.find(m);
    return it == index_.end() ? -1 : it->second;
  }

  /// The state m (x) v as a vector.
  Vec state(int mono, int v) const {
    Vec w = Vec::Zero(dim());
    w(mono * V_.dim() + v) = 1.0;
    return w;
  }

  Vec highest_weight_vector() const { return state(0, 0); }

  /// Largest depth on which w has a nonzero component, -1 for the zero vector.
  int support_depth(const Vec& w) const {
    int d = -1;
    for (int i = 0; i < dim(); ++i)
      if (w(i) != cplx{}) d = std::max(d, state_depth(i));
    return d;
  }

  Vec apply(const Mode& g, const Vec& w) {
    const int dv = V_.dim();
    Vec out = Vec::Zero(dim());
    for (int i = 0; i < monomial_count(); ++i) {
      const auto blk = w.segment(i * dv, dv);
      if (blk.isZero(0.0)) continue;
      for (const auto& [j, K] : apply_monomial(g, i)) out.segment(j * dv, dv) += K * blk;
    }
    return out;
  }

  /// Full matrix of a mode on the truncation.
  Mat mode_matrix(const Mode& g) {
    const int dv = V_.dim();
    Mat M = Mat::Zero(dim(), dim());
    for (int i = 0; i < monomial_count(); ++i)
      for (const auto& [j, K] : apply_monomial(g, i)) M.block(j * dv, i * dv, dv, dv) += K;
    return M;
  }

  /// Block action of g on (monomial i) (x) V: pairs (monomial j, V -> V matrix).
  const std::vector<std::pair<int, Mat>>& apply_monomial(const Mode& g, int i) {
    const auto key = std::make_pair(g, i);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto r = compute(g, i);
    return memo_.emplace(key, std::move(r)).first->second;
  }

 private:
  void enumerate() {
    const int N = basis_->size();
    const int dg = V_.algebra().dim;
    std::vector<Mode> gens;
    for (int n = -depth_; n <= -1; ++n)
      for (int p = 0; p < N; ++p)
        for (int a = 0; a < dg; ++a) gens.push_back({n, p, a});
    std::sort(gens.begin(), gens.end());
    std::vector<std::vector<Mode>> all;
    std::vector<Mode> cur;
    // multisets in non-decreasing key order
    auto rec = [&](auto&& self, std::size_t start, int left) -> void {
      all.push_back(cur);
      for (std::size_t k = start; k < gens.size(); ++k) {
        const int d = -gens[k].degree;
        if (d > left) continue;
        cur.push_back(gens[k]);
        self(self, k, left - d);
        cur.pop_back();
      }
    };
    rec(rec, 0, depth_);
    auto depth_of = [](const std::vector<Mode>& m) {
      int d = 0;
      for (const auto& x : m) d -= x.degree;
      return d;
    };
    std::stable_sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
      const int da = depth_of(a), db = depth_of(b);
      if (da != db) return da < db;
      return a < b;
    });
    for (auto& m : all) {
      index_.emplace(m, static_cast<int>(monos_.size()));
      mono_depth_.push_back(depth_of(m));
      monos_.push_back(std::move(m));
    }
  }

  int require(const std::vector<Mode>& m) const {
    const int i = find_monomial(m);
    if (i < 0) {
      int d = 0;
      for (const auto& x : m) d -= x.degree;
      fail(ErrorKind::truncation,
           "truncation breach: a state of depth " + std::to_string(d) + " exceeds the module depth " + std::to_string(depth_));
    }
    return i;
  }

  using Blocks = std::vector<std::pair<int, Mat>>;

  static void accumulate(std::map<int, Mat>& acc, int j, const Mat& K) {
    auto it = acc.find(j);
    if (it == acc.end()) acc.emplace(j, K);
    else it->second += K;
  }

  Blocks compute(const Mode& g, int i) {
    const int dv = V_.dim();
    const Mat I = Mat::Identity(dv, dv);
    const auto& M = monos_[static_cast<std::size_t>(i)];
    if (M.empty()) {
      if (g.degree > 0) return {};
      if (g.degree == 0) return {{0, V_.action(g.a, g.point)}};
      return {{require({g}), I}};
    }
    const Mode X = M.front();
    if (g.degree < 0 && g <= X) {
      std::vector<Mode> m{g};
      m.insert(m.end(), M.begin(), M.end());
      return {{require(m), I}};
    }
    const int rest = find_monomial(std::vector<Mode>(M.begin() + 1, M.end()));
    std::map<int, Mat> acc;
    // g X rest = X (g rest) + [g, X] rest
    const Blocks inner = apply_monomial(g, rest);
    for (const auto& [j, K] : inner)
      for (const auto& [k, K2] : apply_monomial(X, j)) accumulate(acc, k, K2 * K);
    const auto br = currents_.bracket(g, X);
    for (const auto& [mode, c] : br.terms) {
      const Blocks b = apply_monomial(mode, rest);
      for (const auto& [j, K] : b) accumulate(acc, j, c * K);
    }
    if (br.central != cplx{}) accumulate(acc, rest, br.central * V_.level() * I);
    Blocks out;
    for (auto& [j, K] : acc)
      if (!K.isZero(0.0)) out.emplace_back(j, std::move(K));
    return out;
  }

  const KNBasis* basis_;
  WeightedTensorSpace V_;
  int depth_;
  CurrentAlgebra currents_;
  std::vector<std::vector<Mode>> monos_;
  std::vector<int> mono_depth_;
  std::map<std::vector<Mode>, int> index_;
  std::map<std::pair<Mode, int>, Blocks> memo_;
};

inline std::unique_ptr<TruncatedAdmissibleModule> build_truncated_module(const KNBasis& basis, WeightedTensorSpace V, int depth,
                                                                         int samples = 512) {
  return std::make_unique<TruncatedAdmissibleModule>(basis, std::move(V), depth, samples);
}

/// Range of n + m for which l^{(n,p)(m,s)}[e] can be nonzero.
inline std::pair<int, int> sugawara_band(const Section& e) {
  const auto o = order_profile(e);
  const int N = e.curve().size();
  const int lo = o.in_min - 1;
  const int hi = static_cast<int>(std::floor(static_cast<double>(1 - o.out) / N));
  return {lo, hi};
}

/// Cache of l^{(n,p)(m,s)}[e] for one vector field.
class LCache {
 public:
  LCache(const KNBasis& basis, Section e) : basis_(&basis), e_(std::move(e)) {}
  cplx operator()(int n, int p, int m, int s) {
    const auto key = std::make_tuple(std::min(std::make_pair(n, p), std::make_pair(m, s)),
                                     std::max(std::make_pair(n, p), std::make_pair(m, s)));
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    return cache_.emplace(key, l_coefficient(*basis_, n, p, m, s, e_)).first->second;
  }

 private:
  const KNBasis* basis_;
  Section e_;
  std::map<std::tuple<std::pair<int, int>, std::pair<int, int>>, cplx> cache_;
};

/// T[e] w = -1/(2(c + kappa)) sum l^{(n,p)(m,s)}[e] sum_ab G^{ab} :u_a(n,p) u_b(m,s): w,
/// with :x(n) y(m): = x(n) y(m) for n <= m and y(m) x(n) otherwise. Terms
/// whose right factor has degree above the depth of w vanish and are skipped.
inline Vec sugawara_apply(TruncatedAdmissibleModule& M, LCache& l, std::pair<int, int> band, const Vec& w) {
  const auto& g = M.algebra();
  require_noncritical(M.level(), g.kappa);
  const int N = M.basis().size();
  const int dw = M.support_depth(w);
  Vec out = Vec::Zero(M.dim());
  if (dw < 0) return out;
  for (int s = band.first; s <= band.second; ++s)
    for (int n = s - dw; n <= dw; ++n) {
      const int m = s - n;
      if (std::max(n, m) > dw) continue;
      for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) {
          const cplx lc = l(n, p, m, q);
          if (std::abs(lc) < 1e-13) continue;
          for (int a = 0; a < g.dim; ++a)
            for (int b = 0; b < g.dim; ++b) {
              const cplx G = g.form_inv(a, b);
              if (G == cplx{}) continue;
              const Mode x{n, p, a}, y{m, q, b};
              const Vec r = n <= m ? M.apply(x, M.apply(y, w)) : M.apply(y, M.apply(x, w));
              out += (lc * G) * r;
            }
        }
    }
  return out * (-1.0 / (2.0 * (M.level() + g.kappa)));
}

inline Vec sugawara_apply(TruncatedAdmissibleModule& M, const Section& e, const Vec& w) {
  LCache l(M.basis(), e);
  return sugawara_apply(M, l, sugawara_band(e), w);
}

/// Matrix of T[e] from the states of depth <= window into the whole truncation.
inline Mat sugawara_action(TruncatedAdmissibleModule& M, const Section& e, int window) {
  require_noncritical(M.level(), M.algebra().kappa);
  LCache l(M.basis(), e);
  const auto band = sugawara_band(e);
  const int cols = M.window_dim(window);
  Mat T = Mat::Zero(M.dim(), cols);
  for (int j = 0; j < cols; ++j) {
    Vec w = Vec::Zero(M.dim());
    w(j) = 1.0;
    T.col(j) = sugawara_apply(M, l, band, w);
  }
  return T;
}

/// Diagonal change of basis between the modules of a curve and of its rescaled
/// copy: state' = prod alpha_p^{n} state for the modes u(n,p) of the monomial.
inline Vec rescaling_diagonal(const TruncatedAdmissibleModule& M, const std::vector<cplx>& alpha) {
  Vec d(M.dim());
  const int dv = M.space().dim();
  for (int i = 0; i < M.monomial_count(); ++i) {
    cplx f = 1.0;
    for (const auto& x : M.monomial(i)) f *= std::pow(alpha[static_cast<std::size_t>(x.point)], x.degree);
    d.segment(i * dv, dv).setConstant(f);
  }
  return d;
}

}  // namespace knz
