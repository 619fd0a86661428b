#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "knz/error.hpp"
#include "knz/laurent.hpp"

namespace knz {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Finite-dimensional Lie algebra with an invariant form.
///
/// Elements are coordinate vectors in the basis u_0..u_{d-1}. The dual basis
/// u^a = sum_b ginv(a,b) u_b satisfies (u_a | u^b) = delta_a^b.
struct SimpleLieAlgebraData {
  std::string name;
  int dim = 0;
  std::vector<Mat> structure;  // structure[a](c, b) = coefficient of u_c in [u_a, u_b]
  Mat form;                    // (u_a | u_b)
  Mat form_inv;
  std::vector<Mat> defining;   // defining representation, used for twists
  double kappa = 0.0;

  Mat ad(int a) const { return structure[static_cast<std::size_t>(a)]; }

  /// Casimir sum_a ad(u_a) ad(u^a) on the adjoint representation.
  Mat adjoint_casimir() const {
    Mat c = Mat::Zero(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        if (form_inv(a, b) != cplx{}) c += ad(a) * ad(b) * form_inv(a, b);
    return c;
  }

  /// [x, y] in coordinates.
  Vec bracket(const Vec& x, const Vec& y) const {
    Vec r = Vec::Zero(dim);
    for (int a = 0; a < dim; ++a)
      if (x(a) != cplx{}) r += x(a) * (ad(a) * y);
    return r;
  }

  cplx pairing(const Vec& x, const Vec& y) const { return x.transpose() * form * y; }
};

namespace detail {

inline void finish_algebra(SimpleLieAlgebraData& g) {
  g.form_inv = g.form.inverse();
  const Mat c = g.adjoint_casimir();
  g.kappa = g.dim > 0 ? 0.5 * c(0, 0).real() : 0.0;
  if (!c.isApprox(c(0, 0) * Mat::Identity(g.dim, g.dim), 1e-12) && c.norm() > 1e-12)
    fail(ErrorKind::internal, "adjoint Casimir is not scalar");
}

}  // namespace detail

/// sl_2 with basis (e, f, h) and form scale * trace in the defining representation.
inline SimpleLieAlgebraData make_sl2(double form_scale = 1.0) {
  SimpleLieAlgebraData g;
  g.name = "sl2";
  g.dim = 3;
  Mat e(2, 2), f(2, 2), h(2, 2);
  e << 0, 1, 0, 0;
  f << 0, 0, 1, 0;
  h << 1, 0, 0, -1;
  g.defining = {e, f, h};
  // [e,f] = h, [h,e] = 2e, [h,f] = -2f
  g.structure.assign(3, Mat::Zero(3, 3));
  g.structure[0](2, 1) = 1.0;   // [e,f] = h
  g.structure[0](0, 2) = -2.0;  // [e,h] = -2e
  g.structure[1](2, 0) = -1.0;  // [f,e] = -h
  g.structure[1](1, 2) = 2.0;   // [f,h] = 2f
  g.structure[2](0, 0) = 2.0;   // [h,e] = 2e
  g.structure[2](1, 1) = -2.0;  // [h,f] = -2f
  g.form = Mat::Zero(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) g.form(a, b) = form_scale * (g.defining[static_cast<std::size_t>(a)] * g.defining[static_cast<std::size_t>(b)]).trace();
  detail::finish_algebra(g);
  return g;
}

/// Abelian algebra C^d with form scale * identity (kappa = 0).
inline SimpleLieAlgebraData make_abelian(int d = 1, double form_scale = 1.0) {
  SimpleLieAlgebraData g;
  g.name = "abelian";
  g.dim = d;
  g.structure.assign(static_cast<std::size_t>(d), Mat::Zero(d, d));
  g.form = form_scale * Mat::Identity(d, d);
  g.form_inv = g.form.inverse();
  g.kappa = 0.0;
  return g;
}

/// Representation matrices rho(u_a) of the irreducible module with highest
/// weight `weight`: for sl_2 the (weight+1)-dimensional module in the basis
/// v_k = f^k v_0; for the abelian algebra the one-dimensional module where u_a
/// acts by weight (every a).
inline std::vector<Mat> irrep(const SimpleLieAlgebraData& g, int weight) {
  if (g.name == "abelian") {
    std::vector<Mat> r;
    for (int a = 0; a < g.dim; ++a) r.push_back(Mat::Constant(1, 1, static_cast<double>(weight)));
    return r;
  }
  if (weight < 0) fail(ErrorKind::config, "sl2 highest weight must be a nonnegative integer");
  const int n = weight + 1;
  Mat e = Mat::Zero(n, n), f = Mat::Zero(n, n), h = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    h(k, k) = static_cast<double>(weight - 2 * k);
    if (k + 1 < n) {
      f(k + 1, k) = 1.0;
      e(k, k + 1) = static_cast<double>((k + 1) * (weight - k));
    }
  }
  return {e, f, h};
}

/// Matrix of Ad(gamma) on g in the basis u_a, from the defining representation.
inline Mat adjoint_of_group_element(const SimpleLieAlgebraData& g, const Mat& gamma) {
  if (g.defining.empty()) {
    if (!gamma.isApprox(Mat::Identity(gamma.rows(), gamma.cols()))) fail(ErrorKind::config, "twists need a defining representation");
    return Mat::Identity(g.dim, g.dim);
  }
  if (std::abs(gamma.determinant()) < 1e-12) fail(ErrorKind::config, "twist matrix must be invertible");
  const Mat gi = gamma.inverse();
  Mat A(g.dim, g.dim);
  for (int a = 0; a < g.dim; ++a) {
    const Mat x = gamma * g.defining[static_cast<std::size_t>(a)] * gi;
    // coordinates by the trace pairing against the defining matrices
    Vec rhs(g.dim);
    for (int b = 0; b < g.dim; ++b) rhs(b) = (x * g.defining[static_cast<std::size_t>(b)]).trace();
    Mat T(g.dim, g.dim);
    for (int b = 0; b < g.dim; ++b)
      for (int c = 0; c < g.dim; ++c) T(b, c) = (g.defining[static_cast<std::size_t>(c)] * g.defining[static_cast<std::size_t>(b)]).trace();
    A.col(a) = T.fullPivLu().solve(rhs);
  }
  return A;
}

/// Tensor product of highest-weight modules, one per in-point, with per-site
/// twists and a level.
class WeightedTensorSpace {
 public:
  WeightedTensorSpace(SimpleLieAlgebraData g, std::vector<int> weights, std::vector<Mat> twists = {}, cplx level = 1.0)
      : g_(std::move(g)), weights_(std::move(weights)), level_(level) {
    if (weights_.empty()) fail(ErrorKind::config, "at least one site is required");
    if (twists.empty())
      for (std::size_t i = 0; i < weights_.size(); ++i) twists.push_back(Mat::Identity(g_.defining.empty() ? 1 : 2, g_.defining.empty() ? 1 : 2));
    if (twists.size() != weights_.size()) fail(ErrorKind::config, "one twist per site is required");
    twists_ = twists;
    dim_ = 1;
    for (int w : weights_) {
      auto r = irrep(g_, w);
      site_dims_.push_back(static_cast<int>(r[0].rows()));
      dim_ *= static_cast<int>(r[0].rows());
      reps_.push_back(std::move(r));
    }
    for (const auto& t : twists_) ads_.push_back(adjoint_of_group_element(g_, t));
  }

  const SimpleLieAlgebraData& algebra() const { return g_; }
  int sites() const { return static_cast<int>(weights_.size()); }
  int dim() const { return dim_; }
  int site_dim(int p) const { return site_dims_[static_cast<std::size_t>(p)]; }
  const std::vector<int>& weights() const { return weights_; }
  const std::vector<Mat>& twists() const { return twists_; }
  cplx level() const { return level_; }

  /// Action of u_a at site p on the single-site module, twisted by Ad(gamma_p).
  Mat site_matrix(int a, int p) const {
    const auto& r = reps_[static_cast<std::size_t>(p)];
    const Mat& A = ads_[static_cast<std::size_t>(p)];
    Mat m = Mat::Zero(r[0].rows(), r[0].cols());
    for (int b = 0; b < g_.dim; ++b)
      if (A(b, a) != cplx{}) m += A(b, a) * r[static_cast<std::size_t>(b)];
    return m;
  }

  /// Same, embedded in the full tensor product.
  Mat embed(const Mat& local, int p) const {
    Mat out = Mat::Identity(1, 1);
    for (int q = 0; q < sites(); ++q) {
      const Mat f = q == p ? local : Mat::Identity(site_dim(q), site_dim(q));
      Mat k(out.rows() * f.rows(), out.cols() * f.cols());
      for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) k.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
      out = k;
    }
    return out;
  }

  Mat action(int a, int p) const { return embed(site_matrix(a, p), p); }

  /// Action of a general element x = sum_a x_a u_a at site p.
  Mat action(const Vec& x, int p) const {
    Mat m = Mat::Zero(dim_, dim_);
    for (int a = 0; a < g_.dim; ++a)
      if (x(a) != cplx{}) m += x(a) * action(a, p);
    return m;
  }

 private:
  SimpleLieAlgebraData g_;
  std::vector<int> weights_;
  std::vector<Mat> twists_;
  cplx level_;
  int dim_ = 1;
  std::vector<int> site_dims_;
  std::vector<std::vector<Mat>> reps_;
  std::vector<Mat> ads_;
};

inline void require_noncritical(cplx level, double kappa) {
  if (std::abs(level + kappa) < 1e-12) fail(ErrorKind::precondition, "critical level: level + kappa = 0");
}

/// Omega_ij = sum_a t_a(i) t^a(j).
inline Mat casimir_two_site(const WeightedTensorSpace& V, int i, int j) {
  if (i == j) fail(ErrorKind::precondition, "casimir_two_site needs distinct sites");
  const auto& g = V.algebra();
  Mat out = Mat::Zero(V.dim(), V.dim());
  for (int a = 0; a < g.dim; ++a) {
    const Mat ta = V.action(a, i);
    for (int b = 0; b < g.dim; ++b)
      if (g.form_inv(a, b) != cplx{}) out += g.form_inv(a, b) * ta * V.action(b, j);
  }
  return out;
}

}  // namespace knz
