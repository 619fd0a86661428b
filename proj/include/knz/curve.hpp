#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "knz/elliptic.hpp"
#include "knz/error.hpp"
#include "knz/quadrature.hpp"

namespace knz {

/// A compact curve of genus 0 or 1 with ordered in-points z_1..z_N and one
/// out-point. In genus 0 the out-point is infinity. In genus 1 the curve is
/// C / <1, tau> and the out-point is a lift z_0.
///
/// Point indices are zero-based in the API: in-point p refers to z_{p+1}.
/// Each in-point may carry a coordinate scale alpha_p; the local coordinate at
/// that point is alpha_p (z - z_p).
class MarkedCurve {
 public:
  static MarkedCurve rational(std::vector<cplx> points, std::vector<cplx> scales = {}) {
    MarkedCurve c;
    c.genus_ = 0;
    c.points_ = std::move(points);
    c.scales_ = std::move(scales);
    c.finish();
    return c;
  }

  static MarkedCurve elliptic(cplx tau, cplx out_point, std::vector<cplx> points, std::vector<cplx> scales = {}) {
    MarkedCurve c;
    c.genus_ = 1;
    c.lattice_.emplace(tau);
    c.out_ = c.lattice_->normalize(out_point);
    c.points_ = std::move(points);
    for (auto& z : c.points_) z = c.lattice_->normalize(z);
    c.scales_ = std::move(scales);
    c.finish();
    return c;
  }

  int genus() const { return genus_; }
  int size() const { return static_cast<int>(points_.size()); }
  cplx point(int p) const { return points_.at(static_cast<std::size_t>(p)); }
  const std::vector<cplx>& points() const { return points_; }
  /// z_0 in genus 1; unused in genus 0.
  cplx out_point() const { return out_; }
  const Lattice& lattice() const {
    if (!lattice_) fail(ErrorKind::internal, "genus-0 curve has no lattice");
    return *lattice_;
  }
  cplx scale(int p) const { return scales_.at(static_cast<std::size_t>(p)); }
  const std::vector<cplx>& scales() const { return scales_; }
  bool scaled() const {
    return std::any_of(scales_.begin(), scales_.end(), [](cplx a) { return a != cplx{1.0, 0.0}; });
  }

  MarkedCurve with_scales(std::vector<cplx> scales) const {
    MarkedCurve c = *this;
    c.scales_ = std::move(scales);
    c.finish();
    return c;
  }

  /// |a - b| in genus 0, distance modulo the lattice in genus 1.
  double distance(cplx a, cplx b) const {
    if (genus_ == 0) return std::abs(a - b);
    return lattice_->distance_to_lattice(a - b);
  }

  bool congruent(cplx a, cplx b, double tol = 1e-10) const { return distance(a, b) <= tol; }

  /// Finite points where basis elements may have poles.
  std::vector<cplx> singular_points() const {
    auto s = points_;
    if (genus_ == 1) s.push_back(out_);
    return s;
  }

  /// Smallest distance from c to a singular point not congruent to c,
  /// including the nontrivial lattice translates of c itself in genus 1.
  double separation(cplx c) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : singular_points()) {
      const double d = distance(c, s);
      if (d > 1e-10) best = std::min(best, d);
    }
    if (genus_ == 1) {
      const cplx tau = lattice_->tau();
      for (int m = -1; m <= 1; ++m)
        for (int n = -1; n <= 1; ++n)
          if (m != 0 || n != 0) best = std::min(best, std::abs(static_cast<double>(m) + static_cast<double>(n) * tau));
    }
    return best;
  }

  double min_gap() const {
    double best = std::numeric_limits<double>::infinity();
    const auto s = singular_points();
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) best = std::min(best, distance(s[i], s[j]));
    if (!std::isfinite(best)) best = 1.0;
    return best;
  }

  /// Circle around c with radius half the separation, capped at 1.
  ContourSpec contour_at(cplx c, int samples = 512) const {
    ContourSpec s;
    s.center = c;
    s.radius = std::min(1.0, separation(c) / 2.0);
    s.sample_count = samples;
    return s;
  }

  /// Large circle enclosing every in-point (genus 0 only).
  ContourSpec outer_contour(int samples = 512) const {
    cplx mid{};
    for (const auto& z : points_) mid += z;
    mid /= static_cast<double>(points_.size());
    double rad = 0.0;
    for (const auto& z : points_) rad = std::max(rad, std::abs(z - mid));
    ContourSpec s;
    s.center = mid;
    s.radius = 2.0 * rad + 1.0;
    s.sample_count = samples;
    return s;
  }

 private:
  MarkedCurve() = default;

  void finish() {
    if (points_.empty()) fail(ErrorKind::config, "at least one in-point is required");
    for (const auto& z : points_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(ErrorKind::config, "marked points must be finite");
    const auto s = singular_points();
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (distance(s[i], s[j]) < 1e-9) fail(ErrorKind::config, "marked points must be distinct");
    if (scales_.empty()) scales_.assign(points_.size(), cplx{1.0, 0.0});
    if (scales_.size() != points_.size()) fail(ErrorKind::config, "one coordinate scale per in-point is required");
    for (const auto& a : scales_)
      if (a == cplx{}) fail(ErrorKind::config, "coordinate scales must be nonzero");
  }

  int genus_ = 0;
  std::vector<cplx> points_;
  cplx out_{};
  std::optional<Lattice> lattice_;
  std::vector<cplx> scales_;
};

}  // namespace knz
