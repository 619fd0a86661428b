#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "knz/algebra.hpp"
#include "knz/basis.hpp"
#include "knz/config.hpp"
#include "knz/sugawara_kz.hpp"
#include "knz/verify.hpp"

namespace knz {

/// Keys keep insertion order so that outputs are byte-stable.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json to_json(cplx z) {
  // +0.0 for -0.0 keeps the text independent of the sign of zero
  return Json::array({z.real() + 0.0, z.imag() + 0.0});
}

inline Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string format_complex(cplx z) {
  char buf[96];
  if (z.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.10g", z.real());
  else if (z.real() == 0.0) std::snprintf(buf, sizeof buf, "%.10gi", z.imag());
  else std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
  return buf;
}

/// Readable closed form of a section, e.g. "c * (z-1)^-2 * z^3 dz^1".
inline std::string describe(const Section& s) {
  const bool g1 = s.curve().genus() == 1;
  std::string out;
  for (std::size_t t = 0; t < s.terms().size(); ++t) {
    const auto& m = s.terms()[t];
    std::string term;
    if (m.log_coeff() != cplx{}) term = "(" + format_complex(m.coeff()) + ")";
    for (const auto& f : m.factors()) {
      if (f.exponent == 0) continue;
      std::string base;
      if (g1) base = f.shift == cplx{} ? "sigma(z)" : "sigma(z-(" + format_complex(f.shift) + "))";
      else base = f.shift == cplx{} ? "z" : "(z-(" + format_complex(f.shift) + "))";
      if (!term.empty()) term += " * ";
      term += base + "^" + std::to_string(f.exponent);
    }
    if (term.empty()) term = "1";
    out += (t == 0 ? "" : " + ") + term;
  }
  if (out.empty()) out = "0";
  if (s.weight() != 0) out += " dz^" + std::to_string(s.weight());
  return out;
}

inline Json curve_json(const MarkedCurve& c) {
  Json j;
  j["genus"] = c.genus();
  if (c.genus() == 1) {
    j["tau"] = to_json(c.lattice().tau());
    j["out_point"] = to_json(c.out_point());
  }
  Json pts = Json::array(), sc = Json::array();
  for (const auto& z : c.points()) pts.push_back(to_json(z));
  for (const auto& a : c.scales()) sc.push_back(to_json(a));
  j["in_points"] = pts;
  j["scales"] = sc;
  return j;
}

inline Json header(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["curve"] = curve_json(cfg.curve());
  j["samples"] = cfg.samples;
  return j;
}

/// A value with its provenance: both routes, one route, and their gap.
inline Json valued(std::optional<cplx> closed, std::optional<cplx> quadrature) {
  Json j;
  if (closed && quadrature) {
    j["value"] = to_json(*closed);
    j["provenance"] = "both";
    j["quadrature"] = to_json(*quadrature);
    j["residual"] = std::abs(*closed - *quadrature) / std::max(1.0, std::abs(*closed));
  } else if (closed) {
    j["value"] = to_json(*closed);
    j["provenance"] = "closed_form";
  } else {
    j["value"] = to_json(quadrature.value_or(cplx{}));
    j["provenance"] = "quadrature";
  }
  return j;
}

/// Order at the out-point: at infinity in genus 0, at z_0 in genus 1.
inline int out_order(const Section& s) {
  const auto& c = s.curve();
  if (c.genus() == 1) return s.nominal_order(c.out_point());
  int best = 1 << 20;
  for (const auto& t : s.terms()) {
    int deg = 0;
    for (const auto& f : t.factors()) deg += f.exponent;
    best = std::min(best, -deg - 2 * s.weight());
  }
  return best;
}

// ---------------------------------------------------------------------------
// command payloads; each returns the JSON document and fills CSV rows

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::ostringstream o;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        const bool quote = r[i].find_first_of(",\"") != std::string::npos;
        std::string cell = r[i];
        if (quote) {
          std::string q = "\"";
          for (char ch : cell) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          cell = q + "\"";
        }
        o << (i ? "," : "") << cell;
      }
      o << "\n";
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return o.str();
  }
};

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json basis_payload(const RunConfig& cfg, const KNBasis& B, CsvTable* csv = nullptr) {
  const auto& c = B.curve();
  Json j = header("basis", cfg);
  Json rows = Json::array();
  if (csv) csv->columns = {"lambda", "degree", "point", "kind", "form", "log_normalization_re", "log_normalization_im", "orders", "out_order",
                           "periodicity_residual"};
  const auto probes = detail::probe_points(c);
  for (int l : cfg.weights)
    for (int n = cfg.degree_min; n <= cfg.degree_max; ++n)
      for (int p = 0; p < c.size(); ++p) {
        const KNForm f = B.form(l, n, p);
        Json r;
        r["lambda"] = l;
        r["degree"] = n;
        r["point"] = p + 1;
        r["kind"] = to_string(f.kind);
        r["form"] = describe(f.section);
        r["log_normalization"] = to_json(f.log_normalization);
        const cplx nz = f.normalization();
        r["normalization"] = std::isfinite(nz.real()) && std::isfinite(nz.imag()) ? to_json(nz) : Json(nullptr);
        Json orders = Json::array();
        std::string ord_s;
        for (int q = 0; q < c.size(); ++q) {
          const int o = f.section.nominal_order(c.point(q));
          orders.push_back(o);
          ord_s += (q ? " " : "") + std::to_string(o);
        }
        r["orders"] = orders;
        r["out_order"] = out_order(f.section);
        double per = 0.0;
        if (c.genus() == 1) {
          if (f.extra_zero) r["b"] = to_json(*f.extra_zero);
          if (!f.correction.empty()) {
            Json corr = Json::array();
            for (const auto& [s, g] : f.correction) corr.push_back({{"point", s + 1}, {"gamma", to_json(g)}});
            r["correction"] = corr;
          }
          const cplx tau = c.lattice().tau();
          for (const auto& z : probes) {
            const cplx v = f(z);
            const double sc = std::max(1.0, std::abs(v));
            per = std::max({per, std::abs(f(z + 1.0) - v) / sc, std::abs(f(z + tau) - v) / sc});
          }
          r["periodicity_residual"] = per;
        }
        r["provenance"] = "closed_form";
        if (csv)
          csv->rows.push_back({std::to_string(l), std::to_string(n), std::to_string(p + 1), to_string(f.kind), describe(f.section),
                               num(f.log_normalization.real()), num(f.log_normalization.imag()), ord_s,
                               std::to_string(out_order(f.section)), num(per)});
        rows.push_back(std::move(r));
      }
  j["elements"] = rows;
  return j;
}

inline Json pairing_payload(const RunConfig& cfg, const KNBasis& B, CsvTable* csv = nullptr) {
  const auto& c = B.curve();
  Json j = header("pairing", cfg);
  Json rows = Json::array();
  if (csv) csv->columns = {"lambda", "n", "p", "m", "r", "closed_re", "closed_im", "quadrature_re", "quadrature_im", "expected", "residual"};
  BasisSampler S(B, cfg.samples);
  double worst = 0.0;
  for (int l : cfg.weights)
    for (int n = cfg.degree_min; n <= cfg.degree_max; ++n)
      for (int p = 0; p < c.size(); ++p)
        for (int m = cfg.degree_min; m <= cfg.degree_max; ++m)
          for (int r = 0; r < c.size(); ++r) {
            const Section f = B.form(l, n, p).section, g = B.form(1 - l, -m, r).section;
            const cplx cl = kn_pairing(f, g, Route::closed_form);
            const cplx q = S.sampler().pair(S.get(l, n, p), S.get(1 - l, -m, r), f.fn(), g.fn());
            const double want = (n == m && p == r) ? 1.0 : 0.0;
            worst = std::max({worst, std::abs(cl - want), std::abs(q - want)});
            Json e;
            e["lambda"] = l;
            e["n"] = n;
            e["p"] = p + 1;
            e["m"] = m;
            e["r"] = r + 1;
            e["pairing"] = valued(cl, q);
            e["expected"] = want;
            rows.push_back(std::move(e));
            if (csv)
              csv->rows.push_back({std::to_string(l), std::to_string(n), std::to_string(p + 1), std::to_string(m), std::to_string(r + 1),
                                   num(cl.real()), num(cl.imag()), num(q.real()), num(q.imag()), num(want), num(std::abs(cl - q))});
          }
  j["note"] = "entry (lambda, n, p, m, r) pairs f^lambda_{n,p} with f^{1-lambda}_{-m,r}";
  j["entries"] = rows;
  j["max_deviation"] = worst;
  return j;
}

inline Json structure_payload(const RunConfig& cfg, const KNBasis& B, CsvTable* csv = nullptr) {
  const auto& c = B.curve();
  Json j = header("structure", cfg);
  if (csv) csv->columns = {"algebra", "n", "p", "m", "r", "h", "s", "coeff_re", "coeff_im"};
  for (AlgebraTag tag : {AlgebraTag::function, AlgebraTag::vector_field}) {
    const auto T = structure_constants(B, tag, cfg.degree_min, cfg.degree_max, 1e-9, cfg.samples);
    Json t;
    t["band_observed"] = T.band_observed;
    t["below_observed"] = T.below_observed;
    const auto bound = band_bound(c.genus(), c.size(), tag);
    t["band_bound"] = bound ? Json(*bound) : Json(nullptr);
    t["max_expansion_residual"] = T.max_residual;
    Json rows = Json::array();
    for (const auto& [key, e] : T.entries) {
      Json r;
      r["n"] = key.first.degree;
      r["p"] = key.first.point + 1;
      r["m"] = key.second.degree;
      r["r"] = key.second.point + 1;
      Json terms = Json::array();
      for (const auto& term : e.terms) {
        if (std::abs(term.coeff) <= 1e-9) continue;
        terms.push_back({{"h", term.index.degree}, {"s", term.index.point + 1}, {"coeff", to_json(term.coeff)}});
        if (csv)
          csv->rows.push_back({to_string(tag), std::to_string(key.first.degree), std::to_string(key.first.point + 1),
                               std::to_string(key.second.degree), std::to_string(key.second.point + 1), std::to_string(term.index.degree),
                               std::to_string(term.index.point + 1), num(term.coeff.real()), num(term.coeff.imag())});
      }
      r["terms"] = terms;
      r["provenance"] = "quadrature";
      r["residual"] = e.residual;
      rows.push_back(std::move(r));
    }
    t["entries"] = rows;
    j[to_string(tag)] = t;
  }
  return j;
}

inline Json cocycle_payload(const RunConfig& cfg, const KNBasis& B, CsvTable* csv = nullptr) {
  const auto& c = B.curve();
  Json j = header("cocycle", cfg);
  j["projective_connection"] = "R = 0 in the global coordinate z";
  if (csv) csv->columns = {"cocycle", "n", "p", "m", "r", "value_re", "value_im"};
  Json g = Json::array(), x = Json::array();
  for (int n = cfg.degree_min; n <= cfg.degree_max; ++n)
    for (int p = 0; p < c.size(); ++p)
      for (int m = cfg.degree_min; m <= cfg.degree_max; ++m)
        for (int r = 0; r < c.size(); ++r) {
          const cplx gv = cocycle_gamma(B.function(n, p).section, B.function(m, r).section, cfg.samples);
          const cplx xv = cocycle_chi(B.vector_field(n, p).section, B.vector_field(m, r).section, cfg.samples);
          g.push_back({{"n", n}, {"p", p + 1}, {"m", m}, {"r", r + 1}, {"value", to_json(gv)}, {"provenance", "quadrature"}});
          x.push_back({{"n", n}, {"p", p + 1}, {"m", m}, {"r", r + 1}, {"value", to_json(xv)}, {"provenance", "quadrature"}});
          if (csv) {
            auto row = [&](const char* name, cplx v) {
              csv->rows.push_back({name, std::to_string(n), std::to_string(p + 1), std::to_string(m), std::to_string(r + 1), num(v.real()),
                                   num(v.imag())});
            };
            row("gamma", gv);
            row("chi", xv);
          }
        }
  j["gamma"] = g;
  j["chi"] = x;
  return j;
}

inline Json kz_payload(const RunConfig& cfg, const KNBasis& B, CsvTable* csv = nullptr) {
  const auto& c = B.curve();
  const auto V = cfg.tensor_space();
  const KZSystem S = c.genus() == 0 ? assemble_kz_g0(B, V, cfg.samples) : assemble_kz_g1(B, V, cfg.samples);
  Json j = header("kz", cfg);
  j["algebra"] = V.algebra().name;
  j["highest_weights"] = V.weights();
  j["level"] = to_json(S.level);
  j["kappa"] = S.kappa;
  j["prefactor"] = to_json(S.prefactor);
  Json eqs = Json::array();
  for (const auto& eq : S.equations) {
    Json e;
    e["direction"] = direction_label(eq.direction);
    Json terms = Json::array();
    for (const auto& t : eq.terms) {
      Json r;
      r["term"] = t.label();
      r["n"] = t.n;
      r["i"] = t.i + 1;
      r["m"] = t.m;
      r["j"] = t.j + 1;
      r["coeff"] = to_json(t.coeff);
      r["provenance"] = t.provenance;
      if (t.provenance == "both") r["residual"] = t.residual;
      r["reduced"] = to_string(t.reduced);
      terms.push_back(std::move(r));
    }
    e["terms"] = terms;
    eqs.push_back(std::move(e));
  }
  j["equation_count"] = S.equations.size();
  j["equations"] = eqs;
  // the coefficient table behind the case analysis
  const auto T = coefficient_table(B, -2, 0, true, cfg.samples);
  Json tab = Json::array();
  if (csv)
    csv->columns = {"direction", "n", "i", "m", "j", "value_re", "value_im", "provenance", "residual", "formal", "reduced"};
  for (const auto& e : T.entries) {
    Json r;
    r["direction"] = direction_label(e.k);
    r["n"] = e.n;
    r["i"] = e.i + 1;
    r["m"] = e.m;
    r["j"] = e.j + 1;
    r["l"] = valued(e.closed, e.quadrature);
    r["formal"] = to_string(e.formal);
    r["reduced"] = to_string(e.reduced);
    tab.push_back(std::move(r));
    if (csv)
      csv->rows.push_back({direction_label(e.k), std::to_string(e.n), std::to_string(e.i + 1), std::to_string(e.m), std::to_string(e.j + 1),
                           num(e.value.real()), num(e.value.imag()), e.provenance(), num(e.residual), to_string(e.formal),
                           to_string(e.reduced)});
  }
  j["coefficients"] = {{"adjusted", true},
                       {"degrees", {T.nmin, T.nmax}},
                       {"max_residual", T.max_residual},
                       {"max_eliminated", T.max_eliminated},
                       {"entries", tab}};
  if (c.genus() == 0) {
    Json r = Json::array(), rs = Json::array(), red = Json::array();
    for (std::size_t i = 0; i < S.r.size(); ++i) {
      Json row = Json::array(), row_s = Json::array();
      for (std::size_t k = 0; k < S.r[i].size(); ++k) {
        row.push_back(to_json(S.r[i][k]));
        row_s.push_back(to_json(S.r_sugawara[i][k]));
      }
      r.push_back(row);
      rs.push_back(row_s);
      red.push_back(to_json(S.reduced[i]));
    }
    Json omega = Json::array();
    for (int a = 0; a < c.size(); ++a)
      for (int b = a + 1; b < c.size(); ++b)
        omega.push_back({{"i", a + 1}, {"j", b + 1}, {"matrix", to_json(casimir_two_site(V, a, b))}});
    j["reduced"] = {{"form", "nabla_i = d_i - sum_{j != i} r_ij Omega_ij"},
                    {"r", r},
                    {"r_sugawara", rs},
                    {"omega", omega},
                    {"connection", red},
                    {"flatness_residual", S.flatness_residual},
                    {"antisymmetry_residual", S.antisymmetry_residual}};
  }
  j["max_residual"] = S.max_residual;
  j["notes"] = S.notes;
  return j;
}

inline Json verify_payload(const RunConfig& cfg, const VerifyReport& rep, CsvTable* csv = nullptr) {
  Json j = header("verify", cfg);
  j["seed"] = rep.options.seed;
  j["samples"] = rep.options.samples;
  j["tol_override"] = rep.options.tol ? Json(*rep.options.tol) : Json(nullptr);
  if (csv) csv->columns = {"criterion", "name", "label", "value", "bound", "kind", "pass", "detail"};
  Json checks = Json::array();
  for (const auto& r : rep.checks) {
    Json e;
    e["criterion"] = r.criterion;
    e["name"] = r.name;
    e["label"] = r.label;
    e["value"] = std::isfinite(r.value) ? Json(r.value) : Json(nullptr);
    e["bound"] = r.bound;
    e["kind"] = r.lower ? "lower" : "upper";
    e["pass"] = r.pass;
    if (!r.detail.empty()) e["detail"] = r.detail;
    checks.push_back(std::move(e));
    if (csv)
      csv->rows.push_back({std::to_string(r.criterion), r.name, r.label, std::isfinite(r.value) ? num(r.value) : "nan", num(r.bound),
                           r.lower ? "lower" : "upper", r.pass ? "true" : "false", r.detail});
  }
  j["checks"] = checks;
  j["failed"] = rep.failures();
  j["passed"] = rep.passed();
  return j;
}

}  // namespace knz
