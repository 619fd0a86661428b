#pragma once

#include <cctype>
#include <charconv>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "knz/curve.hpp"
#include "knz/error.hpp"
#include "knz/lie_algebra.hpp"

namespace knz {

/// Everything a CLI run needs. Points are given 1-based in text and stored 0-based.
struct RunConfig {
  int genus = 0;
  cplx tau{0.3, 1.1};
  cplx out_point{};
  std::vector<cplx> in_points{0.0};
  std::vector<cplx> scales;
  std::vector<int> weights{-1, 0, 1, 2};
  int degree_min = -3;
  int degree_max = 3;
  std::string algebra = "sl2";
  double form_scale = 1.0;
  std::vector<int> highest_weights;
  std::vector<Mat> twists;
  cplx level = 1.0;
  std::optional<double> tol;  // replaces the verification bounds when set
  int samples = 512;
  std::uint64_t seed = 20240601;
  int module_depth = 2;

  MarkedCurve curve() const {
    if (genus == 0) return MarkedCurve::rational(in_points, scales);
    return MarkedCurve::elliptic(tau, out_point, in_points, scales);
  }

  SimpleLieAlgebraData lie_algebra() const { return algebra == "sl2" ? make_sl2(form_scale) : make_abelian(1, form_scale); }

  WeightedTensorSpace tensor_space() const {
    std::vector<int> w = highest_weights;
    if (w.empty()) w.assign(in_points.size(), 1);
    return WeightedTensorSpace(lie_algebra(), w, twists, level);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data() + (t[0] == '+' ? 1 : 0), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// Parses "1.5", "-2i", "0.3+1.1i", "1e-3-2.5e-1i".
inline std::optional<cplx> parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i') {
    auto r = detail::parse_double(s);
    if (!r) return std::nullopt;
    return cplx{*r, 0.0};
  }
  s.pop_back();
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  const std::string re = cut == std::string::npos ? "" : s.substr(0, cut);
  std::string im = cut == std::string::npos ? s : s.substr(cut);
  if (im.empty() || im == "+") im = "1";
  else if (im == "-") im = "-1";
  double r = 0.0;
  if (!re.empty()) {
    auto v = detail::parse_double(re);
    if (!v) return std::nullopt;
    r = *v;
  }
  auto v = detail::parse_double(im);
  if (!v) return std::nullopt;
  return cplx{r, *v};
}

/// Flat "key = value" text with # comments. Errors carry the line number.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& msg) {
    fail(ErrorKind::config, lineno > 0 ? "line " + std::to_string(lineno) + ": " + msg : msg);
  };
  auto num = [&](const std::string& v) {
    auto d = detail::parse_double(v);
    if (!d) bad("not a number: '" + v + "'");
    return *d;
  };
  auto integer = [&](const std::string& v) {
    const double d = num(v);
    if (d != static_cast<double>(static_cast<long long>(d))) bad("not an integer: '" + v + "'");
    return static_cast<int>(d);
  };
  auto complex = [&](const std::string& v) {
    auto z = parse_complex(v);
    if (!z) bad("not a complex number: '" + v + "'");
    return *z;
  };
  auto complex_list = [&](const std::string& v) {
    std::vector<cplx> out;
    for (const auto& t : detail::split(v, ',')) out.push_back(complex(t));
    return out;
  };
  auto int_list = [&](const std::string& v) {
    std::vector<int> out;
    for (const auto& t : detail::split(v, ',')) out.push_back(integer(t));
    return out;
  };
  int points_line = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (val.empty()) bad("missing value for '" + key + "'");
    if (seen.count(key)) bad("duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    seen[key] = lineno;
    if (key == "genus") {
      c.genus = integer(val);
      if (c.genus != 0 && c.genus != 1) bad("genus must be 0 or 1");
    } else if (key == "tau") {
      c.tau = complex(val);
      if (c.tau.imag() <= 0.0) bad("tau must have positive imaginary part");
    } else if (key == "out_point") {
      c.out_point = complex(val);
    } else if (key == "in_points") {
      c.in_points = complex_list(val);
      points_line = lineno;
    } else if (key == "scales") {
      c.scales = complex_list(val);
    } else if (key == "weights") {
      c.weights = int_list(val);
    } else if (key == "degree_min") {
      c.degree_min = integer(val);
    } else if (key == "degree_max") {
      c.degree_max = integer(val);
    } else if (key == "algebra") {
      if (val != "sl2" && val != "abelian") bad("algebra must be sl2 or abelian");
      c.algebra = val;
    } else if (key == "form_scale") {
      c.form_scale = num(val);
      if (c.form_scale == 0.0) bad("form_scale must be nonzero");
    } else if (key == "highest_weights") {
      c.highest_weights = int_list(val);
    } else if (key == "twists") {
      for (const auto& site : detail::split(val, ';')) {
        std::vector<cplx> e;
        std::istringstream ss(site);
        std::string tok;
        while (ss >> tok) e.push_back(complex(tok));
        if (e.size() != 4) bad("each twist needs four entries (2x2, row-major)");
        Mat m(2, 2);
        m << e[0], e[1], e[2], e[3];
        if (std::abs(m.determinant()) < 1e-12) bad("twist matrices must be invertible");
        c.twists.push_back(m);
      }
    } else if (key == "level") {
      c.level = complex(val);
    } else if (key == "tol") {
      c.tol = num(val);
      if (!(*c.tol > 0.0)) bad("tol must be positive");
    } else if (key == "samples") {
      c.samples = integer(val);
      if (c.samples < 16) bad("samples must be at least 16");
    } else if (key == "seed") {
      if (val.empty() || val[0] == '-') bad("seed must be a nonnegative integer");
      std::uint64_t s = 0;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), s);
      if (ec != std::errc() || p != val.data() + val.size()) bad("seed must be a nonnegative integer");
      c.seed = s;
    } else if (key == "module_depth") {
      c.module_depth = integer(val);
      if (c.module_depth < 0) bad("module_depth must be nonnegative");
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  lineno = points_line;
  if (c.in_points.empty()) bad("in_points must not be empty");
  if (c.degree_min > c.degree_max) fail(ErrorKind::config, "degree_min exceeds degree_max");
  if (!c.scales.empty() && c.scales.size() != c.in_points.size()) bad("scales must have one entry per in-point");
  if (!c.highest_weights.empty() && c.highest_weights.size() != c.in_points.size())
    bad("highest_weights must have one entry per in-point");
  if (!c.twists.empty() && c.twists.size() != c.in_points.size()) bad("twists must have one entry per in-point");
  if (!c.twists.empty() && c.algebra != "sl2") bad("twists need the sl2 algebra");
  try {
    (void)c.curve();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::config) throw;
    bad(e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace knz
