#include <gtest/gtest.h>

#include <string>

#include "knz/config.hpp"

using namespace knz;

namespace {

// Message and kind of the error thrown by parse_config, or empty on success.
std::string parse_error(const std::string& text, ErrorKind* kind = nullptr) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    if (kind) *kind = e.kind();
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ComplexLiterals) {
  EXPECT_EQ(*parse_complex("1.5"), cplx(1.5, 0.0));
  EXPECT_EQ(*parse_complex("-2i"), cplx(0.0, -2.0));
  EXPECT_EQ(*parse_complex("0.3+1.1i"), cplx(0.3, 1.1));
  EXPECT_EQ(*parse_complex("1e-3-2.5e-1i"), cplx(1e-3, -0.25));
  EXPECT_EQ(*parse_complex(" 2 - i "), cplx(2.0, -1.0));
  EXPECT_EQ(*parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(*parse_complex("-1e+2+3E-1i"), cplx(-100.0, 0.3));
  EXPECT_FALSE(parse_complex("").has_value());
  EXPECT_FALSE(parse_complex("abc").has_value());
  EXPECT_FALSE(parse_complex("1+xi").has_value());
}

TEST(Config, Defaults) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.genus, 0);
  EXPECT_EQ(c.in_points.size(), 1u);
  EXPECT_EQ(c.weights, (std::vector<int>{-1, 0, 1, 2}));
  EXPECT_FALSE(c.tol.has_value());
  EXPECT_EQ(c.seed, 20240601u);
  EXPECT_EQ(c.tensor_space().dim(), 2);
}

TEST(Config, FullGenusOneConfig) {
  const RunConfig c = parse_config(
      "# torus\n"
      "genus = 1\n"
      "tau = 0.3+1.1i   # lattice\n"
      "out_point = 0.1+0.05i\n"
      "in_points = 0.45+0.4i, 0.7-0.1i\n"
      "scales = 1, 2i\n"
      "highest_weights = 1, 2\n"
      "twists = 1 0 0 1; 0 1 -1 0\n"
      "level = 3\n"
      "tol = 1e-7\n"
      "samples = 1024\n"
      "seed = 18446744073709551615\n"
      "module_depth = 3\n"
      "degree_min = -2\n"
      "degree_max = 1\n");
  EXPECT_EQ(c.genus, 1);
  EXPECT_EQ(c.tau, cplx(0.3, 1.1));
  EXPECT_EQ(c.in_points.size(), 2u);
  EXPECT_EQ(c.scales[1], cplx(0.0, 2.0));
  EXPECT_EQ(c.twists.size(), 2u);
  EXPECT_EQ(*c.tol, 1e-7);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.curve().genus(), 1);
  EXPECT_EQ(c.tensor_space().dim(), 6);
}

TEST(Config, LinePreciseErrors) {
  ErrorKind k{};
  EXPECT_EQ(parse_error("genus = 0\nin_points = 0, 0\n", &k), "line 2: marked points must be distinct");
  EXPECT_EQ(k, ErrorKind::config);
  EXPECT_EQ(parse_error("genus = 2\n"), "line 1: genus must be 0 or 1");
  EXPECT_EQ(parse_error("\n\nbogus = 1\n"), "line 3: unknown key 'bogus'");
  EXPECT_EQ(parse_error("genus 0\n"), "line 1: expected 'key = value'");
  EXPECT_EQ(parse_error("tol = 0\n"), "line 1: tol must be positive");
  EXPECT_EQ(parse_error("tol = -1e-3\n"), "line 1: tol must be positive");
  EXPECT_EQ(parse_error("genus = 1\ngenus = 0\n"), "line 2: duplicate key 'genus' (first on line 1)");
  EXPECT_EQ(parse_error("tau = 1-2i\n"), "line 1: tau must have positive imaginary part");
  EXPECT_EQ(parse_error("degree_min = 1.5\n"), "line 1: not an integer: '1.5'");
  EXPECT_EQ(parse_error("level = x\n"), "line 1: not a complex number: 'x'");
  EXPECT_EQ(parse_error("seed = -4\n"), "line 1: seed must be a nonnegative integer");
  EXPECT_EQ(parse_error("samples = 8\n"), "line 1: samples must be at least 16");
  EXPECT_EQ(parse_error("in_points = 0, 1\nhighest_weights = 1\n"), "line 1: highest_weights must have one entry per in-point");
  EXPECT_EQ(parse_error("twists = 1 0 0 0\n"), "line 1: twist matrices must be invertible");
  EXPECT_EQ(parse_error("algebra = e8\n"), "line 1: algebra must be sl2 or abelian");
  EXPECT_EQ(parse_error("genus = 1\nout_point = 0.2\nin_points = 0.2+1.1i, 0.5\ntau = 1.1i\n"), "line 3: marked points must be distinct");
}

TEST(Config, MissingFile) {
  try {
    load_config("/nonexistent/knz.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}
