// knz_cli: batch front end. Exit codes: 0 ok, 1 verification failure or
// internal error, 2 configuration or usage error, 3 precondition, numerical
// or truncation failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knz/knz.hpp"

namespace {

int exit_code(knz::ErrorKind k) {
  switch (k) {
    case knz::ErrorKind::config: return 2;
    case knz::ErrorKind::precondition:
    case knz::ErrorKind::numerical:
    case knz::ErrorKind::truncation: return 3;
    case knz::ErrorKind::internal: return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krichever-Novikov bases, pairings, cocycles and KZ systems"};
  app.require_subcommand(1);
  std::string config_path, out_path, format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol;
  std::vector<int> only;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_path, "write output here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "seed for generic configurations in verify");
  app.add_option("--samples", samples, "initial quadrature samples per contour");
  app.add_option("--tol", tol, "replace every upper bound of verify");
  app.add_option("--only", only, "verify: run only these criteria (0 = Lie data and modules)")->delimiter(',');
  const std::vector<std::pair<std::string, std::string>> commands{
      {"basis", "basis elements for each weight and degree"},
      {"pairing", "duality pairing matrices, both routes"},
      {"structure", "structure constants of the function and vector field algebras"},
      {"cocycle", "the two central cocycles on the degree window"},
      {"kz", "coefficient table and assembled KZ system"},
      {"verify", "run the acceptance checks"}};
  for (const auto& [n, d] : commands) app.add_subcommand(n, d)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    knz::RunConfig cfg = config_path.empty() ? knz::RunConfig{} : knz::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (samples) {
      if (*samples < 16) knz::fail(knz::ErrorKind::config, "--samples must be at least 16");
      cfg.samples = *samples;
    }
    if (tol) {
      if (!(*tol > 0.0)) knz::fail(knz::ErrorKind::config, "--tol must be positive");
      cfg.tol = *tol;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    knz::CsvTable csv;
    knz::CsvTable* table = format == "csv" ? &csv : nullptr;
    knz::Json doc;
    int rc = 0;
    if (cmd == "verify") {
      knz::VerifyOptions o;
      o.seed = cfg.seed;
      o.samples = cfg.samples;
      o.tol = cfg.tol;
      const auto rep = knz::run_verification(cfg, o, only);
      doc = knz::verify_payload(cfg, rep, table);
      rc = rep.passed() ? 0 : 1;
      for (const auto& r : rep.checks)
        if (!r.pass) std::cerr << "FAIL " << r.name << " [" << r.label << "] value " << r.value << " bound " << r.bound << "\n";
    } else {
      const knz::KNBasis B(cfg.curve(), knz::BasisOptions{knz::Route::closed_form, cfg.samples});
      if (cmd == "basis") doc = knz::basis_payload(cfg, B, table);
      else if (cmd == "pairing") doc = knz::pairing_payload(cfg, B, table);
      else if (cmd == "structure") doc = knz::structure_payload(cfg, B, table);
      else if (cmd == "cocycle") doc = knz::cocycle_payload(cfg, B, table);
      else doc = knz::kz_payload(cfg, B, table);
    }
    const std::string text = table ? csv.str() : doc.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) knz::fail(knz::ErrorKind::config, "cannot write '" + out_path + "'");
      f << text;
    }
    return rc;
  } catch (const knz::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
