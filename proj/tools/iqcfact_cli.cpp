// iqcfact: factorize, verify and analyze IQC multipliers from JSON/CSV files.
//
// Exit status: 0 success or stable, 2 a checked condition failed or the
// verdict is inconclusive, 1 any error (a JSON error object goes to stderr).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "iqcfact/csv.hpp"
#include "iqcfact/iqcfact.hpp"
#include "iqcfact/json_io.hpp"

namespace {

using iqcfact::io::json;
namespace fs = std::filesystem;

struct Config {
  double grid_min = 1e-4;
  double grid_max = 1e4;
  int grid_points = 400;
  double residual_tol = 1e-6;
  double stability_tol = iqcfact::tol::kStability;
  double dt = 1e-3;
  double horizon = 30.0;
  double epsilon = 1e-3;
  bool pretty = false;

  iqcfact::FrequencyGrid grid() const {
    return iqcfact::FrequencyGrid::log_spaced(grid_min, grid_max, grid_points);
  }

  void validate() const {
    if (!(grid_min > 0.0) || !(grid_max > grid_min) || grid_points < 2)
      throw iqcfact::Error(iqcfact::ErrorCode::kInvalidArgument,
                           "grid needs 0 < min < max and at least 2 points");
    if (!(dt > 0.0) || !(horizon > 0.0))
      throw iqcfact::Error(iqcfact::ErrorCode::kInvalidArgument,
                           "dt and horizon must be positive");
  }
};

void emit(const Config& cfg, const json& report, const std::string& summary) {
  if (cfg.pretty)
    std::cout << summary;
  else
    std::cout << report.dump(2) << '\n';
}

std::string fmt(double x) { return iqcfact::io::format_double(x); }

int cmd_example(const Config& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  iqcfact::ExampleBundle b = iqcfact::builtin_example();
  b.u = iqcfact::example::input(cfg.dt, cfg.horizon);
  const fs::path dir(out_dir);
  using iqcfact::io::to_json;
  using iqcfact::io::write_json_file;
  write_json_file((dir / "pi.json").string(), to_json(b.pi));
  write_json_file((dir / "g.json").string(), to_json(b.g));
  {
    std::ofstream csv(dir / "u.csv");
    iqcfact::io::write_signal_csv(csv, b.u);
  }
  write_json_file((dir / "psi_triangular.json").string(), to_json(b.reference_triangular));
  write_json_file((dir / "psi_triangular_recipe.json").string(), to_json(b.triangular));
  write_json_file((dir / "psi_jspectral.json").string(), to_json(b.jspectral));
  write_json_file((dir / "psi_jspectral_reference.json").string(),
                  to_json(b.reference_jspectral));
  const json files = {"pi.json", "g.json", "u.csv", "psi_triangular.json",
                      "psi_triangular_recipe.json", "psi_jspectral.json",
                      "psi_jspectral_reference.json"};
  emit(cfg, {{"out", out_dir}, {"files", files}, {"u_energy", iqcfact::energy(b.u)}},
       "wrote example bundle to " + out_dir + "\n");
  return 0;
}

int cmd_factorize(const Config& cfg, const std::string& method, const std::string& pi_path,
                  const std::string& out) {
  const iqcfact::Multiplier pi = iqcfact::io::multiplier_from_json(iqcfact::io::read_json_file(pi_path));
  const iqcfact::FrequencyGrid grid = cfg.grid();
  const iqcfact::Factorization f = method == "triangular"
                                       ? iqcfact::triangular_factorize(pi, grid)
                                       : iqcfact::jspectral_factorize(pi, grid, cfg.residual_tol);
  iqcfact::io::write_json_file(out, iqcfact::io::to_json(f));
  const iqcfact::VerificationReport rep = iqcfact::verify_factorization(pi, f, grid);
  emit(cfg,
       {{"method", method},
        {"out", out},
        {"classification", std::string(iqcfact::to_string(f.classification))},
        {"residual", rep.residual}},
       method + " factorization written to " + out + "; classification " +
           std::string(iqcfact::to_string(f.classification)) + ", residual " +
           fmt(rep.residual) + "\n");
  return 0;
}

int cmd_verify(const Config& cfg, const std::string& pi_path, const std::string& fact_path) {
  const iqcfact::Multiplier pi = iqcfact::io::multiplier_from_json(iqcfact::io::read_json_file(pi_path));
  const iqcfact::Factorization f =
      iqcfact::io::factorization_from_json(iqcfact::io::read_json_file(fact_path));
  const iqcfact::VerificationReport rep = iqcfact::verify_factorization(pi, f, cfg.grid());
  const bool psi_stable = rep.psi_stability.margin > cfg.stability_tol;
  const bool passed = rep.residual <= cfg.residual_tol;
  json j = iqcfact::io::to_json(rep);
  j["psi_stable"] = psi_stable;
  j["classification"] = std::string(iqcfact::to_string(f.classification));
  j["tolerance"] = cfg.residual_tol;
  j["passed"] = passed;
  emit(cfg, j,
       std::string(passed ? "PASS" : "FAIL") + ": residual " + fmt(rep.residual) +
           " (tolerance " + fmt(cfg.residual_tol) + "), classification " +
           std::string(iqcfact::to_string(f.classification)) + "\n");
  return passed ? 0 : 2;
}

int cmd_analyze(const Config& cfg, const std::string& pi_path, const std::string& delta2_path,
                bool asserted) {
  const iqcfact::Multiplier pi = iqcfact::io::multiplier_from_json(iqcfact::io::read_json_file(pi_path));
  const iqcfact::RationalMatrix d2 =
      iqcfact::io::rational_matrix_from_json(iqcfact::io::read_json_file(delta2_path));
  iqcfact::VerdictOptions opt;
  opt.grid = cfg.grid();
  opt.epsilon = cfg.epsilon;
  opt.delta1_iqc_asserted = asserted;
  const iqcfact::VerdictReport v = iqcfact::stability_verdict(d2, pi, opt);
  std::string summary = "overall: " + v.overall + "\n";
  for (const auto* c : {&v.well_posedness, &v.delta1_iqc, &v.inverse_graph, &v.positive_negative})
    summary += "  " + c->name + ": " + (c->satisfied ? "ok" : "FAILED") + ", margin " +
               fmt(c->margin) + "\n";
  summary += "  factorization: " + v.factorization_notes + "\n";
  emit(cfg, iqcfact::io::to_json(v), summary);
  return v.overall == "stable" ? 0 : 2;
}

int cmd_perturb(const Config& cfg, const std::string& pi_path, const std::string& g_path,
                const std::string& out) {
  const iqcfact::Multiplier pi = iqcfact::io::multiplier_from_json(iqcfact::io::read_json_file(pi_path));
  const iqcfact::RationalMatrix g =
      iqcfact::io::rational_matrix_from_json(iqcfact::io::read_json_file(g_path));
  const iqcfact::FrequencyGrid grid = cfg.grid();
  const iqcfact::Perturbation p = iqcfact::perturb_multiplier(pi, g, grid);
  const iqcfact::ConditionReport after = iqcfact::gpg_condition(g, p.perturbed, grid, 0.0);
  iqcfact::io::write_json_file(out, iqcfact::io::to_json(p.perturbed));
  emit(cfg,
       {{"delta", p.delta},
        {"epsilon", p.epsilon},
        {"g_norm", p.g_norm},
        {"capped", p.capped},
        {"perturbed_form_max", after.curve_max},
        {"out", out},
        {"perturbed", iqcfact::io::to_json(p.perturbed)}},
       "epsilon " + fmt(p.epsilon) + ", delta " + fmt(p.delta) + ", perturbed form max " +
           fmt(after.curve_max) + "; written to " + out + "\n");
  return 0;
}

int cmd_trace(const Config& cfg, const std::string& fact_path, const std::string& g_path,
              const std::string& input_path, const std::string& out, const std::string& hold) {
  const iqcfact::Factorization f =
      iqcfact::io::factorization_from_json(iqcfact::io::read_json_file(fact_path));
  const iqcfact::RationalMatrix g =
      iqcfact::io::rational_matrix_from_json(iqcfact::io::read_json_file(g_path));
  const iqcfact::SampledSignal u = iqcfact::io::read_signal_csv(input_path);
  const iqcfact::HoldMethod h =
      hold == "zoh" ? iqcfact::HoldMethod::kZeroOrder : iqcfact::HoldMethod::kFirstOrder;
  const auto [v, w] = iqcfact::graph_signals(g, u, h);
  const iqcfact::IqcTrace t = iqcfact::iqc_trace(f, v, w, h);
  {
    std::ofstream csv(out);
    if (!csv) throw iqcfact::Error(iqcfact::ErrorCode::kInvalidArgument, "cannot write '" + out + "'");
    iqcfact::io::write_trace_csv(csv, t);
  }
  const std::optional<double> crossing = iqcfact::last_sign_change(t);
  emit(cfg,
       {{"out", out},
        {"final_value", t.final_value()},
        {"max_value", t.values.maxCoeff()},
        {"last_zero_crossing", crossing ? json(*crossing) : json(nullptr)}},
       "trace written to " + out + "; final value " + fmt(t.final_value()) + ", max " +
           fmt(t.values.maxCoeff()) + "\n");
  return 0;
}

int report_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IQC multiplier factorization and stability analysis"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--grid-min", cfg.grid_min, "Smallest grid frequency (rad/s)");
  app.add_option("--grid-max", cfg.grid_max, "Largest grid frequency (rad/s)");
  app.add_option("--grid-points", cfg.grid_points, "Number of log-spaced grid points");
  app.add_option("--residual-tol", cfg.residual_tol, "Factorization residual tolerance");
  app.add_option("--stability-tol", cfg.stability_tol, "Required pole margin");
  app.add_option("--dt", cfg.dt, "Sample period (s)");
  app.add_option("--horizon", cfg.horizon, "Simulation horizon (s)");
  app.add_option("--epsilon", cfg.epsilon, "Strictness epsilon for frequency conditions");
  app.add_flag("--pretty", cfg.pretty, "Human-readable summary instead of JSON");

  std::string out_dir = ".";
  auto* example = app.add_subcommand("example", "Write the built-in example bundle");
  example->add_option("--out", out_dir, "Output directory");

  std::string method = "jspectral", pi_path, out_path, fact_path, delta2_path, g_path,
              input_path, hold = "foh";
  auto* factorize = app.add_subcommand("factorize", "Factorize a multiplier");
  factorize->add_option("--method", method)->check(CLI::IsMember({"triangular", "jspectral"}));
  factorize->add_option("--pi", pi_path)->required();
  factorize->add_option("--out", out_path)->required();

  auto* verify = app.add_subcommand("verify", "Check a factorization against a multiplier");
  verify->add_option("--pi", pi_path)->required();
  verify->add_option("--fact", fact_path)->required();

  bool asserted = false;
  auto* analyze = app.add_subcommand("analyze", "Stability verdict for an LTI Delta2");
  analyze->add_option("--pi", pi_path)->required();
  analyze->add_option("--delta2", delta2_path)->required();
  analyze->add_flag("--assert-delta1-iqc", asserted, "Assert the IQC of the nonlinear side");

  std::string pibar = "pibar.json";
  auto* perturb = app.add_subcommand("perturb", "Shift Pi11 so that a factorization exists");
  perturb->add_option("--pi", pi_path)->required();
  perturb->add_option("--g", g_path)->required();
  perturb->add_option("--out", pibar, "Where to write the perturbed multiplier");

  auto* trace = app.add_subcommand("trace", "Truncated IQC trace for the graph of G");
  trace->add_option("--fact", fact_path)->required();
  trace->add_option("--g", g_path)->required();
  trace->add_option("--input", input_path)->required();
  trace->add_option("--out", out_path)->required();
  trace->add_option("--hold", hold)->check(CLI::IsMember({"zoh", "foh"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidArgument", e.what());
  }

  try {
    cfg.validate();
    if (*example) return cmd_example(cfg, out_dir);
    if (*factorize) return cmd_factorize(cfg, method, pi_path, out_path);
    if (*verify) return cmd_verify(cfg, pi_path, fact_path);
    if (*analyze) return cmd_analyze(cfg, pi_path, delta2_path, asserted);
    if (*perturb) return cmd_perturb(cfg, pi_path, g_path, pibar);
    if (*trace) return cmd_trace(cfg, fact_path, g_path, input_path, out_path, hold);
  } catch (const iqcfact::Error& e) {
    return report_error(std::string(iqcfact::to_string(e.code())), e.what());
  } catch (const iqcfact::io::json::exception& e) {
    return report_error("ParseError", e.what());
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what());
  }
  return 1;
}
