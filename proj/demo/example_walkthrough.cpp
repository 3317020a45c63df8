// Walks through the built-in example: a constant gain 1/2 against a dynamic
// multiplier whose triangular factor is only hard, while the J-spectral
// factor is doubly hard.

#include <cmath>
#include <cstdio>
#include <string>

#include "iqcfact/iqcfact.hpp"

using namespace iqcfact;

namespace {

std::string poly_text(const Polynomial& p) {
  std::string out;
  const auto& c = p.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) {
    if (c[k] == 0.0 && c.size() > 1) continue;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%.4g", out.empty() ? "" : (c[k] < 0 ? " - " : " + "),
                  out.empty() ? c[k] : std::abs(c[k]));
    out += buf;
    if (k == 1) out += " s";
    if (k > 1) out += " s^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

std::string text(const RationalFunction& f) {
  if (f.den().coeffs().size() == 1) return poly_text((1.0 / f.den().coeffs()[0]) * f.num());
  return "(" + poly_text(f.num()) + ") / (" + poly_text(f.den()) + ")";
}

void print_factor(const char* label, const Factorization& f) {
  const VerificationReport rep = verify_factorization(example::multiplier(), f);
  const std::string cls(to_string(f.classification));
  std::printf("%-24s %-12s residual %.2e\n", label, cls.c_str(), rep.residual);
  for (Eigen::Index i = 0; i < f.psi.rows(); ++i)
    for (Eigen::Index j = 0; j < f.psi.cols(); ++j)
      std::printf("    psi(%td,%td) = %s\n", i, j, text(f.psi(i, j)).c_str());
}

}  // namespace

int main() {
  const ExampleBundle b = builtin_example();

  std::printf("Multiplier entries\n");
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j)
      std::printf("    pi(%td,%td) = %s\n", i, j, text(b.pi.matrix()(i, j)).c_str());

  std::printf("\nFactorizations\n");
  print_factor("reference triangular", b.reference_triangular);
  print_factor("triangular recipe", b.triangular);
  print_factor("computed J-spectral", b.jspectral);

  const auto [v, w] = graph_signals(b.g, b.u);
  const IqcTrace hard = iqc_trace(b.reference_triangular, v, w);
  const IqcTrace dhard = iqc_trace(b.jspectral, v, w);
  const auto crossing = last_sign_change(hard);
  std::printf("\nTruncated traces, |u|^2 = %.5f\n", energy(b.u));
  std::printf("    triangular: max %.4f, last crossing %.3f, final %.5f\n", hard.values.maxCoeff(),
              crossing.value_or(-1.0), hard.final_value());
  std::printf("    J-spectral: max %.2e, final %.5f\n", dhard.values.maxCoeff(),
              dhard.final_value());
  for (double t : {0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0}) {
    const auto k = static_cast<Eigen::Index>(t / hard.dt + 0.5);
    std::printf("    T = %5.1f   %9.5f   %9.5f\n", t, hard.values(k), dhard.values(k));
  }

  const Perturbation p = perturb_multiplier(b.pi, b.g);
  std::printf("\nPerturbation: epsilon %.4f, delta %.4f\n", p.epsilon, p.delta);

  VerdictOptions opt;
  opt.delta1_iqc_asserted = true;
  const VerdictReport r = stability_verdict(b.g, b.pi, opt);
  std::printf("\nVerdict: %s\n", r.overall.c_str());
  for (const ConditionReport* c : {&r.well_posedness, &r.delta1_iqc, &r.inverse_graph,
                                   &r.positive_negative})
    std::printf("    %-28s %s margin %.4f\n", c->name.c_str(), c->satisfied ? "ok  " : "FAIL",
                c->margin);
  return r.overall == "stable" ? 0 : 1;
}
