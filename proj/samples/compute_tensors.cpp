// Minimal library usage: build a manifold, compute the connection and
// curvature tensors at a point, and evaluate one of the integral identities.
#include <iostream>

#include "chern/chern.hpp"

int main() {
  using namespace chern;

  ManifoldModel m = builtins::iwasawa();
  CPoint p = {cplx(0.3, 0.1), cplx(0.7, 0.2), cplx(0.5, 0.9)};

  PointGeometry g = compute_geometry(m, p);
  std::cout << "det g = " << g.det << ", ||T||^2 = " << g.torsion_norm2() << "\n";
  std::cout << "t eigenvalues: " << g.invariant_eigenvalues(g.t).transpose() << "\n";
  std::cout << "H eigenvalues: " << g.invariant_eigenvalues(g.H).transpose() << "\n";

  SuiteRequest req;
  req.resolution = 4;
  req.cases = {CaseId::LEM44};
  req.fields.push_back(fieldlib::builtin_field(m, "phi3"));
  SuiteResult r = run_suite(m, req);
  for (const auto& c : r.cases)
    std::cout << c.case_name << "/" << c.field_name << ": " << to_string(c.verdict)
              << " (residual " << c.residual << ")\n";
  return 0;
}
