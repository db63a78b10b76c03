#include "opalg/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace opalg {

GainsCone make_cone(std::vector<Matrix> generators, int dim_if_empty) {
  GainsCone cone;
  if (generators.empty()) {
    if (dim_if_empty <= 0)
      fail("DimMismatch", "cone: empty cone needs an explicit dimension");
    cone.dim = dim_if_empty;
    return cone;
  }
  cone.dim = int(generators[0].rows());
  for (size_t i = 0; i < generators.size(); ++i) {
    require_hermitian(generators[i], "cone generator");
    if (generators[i].rows() != cone.dim)
      fail("DimMismatch", "cone: generator " + std::to_string(i) +
                              " has mismatched dimension");
  }
  cone.generators = std::move(generators);
  return cone;
}

namespace {

// Euclidean projection of v onto {x : x_i >= lo, sum x = total}.
RVector project_shifted_simplex(RVector v, double lo, double total) {
  const Eigen::Index n = v.size();
  RVector w = v.array() - lo;
  double radius = total - lo * double(n);
  // Projection of w onto {y >= 0, sum y = radius} by the sorted-threshold rule.
  std::vector<double> u(w.data(), w.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (int i = 0; i < int(n); ++i) {
    cum += u[size_t(i)];
    double cand = (cum - radius) / double(i + 1);
    if (u[size_t(i)] - cand > 0) theta = cand;
  }
  RVector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = std::max(w(i) - theta, 0.0) + lo;
  return y;
}

Matrix project_spectrahedron(const Matrix& x, double delta) {
  Matrix sym = 0.5 * (x + x.adjoint());
  SpectralDecomposition d = eig_hermitian(sym);
  RVector lam = project_shifted_simplex(d.eigenvalues, delta, 1.0);
  return d.eigenvectors * lam.asDiagonal().toDenseMatrix().cast<Complex>() *
         d.eigenvectors.adjoint();
}

double hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace().real();
}

double max_violation_of(const GainsCone& cone, const Matrix& rho) {
  double v = -std::numeric_limits<double>::infinity();
  for (const Matrix& g : cone.generators) v = std::max(v, (rho * g).trace().real());
  return cone.generators.empty() ? 0.0 : v;
}

}  // namespace

SeparationResult find_pricing_state(const GainsCone& cone,
                                    const SolverOptions& opts) {
  const int n = cone.dim;
  if (n <= 0) fail("DimMismatch", "find_pricing_state: empty dimension");
  if (opts.delta < 0 || opts.delta * n >= 1.0)
    fail("DimMismatch", "find_pricing_state: need 0 <= delta * dim < 1");

  const size_t m = cone.generators.size();
  Matrix x = Matrix::Identity(n, n) / double(n);
  std::vector<Matrix> increments(m + 1, Matrix::Zero(n, n));
  std::vector<double> gen_norm2(m);
  for (size_t i = 0; i < m; ++i)
    gen_norm2[i] = hs_inner(cone.generators[i], cone.generators[i]);

  // Candidates are always drawn from the spectrahedron, so the returned
  // state meets the floor and trace invariants by construction; only the
  // half-space violations remain to be checked.
  double viol = max_violation_of(cone, x);
  if (viol <= opts.feas_tol)
    return SeparationResult{make_state(x), viol, 0, opts.delta};

  for (long iter = 1; iter <= opts.max_iter; ++iter) {
    // Set 0: the spectrahedron.
    {
      Matrix y = project_spectrahedron(x + increments[0], opts.delta);
      increments[0] = x + increments[0] - y;
      x = y;
    }
    Matrix candidate = x;
    // Sets 1..m: half-spaces Tr(rho G_i) <= 0.
    for (size_t i = 0; i < m; ++i) {
      Matrix z = x + increments[i + 1];
      double v = hs_inner(cone.generators[i], z);
      Matrix y = v > 0 && gen_norm2[i] > 0
                     ? Matrix(z - (v / gen_norm2[i]) * cone.generators[i])
                     : z;
      increments[i + 1] = z - y;
      x = y;
    }
    viol = max_violation_of(cone, candidate);
    if (viol <= opts.feas_tol)
      return SeparationResult{make_state(candidate), viol, iter, opts.delta};
  }
  throw Error("Infeasible",
              "no pricing state within " + std::to_string(opts.max_iter) +
                  " iterations, max violation " + std::to_string(viol),
              ErrorClass::check_failed);
}

NaCertificate na_certificate(const GainsCone& cone, const SolverOptions& opts) {
  NaCertificate cert;
  try {
    SeparationResult res = find_pricing_state(cone, opts);
    cert.has_pricing_state = true;
    cert.violation = res.max_violation;
    cert.iterations = res.iterations;
    cert.result = std::move(res);
  } catch (const Error& e) {
    if (e.code() != "Infeasible") throw;
    cert.has_pricing_state = false;
    cert.iterations = opts.max_iter;
    cert.violation = std::numeric_limits<double>::quiet_NaN();
  }
  return cert;
}

double separation_consistency(const GainsCone& cone,
                              const SeparationResult& result) {
  return max_violation_of(cone, result.state.rho);
}

}  // namespace opalg
