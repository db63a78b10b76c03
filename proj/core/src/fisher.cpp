#include "opalg/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opalg/linalg.hpp"
#include "opalg/random.hpp"

namespace opalg {

ConjugatePair make_conjugate_pair(const Matrix& x, const Matrix& j,
                                  const ConditionalExpectation& ce,
                                  double certify_tol) {
  require_hermitian(x, "conjugate pair: X");
  require_same_dim(x, j, "conjugate pair");
  ConjugatePair pair;
  pair.x = x;
  pair.j = j;
  pair.ce = &ce;
  pair.certify_tol = certify_tol;
  const Matrix ident = Matrix::Identity(x.rows(), x.cols());
  pair.identity_residual = op_norm(ce(j.adjoint() * x) - ident);
  return pair;
}

double conjugate_identity_check(const ConjugatePair& pair) {
  const Matrix ident = Matrix::Identity(pair.x.rows(), pair.x.cols());
  return op_norm((*pair.ce)(pair.j.adjoint() * pair.x) - ident);
}

Matrix fisher_information(const ConjugatePair& pair) {
  if (!pair.certified())
    fail("UncertifiedPair", "fisher_information: defining-identity residual " +
                                std::to_string(pair.identity_residual));
  return (*pair.ce)(pair.j.adjoint() * pair.j);
}

CramerRaoReport cramer_rao_check(const ConjugatePair& pair, double inv_tol,
                                 double order_tol) {
  Matrix fisher = fisher_information(pair);
  const ConditionalExpectation& ce = *pair.ce;
  const Matrix ident = Matrix::Identity(pair.x.rows(), pair.x.cols());

  CramerRaoReport rep;
  double second_moment = op_norm(ce(pair.x.adjoint() * pair.x));
  rep.norm_form_lhs = fisher * second_moment;
  rep.norm_form_holds = psd_check(rep.norm_form_lhs - ident, order_tol);
  rep.equality_gap = op_norm(rep.norm_form_lhs - ident);

  Matrix centered = pair.x - ce(pair.x);
  rep.mse_operator = ce(centered * centered);

  double fisher_min = min_eigenvalue(fisher);
  if (fisher_min < inv_tol)
    fail("SingularFisherInfo", "cramer_rao_check: Fisher info min eigenvalue " +
                                   std::to_string(fisher_min));
  rep.fisher_inverse = func_calc(fisher, [](double v) { return 1.0 / v; });
  rep.operator_form_holds =
      psd_check(rep.mse_operator - rep.fisher_inverse, order_tol);
  return rep;
}

SemicircularDemo semicircular_demo(int matrix_size, double sigma,
                                   unsigned long long seed) {
  if (matrix_size < 2)
    fail("DimMismatch", "semicircular_demo: matrix size too small");
  if (sigma <= 0) fail("DimMismatch", "semicircular_demo: sigma must be positive");

  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = matrix_size;
  const double scale_diag = 1.0 / std::sqrt(double(n));
  const double scale_off = 1.0 / std::sqrt(2.0 * double(n));

  Matrix s(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = Complex(scale_diag * g(rng), 0.0);
    for (int j = i + 1; j < n; ++j) {
      Complex entry(scale_off * g(rng), scale_off * g(rng));
      s(i, j) = entry;
      s(j, i) = std::conj(entry);
    }
  }

  SemicircularDemo out;
  out.trace_s2 = (s * s).trace().real() / double(n);
  double tau_x2 = sigma * sigma * out.trace_s2;       // tau(X^2)
  double phi = out.trace_s2 / (sigma * sigma);        // tau(J^* J)
  out.product = phi * tau_x2;
  out.deviation = std::abs(out.product - 1.0);
  // tau(X) = sigma tau(S): centered up to the O(1/N) trace fluctuation.
  double tau_x = sigma * s.trace().real() / double(n);
  out.min_mse = tau_x2 - tau_x * tau_x;
  return out;
}

MultiVariableCr multi_variable_cr(const std::vector<ConjugatePair>& pairs,
                                  double order_tol) {
  if (pairs.empty()) fail("DimMismatch", "multi_variable_cr: no pairs");
  const ConditionalExpectation* shared = pairs.front().ce;
  const int dim = int(pairs.front().x.rows());
  MultiVariableCr out;
  out.fisher_sum = Matrix::Zero(dim, dim);
  for (const ConjugatePair& pair : pairs) {
    if (pair.ce != shared)
      fail("MixedExpectations",
           "multi_variable_cr: pairs use different conditional expectations");
    out.fisher_sum += fisher_information(pair);
    out.second_moment_sum += op_norm((*shared)(pair.x.adjoint() * pair.x));
  }
  const double n = double(pairs.size());
  out.rhs = n * n;
  Matrix lhs = out.fisher_sum * out.second_moment_sum;
  out.holds = psd_check(
      lhs - out.rhs * Matrix::Identity(dim, dim), order_tol * out.rhs);
  return out;
}

}  // namespace opalg
