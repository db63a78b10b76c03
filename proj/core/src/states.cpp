#include "opalg/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opalg {

DensityState make_state(const Matrix& rho, double faith_tol) {
  require_hermitian(rho, "state");
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-12)
    fail("NotNormalized", "state: trace is " + std::to_string(tr));
  double mineig = min_eigenvalue(rho);
  if (mineig < -1e-12)
    fail("NotPositive", "state: min eigenvalue " + std::to_string(mineig));
  DensityState s;
  s.rho = 0.5 * (rho + rho.adjoint());
  s.min_eig = mineig;
  s.faithful = mineig >= faith_tol;
  return s;
}

Complex expect(const DensityState& state, const Matrix& x) {
  require_same_dim(state.rho, x, "expect");
  return (state.rho * x).trace();
}

BornDistribution born_distribution(const DensityState& state, const Matrix& x) {
  require_hermitian(x, "born_distribution");
  require_same_dim(state.rho, x, "born_distribution");
  SpectralDecomposition d = eig_hermitian(x);
  const double merge = tol::merge_rel * (1.0 + d.eigenvalues.cwiseAbs().maxCoeff());

  BornDistribution out;
  Eigen::Index i = 0;
  const Eigen::Index n = d.eigenvalues.size();
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && d.eigenvalues(j + 1) - d.eigenvalues(i) <= merge) ++j;
    // Eigenprojection of the merged group.
    Matrix proj = Matrix::Zero(n, n);
    double lambda = 0.0;
    for (Eigen::Index k = i; k <= j; ++k) {
      proj += d.eigenvectors.col(k) * d.eigenvectors.col(k).adjoint();
      lambda += d.eigenvalues(k);
    }
    lambda /= double(j - i + 1);
    double p = (state.rho * proj).trace().real();
    if (p > 1e-14) out.atoms.push_back({lambda, p});
    i = j + 1;
  }
  double total = 0.0;
  for (const BornAtom& a : out.atoms) total += a.probability;
  if (std::abs(total - 1.0) > 1e-10)
    fail("NotNormalized",
         "born_distribution: probabilities sum to " + std::to_string(total),
         ErrorClass::numerical);
  return out;
}

DensityState luders_update(const DensityState& state, const Matrix& projection,
                           double floor) {
  require_same_dim(state.rho, projection, "luders_update");
  double idem = op_norm(projection * projection - projection);
  if (idem > 1e-9)
    fail("NotProjection", "luders_update: P^2 = P residual " + std::to_string(idem));
  double p = (state.rho * projection).trace().real();
  if (p <= floor)
    fail("ZeroProbabilityEvent",
         "luders_update: event probability " + std::to_string(p));
  Matrix updated = projection * state.rho * projection / p;
  // Conditioning can kill part of the spectrum, so re-certify faithfulness.
  return make_state(updated);
}

Complex gns_inner(const DensityState& state, const Matrix& x, const Matrix& y) {
  require_same_dim(state.rho, x, "gns_inner");
  require_same_dim(state.rho, y, "gns_inner");
  return (state.rho * x.adjoint() * y).trace();
}

RobertsonReport robertson_check(const DensityState& state, const Matrix& x,
                                const Matrix& y) {
  require_hermitian(x, "robertson_check: X");
  require_hermitian(y, "robertson_check: Y");
  require_same_dim(state.rho, x, "robertson_check");
  require_same_dim(state.rho, y, "robertson_check");

  const Matrix ident = Matrix::Identity(x.rows(), x.cols());
  Matrix xc = x - expect(state, x).real() * ident;
  Matrix yc = y - expect(state, y).real() * ident;

  RobertsonReport rep;
  rep.var_x = (state.rho * xc * xc).trace().real();
  rep.var_y = (state.rho * yc * yc).trace().real();
  double anti = (state.rho * anticommutator(xc, yc)).trace().real();
  Complex comm = (state.rho * commutator(x, y)).trace();
  rep.robertson_rhs = 0.25 * std::norm(comm);
  rep.rs_rhs = 0.25 * anti * anti + rep.robertson_rhs;
  rep.holds = rep.var_x * rep.var_y >= rep.rs_rhs - 1e-10;
  return rep;
}

}  // namespace opalg
