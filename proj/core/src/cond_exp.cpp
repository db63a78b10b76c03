#include "opalg/cond_exp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opalg {

CompatibilityReport modular_compatible(const DensityState& state,
                                       const ProjectivePartition& partition,
                                       double tolerance) {
  CompatibilityReport rep;
  for (const Matrix& p : partition.projections)
    rep.max_commutator =
        std::max(rep.max_commutator, op_norm(commutator(state.rho, p)));
  rep.compatible = rep.max_commutator <= tolerance;
  return rep;
}

ConditionalExpectation ConditionalExpectation::make(ProjectivePartition partition,
                                                    DensityState state,
                                                    double mod_tol) {
  if (!state.faithful)
    fail("NotCompatible",
         "cond_exp: state is not certified faithful (min eigenvalue " +
             std::to_string(state.min_eig) + ")");
  if (state.dim() != partition.dim)
    fail("DimMismatch", "cond_exp: state and partition dimensions differ");

  CompatibilityReport rep = modular_compatible(state, partition, mod_tol);
  if (!rep.compatible)
    fail("NotCompatible", "cond_exp: max commutator residual " +
                              std::to_string(rep.max_commutator) +
                              " exceeds tolerance");

  ConditionalExpectation ce;
  for (const Matrix& p : partition.projections) {
    double w = (state.rho * p).trace().real();
    if (w <= tol::weight_floor)
      fail("NotCompatible",
           "cond_exp: partition weight " + std::to_string(w) + " below floor");
    ce.weights_.push_back(w);
  }
  ce.partition_ = std::move(partition);
  ce.state_ = std::move(state);
  ce.mod_residual_ = rep.max_commutator;
  return ce;
}

Matrix ConditionalExpectation::apply(const Matrix& x) const {
  require_same_dim(state_.rho, x, "cond_exp");
  Matrix out = Matrix::Zero(partition_.dim, partition_.dim);
  for (size_t k = 0; k < partition_.projections.size(); ++k) {
    const Matrix& p = partition_.projections[k];
    Complex num = (state_.rho * p * x * p).trace();
    out += (num / weights_[k]) * p;
  }
  return out;
}

double tower_check(const std::vector<ConditionalExpectation>& ces, int samples,
                   Rng& rng) {
  if (ces.empty()) return 0.0;
  const int dim = ces.front().dim();
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    Matrix x = random_hermitian(dim, rng);
    for (size_t s = 0; s < ces.size(); ++s)
      for (size_t t = s; t < ces.size(); ++t) {
        Matrix lhs = ces[s](ces[t](x));
        Matrix rhs = ces[s](x);
        worst = std::max(worst, op_norm(lhs - rhs));
      }
  }
  return worst;
}

double l2_orthogonality_check(const ConditionalExpectation& ce, const Matrix& x,
                              int samples, Rng& rng) {
  Matrix diff = x - ce(x);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    Matrix a = Matrix::Zero(ce.dim(), ce.dim());
    for (const Matrix& p : ce.partition().projections)
      a += Complex(g(rng), g(rng)) * p;
    worst = std::max(worst, std::abs(gns_inner(ce.state(), diff, a)));
  }
  return worst;
}

MseDecomposition mse_decomposition(const ConditionalExpectation& ce,
                                   const Matrix& r, const Matrix& a) {
  require_hermitian(r, "mse_decomposition: R");
  require_hermitian(a, "mse_decomposition: A");
  MembershipResult mem = element_in_subalgebra(a, ce.partition());
  if (!mem.member)
    fail("PredictorOutsideAlgebra",
         "mse_decomposition: predictor residual " + std::to_string(mem.residual));

  Matrix er = ce(r);
  Matrix innovation = r - er;
  MseDecomposition out;
  out.total = ce((r - a) * (r - a));
  out.innovation_term = ce(innovation * innovation);
  out.bias_term = (a - er) * (a - er);
  out.residual = op_norm(out.total - out.innovation_term - out.bias_term);
  return out;
}

BestPredictor best_predictor(const ConditionalExpectation& ce, const Matrix& r) {
  require_hermitian(r, "best_predictor: R");
  BestPredictor out;
  out.predictor = ce(r);
  Matrix innovation = r - out.predictor;
  out.minimal_mse = op_norm(ce(innovation * innovation));
  return out;
}

double mse_of_predictor(const ConditionalExpectation& ce, const Matrix& r,
                        const Matrix& a) {
  return op_norm(ce((r - a) * (r - a)));
}

}  // namespace opalg
