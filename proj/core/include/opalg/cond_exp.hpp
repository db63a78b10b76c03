#pragma once

#include <vector>

#include "opalg/algebra.hpp"
#include "opalg/random.hpp"
#include "opalg/states.hpp"
#include "opalg/types.hpp"

namespace opalg {

struct CompatibilityReport {
  bool compatible = false;
  double max_commutator = 0.0;
};

// State-preserving conditional expectation onto the abelian algebra spanned
// by a partition: E(X) = sum_k phi(P_k X P_k)/phi(P_k) P_k. Exists (and is
// built) only when the density matrix commutes with every projection.
class ConditionalExpectation {
 public:
  static ConditionalExpectation make(ProjectivePartition partition,
                                     DensityState state,
                                     double mod_tol = tol::modular);

  Matrix apply(const Matrix& x) const;
  Matrix operator()(const Matrix& x) const { return apply(x); }

  const ProjectivePartition& partition() const { return partition_; }
  const DensityState& state() const { return state_; }
  const std::vector<double>& weights() const { return weights_; }
  double compatibility_residual() const { return mod_residual_; }
  int dim() const { return partition_.dim; }

 private:
  ProjectivePartition partition_;
  DensityState state_;
  std::vector<double> weights_;  // phi(P_k), all > 0
  double mod_residual_ = 0.0;
};

CompatibilityReport modular_compatible(const DensityState& state,
                                       const ProjectivePartition& partition,
                                       double tolerance = tol::modular);

// max over random X and pairs s <= t of ||E_s(E_t(X)) - E_s(X)||.
double tower_check(const std::vector<ConditionalExpectation>& ces, int samples,
                   Rng& rng);

// max over random A in span(partition) of |<X - E(X), A>_phi|.
double l2_orthogonality_check(const ConditionalExpectation& ce, const Matrix& x,
                              int samples, Rng& rng);

struct MseDecomposition {
  Matrix total;            // E((R - A)^2)
  Matrix innovation_term;  // E(X^2), X = R - E(R)
  Matrix bias_term;        // (A - E(R))^2
  double residual = 0.0;   // ||total - innovation - bias||
};

MseDecomposition mse_decomposition(const ConditionalExpectation& ce,
                                   const Matrix& r, const Matrix& a);

struct BestPredictor {
  Matrix predictor;          // E(R)
  double minimal_mse = 0.0;  // ||E((R - E(R))^2)||
};

BestPredictor best_predictor(const ConditionalExpectation& ce, const Matrix& r);

double mse_of_predictor(const ConditionalExpectation& ce, const Matrix& r,
                        const Matrix& a);

}  // namespace opalg
