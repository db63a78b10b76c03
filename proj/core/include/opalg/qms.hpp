#pragma once

#include <vector>

#include "opalg/cond_exp.hpp"
#include "opalg/types.hpp"

namespace opalg {

// Hamiltonian plus jump operators generating a quantum Markov semigroup in
// the Heisenberg picture.
struct GkslSystem {
  Matrix hamiltonian;
  std::vector<Matrix> lindblad_ops;

  int dim() const { return int(hamiltonian.rows()); }
};

GkslSystem make_gksl(Matrix hamiltonian, std::vector<Matrix> lindblad_ops);

// n^2 x n^2 matrix acting on column-stacked observables; X -> A X B maps to
// (B^T (x) A) vec(X).
class Superoperator {
 public:
  Superoperator() = default;
  explicit Superoperator(Matrix action, int dim)
      : action_(std::move(action)), dim_(dim) {}

  Matrix apply(const Matrix& x) const;
  // exp(t L) as a superoperator.
  Superoperator exp_scaled(double t) const;
  // Schroedinger-picture dual (adjoint for the HS inner product).
  Superoperator adjoint() const;

  const Matrix& action() const { return action_; }
  int dim() const { return dim_; }
  double norm() const;

 private:
  Matrix action_;
  int dim_ = 0;
};

// L(X) = i[H, X] + sum_j (V_j^* X V_j - 1/2 {V_j^* V_j, X}); L(I) = 0.
Superoperator gksl_generator(const GkslSystem& system);

Matrix semigroup_apply(const Superoperator& generator, double t, const Matrix& x);

struct SemigroupChecks {
  double unitality_residual = 0.0;
  double trace_preservation_residual = 0.0;
  double semigroup_law_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  bool completely_positive = false;
};

// An empty sample list means {0.1, 1, 10} / ||L|| (generator time scale).
SemigroupChecks semigroup_checks(const GkslSystem& system,
                                 std::vector<double> sample_times, Rng& rng);

// max |Tr(rho T_t(E_ij)) - Tr(rho E_ij)| over matrix units at sampled times;
// also reports the stationarity residual ||L^dagger(rho)||.
struct InvarianceReport {
  double unit_residual = 0.0;
  double generator_residual = 0.0;
};

InvarianceReport invariant_state_check(const GkslSystem& system,
                                       const DensityState& state,
                                       const std::vector<double>& sample_times);

// V_t(X_T) = e^{-r(T-t)} T_{T-t}(X_T).
Matrix semigroup_value(const GkslSystem& system, const Matrix& x_terminal,
                       double t, double maturity, double r);

// Central-difference residual of dV/dt + (L - r id)(V) = 0 on a uniform grid.
double backward_ode_residual(const GkslSystem& system, const Matrix& x_terminal,
                             double maturity, double r, int grid_steps);

// Pi_t(X_T) = e^{-r(T-t)} E_t(T_{T-t}(X_T)).
Matrix conditioned_value(const GkslSystem& system,
                         const ConditionalExpectation& ce,
                         const Matrix& x_terminal, double t, double maturity,
                         double r);

// max over random X of ||E_s(T_{t-s}(X)) - E_s(T_{t-s}(E_t(X)))||.
double markov_compat_check(const GkslSystem& system,
                           const ConditionalExpectation& ce_s,
                           const ConditionalExpectation& ce_t, double s, double t,
                           int samples, Rng& rng);

// Residual of Pi_s(X_T) = e^{-r(t-s)} E_s(T_{t-s}(Pi_t(X_T))); gated on the
// Markov-compatibility residual.
double dynamic_programming_check(const GkslSystem& system,
                                 const ConditionalExpectation& ce_s,
                                 const ConditionalExpectation& ce_t, double s,
                                 double t, const Matrix& x_terminal,
                                 double maturity, double r,
                                 double gate_tol = tol::dp_gate, int samples = 20,
                                 unsigned long long seed = 7);

}  // namespace opalg
