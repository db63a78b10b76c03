#pragma once

#include <vector>

#include "opalg/cond_exp.hpp"
#include "opalg/types.hpp"

namespace opalg {

// A certified market: model + faithful pricing state + one state-preserving
// conditional expectation per filtration time, with the tower property
// verified at construction.
class PricingSystem {
 public:
  static PricingSystem make(AlgebraModel model, DensityState pricing_state,
                            double tower_tol = 1e-10, int tower_samples = 20,
                            unsigned long long seed = 1);

  const AlgebraModel& model() const { return model_; }
  const DensityState& pricing_state() const { return state_; }
  const std::vector<ConditionalExpectation>& cond_exps() const { return ces_; }
  const ConditionalExpectation& ce_at(size_t time_index) const {
    return ces_.at(time_index);
  }
  const Matrix& numeraire_at(size_t time_index) const {
    return model_.filtration.numeraire.at(time_index);
  }
  size_t terminal_index() const { return model_.filtration.steps() - 1; }
  double tower_residual() const { return tower_residual_; }
  int dim() const { return model_.dim(); }

 private:
  AlgebraModel model_;
  DensityState state_;
  std::vector<ConditionalExpectation> ces_;
  double tower_residual_ = 0.0;
};

// B^{-1/2} X B^{-1/2} for the numeraire at the given time index.
Matrix symmetric_discount(const PricingSystem& ps, const Matrix& x,
                          size_t time_index);

struct PricingResult {
  Matrix value;       // Pi_t(X)
  Matrix discounted;  // tilde Pi_t(X) = B_t^{-1/2} Pi_t(X) B_t^{-1/2}
};

// Pi_t(X) = B_t^{1/2} E_t(bar X) B_t^{1/2}, bar X = B_T^{-1/2} X B_T^{-1/2};
// at the terminal time Pi_T = id.
PricingResult pricing_operator(const PricingSystem& ps, const Matrix& x,
                               size_t time_index);

// Same algebra under an arbitrary modular-compatible reference state.
PricingResult prediction_operator(const AlgebraModel& model,
                                  const DensityState& reference, const Matrix& x,
                                  size_t time_index);

struct PricingPropertyReport {
  double choi_min_eigenvalue = 0.0;
  bool cp_choi_psd = false;
  double bimodularity_residual = 0.0;
  double normalization_residual = 0.0;  // ||Pi_t(B_T) - B_t||
  double unitality_residual = 0.0;      // ||tilde Pi_t(B_T) - I||
  Matrix unit_payoff_value;             // Pi_t(1), reported, not asserted
};

PricingPropertyReport verify_pricing_properties(const PricingSystem& ps,
                                                size_t time_index, int samples,
                                                Rng& rng);

struct TimeConsistencyReport {
  double operator_residual = 0.0;    // Pi_s vs B_s^{1/2} E_s(..) B_s^{1/2}
  double martingale_residual = 0.0;  // V_s vs E_s(V_t)
};

TimeConsistencyReport time_consistency_check(const PricingSystem& ps,
                                             const Matrix& x, size_t s_index,
                                             size_t t_index);

// Hermitian process with one element of span(partition(t)) per time.
using ObservableProcess = std::vector<Matrix>;

// max over s <= t and clamp levels of ||E_s(f_n(bar S_t)) - f_n(bar S_s)||.
// Levels default to {1, 2, 4, 8} plus the saturating level.
double truncation_martingale_check(const PricingSystem& ps,
                                   const ObservableProcess& process,
                                   std::vector<double> levels = {});

// Residual of Pi_t(B_T^{1/2} f_n(bar S_T) B_T^{1/2}) = B_t^{1/2} f_n(bar S_t) B_t^{1/2}.
double truncated_claim_identity(const PricingSystem& ps,
                                const ObservableProcess& process, double level,
                                size_t time_index);

// pi_0(X) = Tr(rho B_T^{-1/2} X B_T^{-1/2}).
double price0(const DensityState& state, const Matrix& x, const Matrix& b_terminal);

}  // namespace opalg
