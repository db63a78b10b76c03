#include "opalg/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opalg {

namespace {

Matrix inv_sqrt_numeraire(const Matrix& b) {
  double mineig = min_eigenvalue(b);
  if (mineig < tol::pos_floor)
    fail("SingularNumeraire",
         "numeraire min eigenvalue " + std::to_string(mineig) + " below floor");
  return func_calc(b, [](double x) { return 1.0 / std::sqrt(x); });
}

Matrix sqrt_numeraire(const Matrix& b) {
  double mineig = min_eigenvalue(b);
  if (mineig < tol::pos_floor)
    fail("SingularNumeraire",
         "numeraire min eigenvalue " + std::to_string(mineig) + " below floor");
  return func_calc(b, [](double x) { return std::sqrt(x); });
}

Matrix random_partition_element(const ProjectivePartition& partition, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a = Matrix::Zero(partition.dim, partition.dim);
  for (const Matrix& p : partition.projections) a += Complex(g(rng), g(rng)) * p;
  return a;
}

}  // namespace

PricingSystem PricingSystem::make(AlgebraModel model, DensityState pricing_state,
                                  double tower_tol, int tower_samples,
                                  unsigned long long seed) {
  PricingSystem ps;
  for (size_t i = 0; i < model.filtration.steps(); ++i) {
    try {
      ps.ces_.push_back(ConditionalExpectation::make(model.filtration.partitions[i],
                                                     pricing_state));
    } catch (const Error& e) {
      fail("NotCompatible", "pricing system at time index " + std::to_string(i) +
                                ": " + e.what());
    }
  }
  Rng rng(seed);
  ps.tower_residual_ = tower_check(ps.ces_, tower_samples, rng);
  if (ps.tower_residual_ > tower_tol)
    fail("NotCompatible", "pricing system: tower residual " +
                              std::to_string(ps.tower_residual_),
         ErrorClass::check_failed);
  ps.model_ = std::move(model);
  ps.state_ = std::move(pricing_state);
  return ps;
}

Matrix symmetric_discount(const PricingSystem& ps, const Matrix& x,
                          size_t time_index) {
  const Matrix& b = ps.numeraire_at(time_index);
  require_same_dim(b, x, "symmetric_discount");
  Matrix ib = inv_sqrt_numeraire(b);
  return ib * x * ib;
}

PricingResult pricing_operator(const PricingSystem& ps, const Matrix& x,
                               size_t time_index) {
  const size_t terminal = ps.terminal_index();
  if (time_index > terminal)
    fail("BadTimePair", "pricing_operator: time index out of range");
  Matrix xbar = symmetric_discount(ps, x, terminal);
  if (time_index == terminal) {
    // Terminal consistency: Pi_T is the identity on the market algebra.
    return PricingResult{x, xbar};
  }
  Matrix cond = ps.ce_at(time_index)(xbar);
  Matrix sb = sqrt_numeraire(ps.numeraire_at(time_index));
  return PricingResult{sb * cond * sb, cond};
}

PricingResult prediction_operator(const AlgebraModel& model,
                                  const DensityState& reference, const Matrix& x,
                                  size_t time_index) {
  const Filtration& f = model.filtration;
  if (time_index >= f.steps())
    fail("BadTimePair", "prediction_operator: time index out of range");
  Matrix ibT = inv_sqrt_numeraire(f.numeraire.back());
  Matrix xbar = ibT * x * ibT;
  ConditionalExpectation ce =
      ConditionalExpectation::make(f.partitions[time_index], reference);
  Matrix cond = ce(xbar);
  Matrix sb = sqrt_numeraire(f.numeraire[time_index]);
  return PricingResult{sb * cond * sb, cond};
}

PricingPropertyReport verify_pricing_properties(const PricingSystem& ps,
                                                size_t time_index, int samples,
                                                Rng& rng) {
  PricingPropertyReport rep;
  const int dim = ps.dim();
  const Matrix& b_T = ps.numeraire_at(ps.terminal_index());
  const Matrix& b_t = ps.numeraire_at(time_index);

  CpReport cp = cp_check(
      [&](const Matrix& m) { return pricing_operator(ps, m, time_index).value; },
      dim);
  rep.choi_min_eigenvalue = cp.choi_min_eigenvalue;
  rep.cp_choi_psd = cp.completely_positive;

  const ProjectivePartition& part = ps.model().filtration.partitions[time_index];
  for (int n = 0; n < samples; ++n) {
    Matrix a = random_partition_element(part, rng);
    Matrix b = random_partition_element(part, rng);
    Matrix x = random_hermitian(dim, rng);
    Matrix lhs = pricing_operator(ps, a * x * b, time_index).value;
    Matrix rhs = a * pricing_operator(ps, x, time_index).value * b;
    rep.bimodularity_residual =
        std::max(rep.bimodularity_residual, op_norm(lhs - rhs));
  }

  PricingResult on_numeraire = pricing_operator(ps, b_T, time_index);
  rep.normalization_residual = op_norm(on_numeraire.value - b_t);
  rep.unitality_residual =
      op_norm(on_numeraire.discounted - Matrix::Identity(dim, dim));
  rep.unit_payoff_value =
      pricing_operator(ps, Matrix::Identity(dim, dim), time_index).value;
  return rep;
}

TimeConsistencyReport time_consistency_check(const PricingSystem& ps,
                                             const Matrix& x, size_t s_index,
                                             size_t t_index) {
  if (s_index > t_index || t_index > ps.terminal_index())
    fail("BadTimePair", "time_consistency_check: need s <= t <= T");

  TimeConsistencyReport rep;
  Matrix pi_s = pricing_operator(ps, x, s_index).value;
  Matrix pi_t = pricing_operator(ps, x, t_index).value;

  Matrix ib_t = inv_sqrt_numeraire(ps.numeraire_at(t_index));
  Matrix inner = ib_t * pi_t * ib_t;
  Matrix sb_s = sqrt_numeraire(ps.numeraire_at(s_index));
  Matrix recomposed = s_index == ps.terminal_index()
                          ? pi_t
                          : Matrix(sb_s * ps.ce_at(s_index)(inner) * sb_s);
  rep.operator_residual = op_norm(pi_s - recomposed);

  Matrix v_s = pricing_operator(ps, x, s_index).discounted;
  Matrix v_t = pricing_operator(ps, x, t_index).discounted;
  Matrix ev_t = s_index == ps.terminal_index() ? v_t : ps.ce_at(s_index)(v_t);
  rep.martingale_residual = op_norm(v_s - ev_t);
  return rep;
}

namespace {

ObservableProcess discounted_process(const PricingSystem& ps,
                                     const ObservableProcess& process) {
  if (process.size() != ps.model().filtration.steps())
    fail("DimMismatch", "process length differs from filtration");
  ObservableProcess bar;
  for (size_t t = 0; t < process.size(); ++t) {
    require_hermitian(process[t], "process element");
    MembershipResult mem =
        element_in_subalgebra(process[t], ps.model().filtration.partitions[t]);
    if (!mem.member)
      fail("ProcessOutsideAlgebra",
           "process at time index " + std::to_string(t) + ": residual " +
               std::to_string(mem.residual));
    bar.push_back(symmetric_discount(ps, process[t], t));
  }
  return bar;
}

}  // namespace

double truncation_martingale_check(const PricingSystem& ps,
                                   const ObservableProcess& process,
                                   std::vector<double> levels) {
  ObservableProcess bar = discounted_process(ps, process);
  double sat = 0.0;
  for (const Matrix& s : bar) sat = std::max(sat, op_norm(s));
  if (levels.empty()) levels = {1.0, 2.0, 4.0, 8.0};
  levels.push_back(std::max(sat, 1e-6));

  double worst = 0.0;
  for (double n : levels)
    for (size_t s = 0; s < bar.size(); ++s) {
      Matrix clamped_s = clamp_trunc(bar[s], n);
      for (size_t t = s; t < bar.size(); ++t) {
        Matrix lhs = ps.ce_at(s)(clamp_trunc(bar[t], n));
        worst = std::max(worst, op_norm(lhs - clamped_s));
      }
    }
  return worst;
}

double truncated_claim_identity(const PricingSystem& ps,
                                const ObservableProcess& process, double level,
                                size_t time_index) {
  ObservableProcess bar = discounted_process(ps, process);
  const size_t terminal = ps.terminal_index();
  Matrix sb_T = sqrt_numeraire(ps.numeraire_at(terminal));
  Matrix claim = sb_T * clamp_trunc(bar[terminal], level) * sb_T;
  Matrix lhs = pricing_operator(ps, claim, time_index).value;
  Matrix sb_t = sqrt_numeraire(ps.numeraire_at(time_index));
  Matrix rhs = sb_t * clamp_trunc(bar[time_index], level) * sb_t;
  return op_norm(lhs - rhs);
}

double price0(const DensityState& state, const Matrix& x, const Matrix& b_terminal) {
  require_hermitian(x, "price0: X");
  Matrix ib = inv_sqrt_numeraire(b_terminal);
  return (state.rho * ib * x * ib).trace().real();
}

}  // namespace opalg
