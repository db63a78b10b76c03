#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "opalg/types.hpp"

namespace opalg {

// Compound-Poisson lattice model for the log price: jumps of alpha*dx at
// intensity gamma_alpha, short rate r.
struct JumpModel {
  double dx = 0.0;
  std::map<int, double> gamma;  // alpha -> intensity, finite support
  double r = 0.0;

  double total_intensity() const {
    double s = 0.0;
    for (const auto& [a, g] : gamma) s += g;
    return s;
  }
  int max_jump() const {
    int m = 0;
    for (const auto& [a, g] : gamma)
      if (g > 0) m = std::max(m, std::abs(a));
    return m;
  }
};

JumpModel make_jump_model(double dx, std::map<int, double> gamma, double r);

// Cumulant exponent psi(u) = sum gamma_a (e^{u a dx} - 1).
double psi(const JumpModel& model, double u);

// Scale a nonnegative intensity shape so that psi(1) = r.
JumpModel calibrate_rn(const std::map<int, double>& shape, double dx, double r);

using Payoff = std::function<double(double)>;

struct SeriesPrice {
  double value = 0.0;
  int terms_used = 0;
  double tail_bound = 0.0;
};

// Compound-Poisson expansion of e^{-r tau} E[Phi(S_T)|S_t = s]; stops when
// the Poisson tail falls under tail_tol.
SeriesPrice series_price(const JumpModel& model, const Payoff& payoff,
                         double tau, double s, double tail_tol = 1e-12,
                         int term_cap = 10000);

// Finite window of lattice sites x0 + k dx, |k| <= half_width. Jumps that
// leave the window are absorbed at value zero.
struct LatticeGrid {
  double x0 = 0.0;  // log price at the center site
  double dx = 0.0;
  int half_width = 0;

  int size() const { return 2 * half_width + 1; }
  double log_site(int k) const { return x0 + k * dx; }
  double price_site(int k) const;
};

LatticeGrid default_grid(const JumpModel& model, double tau, double s,
                         int extra_margin = 4);

// Windowed generator matrix acting on lattice functions.
RMatrix windowed_generator(const JumpModel& model, const LatticeGrid& grid);

struct GridPrice {
  LatticeGrid grid;
  RVector values;  // value per site, index 0 = leftmost site
  double at_center = 0.0;
  double leak_bound = 0.0;
};

GridPrice expm_price(const JumpModel& model, const Payoff& payoff, double tau,
                     const LatticeGrid& grid, double leak_tol = tol::leak);
// Convenience overload: builds the default window centered at spot s.
GridPrice expm_price(const JumpModel& model, const Payoff& payoff, double tau,
                     double s);

// Max interior residual of dV/dt + L_S V - r V = 0 with central time
// differences over a uniform tau grid.
double backward_residual(const JumpModel& model, const Payoff& payoff,
                         double maturity, int time_steps,
                         const LatticeGrid& grid);

struct WkbDiscount {
  double exact = 0.0;   // exp(-int r)
  double frozen = 0.0;  // exp(-r(t)(T-t))
  double delta = 0.0;   // exact/frozen - 1
  double bound = 0.0;
  bool within_bound = false;
};

using RateFn = std::function<double(double)>;

WkbDiscount wkb_discount(const RateFn& rate, double rate_bound,
                         double rate_slope_bound, double t, double maturity,
                         double eps);

struct WkbValueGap {
  double gap = 0.0;
  double bound = 0.0;
  bool within_bound = false;
  double term_structure_price = 0.0;
  double frozen_price = 0.0;
};

WkbValueGap wkb_value_gap(const JumpModel& model, const Payoff& payoff,
                          double payoff_bound, const RateFn& rate,
                          double rate_bound, double rate_slope_bound, double t,
                          double maturity, double eps, double s);

struct IncrementMoments {
  double mean = 0.0;
  double variance = 0.0;
};

IncrementMoments increment_moments(const JumpModel& model, double h);

// Exact minimal mean-square prediction error h (dx)^2 sum a^2 gamma_a.
double error_floor(const JumpModel& model, double h);

// Nearest-neighbour scaling with gamma_pm = sigma^2/(2 dx^2) +- mu/(2 dx),
// mu = r - sigma^2/2.
JumpModel diffusion_model(double sigma, double r, double dx);

struct BsSweepRow {
  double dx = 0.0;
  double lattice_price = 0.0;
  double bs_price = 0.0;
  double abs_error = 0.0;
};

struct BsSweep {
  std::vector<BsSweepRow> rows;
  double fitted_order = 0.0;
  bool monotone = false;  // allows one 5% roundoff exception
};

// The Black-Scholes reference defaults to the 129-node quadrature oracle;
// pass a closed-form value (e.g. the digital formula) to override it.
BsSweep bs_limit_sweep(double sigma, double r, double maturity,
                       const Payoff& payoff, const std::vector<double>& dx_list,
                       double s, std::optional<double> bs_override = {});

// Black-Scholes oracles.
double normal_cdf(double x);
// Cash-or-nothing digital call, unit payout above the strike.
double bs_digital_call(double s, double strike, double r, double sigma,
                       double maturity);
// Gauss-Legendre quadrature of a bounded payoff against the lognormal
// terminal density (129 nodes).
double bs_quadrature_price(const Payoff& payoff, double s, double r,
                           double sigma, double maturity);

// Digital payoff with the midpoint convention at the strike (the lattice
// carries a probability atom there; one-sided conventions bias the price).
Payoff digital_call_payoff(double strike);

struct JumpSimulation {
  double mean = 0.0;
  double mean_square = 0.0;  // empirical E[R^2]
  double se_mean_square = 0.0;
  long paths = 0;
};

// Seeded Monte Carlo of the log return R = dx * sum(jumps) over horizon h;
// deterministic for a fixed seed regardless of OPALG_THREADS.
JumpSimulation simulate_increments(const JumpModel& model, double h, long paths,
                                   unsigned long long seed);

}  // namespace opalg
