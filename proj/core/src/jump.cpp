#include "opalg/jump.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "opalg/linalg.hpp"
#include "opalg/random.hpp"

namespace opalg {

double LatticeGrid::price_site(int k) const { return std::exp(log_site(k)); }

JumpModel make_jump_model(double dx, std::map<int, double> gamma, double r) {
  if (dx <= 0) fail("DimMismatch", "jump model: dx must be positive");
  for (const auto& [a, g] : gamma)
    if (g < 0)
      fail("DimMismatch",
           "jump model: negative intensity at alpha = " + std::to_string(a));
  return JumpModel{dx, std::move(gamma), r};
}

double psi(const JumpModel& model, double u) {
  double s = 0.0;
  for (const auto& [a, g] : model.gamma) s += g * std::expm1(u * a * model.dx);
  return s;
}

JumpModel calibrate_rn(const std::map<int, double>& shape, double dx, double r) {
  if (r <= 0) fail("NotCalibratable", "calibrate_rn: r must be positive");
  JumpModel raw = make_jump_model(dx, shape, r);
  double psi1 = psi(raw, 1.0);
  if (psi1 <= 0)
    fail("NotCalibratable",
         "calibrate_rn: shape has psi(1) = " + std::to_string(psi1));
  double scale = r / psi1;
  for (auto& [a, g] : raw.gamma) g *= scale;
  return raw;
}

SeriesPrice series_price(const JumpModel& model, const Payoff& payoff,
                         double tau, double s, double tail_tol, int term_cap) {
  if (tau < 0) fail("BadTimePair", "series_price: tau must be >= 0");
  const double lambda = model.total_intensity();
  const double discount = std::exp(-model.r * tau);

  SeriesPrice out;
  if (tau == 0.0 || lambda == 0.0) {
    out.value = discount * payoff(s);
    out.terms_used = 1;
    return out;
  }

  // Normalized jump pmf, convolved once per term; Poisson weights are
  // accumulated iteratively so nothing overflows.
  std::map<int, double> jump_pmf;
  for (const auto& [a, g] : model.gamma)
    if (g > 0) jump_pmf[a] = g / lambda;

  std::map<int, double> displacement;  // pmf of the n-jump displacement
  displacement[0] = 1.0;

  const double mean_jumps = lambda * tau;
  double poisson = std::exp(-mean_jumps);
  double cumulative = 0.0;
  double value = 0.0;
  double payoff_sup = 0.0;

  auto payoff_at = [&](int k) {
    double v = payoff(s * std::exp(k * model.dx));
    payoff_sup = std::max(payoff_sup, std::abs(v));
    return v;
  };

  for (int n = 0; n <= term_cap; ++n) {
    double slice = 0.0;
    for (const auto& [k, p] : displacement) slice += p * payoff_at(k);
    value += poisson * slice;
    cumulative += poisson;
    out.terms_used = n + 1;

    double tail = std::max(0.0, 1.0 - cumulative);
    out.tail_bound = discount * std::max(payoff_sup, 1e-300) * tail;
    if (out.tail_bound <= tail_tol && n >= 1) break;
    if (n == term_cap)
      fail("TailNotConverged",
           "series_price: tail bound " + std::to_string(out.tail_bound) +
               " after " + std::to_string(term_cap) + " terms",
           ErrorClass::numerical);

    // Convolve with one more jump.
    std::map<int, double> next;
    for (const auto& [k, p] : displacement)
      for (const auto& [a, q] : jump_pmf) next[k + a] += p * q;
    displacement.swap(next);
    poisson *= mean_jumps / double(n + 1);
  }
  out.value = discount * value;
  return out;
}

LatticeGrid default_grid(const JumpModel& model, double tau, double s,
                         int extra_margin) {
  const double mean_jumps = model.total_intensity() * tau;
  int jumps = int(std::ceil(mean_jumps + 8.0 * std::sqrt(std::max(mean_jumps, 1.0))));
  int width = model.max_jump() * jumps + extra_margin;
  return LatticeGrid{std::log(s), model.dx, width};
}

RMatrix windowed_generator(const JumpModel& model, const LatticeGrid& grid) {
  const int n = grid.size();
  const double lambda = model.total_intensity();
  RMatrix gen = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    gen(i, i) = -lambda;
    for (const auto& [a, g] : model.gamma) {
      int j = i + a;
      if (j >= 0 && j < n) gen(i, j) += g;
    }
  }
  return gen;
}

namespace {

// Chernoff bound on P(Poisson(m) >= k).
double poisson_tail(double mean, double k) {
  if (!std::isfinite(k)) return 0.0;
  if (k <= mean) return 1.0;
  if (mean <= 0) return 0.0;
  // exp(-m) (e m / k)^k
  double log_tail = -mean + k * (1.0 + std::log(mean / k));
  return std::exp(log_tail);
}

}  // namespace

GridPrice expm_price(const JumpModel& model, const Payoff& payoff, double tau,
                     const LatticeGrid& grid, double leak_tol) {
  if (tau < 0) fail("BadTimePair", "expm_price: tau must be >= 0");
  const int n = grid.size();

  GridPrice out;
  out.grid = grid;
  out.values.resize(n);

  double mean_jumps = model.total_intensity() * tau;
  double reach = model.max_jump() > 0
                     ? double(grid.half_width) / double(model.max_jump())
                     : std::numeric_limits<double>::infinity();
  out.leak_bound = poisson_tail(mean_jumps, reach);
  if (out.leak_bound > leak_tol)
    fail("WindowTooNarrow",
         "expm_price: window leak bound " + std::to_string(out.leak_bound),
         ErrorClass::numerical);

  RVector phi(n);
  for (int k = -grid.half_width; k <= grid.half_width; ++k)
    phi(k + grid.half_width) = payoff(grid.price_site(k));

  if (tau == 0.0) {
    out.values = phi;
    out.at_center = phi(grid.half_width);
    return out;
  }

  RMatrix gen = windowed_generator(model, grid);
  MatExpOptions opts;
  opts.check_residual = false;  // stiff generators: exp(-tau L) overflows
  RMatrix prop = mat_exp(RMatrix(tau * gen), opts);
  out.values = std::exp(-model.r * tau) * (prop * phi);
  out.at_center = out.values(grid.half_width);
  return out;
}

GridPrice expm_price(const JumpModel& model, const Payoff& payoff, double tau,
                     double s) {
  return expm_price(model, payoff, tau, default_grid(model, tau, s));
}

double backward_residual(const JumpModel& model, const Payoff& payoff,
                         double maturity, int time_steps,
                         const LatticeGrid& grid) {
  if (time_steps < 2) fail("BadTimePair", "backward_residual: need >= 2 steps");
  const int n = grid.size();
  const double dt = maturity / time_steps;

  RMatrix gen = windowed_generator(model, grid);
  MatExpOptions opts;
  opts.check_residual = false;
  RMatrix step = mat_exp(RMatrix(dt * (gen - model.r * RMatrix::Identity(n, n))),
                         opts);

  RVector phi(n);
  for (int k = -grid.half_width; k <= grid.half_width; ++k)
    phi(k + grid.half_width) = payoff(grid.price_site(k));

  // Surfaces V(t_i, .) walked backwards from maturity; V(T) = phi.
  std::vector<RVector> surface(size_t(time_steps) + 1);
  surface[size_t(time_steps)] = phi;
  for (int i = time_steps - 1; i >= 0; --i)
    surface[size_t(i)] = step * surface[size_t(i) + 1];

  // Residual of dV/dt + L V - r V at interior times, interior sites.
  const int margin = std::max(grid.half_width / 2, model.max_jump());
  double worst = 0.0;
  for (int i = 1; i < time_steps; ++i) {
    RVector dv = (surface[size_t(i) + 1] - surface[size_t(i) - 1]) / (2.0 * dt);
    RVector res = dv + gen * surface[size_t(i)] - model.r * surface[size_t(i)];
    for (int k = margin; k < n - margin; ++k)
      worst = std::max(worst, std::abs(res(k)));
  }
  return worst;
}

namespace {

// Adaptive Simpson quadrature.
double simpson(const RateFn& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const RateFn& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    fail("QuadratureFailure", "rate function not finite on the interval",
         ErrorClass::numerical);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double result = simpson(f, a, b, fa, fm, fb, whole, tol, 48);
  if (!std::isfinite(result))
    fail("QuadratureFailure", "discount integral did not converge",
         ErrorClass::numerical);
  return result;
}

}  // namespace

WkbDiscount wkb_discount(const RateFn& rate, double rate_bound,
                         double rate_slope_bound, double t, double maturity,
                         double eps) {
  if (maturity < t) fail("BadTimePair", "wkb_discount: need t <= T");
  WkbDiscount out;
  double integral = integrate(rate, t, maturity);
  out.exact = std::exp(-integral);
  out.frozen = std::exp(-rate(t) * (maturity - t));
  out.delta = out.exact / out.frozen - 1.0;
  double span = maturity - t;
  out.bound = std::exp(rate_bound * span) * 0.5 * eps * rate_slope_bound * span * span;
  out.within_bound = std::abs(out.delta) <= out.bound + 1e-14;
  return out;
}

WkbValueGap wkb_value_gap(const JumpModel& model, const Payoff& payoff,
                          double payoff_bound, const RateFn& rate,
                          double rate_bound, double rate_slope_bound, double t,
                          double maturity, double eps, double s) {
  WkbDiscount disc = wkb_discount(rate, rate_bound, rate_slope_bound, t, maturity, eps);
  // Deterministic rates factor out of the expectation, so the two prices
  // share the undiscounted semigroup value.
  JumpModel undiscounted = model;
  undiscounted.r = 0.0;
  SeriesPrice expectation =
      series_price(undiscounted, payoff, maturity - t, s, 1e-13);

  WkbValueGap out;
  out.term_structure_price = disc.exact * expectation.value;
  out.frozen_price = disc.frozen * expectation.value;
  out.gap = std::abs(out.term_structure_price - out.frozen_price);
  double span = maturity - t;
  out.bound = std::exp(rate_bound * span) * 0.5 * eps * rate_slope_bound * span *
              span * payoff_bound;
  out.within_bound = out.gap <= out.bound + 1e-14;
  return out;
}

IncrementMoments increment_moments(const JumpModel& model, double h) {
  if (h < 0) fail("BadTimePair", "increment_moments: h must be >= 0");
  IncrementMoments out;
  for (const auto& [a, g] : model.gamma) {
    out.mean += h * g * a * model.dx;
    out.variance += h * g * double(a) * double(a);
  }
  out.variance *= model.dx * model.dx;
  return out;
}

double error_floor(const JumpModel& model, double h) {
  return increment_moments(model, h).variance;
}

JumpModel diffusion_model(double sigma, double r, double dx) {
  if (sigma <= 0 || dx <= 0)
    fail("DimMismatch", "diffusion_model: sigma and dx must be positive");
  double mu = r - 0.5 * sigma * sigma;
  double base = sigma * sigma / (2.0 * dx * dx);
  double drift = mu / (2.0 * dx);
  double up = base + drift;
  double down = base - drift;
  if (up < 0 || down < 0)
    fail("StepTooLarge", "diffusion_model: dx = " + std::to_string(dx) +
                             " makes an intensity negative");
  return make_jump_model(dx, {{1, up}, {-1, down}}, r);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bs_digital_call(double s, double strike, double r, double sigma,
                       double maturity) {
  if (maturity <= 0) return s > strike ? 1.0 : (s == strike ? 0.5 : 0.0);
  double d2 = (std::log(s / strike) + (r - 0.5 * sigma * sigma) * maturity) /
              (sigma * std::sqrt(maturity));
  return std::exp(-r * maturity) * normal_cdf(d2);
}

double bs_quadrature_price(const Payoff& payoff, double s, double r,
                           double sigma, double maturity) {
  // 129-node Gauss-Legendre on z in [-12, 12] against the standard normal,
  // S_T = s exp((r - sigma^2/2) T + sigma sqrt(T) z).
  constexpr int kNodes = 129;
  static thread_local std::vector<double> nodes, weights;
  if (nodes.empty()) {
    // Golub-Welsch via the symmetric tridiagonal Jacobi matrix.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(kNodes, kNodes);
    for (int i = 1; i < kNodes; ++i) {
      double b = double(i) / std::sqrt(4.0 * i * i - 1.0);
      j(i, i - 1) = b;
      j(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    for (int i = 0; i < kNodes; ++i) {
      nodes.push_back(es.eigenvalues()(i));
      double w0 = es.eigenvectors()(0, i);
      weights.push_back(2.0 * w0 * w0);
    }
  }
  const double a = -12.0, b = 12.0;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double vol = sigma * std::sqrt(maturity);
  const double drift = (r - 0.5 * sigma * sigma) * maturity;
  double acc = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    double z = mid + half * nodes[size_t(i)];
    double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    acc += weights[size_t(i)] * half * density * payoff(s * std::exp(drift + vol * z));
  }
  return std::exp(-r * maturity) * acc;
}

Payoff digital_call_payoff(double strike) {
  return [strike](double s) {
    double rel = (s - strike) / strike;
    if (std::abs(rel) <= 1e-12) return 0.5;
    return s > strike ? 1.0 : 0.0;
  };
}

BsSweep bs_limit_sweep(double sigma, double r, double maturity,
                       const Payoff& payoff, const std::vector<double>& dx_list,
                       double s, std::optional<double> bs_override) {
  BsSweep sweep;
  double bs = bs_override ? *bs_override
                          : bs_quadrature_price(payoff, s, r, sigma, maturity);
  for (double dx : dx_list) {
    JumpModel model = diffusion_model(sigma, r, dx);
    GridPrice price = expm_price(model, payoff, maturity, s);
    BsSweepRow row;
    row.dx = dx;
    row.lattice_price = price.at_center;
    row.bs_price = bs;
    row.abs_error = std::abs(price.at_center - bs);
    sweep.rows.push_back(row);
  }

  int exceptions = 0;
  sweep.monotone = true;
  for (size_t i = 1; i < sweep.rows.size(); ++i) {
    if (sweep.rows[i].abs_error > sweep.rows[i - 1].abs_error) {
      if (sweep.rows[i].abs_error <= 1.05 * sweep.rows[i - 1].abs_error &&
          exceptions == 0)
        ++exceptions;
      else
        sweep.monotone = false;
    }
  }

  // Least-squares slope of log error against log dx.
  if (sweep.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const BsSweepRow& row : sweep.rows) {
      if (row.abs_error <= 0) continue;
      double x = std::log(row.dx), y = std::log(row.abs_error);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++n;
    }
    if (n >= 2) sweep.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return sweep;
}

JumpSimulation simulate_increments(const JumpModel& model, double h, long paths,
                                   unsigned long long seed) {
  if (paths <= 0) fail("DimMismatch", "simulate_increments: paths must be > 0");

  std::vector<int> alphas;
  std::vector<double> cumprob;
  double lambda = model.total_intensity();
  double acc = 0.0;
  for (const auto& [a, g] : model.gamma) {
    if (g <= 0) continue;
    acc += g / lambda;
    alphas.push_back(a);
    cumprob.push_back(acc);
  }

  const int threads = std::max(1, sweep_threads());
  const long chunk = 100000;
  const long chunks = (paths + chunk - 1) / chunk;

  std::vector<double> sum1(size_t(chunks), 0.0), sum2(size_t(chunks), 0.0),
      sum4(size_t(chunks), 0.0);

  auto run_chunk = [&](long c) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * (unsigned long long)(c + 1));
    std::poisson_distribution<long> pois(lambda * h);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    long count = std::min(chunk, paths - c * chunk);
    double s1 = 0, s2 = 0, s4 = 0;
    for (long i = 0; i < count; ++i) {
      long jumps = pois(rng);
      long displacement = 0;
      for (long j = 0; j < jumps; ++j) {
        double u = uni(rng);
        size_t idx = size_t(std::lower_bound(cumprob.begin(), cumprob.end(), u) -
                            cumprob.begin());
        if (idx >= alphas.size()) idx = alphas.size() - 1;
        displacement += alphas[idx];
      }
      double ret = model.dx * double(displacement);
      s1 += ret;
      s2 += ret * ret;
      s4 += ret * ret * ret * ret;
    }
    sum1[size_t(c)] = s1;
    sum2[size_t(c)] = s2;
    sum4[size_t(c)] = s4;
  };

  if (threads == 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (long c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
          run_chunk(c);
      });
    for (std::thread& th : pool) th.join();
  }

  double s1 = 0, s2 = 0, s4 = 0;
  for (long c = 0; c < chunks; ++c) {
    s1 += sum1[size_t(c)];
    s2 += sum2[size_t(c)];
    s4 += sum4[size_t(c)];
  }
  JumpSimulation out;
  out.paths = paths;
  out.mean = s1 / double(paths);
  out.mean_square = s2 / double(paths);
  double var_r2 = s4 / double(paths) - out.mean_square * out.mean_square;
  out.se_mean_square = std::sqrt(std::max(var_r2, 0.0) / double(paths));
  return out;
}

}  // namespace opalg
