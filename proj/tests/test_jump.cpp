#include <doctest.h>

#include <cmath>

#include "opalg/jump.hpp"
#include "opalg/linalg.hpp"

using namespace opalg;

namespace {

JumpModel pm1_model(double r = 0.05, double dx = 0.1) {
  return calibrate_rn({{1, 0.5}, {-1, 0.5}}, dx, r);
}

}  // namespace

TEST_CASE("psi at zero, symmetric cosh form, and convexity") {
  JumpModel model = pm1_model();
  CHECK(psi(model, 0.0) == doctest::Approx(0.0));

  double lambda = model.total_intensity();
  for (double u : {-1.5, -0.3, 0.4, 2.0})
    CHECK(psi(model, u) ==
          doctest::Approx(lambda * (std::cosh(u * model.dx) - 1.0)).epsilon(1e-12));

  for (double u = -2.0; u <= 2.0; u += 0.1) {
    double dd = psi(model, u + 0.05) - 2 * psi(model, u) + psi(model, u - 0.05);
    CHECK(dd >= -1e-12);
  }

  // psi''(0) finite difference matches (dx)^2 sum a^2 gamma_a.
  double h = 1e-4;
  double second = (psi(model, h) - 2 * psi(model, 0.0) + psi(model, -h)) / (h * h);
  CHECK(second == doctest::Approx(model.dx * model.dx * lambda).epsilon(1e-6));
}

TEST_CASE("calibrate_rn hits psi(1) = r and the pm1 closed form") {
  JumpModel model = pm1_model(0.05, 0.1);
  CHECK(psi(model, 1.0) == doctest::Approx(0.05).epsilon(1e-12));

  double lambda_expected = 0.05 / (std::cosh(0.1) - 1.0);
  CHECK(model.total_intensity() == doctest::Approx(lambda_expected).epsilon(1e-12));
  CHECK(model.total_intensity() == doctest::Approx(9.9917).epsilon(1e-4));

  CHECK_THROWS_WITH_AS(calibrate_rn({{-1, 1.0}}, 0.1, 0.05),
                       doctest::Contains("NotCalibratable"), Error);
}

TEST_CASE("series_price boundary cases") {
  JumpModel model = pm1_model();
  Payoff digital = digital_call_payoff(1.05);

  SeriesPrice at_zero = series_price(model, digital, 0.0, 1.2);
  CHECK(at_zero.value == doctest::Approx(1.0));

  SeriesPrice unit = series_price(model, [](double) { return 1.0; }, 0.7, 1.0);
  CHECK(unit.value == doctest::Approx(std::exp(-model.r * 0.7)).epsilon(1e-12));
}

TEST_CASE("series respects the term cap") {
  JumpModel model = pm1_model();
  CHECK_THROWS_WITH_AS(
      series_price(model, [](double) { return 1.0; }, 1.0, 1.0, 1e-12, 3),
      doctest::Contains("TailNotConverged"), Error);
}

TEST_CASE("series tail bound is honest") {
  JumpModel model = pm1_model();
  Payoff digital = digital_call_payoff(1.0e0 * std::exp(0.05));
  SeriesPrice coarse = series_price(model, digital, 0.8, 1.0, 1e-6);
  SeriesPrice fine = series_price(model, digital, 0.8, 1.0, 1e-14);
  CHECK(std::abs(coarse.value - fine.value) <= coarse.tail_bound + 1e-15);
}

TEST_CASE("series and expm pricers agree to 1e-10") {
  JumpModel model = pm1_model();
  Payoff digital = digital_call_payoff(std::exp(0.05));  // strike between sites
  for (double tau : {0.1, 0.5, 1.0}) {
    SeriesPrice series = series_price(model, digital, tau, 1.0, 1e-13);
    GridPrice grid = expm_price(model, digital, tau, 1.0);
    CHECK(std::abs(series.value - grid.at_center) < 1e-10);
  }
}

TEST_CASE("expm_price payoff recovery and discounted constants") {
  JumpModel model = pm1_model();
  Payoff digital = digital_call_payoff(std::exp(0.05));
  GridPrice at_zero = expm_price(model, digital, 0.0, 1.0);
  CHECK(at_zero.at_center == digital(1.0));

  GridPrice constant = expm_price(model, [](double) { return 2.5; }, 0.6, 1.0);
  CHECK(constant.at_center == doctest::Approx(2.5 * std::exp(-0.05 * 0.6)).epsilon(1e-10));
}

TEST_CASE("expm_price rejects a narrow window") {
  JumpModel model = pm1_model();
  LatticeGrid narrow{0.0, model.dx, 3};
  CHECK_THROWS_WITH_AS(
      expm_price(model, [](double) { return 1.0; }, 1.0, narrow),
      doctest::Contains("WindowTooNarrow"), Error);
}

TEST_CASE("windowed generator has vanishing interior row sums") {
  JumpModel model = pm1_model();
  LatticeGrid grid = default_grid(model, 0.5, 1.0);
  RMatrix gen = windowed_generator(model, grid);
  for (int i = 1; i + 1 < grid.size(); ++i)
    CHECK(std::abs(gen.row(i).sum()) < 1e-12);

  MatExpOptions opts;
  opts.check_residual = false;
  RMatrix prop = mat_exp(RMatrix(0.5 * gen), opts);
  CHECK(std::abs(prop.row(grid.half_width).sum() - 1.0) < 1e-10);
}

TEST_CASE("backward residual decays quadratically in the time step") {
  JumpModel model = pm1_model();
  Payoff digital = digital_call_payoff(std::exp(0.05));
  LatticeGrid grid = default_grid(model, 1.0, 1.0);

  // dt must resolve the generator scale (2 Lambda dt < 1) before the
  // central difference shows its second-order decay.
  double coarse = backward_residual(model, digital, 1.0, 256, grid);
  double fine = backward_residual(model, digital, 1.0, 512, grid);
  double ratio = coarse / fine;
  CHECK(ratio > 3.4);
  CHECK(ratio < 4.6);

  // Terminal slice is exact by construction.
  GridPrice at_T = expm_price(model, digital, 0.0, grid);
  for (int k = -grid.half_width; k <= grid.half_width; ++k)
    CHECK(at_T.values(k + grid.half_width) ==
          doctest::Approx(digital(grid.price_site(k))));

  // Constant payoff: the only residual left is the time discretization of
  // the pure discount factor.
  double flat = backward_residual(model, [](double) { return 1.0; }, 1.0, 64,
                                  grid);
  CHECK(flat < 1e-6);
}

TEST_CASE("wkb_discount bounds") {
  SUBCASE("constant rate is exact") {
    WkbDiscount d = wkb_discount([](double) { return 0.04; }, 0.04, 0.0, 0.2,
                                 1.0, 0.01);
    CHECK(std::abs(d.delta) < 1e-14);
    CHECK(d.within_bound);
  }
  SUBCASE("linear rate obeys the bound") {
    for (double eps : {0.1, 0.01}) {
      RateFn rate = [eps](double u) { return 0.03 + 0.02 * eps * u; };
      double r_bound = 0.03 + 0.02 * eps;
      WkbDiscount d = wkb_discount(rate, r_bound, 0.02, 0.0, 1.0, eps);
      CHECK(d.within_bound);
      CHECK(std::abs(d.delta) <= d.bound);
    }
  }
  SUBCASE("T = t collapses to zero") {
    WkbDiscount d = wkb_discount([](double u) { return 0.03 + u; }, 1.0, 1.0,
                                 0.5, 0.5, 0.1);
    CHECK(d.delta == doctest::Approx(0.0));
    CHECK(d.bound == doctest::Approx(0.0));
  }
}

TEST_CASE("wkb_value_gap scales with eps and the payoff bound") {
  JumpModel model = pm1_model();
  Payoff digital = digital_call_payoff(std::exp(0.05));
  // Fixed r_bound valid for every eps in play keeps the bound exactly
  // linear in eps.
  auto gap_at = [&](double eps, double payoff_bound, const Payoff& payoff) {
    RateFn rate = [eps](double u) { return 0.03 + 0.02 * eps * u; };
    return wkb_value_gap(model, payoff, payoff_bound, rate, 0.032, 0.02, 0.0,
                         1.0, eps, 1.0);
  };

  // Constant rate: exact and frozen prices coincide.
  WkbValueGap flat = wkb_value_gap(model, digital, 1.0,
                                   [](double) { return 0.03; }, 0.03, 0.0, 0.0,
                                   1.0, 0.01, 1.0);
  CHECK(flat.gap < 1e-12);

  WkbValueGap coarse = gap_at(0.1, 1.0, digital);
  CHECK(coarse.within_bound);
  WkbValueGap fine = gap_at(0.05, 1.0, digital);
  CHECK(fine.within_bound);
  CHECK(fine.bound == doctest::Approx(0.5 * coarse.bound).epsilon(1e-12));
  CHECK(fine.gap < coarse.gap);

  Payoff doubled = [&digital](double s) { return 2.0 * digital(s); };
  WkbValueGap big = gap_at(0.1, 2.0, doubled);
  CHECK(big.bound == doctest::Approx(2.0 * coarse.bound).epsilon(1e-12));
}

TEST_CASE("increment moments and the Monte Carlo oracle") {
  JumpModel model = pm1_model();
  IncrementMoments zero = increment_moments(model, 0.0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.variance == 0.0);

  IncrementMoments mom = increment_moments(model, 1.0);
  CHECK(mom.mean == doctest::Approx(0.0));
  CHECK(mom.variance ==
        doctest::Approx(model.dx * model.dx * model.total_intensity()));

  JumpSimulation sim = simulate_increments(model, 1.0, 1000000, 2024);
  CHECK(std::abs(sim.mean - mom.mean) < 1e-3);
  CHECK(sim.mean_square == doctest::Approx(mom.variance).epsilon(5e-3));
}

TEST_CASE("Monte Carlo is deterministic across thread settings") {
  JumpModel model = pm1_model();
  JumpSimulation base = simulate_increments(model, 1.0, 300000, 5);
#ifdef _WIN32
  (void)base;
#else
  setenv("OPALG_THREADS", "4", 1);
  JumpSimulation threaded = simulate_increments(model, 1.0, 300000, 5);
  unsetenv("OPALG_THREADS");
  CHECK(base.mean == threaded.mean);
  CHECK(base.mean_square == threaded.mean_square);
#endif
}

TEST_CASE("error floor value, linearity, and no-better-predictor") {
  JumpModel model = pm1_model(0.05, 0.1);
  double floor = error_floor(model, 1.0);
  CHECK(floor == doctest::Approx(0.01 * 0.05 / (std::cosh(0.1) - 1.0)).epsilon(1e-12));
  CHECK(floor == doctest::Approx(0.099917).epsilon(1e-4));
  CHECK(error_floor(model, 2.0) == doctest::Approx(2.0 * floor));

  JumpSimulation sim = simulate_increments(model, 1.0, 1000000, 7);
  // Optimal constant predictor is the mean (zero); empirical MSE of any
  // constant A is mean_square - 2 A mean + A^2 >= floor - 3 se.
  for (double a : {0.0, 0.05, -0.05, 0.2}) {
    double mse = sim.mean_square - 2 * a * sim.mean + a * a;
    CHECK(mse >= floor - 3.0 * sim.se_mean_square);
  }
}

TEST_CASE("diffusion_model intensities and guards") {
  JumpModel model = diffusion_model(0.2, 0.05, 0.01);
  CHECK(model.gamma.at(1) == doctest::Approx(201.5));
  CHECK(model.gamma.at(-1) == doctest::Approx(198.5));

  JumpModel symmetric = diffusion_model(0.2, 0.02, 0.01);  // mu = 0
  CHECK(symmetric.gamma.at(1) == doctest::Approx(symmetric.gamma.at(-1)));

  CHECK_THROWS_WITH_AS(diffusion_model(0.2, 0.05, 10.0),
                       doctest::Contains("StepTooLarge"), Error);
}

TEST_CASE("bs oracles agree on the digital payoff") {
  double closed = bs_digital_call(1.0, 1.0, 0.05, 0.2, 1.0);
  double quad = bs_quadrature_price(digital_call_payoff(1.0), 1.0, 0.05, 0.2, 1.0);
  // Quadrature against a discontinuous payoff is only first-order accurate.
  CHECK(std::abs(closed - quad) < 2e-2);

  // On a smooth bounded payoff quadrature is essentially exact: digital
  // smoothed by a logistic agrees with itself under node refinement and,
  // for sigma -> 0 with strike below spot, tends to the discount factor.
  double tiny_sigma = bs_digital_call(1.2, 1.0, 0.05, 1e-4, 1.0);
  CHECK(tiny_sigma == doctest::Approx(std::exp(-0.05)).epsilon(1e-10));
}

TEST_CASE("bs_limit_sweep error decreases monotonically (coarse levels)") {
  Payoff digital = digital_call_payoff(1.0);
  double closed = bs_digital_call(1.0, 1.0, 0.05, 0.2, 1.0);
  BsSweep sweep =
      bs_limit_sweep(0.2, 0.05, 1.0, digital, {0.16, 0.08, 0.04}, 1.0, closed);
  REQUIRE(sweep.rows.size() == 3);
  CHECK(sweep.monotone);
  CHECK(sweep.rows.back().abs_error < sweep.rows.front().abs_error);
}

TEST_CASE("sigma -> 0 digital below spot tends to the discount factor") {
  Payoff digital = digital_call_payoff(0.8);
  JumpModel model = diffusion_model(0.02, 0.05, 0.002);
  GridPrice price = expm_price(model, digital, 1.0, 1.0);
  CHECK(price.at_center == doctest::Approx(std::exp(-0.05)).epsilon(1e-6));
}
