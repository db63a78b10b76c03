#include <doctest.h>

#include <cmath>

#include "opalg/arbitrage.hpp"
#include "opalg/random.hpp"

using namespace opalg;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Grid oracle over diagonal states diag(p, 1-p): the feasible p-interval
// for a diagonal cone under the delta floor.
struct GridOracle {
  double lo = 1.0, hi = 0.0;
};

GridOracle grid_feasible(const GainsCone& cone, double delta) {
  GridOracle out;
  for (double p = 0.0; p <= 1.0 + 1e-12; p += 1e-3) {
    if (p < delta - 1e-12 || 1.0 - p < delta - 1e-12) continue;
    bool ok = true;
    for (const Matrix& g : cone.generators)
      if (p * g(0, 0).real() + (1.0 - p) * g(1, 1).real() > 1e-12) ok = false;
    if (ok) {
      out.lo = std::min(out.lo, p);
      out.hi = std::max(out.hi, p);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("feasible cone diag(1,-1) at delta 0.1") {
  GainsCone cone = make_cone({diag2(1, -1)});
  SolverOptions opts;
  opts.delta = 0.1;
  SeparationResult res = find_pricing_state(cone, opts);

  CHECK(res.max_violation <= opts.feas_tol);
  CHECK(min_eigenvalue(res.state.rho) >= opts.delta - 1e-10);
  CHECK(std::abs(res.state.rho.trace().real() - 1.0) < 1e-10);

  // Solution p must sit inside the oracle interval [0.1, 0.5] within 1e-3.
  GridOracle oracle = grid_feasible(cone, opts.delta);
  double p = res.state.rho(0, 0).real();
  CHECK(p >= oracle.lo - 1e-3);
  CHECK(p <= oracle.hi + 1e-3);
}

TEST_CASE("infeasible cone diag(1,0) at delta 0.1") {
  GainsCone cone = make_cone({diag2(1, 0)});
  SolverOptions opts;
  opts.delta = 0.1;
  opts.max_iter = 5000;
  CHECK_THROWS_WITH_AS(find_pricing_state(cone, opts),
                       doctest::Contains("Infeasible"), Error);
}

TEST_CASE("empty cone returns the maximally mixed start") {
  GainsCone cone = make_cone({}, 3);
  SeparationResult res = find_pricing_state(cone);
  CHECK(op_norm(res.state.rho - Matrix::Identity(3, 3) / 3.0) < 1e-12);
  CHECK(res.iterations == 0);
}

TEST_CASE("delta 0 admits the boundary state for diag(1,0)") {
  GainsCone cone = make_cone({diag2(1, 0)});
  SolverOptions opts;  // delta = 0
  SeparationResult res = find_pricing_state(cone, opts);
  CHECK(res.max_violation <= opts.feas_tol);
  // The feasible set is {diag(0, 1)}: the solver must reach its vicinity.
  CHECK(res.state.rho(0, 0).real() < 1e-4);
}

TEST_CASE("na_certificate wraps both outcomes") {
  SolverOptions opts;
  opts.delta = 0.05;
  opts.max_iter = 5000;

  // Zero-drift binomial one-asset cone: G = S1 - S0 with risk-neutral
  // weights available.
  GainsCone fair = make_cone({diag2(0.5, -0.5)});
  NaCertificate ok = na_certificate(fair, opts);
  CHECK(ok.has_pricing_state);
  CHECK(ok.violation <= opts.feas_tol);

  // A PSD nonzero generator forces violation >= delta * Tr-direction.
  GainsCone bad = make_cone({diag2(1, 0)});
  NaCertificate no = na_certificate(bad, opts);
  CHECK_FALSE(no.has_pricing_state);
}

TEST_CASE("separation_consistency recomputes violations") {
  GainsCone cone = make_cone({diag2(1, -1), diag2(-0.5, 0.2)});
  SolverOptions opts;
  opts.delta = 0.05;
  SeparationResult res = find_pricing_state(cone, opts);
  CHECK(std::abs(separation_consistency(cone, res) - res.max_violation) < 1e-12);

  // Perturbing the state must show up in the recomputation.
  SeparationResult perturbed = res;
  Matrix bump = perturbed.state.rho;
  bump(0, 0) += 0.2;
  bump(1, 1) -= 0.2;
  perturbed.state.rho = bump;
  CHECK(separation_consistency(cone, perturbed) != doctest::Approx(res.max_violation));
}

TEST_CASE("cone scaling leaves feasibility unchanged and scales violations") {
  Rng rng(81);
  Matrix g = random_hermitian(3, rng);
  g -= (g.trace().real() / 3.0 + 0.2) * Matrix::Identity(3, 3);  // make feasible-ish
  GainsCone cone = make_cone({g});
  GainsCone scaled = make_cone({Matrix(3.0 * g)});
  SolverOptions opts;
  opts.delta = 0.05;

  SeparationResult res = find_pricing_state(cone, opts);
  SeparationResult res_scaled = find_pricing_state(scaled, opts);
  CHECK(res.max_violation <= opts.feas_tol);
  CHECK(res_scaled.max_violation <= opts.feas_tol);

  // Violations recomputed at the same state scale exactly.
  double v1 = separation_consistency(scaled, res);
  double v0 = separation_consistency(cone, res);
  CHECK(v1 == doctest::Approx(3.0 * v0).epsilon(1e-10));
}

TEST_CASE("dimension-1 blocks match an exhaustive simplex grid (dim 3)") {
  // Diagonal generators reduce to a linear program over the simplex.
  GainsCone cone = make_cone({
      [&] { Matrix m = Matrix::Zero(3, 3); m(0,0)=1; m(1,1)=-1; m(2,2)=0.2; return m; }(),
      [&] { Matrix m = Matrix::Zero(3, 3); m(0,0)=-0.3; m(1,1)=0.4; m(2,2)=-0.1; return m; }(),
  });
  SolverOptions opts;
  opts.delta = 0.02;
  SeparationResult res = find_pricing_state(cone, opts);

  // Exhaustive grid over the 2-simplex with step 1e-3 must contain a point
  // at least as feasible; and the solver state must be feasible on the grid
  // criteria as well.
  bool grid_has_feasible = false;
  for (double p0 = opts.delta; p0 <= 1.0 - 2 * opts.delta + 1e-12; p0 += 1e-3)
    for (double p1 = opts.delta; p0 + p1 <= 1.0 - opts.delta + 1e-12; p1 += 1e-3) {
      double p2 = 1.0 - p0 - p1;
      bool ok = true;
      for (const Matrix& g : cone.generators)
        if (p0 * g(0, 0).real() + p1 * g(1, 1).real() + p2 * g(2, 2).real() > 1e-9)
          ok = false;
      if (ok) grid_has_feasible = true;
    }
  CHECK(grid_has_feasible);
  CHECK(res.max_violation <= opts.feas_tol);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_WITH_AS(make_cone({}, 0), doctest::Contains("DimMismatch"), Error);
  GainsCone cone = make_cone({diag2(1, -1)});
  SolverOptions opts;
  opts.delta = 0.6;  // delta * dim >= 1
  CHECK_THROWS_WITH_AS(find_pricing_state(cone, opts),
                       doctest::Contains("DimMismatch"), Error);
}
