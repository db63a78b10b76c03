#include <doctest.h>

#include <cmath>

#include "opalg/demo_models.hpp"
#include "opalg/pricing.hpp"

using namespace opalg;

namespace {

PricingSystem demo_system() {
  DemoMarket market = demo_two_block_market();
  return PricingSystem::make(market.model, market.state);
}

}  // namespace

TEST_CASE("symmetric_discount basics") {
  PricingSystem ps = demo_system();
  Rng rng(61);
  Matrix x = random_hermitian(4, rng);

  // B = I at time 0: unchanged.
  CHECK(op_norm(symmetric_discount(ps, x, 0) - x) < 1e-13);
  // X = B: identity.
  const Matrix& b1 = ps.numeraire_at(1);
  CHECK(op_norm(symmetric_discount(ps, b1, 1) - Matrix::Identity(4, 4)) < 1e-12);
  // Hermitian in, Hermitian out.
  CHECK(herm_residual(symmetric_discount(ps, x, 1)) < 1e-12);
}

TEST_CASE("diagonal symmetric discount is entrywise division") {
  DemoMarket market = demo_diagonal_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Matrix x = Matrix::Zero(4, 4);
  x(0, 0) = 2.0;
  x(1, 1) = 3.0;
  x(2, 2) = 5.0;
  x(3, 3) = 7.0;
  Matrix d = symmetric_discount(ps, x, 2);
  const Matrix& b = ps.numeraire_at(2);
  for (int i = 0; i < 4; ++i)
    CHECK(d(i, i).real() ==
          doctest::Approx(x(i, i).real() / b(i, i).real()).epsilon(1e-12));
}

TEST_CASE("pricing_operator outputs live in the information algebra") {
  // Non-terminal times only: at the terminal time Pi is the identity on M.
  DemoMarket market = demo_diagonal_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(62);
  Matrix x = random_hermitian(4, rng);
  for (size_t t = 0; t + 1 < ps.model().filtration.steps(); ++t) {
    PricingResult res = pricing_operator(ps, x, t);
    CHECK(element_in_subalgebra(res.value, ps.model().filtration.partitions[t])
              .member);
    CHECK(element_in_subalgebra(res.discounted,
                                ps.model().filtration.partitions[t])
              .member);
  }
}

TEST_CASE("pricing_operator equals cond_exp when B = I") {
  DemoMarket market = demo_two_block_market();
  market.model.filtration.numeraire[1] = Matrix::Identity(4, 4);
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(63);
  Matrix x = random_hermitian(4, rng);
  CHECK(op_norm(pricing_operator(ps, x, 0).value - ps.ce_at(0)(x)) < 1e-12);
}

TEST_CASE("numeraire normalization Pi_t(B_T) = B_t and unit reporting") {
  PricingSystem ps = demo_system();
  const Matrix& b_T = ps.numeraire_at(1);
  PricingResult res = pricing_operator(ps, b_T, 0);
  CHECK(op_norm(res.value - ps.numeraire_at(0)) < 1e-11);
  CHECK(op_norm(res.discounted - Matrix::Identity(4, 4)) < 1e-11);
}

TEST_CASE("terminal time is the identity") {
  PricingSystem ps = demo_system();
  Rng rng(64);
  Matrix x = random_hermitian(4, rng);
  CHECK(op_norm(pricing_operator(ps, x, 1).value - x) < 1e-13);
}

TEST_CASE("commutative model matches the classical conditional expectation") {
  BinomialDemo demo = demo_binomial_market();
  PricingSystem ps = PricingSystem::make(demo.model, demo.state);

  // Classical oracle: atom-weighted averages of B_T^{-1} x on each node,
  // times B_t.
  Matrix x = Matrix::Zero(4, 4);
  x(0, 0) = 3.0;
  x(1, 1) = 1.0;
  x(2, 2) = 4.0;
  x(3, 3) = 1.5;
  double b_T = std::exp(demo.rate * 2.0);
  double b_1 = std::exp(demo.rate * 1.0);

  PricingResult res = pricing_operator(ps, x, 1);
  double up = b_1 * 0.5 * (3.0 + 1.0) / b_T;
  double down = b_1 * 0.5 * (4.0 + 1.5) / b_T;
  CHECK(res.value(0, 0).real() == doctest::Approx(up).epsilon(1e-12));
  CHECK(res.value(1, 1).real() == doctest::Approx(up).epsilon(1e-12));
  CHECK(res.value(2, 2).real() == doctest::Approx(down).epsilon(1e-12));
  CHECK(res.value(3, 3).real() == doctest::Approx(down).epsilon(1e-12));
}

TEST_CASE("verify_pricing_properties on demo markets") {
  for (DemoMarket market :
       {demo_diagonal_market(), demo_two_block_market(), demo_cq_market()}) {
    PricingSystem ps = PricingSystem::make(market.model, market.state);
    Rng rng(65);
    for (size_t t = 0; t + 1 < ps.model().filtration.steps(); ++t) {
      PricingPropertyReport rep = verify_pricing_properties(ps, t, 20, rng);
      CHECK(rep.cp_choi_psd);
      CHECK(rep.choi_min_eigenvalue >= -1e-10);
      CHECK(rep.bimodularity_residual < 1e-10);
      CHECK(rep.normalization_residual < 1e-10);
      CHECK(rep.unitality_residual < 1e-10);
    }
  }
}

TEST_CASE("pricing positivity on PSD inputs") {
  PricingSystem ps = demo_system();
  Rng rng(66);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix p = random_psd(4, rng);
    CHECK(psd_check(pricing_operator(ps, p, 0).value, 1e-10));
  }
}

TEST_CASE("time consistency across the diagonal market") {
  DemoMarket market = demo_diagonal_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(67);
  Matrix x = random_hermitian(4, rng);
  for (size_t s = 0; s < 3; ++s)
    for (size_t t = s; t < 3; ++t) {
      TimeConsistencyReport rep = time_consistency_check(ps, x, s, t);
      CHECK(rep.operator_residual < 1e-10);
      CHECK(rep.martingale_residual < 1e-10);
    }
  CHECK_THROWS_WITH_AS(time_consistency_check(ps, x, 2, 1),
                       doctest::Contains("BadTimePair"), Error);
}

TEST_CASE("time consistency composes along triples") {
  DemoMarket market = demo_diagonal_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(72);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x = random_hermitian(4, rng);
    double r_su = time_consistency_check(ps, x, 0, 2).operator_residual;
    double r_st = time_consistency_check(ps, x, 0, 1).operator_residual;
    double r_tu = time_consistency_check(ps, x, 1, 2).operator_residual;
    CHECK(r_su <= r_st + r_tu + 1e-10);
  }
}

TEST_CASE("truncation martingale holds on the binomial demo at all levels") {
  BinomialDemo demo = demo_binomial_market();
  PricingSystem ps = PricingSystem::make(demo.model, demo.state);
  CHECK(truncation_martingale_check(ps, demo.process) < 1e-12);
}

TEST_CASE("constant process is a truncation martingale when B = I") {
  AlgebraModel model =
      build_cq_model(2, 1, {{{0, 1}}, {{0}, {1}}});
  DensityState state = make_state(Matrix(0.5 * Matrix::Identity(2, 2)));
  PricingSystem ps = PricingSystem::make(model, state);
  ObservableProcess process(2, Matrix(1.4 * Matrix::Identity(2, 2)));
  CHECK(truncation_martingale_check(ps, process) < 1e-13);
}

TEST_CASE("drifted process is flagged with the known gap") {
  DriftedBinomialDemo demo = demo_drifted_binomial();
  PricingSystem ps = PricingSystem::make(demo.base.model, demo.base.state);
  double gap = truncation_martingale_check(ps, demo.drifted);
  CHECK(gap == doctest::Approx(demo.expected_gap).epsilon(1e-10));
}

TEST_CASE("process outside the algebra is rejected") {
  BinomialDemo demo = demo_binomial_market();
  PricingSystem ps = PricingSystem::make(demo.model, demo.state);
  ObservableProcess bad = demo.process;
  Rng rng(68);
  bad[0] = random_hermitian(4, rng);  // time-0 algebra is trivial
  CHECK_THROWS_WITH_AS(truncation_martingale_check(ps, bad),
                       doctest::Contains("ProcessOutsideAlgebra"), Error);
}

TEST_CASE("truncated claim identity on the binomial demo") {
  BinomialDemo demo = demo_binomial_market();
  PricingSystem ps = PricingSystem::make(demo.model, demo.state);
  // Ladder levels outside the discounted band (1, 2); a level cutting a
  // conditional support would break the truncation-stable property itself.
  for (double level : {1.0, 2.0, 8.0})
    for (size_t t = 0; t < 3; ++t)
      CHECK(truncated_claim_identity(ps, demo.process, level, t) < 1e-11);
}

TEST_CASE("prediction_operator matches pricing under the pricing state") {
  DemoMarket market = demo_two_block_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(69);
  Matrix x = random_hermitian(4, rng);
  PricingResult via_pricing = pricing_operator(ps, x, 0);
  PricingResult via_prediction =
      prediction_operator(market.model, market.state, x, 0);
  CHECK(op_norm(via_pricing.value - via_prediction.value) < 1e-12);

  // Pi^rho(B_T) = B_t under any compatible reference state.
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 0.4;
  rho(1, 1) = 0.1;
  rho(2, 2) = 0.3;
  rho(3, 3) = 0.2;
  PricingResult on_numeraire = prediction_operator(
      market.model, make_state(rho), market.model.filtration.numeraire[1], 0);
  CHECK(op_norm(on_numeraire.value - market.model.filtration.numeraire[0]) <
        1e-11);
}

TEST_CASE("trivial partition prediction is a scalar") {
  DemoMarket market = demo_two_block_market();
  Rng rng(70);
  Matrix x = random_hermitian(4, rng);
  PricingResult res = prediction_operator(market.model, market.state, x, 0);
  Matrix xbar = symmetric_discount(
      PricingSystem::make(market.model, market.state), x, 1);
  Matrix expected = expect(market.state, xbar) * Matrix::Identity(4, 4);
  CHECK(op_norm(res.value - expected) < 1e-12);
}

TEST_CASE("price0 normalization, positivity, classical reduction") {
  DemoMarket market = demo_diagonal_market();
  const Matrix& b_T = market.model.filtration.numeraire[2];
  CHECK(price0(market.state, b_T, b_T) == doctest::Approx(1.0));

  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial)
    CHECK(price0(market.state, random_psd(4, rng), b_T) >= -1e-12);

  Matrix x = Matrix::Zero(4, 4);
  x(0, 0) = 2.0;
  x(1, 1) = 1.0;
  x(2, 2) = 0.5;
  x(3, 3) = 3.0;
  double classical = 0.0;
  const Matrix& rho = market.state.rho;
  for (int i = 0; i < 4; ++i)
    classical += rho(i, i).real() * x(i, i).real() / b_T(i, i).real();
  CHECK(price0(market.state, x, b_T) == doctest::Approx(classical).epsilon(1e-12));
}

TEST_CASE("singular numeraires and bad time indices are refused") {
  DemoMarket market = demo_diagonal_market();
  Matrix singular = Matrix::Zero(4, 4);
  singular(0, 0) = 1.0;
  singular(1, 1) = 1.0;
  singular(2, 2) = 1.0;  // one zero eigenvalue
  CHECK_THROWS_WITH_AS(price0(market.state, Matrix(Matrix::Identity(4, 4)), singular),
                       doctest::Contains("SingularNumeraire"), Error);

  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(73);
  Matrix x = random_hermitian(4, rng);
  CHECK_THROWS_WITH_AS(pricing_operator(ps, x, 9),
                       doctest::Contains("BadTimePair"), Error);
  CHECK_THROWS_WITH_AS(expect(market.state, Matrix(Matrix::Identity(3, 3))),
                       doctest::Contains("DimMismatch"), Error);
}

TEST_CASE("incompatible state is refused by the pricing system") {
  DemoMarket market = demo_two_block_market();
  Matrix off = Matrix::Zero(4, 4);
  off.block(0, 0, 2, 2) << 0.3, 0.0, 0.0, 0.2;
  off.block(2, 2, 2, 2) << 0.3, 0.0, 0.0, 0.2;
  off(0, 2) = 0.1;  // couples the two blocks
  off(2, 0) = 0.1;
  CHECK_THROWS_WITH_AS(PricingSystem::make(market.model, make_state(off)),
                       doctest::Contains("NotCompatible"), Error);
}
