#include "opalg/demo_models.hpp"

#include <cmath>

namespace opalg {

namespace {

Matrix diag4(double a, double b, double c, double d) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

Matrix proj_span(int dim, std::initializer_list<int> indices) {
  Matrix p = Matrix::Zero(dim, dim);
  for (int i : indices) p(i, i) = 1.0;
  return p;
}

}  // namespace

DemoMarket demo_diagonal_market() {
  const int dim = 4;
  std::vector<ProjectivePartition> partitions;
  partitions.push_back(validate_partition({Matrix::Identity(dim, dim)}));
  partitions.push_back(
      validate_partition({proj_span(dim, {0, 1}), proj_span(dim, {2, 3})}));
  partitions.push_back(validate_partition({proj_span(dim, {0}), proj_span(dim, {1}),
                                           proj_span(dim, {2}), proj_span(dim, {3})}));

  std::vector<Matrix> numeraire;
  numeraire.push_back(1.0 * Matrix::Identity(dim, dim));
  numeraire.push_back(1.05 * proj_span(dim, {0, 1}) + 1.02 * proj_span(dim, {2, 3}));
  numeraire.push_back(diag4(1.11, 1.09, 1.05, 1.03));

  Filtration filt = validate_filtration({0.0, 1.0, 2.0}, std::move(partitions),
                                        std::move(numeraire));
  AlgebraModel model = validate_model({1, 1, 1, 1}, std::move(filt));
  DensityState state = make_state(diag4(0.4, 0.3, 0.2, 0.1));
  return DemoMarket{std::move(model), std::move(state), "diagonal-dim4"};
}

DemoMarket demo_two_block_market() {
  const int dim = 4;
  std::vector<ProjectivePartition> partitions;
  partitions.push_back(validate_partition({Matrix::Identity(dim, dim)}));
  partitions.push_back(
      validate_partition({proj_span(dim, {0, 1}), proj_span(dim, {2, 3})}));

  std::vector<Matrix> numeraire;
  numeraire.push_back(1.0 * Matrix::Identity(dim, dim));
  numeraire.push_back(1.08 * proj_span(dim, {0, 1}) + 1.01 * proj_span(dim, {2, 3}));

  Filtration filt =
      validate_filtration({0.0, 1.0}, std::move(partitions), std::move(numeraire));
  AlgebraModel model = validate_model({2, 2}, std::move(filt));

  // Faithful block-diagonal state with genuinely off-diagonal blocks.
  Matrix rho = Matrix::Zero(dim, dim);
  rho.block(0, 0, 2, 2) << 0.35, Complex(0.05, 0.02), Complex(0.05, -0.02), 0.25;
  rho.block(2, 2, 2, 2) << 0.22, Complex(-0.03, 0.01), Complex(-0.03, -0.01), 0.18;
  DensityState state = make_state(rho);
  return DemoMarket{std::move(model), std::move(state), "two-block-dim4"};
}

DemoMarket demo_cq_market() {
  AlgebraModel model = build_cq_model(2, 2, {{{0, 1}}, {{0}, {1}}});
  // Numeraire: unit at time 0, per-atom rates at time 1.
  model.filtration.numeraire[1] =
      1.06 * proj_span(4, {0, 1}) + 1.02 * proj_span(4, {2, 3});

  // p (x) rho_q with a non-diagonal faithful qubit factor.
  Matrix rho_q(2, 2);
  rho_q << 0.6, Complex(0.1, 0.05), Complex(0.1, -0.05), 0.4;
  Matrix rho = Matrix::Zero(4, 4);
  rho.block(0, 0, 2, 2) = 0.7 * rho_q;
  rho.block(2, 2, 2, 2) = 0.3 * rho_q;
  DensityState state = make_state(rho);
  return DemoMarket{std::move(model), std::move(state), "cq-2x2"};
}

BinomialDemo demo_binomial_market() {
  // Additive two-period binomial on four path atoms. All discounted values
  // stay inside (1, 2), so clamping at the default levels is either the
  // identity or a constant on the reachable range.
  const double rate = 0.05;
  AlgebraModel model =
      build_cq_model(4, 1, {{{0, 1, 2, 3}}, {{0, 1}, {2, 3}}, {{0}, {1}, {2}, {3}}});
  for (size_t t = 0; t < model.filtration.steps(); ++t)
    model.filtration.numeraire[t] =
        std::exp(rate * model.filtration.times[t]) * Matrix::Identity(4, 4);

  DensityState state = make_state(0.25 * Matrix::Identity(4, 4));

  auto bump = [&](double t) { return std::exp(rate * t); };
  ObservableProcess process;
  process.push_back(1.5 * bump(0.0) * Matrix::Identity(4, 4));
  process.push_back(bump(1.0) *
                    (1.7 * proj_span(4, {0, 1}) + 1.3 * proj_span(4, {2, 3})));
  process.push_back(bump(2.0) * diag4(1.9, 1.5, 1.5, 1.1));

  BinomialDemo demo;
  demo.model = std::move(model);
  demo.state = std::move(state);
  demo.process = std::move(process);
  demo.rate = rate;
  return demo;
}

DriftedBinomialDemo demo_drifted_binomial() {
  DriftedBinomialDemo out;
  out.base = demo_binomial_market();
  out.drifted = out.base.process;
  // Add a deterministic drift of 0.1 per period to the discounted value:
  // E_s(bar S_t) - bar S_s = 0.1 (t - s), so the worst (s,t) residual is 0.2.
  const double drift = 0.1;
  for (size_t t = 0; t < out.drifted.size(); ++t) {
    double b = std::exp(out.base.rate * out.base.model.filtration.times[t]);
    out.drifted[t] += drift * double(t) * b * Matrix::Identity(4, 4);
  }
  out.expected_gap = drift * 2.0;
  return out;
}

GkslSystem demo_damping_qubit(double gamma) {
  Matrix h = Matrix::Zero(2, 2);
  Matrix v = Matrix::Zero(2, 2);
  v(0, 1) = std::sqrt(gamma);
  return make_gksl(std::move(h), {std::move(v)});
}

BlockInvariantDemo demo_block_invariant_qms() {
  const int dim = 4;
  Matrix h = Matrix::Zero(dim, dim);
  h.block(0, 0, 2, 2) << 1.0, 0.3, 0.3, -0.5;
  h.block(2, 2, 2, 2) << 0.2, -0.1, -0.1, 0.7;

  Matrix z1 = Matrix::Zero(dim, dim);
  z1(0, 0) = std::sqrt(0.8);
  z1(1, 1) = -std::sqrt(0.8);
  Matrix z2 = Matrix::Zero(dim, dim);
  z2(2, 2) = std::sqrt(0.5);
  z2(3, 3) = -std::sqrt(0.5);

  GkslSystem system = make_gksl(std::move(h), {std::move(z1), std::move(z2)});
  DensityState state = make_state(0.25 * Matrix::Identity(dim, dim));

  ProjectivePartition trivial = validate_partition({Matrix::Identity(dim, dim)});
  ProjectivePartition blocks =
      validate_partition({proj_span(dim, {0, 1}), proj_span(dim, {2, 3})});
  ProjectivePartition fine =
      validate_partition({proj_span(dim, {0}), proj_span(dim, {1}),
                          proj_span(dim, {2}), proj_span(dim, {3})});

  BlockInvariantDemo demo{
      std::move(system), state,
      ConditionalExpectation::make(std::move(trivial), state),
      ConditionalExpectation::make(std::move(blocks), state),
      ConditionalExpectation::make(std::move(fine), state)};
  return demo;
}

}  // namespace opalg
