#include "opalg/qms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opalg/linalg.hpp"

namespace opalg {

namespace {

Matrix vec(const Matrix& x) {
  Matrix out(x.size(), 1);
  Eigen::Index idx = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(idx++, 0) = x(i, j);
  return out;
}

Matrix unvec(const Matrix& v, int dim) {
  Matrix out(dim, dim);
  Eigen::Index idx = 0;
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) out(i, j) = v(idx++, 0);
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Superoperator of X -> A X B.
Matrix sandwich(const Matrix& a, const Matrix& b) {
  return kron(b.transpose(), a);
}

}  // namespace

GkslSystem make_gksl(Matrix hamiltonian, std::vector<Matrix> lindblad_ops) {
  require_square(hamiltonian, "gksl system");
  if (!is_hermitian(hamiltonian))
    fail("NotHermitianHamiltonian", "gksl system: H fails the Hermitian check");
  for (const Matrix& v : lindblad_ops)
    require_same_dim(hamiltonian, v, "gksl lindblad op");
  return GkslSystem{std::move(hamiltonian), std::move(lindblad_ops)};
}

Matrix Superoperator::apply(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_)
    fail("DimMismatch", "superoperator: dimension mismatch");
  return unvec(action_ * vec(x), dim_);
}

Superoperator Superoperator::exp_scaled(double t) const {
  MatExpOptions opts;
  opts.check_residual = false;
  return Superoperator(mat_exp(Matrix(t * action_), opts), dim_);
}

Superoperator Superoperator::adjoint() const {
  return Superoperator(action_.adjoint(), dim_);
}

double Superoperator::norm() const { return op_norm(action_); }

Superoperator gksl_generator(const GkslSystem& system) {
  const int n = system.dim();
  const Matrix ident = Matrix::Identity(n, n);
  const Complex i_unit(0.0, 1.0);

  // i[H, X] = i H X - i X H.
  Matrix action = i_unit * (sandwich(system.hamiltonian, ident) -
                            sandwich(ident, system.hamiltonian));
  for (const Matrix& v : system.lindblad_ops) {
    Matrix vv = v.adjoint() * v;
    action += sandwich(v.adjoint(), v);
    action -= 0.5 * (sandwich(vv, ident) + sandwich(ident, vv));
  }
  Superoperator gen(std::move(action), n);

  double unital = op_norm(gen.apply(ident));
  if (unital > 1e-12 * (1.0 + gen.norm()))
    fail("ConvergenceFailure",
         "gksl_generator: L(I) residual " + std::to_string(unital),
         ErrorClass::numerical);
  return gen;
}

Matrix semigroup_apply(const Superoperator& generator, double t, const Matrix& x) {
  if (t < 0) fail("BadTimePair", "semigroup_apply: t must be >= 0");
  return generator.exp_scaled(t).apply(x);
}

SemigroupChecks semigroup_checks(const GkslSystem& system,
                                 std::vector<double> sample_times, Rng& rng) {
  const int n = system.dim();
  const Matrix ident = Matrix::Identity(n, n);
  Superoperator gen = gksl_generator(system);
  if (sample_times.empty()) {
    double scale = std::max(gen.norm(), 1e-12);
    sample_times = {0.1 / scale, 1.0 / scale, 10.0 / scale};
  }

  SemigroupChecks out;
  out.completely_positive = true;
  out.choi_min_eigenvalue = std::numeric_limits<double>::infinity();
  for (double t : sample_times) {
    Superoperator prop = gen.exp_scaled(t);
    out.unitality_residual =
        std::max(out.unitality_residual, op_norm(prop.apply(ident) - ident));

    Superoperator dual = prop.adjoint();
    Matrix rho = random_density(n, rng);
    out.trace_preservation_residual =
        std::max(out.trace_preservation_residual,
                 std::abs(dual.apply(rho).trace().real() - 1.0));

    CpReport cp = cp_check([&](const Matrix& m) { return prop.apply(m); }, n);
    out.choi_min_eigenvalue =
        std::min(out.choi_min_eigenvalue, cp.choi_min_eigenvalue);
    out.completely_positive = out.completely_positive && cp.completely_positive;

    Matrix x = random_hermitian(n, rng);
    Matrix both = gen.exp_scaled(t / 2.0).apply(gen.exp_scaled(t / 2.0).apply(x));
    out.semigroup_law_residual =
        std::max(out.semigroup_law_residual, op_norm(prop.apply(x) - both));
  }
  return out;
}

InvarianceReport invariant_state_check(const GkslSystem& system,
                                       const DensityState& state,
                                       const std::vector<double>& sample_times) {
  const int n = system.dim();
  require_same_dim(system.hamiltonian, state.rho, "invariant_state_check");
  Superoperator gen = gksl_generator(system);

  InvarianceReport rep;
  rep.generator_residual = op_norm(gen.adjoint().apply(state.rho));
  Matrix unit = Matrix::Zero(n, n);
  for (double t : sample_times) {
    Superoperator prop = gen.exp_scaled(t);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        unit.setZero();
        unit(i, j) = Complex(1.0, 0.0);
        Complex moved = (state.rho * prop.apply(unit)).trace();
        Complex fixed = (state.rho * unit).trace();
        rep.unit_residual = std::max(rep.unit_residual, std::abs(moved - fixed));
      }
  }
  return rep;
}

Matrix semigroup_value(const GkslSystem& system, const Matrix& x_terminal,
                       double t, double maturity, double r) {
  if (t < 0 || t > maturity)
    fail("BadTimePair", "semigroup_value: need 0 <= t <= T");
  Superoperator gen = gksl_generator(system);
  double tau = maturity - t;
  return std::exp(-r * tau) * semigroup_apply(gen, tau, x_terminal);
}

double backward_ode_residual(const GkslSystem& system, const Matrix& x_terminal,
                             double maturity, double r, int grid_steps) {
  if (grid_steps < 2)
    fail("BadTimePair", "backward_ode_residual: need >= 2 grid steps");
  Superoperator gen = gksl_generator(system);
  const double dt = maturity / grid_steps;

  std::vector<Matrix> values(size_t(grid_steps) + 1);
  for (int i = 0; i <= grid_steps; ++i)
    values[size_t(i)] = semigroup_value(system, x_terminal, i * dt, maturity, r);

  double worst = 0.0;
  for (int i = 1; i < grid_steps; ++i) {
    Matrix dv = (values[size_t(i) + 1] - values[size_t(i) - 1]) / (2.0 * dt);
    Matrix res = dv + gen.apply(values[size_t(i)]) - r * values[size_t(i)];
    worst = std::max(worst, op_norm(res));
  }
  return worst;
}

Matrix conditioned_value(const GkslSystem& system,
                         const ConditionalExpectation& ce,
                         const Matrix& x_terminal, double t, double maturity,
                         double r) {
  if (t < 0 || t > maturity)
    fail("BadTimePair", "conditioned_value: need 0 <= t <= T");
  Superoperator gen = gksl_generator(system);
  double tau = maturity - t;
  return std::exp(-r * tau) * ce(semigroup_apply(gen, tau, x_terminal));
}

double markov_compat_check(const GkslSystem& system,
                           const ConditionalExpectation& ce_s,
                           const ConditionalExpectation& ce_t, double s, double t,
                           int samples, Rng& rng) {
  if (s > t) fail("BadTimePair", "markov_compat_check: need s <= t");
  Superoperator gen = gksl_generator(system);
  Superoperator prop = gen.exp_scaled(t - s);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Matrix x = random_hermitian(system.dim(), rng);
    Matrix lhs = ce_s(prop.apply(x));
    Matrix rhs = ce_s(prop.apply(ce_t(x)));
    worst = std::max(worst, op_norm(lhs - rhs));
  }
  return worst;
}

double dynamic_programming_check(const GkslSystem& system,
                                 const ConditionalExpectation& ce_s,
                                 const ConditionalExpectation& ce_t, double s,
                                 double t, const Matrix& x_terminal,
                                 double maturity, double r, double gate_tol,
                                 int samples, unsigned long long seed) {
  if (!(s <= t && t <= maturity))
    fail("BadTimePair", "dynamic_programming_check: need s <= t <= T");
  Rng rng(seed);
  double compat = markov_compat_check(system, ce_s, ce_t, s, t, samples, rng);
  if (compat > gate_tol)
    fail("CompatibilityGateFailed",
         "dynamic_programming_check: Markov residual " + std::to_string(compat),
         ErrorClass::check_failed);

  Superoperator gen = gksl_generator(system);
  Matrix pi_s = conditioned_value(system, ce_s, x_terminal, s, maturity, r);
  Matrix pi_t = conditioned_value(system, ce_t, x_terminal, t, maturity, r);
  Matrix stepped =
      std::exp(-r * (t - s)) * ce_s(semigroup_apply(gen, t - s, pi_t));
  return op_norm(pi_s - stepped);
}

}  // namespace opalg
