#include <doctest.h>

#include <cmath>

#include "opalg/linalg.hpp"
#include "opalg/random.hpp"

using namespace opalg;

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

// Power-series exponential, valid for small norms; the independent oracle
// for mat_exp.
Matrix series_exp(const Matrix& a, int terms = 60) {
  Matrix acc = Matrix::Identity(a.rows(), a.cols());
  Matrix term = acc;
  for (int n = 1; n < terms; ++n) {
    term = term * a / double(n);
    acc += term;
  }
  return acc;
}

}  // namespace

TEST_CASE("eig_hermitian on a diagonal matrix sorts ascending") {
  SpectralDecomposition d = eig_hermitian(diag3(3, 1, 2));
  CHECK(d.eigenvalues(0) == doctest::Approx(1));
  CHECK(d.eigenvalues(1) == doctest::Approx(2));
  CHECK(d.eigenvalues(2) == doctest::Approx(3));
  CHECK(op_norm(d.eigenvectors.adjoint() * d.eigenvectors -
                Matrix::Identity(3, 3)) < 1e-12);
}

TEST_CASE("eig_hermitian Pauli-x has eigenvalues -1, +1") {
  SpectralDecomposition d = eig_hermitian(pauli_x());
  CHECK(d.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(d.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_hermitian zero matrix") {
  SpectralDecomposition d = eig_hermitian(Matrix::Zero(4, 4));
  CHECK(d.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eig_hermitian rejects a non-Hermitian matrix") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_WITH_AS(eig_hermitian(m), doctest::Contains("NotHermitian"), Error);
}

TEST_CASE("func_calc identity and exp on diagonals") {
  Rng rng(11);
  Matrix a = random_hermitian(4, rng);
  CHECK(op_norm(func_calc(a, [](double x) { return x; }) - a) < 1e-9);

  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  Matrix e = func_calc(d, [](double x) { return std::exp(x); });
  CHECK(std::abs(e(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(e(1, 1) - std::exp(1.0)) < 1e-14);
}

TEST_CASE("func_calc sqrt squares back") {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  Matrix root = func_calc(a, [](double x) { return std::sqrt(x); });
  CHECK(op_norm(root * root - a) < 1e-12);
}

TEST_CASE("func_calc rejects log at nonpositive eigenvalues") {
  CHECK_THROWS_WITH_AS(func_calc(diag3(1, 0, 2), [](double x) { return std::log(x); }),
                       doctest::Contains("DomainError"), Error);
}

TEST_CASE("functional calculus is multiplicative") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_hermitian(5, rng);
    auto f = [](double x) { return std::sin(x); };
    auto g = [](double x) { return 1.0 + x * x; };
    Matrix fg = func_calc(a, [&](double x) { return f(x) * g(x); });
    CHECK(op_norm(fg - func_calc(a, f) * func_calc(a, g)) < 1e-9);
  }
}

TEST_CASE("clamp_trunc clamps diagonals and preserves small matrices") {
  Matrix c = clamp_trunc(diag3(-5, 1, 3), 2.0);
  CHECK(c(0, 0).real() == doctest::Approx(-2));
  CHECK(c(1, 1).real() == doctest::Approx(1));
  CHECK(c(2, 2).real() == doctest::Approx(2));

  Matrix a = pauli_x();
  CHECK(op_norm(clamp_trunc(a, 10.0) - a) < 1e-12);

  // Eigenvalues +-3 clamp to +-1.
  CHECK(op_norm(clamp_trunc(Matrix(3.0 * a), 1.0) - a) < 1e-12);
}

TEST_CASE("clamp_trunc norm bound holds on random matrices") {
  Rng rng(13);
  for (double level : {0.5, 1.0, 4.0})
    for (int trial = 0; trial < 10; ++trial) {
      Matrix a = random_hermitian(4, rng);
      CHECK(op_norm(clamp_trunc(a, level)) <= level + 1e-12);
    }
}

TEST_CASE("mat_exp basics") {
  CHECK(op_norm(mat_exp(Matrix(Matrix::Zero(3, 3))) - Matrix::Identity(3, 3)) <
        1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.7;
  d(1, 1) = -1.2;
  Matrix e = mat_exp(d);
  CHECK(std::abs(e(0, 0) - std::exp(0.7)) < 1e-13);
  CHECK(std::abs(e(1, 1) - std::exp(-1.2)) < 1e-13);
}

TEST_CASE("mat_exp matches the power-series oracle") {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(3, rng);
    a /= (1.0 + op_norm(a));  // keep ||A|| <= 1 where the series converges fast
    CHECK(op_norm(mat_exp(a) - series_exp(a)) < 1e-10);
  }
}

TEST_CASE("mat_exp respects the overflow cap") {
  MatExpOptions opts;
  opts.norm_cap = 10.0;
  Matrix big = 100.0 * Matrix::Identity(2, 2);
  CHECK_THROWS_WITH_AS(mat_exp(big, opts), doctest::Contains("OverflowError"),
                       Error);
}

TEST_CASE("norms on identity and rank-one") {
  MatrixNorms n = norms(Matrix(Matrix::Identity(3, 3)));
  CHECK(n.op_norm == doctest::Approx(1));
  CHECK(n.trace_norm == doctest::Approx(3));
  CHECK(n.hs_norm == doctest::Approx(std::sqrt(3.0)));
  CHECK(n.trace.real() == doctest::Approx(3));

  Rng rng(15);
  Vector u = Vector::Zero(4), v = Vector::Zero(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 4; ++i) {
    u(i) = Complex(g(rng), g(rng));
    v(i) = Complex(g(rng), g(rng));
  }
  Matrix rank_one = u * v.adjoint();
  MatrixNorms rn = norms(rank_one);
  CHECK(rn.op_norm == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
  CHECK(rn.trace_norm == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
}

TEST_CASE("trace inequalities on random pairs") {
  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix a = random_matrix(4, rng);
    Matrix b = random_matrix(4, rng);
    // Cyclicity.
    CHECK(std::abs(((a * b).trace() - (b * a).trace())) <=
          1e-12 * a.norm() * b.norm());
    // |Tr(AB)| <= ||A||_2 ||B||_2.
    CHECK(std::abs((a * b).trace()) <= a.norm() * b.norm() + 1e-12);
    // Hoelder with a state-like factor.
    Matrix rho = random_psd(4, rng);
    rho /= rho.trace().real();
    CHECK(std::abs((rho * a).trace()) <=
          norms(rho).trace_norm * norms(a).op_norm + 1e-12);
  }
}

TEST_CASE("psd_check") {
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  CHECK(psd_check(d, 1e-12));
  d(0, 0) = -1e-3;
  CHECK_FALSE(psd_check(d, 1e-9));

  Rng rng(17);
  CHECK(psd_check(random_psd(5, rng), 1e-10));
}

TEST_CASE("choi matrix of the identity map is PSD with trace n") {
  Matrix c = choi_matrix([](const Matrix& x) { return x; }, 2);
  CHECK(psd_check(c, 1e-12));
  CHECK(c.trace().real() == doctest::Approx(2));
}

TEST_CASE("choi matrix of the transpose map has a negative eigenvalue") {
  CpReport rep =
      cp_check([](const Matrix& x) { return Matrix(x.transpose()); }, 2);
  CHECK(rep.choi_min_eigenvalue < -0.5);
  CHECK_FALSE(rep.completely_positive);
}

TEST_CASE("choi matrix of a conjugation map is PSD") {
  Rng rng(18);
  Matrix v = random_matrix(3, rng);
  CpReport rep = cp_check(
      [&](const Matrix& x) { return Matrix(v.adjoint() * x * v); }, 3);
  CHECK(rep.completely_positive);
}

TEST_CASE("choi rejects a nonlinear map") {
  CHECK_THROWS_WITH_AS(
      choi_matrix([](const Matrix& x) { return Matrix(x * x); }, 2),
      doctest::Contains("NonLinearMap"), Error);
}

TEST_CASE("first_order_cluster on the dim-3 example") {
  Matrix h0 = diag3(1, 1, 3);
  Matrix w = Matrix::Zero(3, 3);
  double a = 0.4;
  w(0, 1) = a;
  w(1, 0) = a;
  w(0, 2) = 0.2;
  w(2, 0) = 0.2;
  w(1, 2) = -0.3;
  w(2, 1) = -0.3;

  ClusterPerturbation cp = first_order_cluster(h0, w, 1.0);
  REQUIRE(cp.shifts.size() == 2);
  CHECK(cp.gap == doctest::Approx(2.0));
  CHECK(cp.shifts(0) == doctest::Approx(-a));
  CHECK(cp.shifts(1) == doctest::Approx(a));
}

TEST_CASE("first_order_cluster shift error shrinks quadratically") {
  Matrix h0 = diag3(1, 1, 3);
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = 0.4;
  w(1, 0) = 0.4;
  w(0, 2) = 0.2;
  w(2, 0) = 0.2;
  w(1, 2) = -0.3;
  w(2, 1) = -0.3;
  w(2, 2) = 0.1;

  ClusterPerturbation cp = first_order_cluster(h0, w, 1.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    SpectralDecomposition exact = eig_hermitian(Matrix(h0 + eps * w));
    double worst = 0.0;
    for (int j = 0; j < 2; ++j)
      worst = std::max(worst,
                       std::abs(exact.eigenvalues(j) - (1.0 + eps * cp.shifts(j))));
    double x = std::log(eps), y = std::log(worst);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(slope >= 1.8);
}

TEST_CASE("first_order_cluster eigenvector correction matches the resolvent formula") {
  Matrix h0 = diag3(0, 2, 5);
  Rng rng(19);
  Matrix w = random_hermitian(3, rng);
  ClusterPerturbation cp = first_order_cluster(h0, w, 0.0);
  REQUIRE(cp.shifts.size() == 1);

  Vector corr = cp.evec_correction(h0, w, 0);
  // Hand-built resolvent on the complement: basis e1, e2 with gaps 2 and 5.
  Vector expected = Vector::Zero(3);
  expected(1) = -w(1, 0) / 2.0;
  expected(2) = -w(2, 0) / 5.0;
  CHECK((corr - expected).norm() < 1e-12);
}

TEST_CASE("first_order_cluster error taxonomy") {
  Matrix h0 = diag3(1, 1, 3);
  Matrix w = Matrix::Identity(3, 3);
  CHECK_THROWS_WITH_AS(first_order_cluster(h0, w, 0.5),
                       doctest::Contains("NotEigenvalue"), Error);
  CHECK_THROWS_WITH_AS(first_order_cluster(Matrix(Matrix::Identity(3, 3)), w, 1.0),
                       doctest::Contains("NoGap"), Error);
}
