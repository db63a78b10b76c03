#include "opalg/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace opalg {

double op_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double herm_residual(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return herm_residual(a) <= rel_tol * scale;
}

void require_hermitian(const Matrix& a, const char* what, double rel_tol) {
  require_square(a, what);
  if (!is_hermitian(a, rel_tol))
    fail("NotHermitian", std::string(what) + ": symmetry residual " +
                             std::to_string(herm_residual(a)) + " exceeds tolerance");
}

SpectralDecomposition eig_hermitian(const Matrix& a) {
  require_hermitian(a, "eig_hermitian");
  Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    fail("ConvergenceFailure", "eig_hermitian: eigensolver did not converge",
         ErrorClass::numerical);
  SpectralDecomposition d{solver.eigenvalues(), solver.eigenvectors()};
  double scale = std::max(1.0, d.eigenvalues.cwiseAbs().maxCoeff());
  double resid = op_norm(d.reconstruct() - sym);
  if (resid > tol::eig * scale * 10)
    fail("ConvergenceFailure", "eig_hermitian: reconstruction residual " +
                                   std::to_string(resid),
         ErrorClass::numerical);
  return d;
}

Matrix func_calc(const Matrix& a, const std::function<double(double)>& f) {
  SpectralDecomposition d = eig_hermitian(a);
  RVector fv(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    double v = f(d.eigenvalues(i));
    if (!std::isfinite(v))
      fail("DomainError", "func_calc: f undefined at eigenvalue " +
                              std::to_string(d.eigenvalues(i)));
    fv(i) = v;
  }
  return d.eigenvectors * fv.asDiagonal().toDenseMatrix().cast<Complex>() *
         d.eigenvectors.adjoint();
}

Matrix clamp_trunc(const Matrix& a, double level) {
  if (level <= 0) fail("DomainError", "clamp_trunc: level must be positive");
  return func_calc(a, [level](double x) {
    return std::max(-level, std::min(x, level));
  });
}

namespace {

// Scaling-and-squaring with the order-13 diagonal Pade approximant.
template <typename Mat>
Mat pade13_exp(const Mat& a, const MatExpOptions& opts) {
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 > opts.norm_cap)
    fail("OverflowError",
         "mat_exp: 1-norm " + std::to_string(norm1) + " exceeds cap",
         ErrorClass::numerical);

  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;

  int squarings = 0;
  if (norm1 > theta13)
    squarings = std::max(0, int(std::ceil(std::log2(norm1 / theta13))));
  Mat as = a / std::pow(2.0, squarings);

  const Eigen::Index n = a.rows();
  Mat ident = Mat::Identity(n, n);
  Mat a2 = as * as;
  Mat a4 = a2 * a2;
  Mat a6 = a4 * a2;
  Mat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                b[5] * a4 + b[3] * a2 + b[1] * ident);
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
          b[2] * a2 + b[0] * ident;
  Mat num = v + u;
  Mat den = v - u;
  Eigen::PartialPivLU<Mat> lu(den);
  Mat r = lu.solve(num);
  for (int i = 0; i < squarings; ++i) r = r * r;
  if (!r.allFinite())
    fail("OverflowError", "mat_exp: result is not finite", ErrorClass::numerical);
  return r;
}

template <typename Mat>
void residual_check(const Mat& a, const Mat& ea, const MatExpOptions& opts) {
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!opts.check_residual || norm1 > opts.check_norm_cap) return;
  MatExpOptions inner = opts;
  inner.check_residual = false;
  Mat eminus = pade13_exp<Mat>(-a, inner);
  const Eigen::Index n = a.rows();
  double resid = (ea * eminus - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  double scale = 1.0 + ea.cwiseAbs().maxCoeff();
  if (resid > opts.residual_tol * scale)
    fail("ConvergenceFailure",
         "mat_exp: inverse residual " + std::to_string(resid),
         ErrorClass::numerical);
}

}  // namespace

Matrix mat_exp(const Matrix& a, const MatExpOptions& opts) {
  require_square(a, "mat_exp");
  Matrix r = pade13_exp<Matrix>(a, opts);
  residual_check<Matrix>(a, r, opts);
  return r;
}

RMatrix mat_exp(const RMatrix& a, const MatExpOptions& opts) {
  if (a.rows() != a.cols() || a.rows() == 0)
    fail("DimMismatch", "mat_exp: matrix must be square and nonempty");
  RMatrix r = pade13_exp<RMatrix>(a, opts);
  residual_check<RMatrix>(a, r, opts);
  return r;
}

MatrixNorms norms(const Matrix& a) {
  require_square(a, "norms");
  MatrixNorms out;
  Eigen::JacobiSVD<Matrix> svd(a);
  out.op_norm = svd.singularValues()(0);
  out.trace_norm = svd.singularValues().sum();
  out.hs_norm = a.norm();
  out.trace = a.trace();
  return out;
}

double min_eigenvalue(const Matrix& a) {
  SpectralDecomposition d = eig_hermitian(a);
  return d.eigenvalues(0);
}

bool psd_check(const Matrix& a, double tolerance) {
  return min_eigenvalue(a) >= -tolerance;
}

Matrix choi_matrix(const LinearMap& map, int dim, double lin_tol) {
  if (dim <= 0) fail("DimMismatch", "choi_matrix: dim must be positive");

  // Linearity spot check on a fixed random combination.
  std::mt19937_64 rng(0x10aULL);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(dim, dim), y(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      x(i, j) = Complex(g(rng), g(rng));
      y(i, j) = Complex(g(rng), g(rng));
    }
  Complex alpha(g(rng), g(rng)), beta(g(rng), g(rng));
  Matrix lhs = map(alpha * x + beta * y);
  Matrix rhs = alpha * map(x) + beta * map(y);
  double scale = 1.0 + lhs.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
  if ((lhs - rhs).cwiseAbs().maxCoeff() > lin_tol * scale)
    fail("NonLinearMap", "choi_matrix: map failed the linearity spot check");

  Matrix choi = Matrix::Zero(dim * dim, dim * dim);
  Matrix unit = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      unit.setZero();
      unit(i, j) = Complex(1.0, 0.0);
      Matrix img = map(unit);
      if (img.rows() != dim || img.cols() != dim)
        fail("DimMismatch", "choi_matrix: map changed dimensions");
      choi.block(i * dim, j * dim, dim, dim) = img;
    }
  return choi;
}

CpReport cp_check(const LinearMap& map, int dim, double psd_tol) {
  Matrix c = choi_matrix(map, dim);
  CpReport rep;
  rep.choi_herm_residual = herm_residual(c);
  Matrix sym = 0.5 * (c + c.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  rep.choi_min_eigenvalue = solver.eigenvalues()(0);
  double scale = 1.0 + c.cwiseAbs().maxCoeff();
  rep.completely_positive = rep.choi_herm_residual <= 1e-9 * scale &&
                            rep.choi_min_eigenvalue >= -psd_tol;
  return rep;
}

ClusterPerturbation first_order_cluster(const Matrix& h0, const Matrix& w,
                                        double h_n, double gap_tol) {
  require_hermitian(h0, "first_order_cluster: H0");
  require_hermitian(w, "first_order_cluster: W");
  require_same_dim(h0, w, "first_order_cluster");

  SpectralDecomposition base = eig_hermitian(h0);
  const Eigen::Index n = base.eigenvalues.size();
  double scale = 1.0 + base.eigenvalues.cwiseAbs().maxCoeff();
  double eig_window = tol::eig * scale;

  double nearest = (base.eigenvalues.array() - h_n).abs().minCoeff();
  if (nearest > eig_window)
    fail("NotEigenvalue", "first_order_cluster: h_n is " + std::to_string(nearest) +
                              " away from the spectrum");

  // Raw gap: closest eigenvalue clearly distinct from h_n.
  double gap_raw = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = std::abs(base.eigenvalues(i) - h_n);
    if (d > eig_window) gap_raw = std::min(gap_raw, d);
  }
  if (!std::isfinite(gap_raw) || gap_raw <= gap_tol)
    fail("NoGap", "first_order_cluster: eigenvalue cluster is not isolated");

  // Cluster members sit within gap/4 of h_n (contour radius < gap/2).
  double cluster_tol = gap_raw / 4.0;
  std::vector<Eigen::Index> cluster;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = std::abs(base.eigenvalues(i) - h_n);
    if (d <= cluster_tol)
      cluster.push_back(i);
    else
      gap = std::min(gap, d);
  }

  ClusterPerturbation out;
  out.base_eigenvalue = h_n;
  out.gap = gap;
  const int d = int(cluster.size());
  out.cluster_basis.resize(n, d);
  for (int k = 0; k < d; ++k)
    out.cluster_basis.col(k) = base.eigenvectors.col(cluster[size_t(k)]);
  out.compressed = out.cluster_basis.adjoint() * w * out.cluster_basis;
  SpectralDecomposition kd = eig_hermitian(out.compressed);
  out.shifts = kd.eigenvalues;
  out.shift_vectors = kd.eigenvectors;
  return out;
}

Vector ClusterPerturbation::evec_correction(const Matrix& h0, const Matrix& w,
                                            int j) const {
  if (j < 0 || j >= shifts.size())
    fail("DimMismatch", "evec_correction: shift index out of range");
  SpectralDecomposition base = eig_hermitian(h0);
  Vector e = cluster_basis * shift_vectors.col(j);
  Vector we = w * e;
  // (H0 - h_n)^{-1} restricted to the orthogonal complement of the cluster.
  Vector corr = Vector::Zero(h0.rows());
  for (Eigen::Index i = 0; i < base.eigenvalues.size(); ++i) {
    double diff = base.eigenvalues(i) - base_eigenvalue;
    if (std::abs(diff) <= gap / 2.0) continue;  // inside the cluster
    Complex coeff = base.eigenvectors.col(i).dot(we);
    corr -= base.eigenvectors.col(i) * (coeff / diff);
  }
  return corr;
}

}  // namespace opalg
