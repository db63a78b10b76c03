#pragma once

#include <functional>
#include <vector>

#include "opalg/types.hpp"

namespace opalg {

// Eigensystem of a Hermitian matrix, eigenvalues ascending, eigenvectors
// as the columns of a unitary.
struct SpectralDecomposition {
  RVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
           eigenvectors.adjoint();
  }
};

struct MatrixNorms {
  double op_norm = 0.0;
  double trace_norm = 0.0;
  double hs_norm = 0.0;
  Complex trace;
};

// First-order shifts of an isolated eigenvalue cluster of H0 under H0 + eps*W.
struct ClusterPerturbation {
  double base_eigenvalue = 0.0;
  double gap = 0.0;
  Matrix cluster_basis;     // dim x d, orthonormal columns spanning the eigenspace
  Matrix compressed;        // K = P W P restricted to the eigenspace (d x d)
  RVector shifts;           // eigenvalues of K, ascending
  Matrix shift_vectors;     // eigenvectors of K (d x d)

  // First-order eigenvector correction for the j-th (simple) shift:
  // -P_perp (H0 - h_n)^{-1} P_perp W e_j, returned in the ambient space.
  Vector evec_correction(const Matrix& h0, const Matrix& w, int j) const;
};

double op_norm(const Matrix& a);
double herm_residual(const Matrix& a);
bool is_hermitian(const Matrix& a, double rel_tol = tol::herm_rel);
void require_hermitian(const Matrix& a, const char* what,
                       double rel_tol = tol::herm_rel);

SpectralDecomposition eig_hermitian(const Matrix& a);

Matrix func_calc(const Matrix& a, const std::function<double(double)>& f);

// f_n(A) with f_n(x) = max(-n, min(x, n)).
Matrix clamp_trunc(const Matrix& a, double level);

struct MatExpOptions {
  double norm_cap = 1e4;        // OverflowError above this 1-norm
  bool check_residual = true;   // verify exp(A)exp(-A) ~ I
  double check_norm_cap = 30.0; // residual check only computable below this
  double residual_tol = tol::mat_exp;
};

Matrix mat_exp(const Matrix& a, const MatExpOptions& opts = {});
RMatrix mat_exp(const RMatrix& a, const MatExpOptions& opts = {});

MatrixNorms norms(const Matrix& a);

bool psd_check(const Matrix& a, double tolerance);
double min_eigenvalue(const Matrix& a);

using LinearMap = std::function<Matrix(const Matrix&)>;

// Choi matrix C = sum_ij E_ij (x) map(E_ij); PSD iff the map is CP.
// The map is spot-checked for linearity on a seeded random combination.
Matrix choi_matrix(const LinearMap& map, int dim, double lin_tol = 1e-9);

struct CpReport {
  double choi_min_eigenvalue = 0.0;
  double choi_herm_residual = 0.0;
  bool completely_positive = false;
};

CpReport cp_check(const LinearMap& map, int dim, double psd_tol = 1e-9);

ClusterPerturbation first_order_cluster(const Matrix& h0, const Matrix& w,
                                        double h_n, double gap_tol = 1e-12);

}  // namespace opalg
