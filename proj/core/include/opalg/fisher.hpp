#pragma once

#include <vector>

#include "opalg/cond_exp.hpp"
#include "opalg/types.hpp"

namespace opalg {

// Observable X with a candidate conjugate variable J for the D-valued
// expectation E_D; certified when ||E_D(J^* X) - I|| <= tolerance.
struct ConjugatePair {
  Matrix x;
  Matrix j;
  const ConditionalExpectation* ce = nullptr;
  double identity_residual = 0.0;
  double certify_tol = tol::cj_analytic;

  bool certified() const { return identity_residual <= certify_tol; }
};

ConjugatePair make_conjugate_pair(const Matrix& x, const Matrix& j,
                                  const ConditionalExpectation& ce,
                                  double certify_tol = tol::cj_analytic);

double conjugate_identity_check(const ConjugatePair& pair);

// E_D(J^* J), PSD, in the abelian range algebra.
Matrix fisher_information(const ConjugatePair& pair);

struct CramerRaoReport {
  Matrix norm_form_lhs;       // Phi * ||E_D(X^2)||
  bool norm_form_holds = false;
  Matrix mse_operator;        // E_D((X - E_D X)^2)
  Matrix fisher_inverse;      // I_D^{-1}
  bool operator_form_holds = false;
  double equality_gap = 0.0;  // ||Phi ||E_D(X^2)|| - I||
};

CramerRaoReport cramer_rao_check(const ConjugatePair& pair,
                                 double inv_tol = 1e-10, double order_tol = 1e-9);

struct SemicircularDemo {
  double product = 0.0;     // Phi * tau(X^2)
  double deviation = 0.0;   // |product - 1|
  double min_mse = 0.0;     // ~ sigma^2
  double trace_s2 = 0.0;    // empirical tau(S^2)
};

// GUE matrix with semicircle normalization; X = sigma S, J = S / sigma,
// D = span{I} with the normalized trace.
SemicircularDemo semicircular_demo(int matrix_size, double sigma,
                                   unsigned long long seed);

struct MultiVariableCr {
  Matrix fisher_sum;        // Phi = sum E_D(J_j^* J_j)
  double second_moment_sum = 0.0;
  double rhs = 0.0;         // n^2
  bool holds = false;
};

MultiVariableCr multi_variable_cr(const std::vector<ConjugatePair>& pairs,
                                  double order_tol = 1e-9);

}  // namespace opalg
