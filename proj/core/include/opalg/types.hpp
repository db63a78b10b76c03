#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace opalg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// How a failure should be classified by callers (the CLI maps these to
// exit codes: validation -> 1, check_failed -> 2, numerical -> 3).
enum class ErrorClass { validation, check_failed, numerical };

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg,
        ErrorClass cls = ErrorClass::validation)
      : std::runtime_error(code + ": " + msg),
        code_(std::move(code)),
        class_(cls) {}

  const std::string& code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string code_;
  ErrorClass class_;
};

[[noreturn]] inline void fail(std::string code, const std::string& msg,
                              ErrorClass cls = ErrorClass::validation) {
  throw Error(std::move(code), msg, cls);
}

// Default tolerances. The relative ones are scaled by (1 + norm) at the
// point of use.
namespace tol {
inline constexpr double herm_rel = 1e-10;     // Hermitian symmetry residual
inline constexpr double eig = 1e-10;          // spectral reconstruction
inline constexpr double func = 1e-9;          // functional calculus
inline constexpr double mat_exp = 1e-8;       // exp residual check
inline constexpr double partition = 1e-9;     // projection/refinement residual
inline constexpr double pos_floor = 1e-10;    // min eigenvalue before inversion
inline constexpr double merge_rel = 1e-8;     // Born atom merging
inline constexpr double update_floor = 1e-12; // Lueders event probability
inline constexpr double faith = 1e-10;        // faithfulness certificate
inline constexpr double modular = 1e-9;       // [rho, P_k] commutator
inline constexpr double weight_floor = 1e-12; // phi(P_k) lower bound
inline constexpr double feas = 1e-8;          // separation feasibility
inline constexpr double leak = 1e-9;          // lattice window leak
inline constexpr double dp_gate = 1e-8;       // Markov-compatibility gate
inline constexpr double cj_analytic = 1e-6;   // conjugate pair (analytic)
inline constexpr double cj_monte_carlo = 0.1; // conjugate pair (sampled)
}  // namespace tol

inline Matrix dagger(const Matrix& a) { return a.adjoint(); }

inline Matrix commutator(const Matrix& a, const Matrix& b) {
  return a * b - b * a;
}

inline Matrix anticommutator(const Matrix& a, const Matrix& b) {
  return a * b + b * a;
}

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    fail("DimMismatch", std::string(what) + ": matrix must be square and nonempty");
}

inline void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail("DimMismatch", std::string(what) + ": dimensions differ");
}

}  // namespace opalg
