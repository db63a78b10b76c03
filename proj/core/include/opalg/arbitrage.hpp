#pragma once

#include <optional>
#include <vector>

#include "opalg/states.hpp"
#include "opalg/types.hpp"

namespace opalg {

// Discounted attainable gains: a convex cone spanned by Hermitian generators.
struct GainsCone {
  std::vector<Matrix> generators;
  int dim = 0;
};

GainsCone make_cone(std::vector<Matrix> generators, int dim_if_empty = 0);

struct SeparationResult {
  DensityState state;
  double max_violation = 0.0;  // max_i Tr(rho G_i)
  long iterations = 0;
  double faithful_floor = 0.0;
};

struct SolverOptions {
  double delta = 0.0;       // faithfulness floor: rho >= delta I
  double feas_tol = tol::feas;
  long max_iter = 50000;
};

// Dykstra cyclic projections onto {rho >= delta I, Tr rho = 1} and the
// half-spaces {Tr(rho G_i) <= 0}. Deterministic from the I/dim start.
// Throws Infeasible when feasibility is not reached within max_iter.
SeparationResult find_pricing_state(const GainsCone& cone,
                                    const SolverOptions& opts = {});

struct NaCertificate {
  bool has_pricing_state = false;
  std::optional<SeparationResult> result;
  double violation = 0.0;
  long iterations = 0;
  // Dual certificate only: the primal cone condition C ∩ M_+ = {0} is not
  // decided directly.
  static constexpr const char* kScope = "dual-certificate";
};

NaCertificate na_certificate(const GainsCone& cone, const SolverOptions& opts = {});

// Recompute max_i Tr(rho G_i) independently of the stored value.
double separation_consistency(const GainsCone& cone, const SeparationResult& result);

}  // namespace opalg
