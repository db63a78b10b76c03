#pragma once

#include <vector>

#include "opalg/linalg.hpp"
#include "opalg/types.hpp"

namespace opalg {

// Positive unit-trace matrix; `faithful` certifies a strictly positive
// spectrum (needed by the conditional-expectation machinery).
struct DensityState {
  Matrix rho;
  bool faithful = false;
  double min_eig = 0.0;

  int dim() const { return int(rho.rows()); }
};

struct BornAtom {
  double eigenvalue = 0.0;
  double probability = 0.0;
};

struct BornDistribution {
  std::vector<BornAtom> atoms;

  double mean() const {
    double m = 0.0;
    for (const BornAtom& a : atoms) m += a.eigenvalue * a.probability;
    return m;
  }
};

struct RobertsonReport {
  double var_x = 0.0;
  double var_y = 0.0;
  double rs_rhs = 0.0;         // anticommutator + commutator form
  double robertson_rhs = 0.0;  // commutator-only form
  bool holds = false;
};

DensityState make_state(const Matrix& rho, double faith_tol = tol::faith);

Complex expect(const DensityState& state, const Matrix& x);

BornDistribution born_distribution(const DensityState& state, const Matrix& x);

DensityState luders_update(const DensityState& state, const Matrix& projection,
                           double floor = tol::update_floor);

// GNS pairing <X,Y> = Tr(rho X^* Y).
Complex gns_inner(const DensityState& state, const Matrix& x, const Matrix& y);

RobertsonReport robertson_check(const DensityState& state, const Matrix& x,
                                const Matrix& y);

}  // namespace opalg
