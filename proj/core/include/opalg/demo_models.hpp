#pragma once

#include "opalg/pricing.hpp"
#include "opalg/qms.hpp"

namespace opalg {

struct DemoMarket {
  AlgebraModel model;
  DensityState state;
  std::string name;
};

// Diagonal dim-4 market, three times, nontrivial numeraires.
DemoMarket demo_diagonal_market();

// Two full 2x2 blocks, two times.
DemoMarket demo_two_block_market();

// Classical-quantum product, 2 atoms x qubit.
DemoMarket demo_cq_market();

// Two-period binomial martingale embedded as a classical model; the traded
// process and its per-period discounting satisfy the truncation-stable
// martingale property at every default clamp level.
struct BinomialDemo {
  AlgebraModel model;
  DensityState state;
  ObservableProcess process;  // undiscounted traded prices S_t
  double rate;                // per-period short rate
};

BinomialDemo demo_binomial_market();

// Same market with a drifted (non-martingale) process and its known gap.
struct DriftedBinomialDemo {
  BinomialDemo base;
  ObservableProcess drifted;
  double expected_gap;  // residual the martingale check must report
};

DriftedBinomialDemo demo_drifted_binomial();

// Qubit amplitude damping: H = 0, V = sqrt(gamma) |0><1|.
GkslSystem demo_damping_qubit(double gamma);

// Block-diagonal GKSL system on two qubit blocks with per-block dephasing;
// Markov-compatible with the block filtration under rho = I/4.
struct BlockInvariantDemo {
  GkslSystem system;
  DensityState state;
  ConditionalExpectation ce_coarse;  // trivial partition
  ConditionalExpectation ce_blocks;  // two 2x2 blocks
  ConditionalExpectation ce_fine;    // diagonal rank-ones
};

BlockInvariantDemo demo_block_invariant_qms();

}  // namespace opalg
