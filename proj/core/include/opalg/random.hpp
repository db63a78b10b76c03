#pragma once

#include <cstdlib>
#include <random>

#include "opalg/types.hpp"

namespace opalg {

using Rng = std::mt19937_64;

inline Matrix random_matrix(int dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

inline Matrix random_hermitian(int dim, Rng& rng) {
  Matrix a = random_matrix(dim, rng);
  return 0.5 * (a + a.adjoint());
}

inline Matrix random_psd(int dim, Rng& rng) {
  Matrix b = random_matrix(dim, rng);
  return b.adjoint() * b;
}

// Faithful random density matrix: Wishart plus a small multiple of the
// identity, trace-normalized.
inline Matrix random_density(int dim, Rng& rng, double floor = 1e-3) {
  Matrix p = random_psd(dim, rng) + floor * double(dim) * Matrix::Identity(dim, dim);
  return p / p.trace().real();
}

// Number of worker threads for embarrassingly parallel sweeps; the
// OPALG_THREADS environment variable caps it (default 1, deterministic
// regardless of the value because work is seeded per chunk).
inline int sweep_threads() {
  if (const char* env = std::getenv("OPALG_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

}  // namespace opalg
