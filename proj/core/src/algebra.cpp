#include "opalg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace opalg {

size_t Filtration::index_of_time(double t) const {
  for (size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= 1e-12 * (1.0 + std::abs(t))) return i;
  fail("BadTimePair", "time " + std::to_string(t) + " is not a filtration time");
}

ProjectivePartition validate_partition(std::vector<Matrix> projections,
                                       double tolerance) {
  if (projections.empty())
    fail("NotComplete", "partition: no projections given");
  const int dim = int(projections[0].rows());
  Matrix sum = Matrix::Zero(dim, dim);
  for (size_t k = 0; k < projections.size(); ++k) {
    const Matrix& p = projections[k];
    if (p.rows() != dim || p.cols() != dim)
      fail("DimMismatch", "partition: projection " + std::to_string(k) +
                              " has mismatched dimension");
    if (herm_residual(p) > tolerance * (1.0 + p.cwiseAbs().maxCoeff()))
      fail("NotProjection", "partition: projection " + std::to_string(k) +
                                " is not Hermitian");
    double idem = op_norm(p * p - p);
    if (idem > tolerance)
      fail("NotProjection", "partition: projection " + std::to_string(k) +
                                " fails P^2 = P, residual " + std::to_string(idem));
    sum += p;
  }
  for (size_t k = 0; k < projections.size(); ++k)
    for (size_t l = k + 1; l < projections.size(); ++l) {
      double orth = op_norm(projections[k] * projections[l]);
      if (orth > tolerance)
        fail("NotOrthogonal", "partition: projections " + std::to_string(k) +
                                  " and " + std::to_string(l) + ", residual " +
                                  std::to_string(orth));
    }
  double comp = op_norm(sum - Matrix::Identity(dim, dim));
  if (comp > tolerance)
    fail("NotComplete",
         "partition: projections do not sum to identity, residual " +
             std::to_string(comp));
  return ProjectivePartition{std::move(projections), dim};
}

double refinement_residual(const ProjectivePartition& coarse,
                           const ProjectivePartition& fine) {
  double worst = 0.0;
  for (const Matrix& q : coarse.projections) {
    Matrix rebuilt = Matrix::Zero(coarse.dim, coarse.dim);
    for (const Matrix& p : fine.projections) {
      double tr = p.trace().real();
      if (tr <= 0) continue;
      double c = (p * q).trace().real() / tr;
      if (std::round(c) == 1.0) rebuilt += p;
    }
    worst = std::max(worst, op_norm(q - rebuilt));
  }
  return worst;
}

Filtration validate_filtration(std::vector<double> times,
                               std::vector<ProjectivePartition> partitions,
                               std::vector<Matrix> numeraire, double tolerance) {
  if (times.empty() || times.size() != partitions.size() ||
      times.size() != numeraire.size())
    fail("DimMismatch", "filtration: times/partitions/numeraire sizes differ");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      fail("DimMismatch", "filtration: times must be strictly increasing");

  for (size_t s = 0; s < times.size(); ++s)
    for (size_t t = s + 1; t < times.size(); ++t) {
      double resid = refinement_residual(partitions[s], partitions[t]);
      if (resid > tolerance)
        fail("NotRefining", "filtration: partition at time index " +
                                std::to_string(s) +
                                " is not refined by time index " +
                                std::to_string(t) + ", residual " +
                                std::to_string(resid));
    }

  for (size_t i = 0; i < numeraire.size(); ++i) {
    require_hermitian(numeraire[i], "filtration numeraire");
    double mineig = min_eigenvalue(numeraire[i]);
    if (mineig < tol::pos_floor)
      fail("NumeraireNotPositive", "numeraire at time index " + std::to_string(i) +
                                       " has min eigenvalue " +
                                       std::to_string(mineig));
    MembershipResult mem = element_in_subalgebra(numeraire[i], partitions[i]);
    if (!mem.member)
      fail("NumeraireOutsideAlgebra",
           "numeraire at time index " + std::to_string(i) +
               " is outside the information algebra, residual " +
               std::to_string(mem.residual));
  }
  return Filtration{std::move(times), std::move(partitions), std::move(numeraire)};
}

AlgebraModel validate_model(std::vector<int> block_dims, Filtration filtration,
                            double tolerance) {
  int dim = 0;
  for (int b : block_dims) {
    if (b <= 0) fail("DimMismatch", "model: block dims must be positive");
    dim += b;
  }
  // Zero out the diagonal blocks, measure what is left.
  auto off_block_mass = [&](const Matrix& m) {
    Matrix rest = m;
    int offset = 0;
    for (int b : block_dims) {
      rest.block(offset, offset, b, b).setZero();
      offset += b;
    }
    return rest.cwiseAbs().maxCoeff();
  };

  for (size_t i = 0; i < filtration.partitions.size(); ++i) {
    if (filtration.partitions[i].dim != dim)
      fail("DimMismatch", "model: partition dimension differs from block sum");
    for (const Matrix& p : filtration.partitions[i].projections)
      if (off_block_mass(p) > tolerance)
        fail("DimMismatch", "model: partition at time index " + std::to_string(i) +
                                " is not block-diagonal");
    if (off_block_mass(filtration.numeraire[i]) > tolerance)
      fail("DimMismatch", "model: numeraire at time index " + std::to_string(i) +
                              " is not block-diagonal");
  }
  return AlgebraModel{std::move(block_dims), std::move(filtration)};
}

AlgebraModel build_cq_model(
    int classical_atoms, int quantum_dim,
    const std::vector<std::vector<std::vector<int>>>& groupings) {
  if (classical_atoms <= 0 || quantum_dim <= 0)
    fail("InvalidGrouping", "cq model: dimensions must be positive");
  if (groupings.empty())
    fail("InvalidGrouping", "cq model: at least one time is required");

  const int dim = classical_atoms * quantum_dim;
  std::vector<double> times;
  std::vector<ProjectivePartition> partitions;
  std::vector<Matrix> numeraire;

  for (size_t t = 0; t < groupings.size(); ++t) {
    std::set<int> seen;
    std::vector<Matrix> projs;
    for (const std::vector<int>& group : groupings[t]) {
      if (group.empty()) fail("InvalidGrouping", "cq model: empty atom group");
      Matrix p = Matrix::Zero(dim, dim);
      for (int atom : group) {
        if (atom < 0 || atom >= classical_atoms)
          fail("InvalidGrouping", "cq model: atom index out of range");
        if (!seen.insert(atom).second)
          fail("InvalidGrouping", "cq model: atom listed twice at one time");
        for (int q = 0; q < quantum_dim; ++q) {
          int idx = atom * quantum_dim + q;
          p(idx, idx) = Complex(1.0, 0.0);
        }
      }
      projs.push_back(std::move(p));
    }
    if (int(seen.size()) != classical_atoms)
      fail("InvalidGrouping", "cq model: groups do not cover all atoms");
    partitions.push_back(validate_partition(std::move(projs)));
    times.push_back(double(t));
    numeraire.push_back(Matrix::Identity(dim, dim));
  }

  Filtration filt;
  try {
    filt = validate_filtration(std::move(times), std::move(partitions),
                               std::move(numeraire));
  } catch (const Error& e) {
    fail("InvalidGrouping", std::string("cq model: ") + e.what());
  }
  std::vector<int> blocks(size_t(classical_atoms), quantum_dim);
  return validate_model(std::move(blocks), std::move(filt));
}

MembershipResult element_in_subalgebra(const Matrix& x,
                                       const ProjectivePartition& partition,
                                       double tolerance) {
  if (x.rows() != partition.dim || x.cols() != partition.dim)
    fail("DimMismatch", "element_in_subalgebra: dimension mismatch");
  MembershipResult out;
  Matrix rebuilt = Matrix::Zero(partition.dim, partition.dim);
  for (const Matrix& p : partition.projections) {
    double tr = p.trace().real();
    Complex c = tr > 0 ? (p * x).trace() / tr : Complex(0, 0);
    out.coefficients.push_back(c);
    rebuilt += c * p;
  }
  out.residual = op_norm(x - rebuilt);
  out.member = out.residual <= tolerance * (1.0 + op_norm(x));
  return out;
}

}  // namespace opalg
