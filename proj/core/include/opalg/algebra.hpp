#pragma once

#include <vector>

#include "opalg/linalg.hpp"
#include "opalg/types.hpp"

namespace opalg {

// Mutually orthogonal Hermitian projections summing to the identity; spans
// an abelian subalgebra of the ambient matrix algebra.
struct ProjectivePartition {
  std::vector<Matrix> projections;
  int dim = 0;

  size_t size() const { return projections.size(); }
};

// Increasing family of partitions with one strictly positive numeraire per
// time, each numeraire lying in the span of its partition.
struct Filtration {
  std::vector<double> times;
  std::vector<ProjectivePartition> partitions;
  std::vector<Matrix> numeraire;

  size_t steps() const { return times.size(); }
  double horizon() const { return times.back(); }
  size_t index_of_time(double t) const;
};

// Block-diagonal matrix algebra (+)_k M_{n_k} carrying the filtration.
struct AlgebraModel {
  std::vector<int> block_dims;
  Filtration filtration;

  int dim() const {
    int n = 0;
    for (int b : block_dims) n += b;
    return n;
  }
};

struct MembershipResult {
  bool member = false;
  double residual = 0.0;
  std::vector<Complex> coefficients;
};

ProjectivePartition validate_partition(std::vector<Matrix> projections,
                                       double tolerance = tol::partition);

Filtration validate_filtration(std::vector<double> times,
                               std::vector<ProjectivePartition> partitions,
                               std::vector<Matrix> numeraire,
                               double tolerance = tol::partition);

AlgebraModel validate_model(std::vector<int> block_dims, Filtration filtration,
                            double tolerance = tol::partition);

// Classical-quantum product model: `classical_atoms` classical states tensor
// an n-dimensional quantum factor. Each grouping lists the atom classes
// observable at that time; partitions are (sum_{i in class} e_i e_i^*) (x) I_n.
AlgebraModel build_cq_model(int classical_atoms, int quantum_dim,
                            const std::vector<std::vector<std::vector<int>>>& groupings);

// Is X close to sum_k c_k P_k with c_k = Tr(P_k X)/Tr(P_k)?
MembershipResult element_in_subalgebra(const Matrix& x,
                                       const ProjectivePartition& partition,
                                       double tolerance = tol::partition);

// Coarse projection expressed in fine projections with 0/1-rounded
// least-squares coefficients; used by the refinement check.
double refinement_residual(const ProjectivePartition& coarse,
                           const ProjectivePartition& fine);

}  // namespace opalg
