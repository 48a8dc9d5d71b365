#pragma once

#include <vector>

#include "ncbkw/linalg.hpp"

namespace ncbkw {

// Unital self-adjoint subspace of M_n. `basis` is orthonormal in the
// Frobenius inner product; the span always contains the identity and is
// closed under adjoints.
struct OperatorSystem {
  int ambient_dim = 0;
  std::vector<CMat> basis;

  int dim() const { return int(basis.size()); }
};

// Unital *-subalgebra of M_n (span closed under products and adjoints).
struct StarAlgebra {
  int ambient_dim = 0;
  std::vector<CMat> basis;  // orthonormal
  std::vector<CMat> generators;

  int dim() const { return int(basis.size()); }
};

// Orthonormal basis of span(mats) inside M_n, by rank-revealing SVD of
// the flattened family; singular values below 1e-10·sigma_max are
// treated as zero.
std::vector<CMat> orthonormal_span(const std::vector<CMat>& mats, int n);

// Orthonormal basis of the REAL span of Hermitian matrices, computed in
// Hermitian coordinates so every basis element stays Hermitian.
std::vector<CMat> orthonormal_herm_span(const std::vector<CMat>& mats,
                                        int n);

// span{ I, g, g† : g in generators }, returned with a hermitian
// orthonormal basis (always possible for an adjoint-closed span).
OperatorSystem make_operator_system(const std::vector<CMat>& generators,
                                    int n);

// Smallest unital *-algebra containing the generators: alternates
// pairwise products with re-orthonormalization until the dimension
// stabilizes (bounded by n²).
StarAlgebra generate_star_algebra(const std::vector<CMat>& generators, int n);

// Orthogonal-projection residual of x onto span(basis), Frobenius norm.
double span_residual(const std::vector<CMat>& basis, const CMat& x);

bool contains(const OperatorSystem& s, const CMat& x,
              double tol = kDefaultTol);
bool contains(const StarAlgebra& a, const CMat& x, double tol = kDefaultTol);

}  // namespace ncbkw
