#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncbkw/extension.hpp"

namespace ncbkw {

// ---- multiplicative-domain convergence test ---------------------------

// Rigidity test data at a single element: a candidate limit map phi, a
// distinguished a, the unital *-algebra a generates, and the approximating
// sequence.
struct PopaProblem {
  int ambient_dim = 0;
  CMat a;
  StarAlgebra algebra;  // C*(a)
  CPMap phi;
  std::vector<CPMap> sequence;
};

PopaProblem make_popa_problem(const CPMap& phi, const CMat& a,
                              std::vector<CPMap> sequence);

// The two multiplicative-domain identities at a, relative to phi(1):
//   phi(a†a) = phi(a†)·phi(1)⁻¹·phi(a),
//   phi(aa†) = phi(a)·phi(1)⁻¹·phi(a†).
// Residuals are +inf when phi(1) is numerically singular.
struct PopaConditions {
  double margin = 0.0;  // lambda_min(phi(1))
  double residual_left = 0.0;
  double residual_right = 0.0;

  bool satisfied(double tol = kDefaultTol) const {
    return margin > tol && residual_left <= tol && residual_right <= tol;
  }
};

PopaConditions popa_conditions(const CPMap& phi, const CMat& a);

inline PopaConditions popa_conditions(const PopaProblem& p) {
  return popa_conditions(p.phi, p.a);
}

// phi(1)^{-1/2} · phi(·) · phi(1)^{-1/2}; unital by construction. Throws
// NotPositiveDefinite when lambda_min(phi(1)) ≤ tol·scale.
CPMap rescale(const CPMap& phi, double tol = kHermTol);

// max over basis pairs of ‖psi(xy) - psi(x)psi(y)‖ and over basis
// elements of ‖psi(x†) - psi(x)†‖ (operator norm).
double homomorphism_residual(const CPMap& psi, const StarAlgebra& a);

enum class PopaVerdict {
  Pass,
  HypothesesViolated,
  PremiseNotConvergent,
  ConclusionFails
};
const char* to_string(PopaVerdict v);

// Checks the implication "convergence on the test set {1, a, a†a, aa†}
// forces convergence on C*(a)" for the problem's sequence. kappa =
// ‖phi(1)^{1/2}‖² controls the reduction to the unital case:
// ‖phi_n(x)-phi(x)‖ ≤ kappa·‖psi_n(x)-psi(x)‖ for the maps conjugated
// by phi(1)^{-1/2}; kappa_inequality records that this held per index.
struct PopaReport {
  PopaVerdict verdict = PopaVerdict::HypothesesViolated;
  PopaConditions conditions;
  double kappa = 0.0;
  std::vector<double> premise_distances;     // over the test set
  std::vector<double> conclusion_distances;  // over the algebra basis
  std::vector<double> rescaled_distances;    // conjugated maps, algebra
  double premise_slope = 0.0;
  double conclusion_slope = 0.0;
  bool kappa_inequality = false;
  std::vector<std::size_t> schwarz_failures;  // sequence indices
};

// Throws ConditionsNotMet when popa_conditions fails at tol. A Schwarz
// falsifier witness on a (self-rescaled) sequence entry downgrades the
// verdict to HypothesesViolated instead of aborting.
PopaReport popa_verdict(const PopaProblem& p, double tol = 1e-6);

// ---- representation-family rigidity ------------------------------------

// Block-diagonal *-algebra ⊕_k M_{n_k} sitting inside M_N, N = Σ n_k.
struct BlockStructure {
  std::vector<int> sizes;

  int count() const { return int(sizes.size()); }
  int total() const;
  int offset(int k) const;  // start of block k inside C^N
};

// The representation with the given multiplicities: block k acts with
// multiplicity mults[k], so x ↦ ⊕_k (x_k ⊗ I_{mults[k]}) on dimension
// M = Σ n_k·mults[k]. Packaged as a map M_N → M_M (cross-block parts of
// the input are ignored). Throws EmptyRepresentation when every
// multiplicity is zero.
CPMap representation_build(const BlockStructure& blocks,
                           const std::vector<int>& mults);

// Operator system of block-diagonal elements together with a unital CP
// eta on the block algebra; the check asks whether each representation
// pi is rigid for (pi∘eta)|_S.
struct HyperrigidityProblem {
  BlockStructure blocks;
  OperatorSystem system;  // Hermitian orthonormal basis inside M_N
  CPMap eta;              // unital CP, block form
  std::vector<std::vector<int>> family;  // multiplicity vectors
};

// Validates: generators and eta(basis) supported on the diagonal blocks
// (else InvalidArgument), eta unital CP, the system generates the whole
// block algebra (else NotGenerating). Empty family = every vector in
// {0,1,2}^K except zero.
HyperrigidityProblem make_hyperrigidity_problem(
    const std::vector<int>& sizes, const std::vector<CMat>& generators,
    const CPMap& eta, std::vector<std::vector<int>> family = {});

struct HyperrigidityMember {
  std::vector<int> mults;
  Uniqueness verdict = Uniqueness::Undecided;
  int support_rank = 0;
  int null_dim = 0;
  long iterations = 0;
  std::optional<CPMap> witness;  // second map agreeing on the system
  double witness_distance = 0.0;
  std::string detail;
};

struct HyperrigidityReport {
  bool decided = false;
  bool hyperrigid_on_family = false;  // every member Unique
  bool refuted = false;               // some member NonUnique
  std::vector<HyperrigidityMember> members;
};

// For each multiplicity vector, decides whether pi∘eta is the only
// unital CP map (factoring through the block algebra) that agrees with
// it on the system.
HyperrigidityReport hyperrigidity_check(const HyperrigidityProblem& p,
                                        double tol = kDefaultTol,
                                        std::uint64_t seed = 0);

}  // namespace ncbkw
