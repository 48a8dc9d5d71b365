#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncbkw/cpmap.hpp"
#include "ncbkw/operator_system.hpp"
#include "ncbkw/sdp.hpp"

namespace ncbkw {

// Prescription problem: find completely positive (unital, when `unital`)
// maps M_n → M_m taking each system basis element to its target. The
// basis is Hermitian and Frobenius-orthonormal; targets follow the same
// hermitization, so a candidate map matches the original generator data
// iff it matches the basis data.
struct ExtensionProblem {
  int in_dim = 0;
  int out_dim = 0;
  bool unital = true;
  OperatorSystem system;
  std::vector<CMat> targets;  // Hermitian, aligned with system.basis
};

// Builds the problem from generator/target pairs. The spanning family is
// (I, I_m) when unital, plus (g, t) and (g†, t†) for every pair; targets
// must define a consistent linear map on the span, else
// InconsistentTargets.
ExtensionProblem make_extension_problem(int in_dim,
                                        const std::vector<CMat>& generators,
                                        const std::vector<CMat>& targets,
                                        int out_dim, bool unital = true);

// Prescribes phi's own values on span{I, g, g†}: the restriction of phi
// to the operator system the generators span.
ExtensionProblem restriction_problem(const std::vector<CMat>& generators,
                                     const CPMap& phi, bool unital = true);

// Choi-matrix section: { C ⪰ 0 on C^{in·out} : entries of the induced
// map on each basis element match the target, plus unitality rows }.
AffinePSDProblem build_spectrahedron(const ExtensionProblem& p);

// max over the system basis of the operator-norm mismatch ‖phi(b)-t‖.
double restriction_distance(const ExtensionProblem& p, const CPMap& phi);

enum class Uniqueness { Unique, NonUnique, NoExtension, Undecided };
const char* to_string(Uniqueness u);

// Geometry of the solution set of an affine PSD section, probed at a
// seeded relative-interior point: its support projection, the dimension
// of feasible perturbations inside that support, and (when that
// dimension is positive) a concrete second solution.
struct FaceReport {
  Uniqueness verdict = Uniqueness::Undecided;
  long iterations = 0;
  int support_rank = 0;
  int null_dim = 0;
  Eigen::VectorXd interior;                      // herm coords
  std::vector<Eigen::VectorXd> null_directions;  // unit-Frobenius coords
  std::optional<Eigen::VectorXd> second;
  double second_distance = 0.0;  // Frobenius, interior vs second
  std::optional<FarkasCertificate> certificate;  // when NoExtension
  std::string detail;  // reason when Undecided
};

FaceReport analyze_face(const AffinePSDProblem& p, double tol = kDefaultTol,
                        std::uint64_t seed = 0, int pairs = 4);

// Face analysis of the extension spectrahedron, reported as Choi
// matrices. `Unique` means exactly one (U)CP map satisfies the
// prescription; `NonUnique` comes with a verified second map.
struct UniquenessReport {
  Uniqueness verdict = Uniqueness::Undecided;
  long iterations = 0;
  int support_rank = 0;
  int null_dim = 0;
  CMat choi_interior;
  std::vector<Eigen::VectorXd> null_directions;
  std::optional<CMat> second_choi;
  double second_distance = 0.0;
  std::optional<FarkasCertificate> certificate;
  std::string detail;
};

UniquenessReport analyze_uniqueness(const ExtensionProblem& p,
                                    double tol = kDefaultTol,
                                    std::uint64_t seed = 0);

// Uniqueness of phi's restriction relative to the *-algebra the system
// generates: feasible Choi perturbations that act as zero on every
// algebra element do not change the restricted map, so the prescription
// can be rigid on the algebra even when the full-matrix-space extension
// is not unique.
struct BkwReport {
  Uniqueness uniqueness = Uniqueness::Undecided;  // over all of M_n
  Uniqueness algebra_uniqueness = Uniqueness::Undecided;
  bool rigid = false;  // algebra_uniqueness == Unique
  int null_dim = 0;
  int algebra_null_dim = 0;
  StarAlgebra algebra;
  UniquenessReport base;
  std::optional<CMat> algebra_second_choi;  // differs on the algebra
  double algebra_distance = 0.0;  // max op-norm gap over algebra basis
};

// Requires phi unital CP, the system inside the algebra, and the system
// generating it (else NotGenerating).
BkwReport bkw_check(const CPMap& phi, const OperatorSystem& system,
                    const StarAlgebra& algebra, double tol = kDefaultTol,
                    std::uint64_t seed = 0);

// Range of Ψ(probe) over all solutions: for each Hermitian functional
// direction R (the m² coordinate directions first, random after), the
// width of { ⟨R, Ψ(h)⟩ : Ψ feasible } maximized over the Hermitian
// components h of the probe, normalized by the trace norm of R.
struct SpreadReport {
  double spread = 0.0;
  std::vector<double> gaps;  // per direction, unnormalized
  bool decided = false;
  long iterations = 0;
};

SpreadReport extension_spread(const ExtensionProblem& p, const CMat& probe,
                              int directions = 8, double tol = kDefaultTol,
                              std::uint64_t seed = 0);

// Per-index sup distance of a map sequence from `target` over the system
// basis and over the generated-algebra basis, with a tail trend. A track
// "converges" when its final distance is < 10·tol and the tail is flat
// below tol or decreasing.
struct SequenceReport {
  std::vector<double> system_distances;
  std::vector<double> algebra_distances;
  double system_slope = 0.0;
  double algebra_slope = 0.0;
  bool system_converges = false;
  bool algebra_converges = false;
};

SequenceReport sequence_convergence_check(const std::vector<CPMap>& seq,
                                          const CPMap& target,
                                          const OperatorSystem& s,
                                          const StarAlgebra& a,
                                          double tol = 1e-6);

// Least-squares slope of log(y_i) vs log(i+1) over [first, first+count);
// values are clamped at 1e-18 before taking logs.
double log_log_slope(const std::vector<double>& y, std::size_t first,
                     std::size_t count);

}  // namespace ncbkw
