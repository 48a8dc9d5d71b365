#pragma once

#include <optional>
#include <vector>

#include "ncbkw/linalg.hpp"

namespace ncbkw {

// Feasibility/optimization over { C Hermitian d×d : C ⪰ 0,
// ⟨A_l, C⟩ = b_l } with an optional linear objective ⟨R, C⟩ to
// maximize. Constraints are stored as real coordinate rows (see
// herm_coords); pairings with Hermitian matrices are real.
struct AffinePSDProblem {
  int dim = 0;
  Eigen::MatrixXd constraints;  // L × dim², one row per constraint
  Eigen::VectorXd rhs;          // L
  std::optional<Eigen::VectorXd> objective;  // dim² coords

  explicit AffinePSDProblem(int d)
      : dim(d), constraints(0, Eigen::Index(d) * d), rhs(0) {}
  AffinePSDProblem() = default;

  void add_constraint(const CMat& a, double b);
  void add_constraint_row(const Eigen::VectorXd& row, double b);
  void set_objective(const CMat& r);
  Eigen::Index n_constraints() const { return constraints.rows(); }
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Stalled };

const char* to_string(SolveStatus s);

// Infeasibility witness: Σ y_l A_l ⪯ 0 (within 1e-10, Frobenius-scaled)
// together with b·y >= 1 contradicts any PSD solution.
struct FarkasCertificate {
  Eigen::VectorXd y;
  double lambda_max = 0.0;  // of Σ y_l A_l
  double b_dot_y = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Stalled;
  std::optional<Eigen::VectorXd> point;  // herm coords, dim²
  std::optional<double> value;
  double affine_residual = 0.0;  // max_l |⟨A_l,C⟩ - b_l|
  double cone_residual = 0.0;    // max(0, -lambda_min(C))
  long iterations = 0;
  std::optional<FarkasCertificate> certificate;
};

// Defaults per contract: tol 1e-8, max_iter 50000, barrier shrink 0.2.
SolveReport solve_feasibility(const AffinePSDProblem& p,
                              double tol = kDefaultTol,
                              long max_iter = 50000);

// Requires an objective; the caller guarantees the feasible region is
// bounded. Handles empty-interior regions by facial reduction, so the
// reported optimizer is supported exactly on the feasible set's face.
SolveReport maximize_linear(const AffinePSDProblem& p,
                            double tol = kDefaultTol, long max_iter = 50000);

// Average of the optimizers of ⟨±R_j, C⟩ over `pairs` seeded random
// Hermitian directions; lies in the relative interior, so its support
// contains the support of every individual optimizer.
SolveReport relative_interior_point(const AffinePSDProblem& p, int pairs,
                                    double tol = kDefaultTol,
                                    std::uint64_t seed = 0,
                                    long max_iter = 50000);

bool verify_certificate(const AffinePSDProblem& p,
                        const FarkasCertificate& cert);

// Alternating projections (affine ↔ PSD) with Dykstra correction.
// Pure-feasibility fallback: returns Feasible or Stalled, never a
// certificate.
SolveReport dykstra_feasibility(const AffinePSDProblem& p,
                                double tol = kDefaultTol,
                                long max_iter = 50000);

}  // namespace ncbkw
