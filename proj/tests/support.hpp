#pragma once

// Shared helpers for the test binaries: matrix literals, seeded random
// problem instances, and a brute-force uniqueness oracle that decides
// extension uniqueness from first principles (constraint kernel + PSD
// perturbation sweep), independent of the barrier solver.

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "ncbkw/cpmap.hpp"
#include "ncbkw/extension.hpp"
#include "ncbkw/operator_system.hpp"
#include "ncbkw/rng.hpp"

namespace ncbkw::test {

inline CMat m2(cd a, cd b, cd c, cd d) {
  CMat r(2, 2);
  r << a, b, c, d;
  return r;
}

inline CMat unit(int n, int m, int i, int j) {
  CMat r = CMat::Zero(n, m);
  r(i, j) = 1.0;
  return r;
}

inline CMat unit(int n, int i, int j) { return unit(n, n, i, j); }

inline double mdiff(const CMat& a, const CMat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Random unital CP map M_n -> M_m with `k` Kraus operators: raw Gaussian
// Kraus, then left-normalized so sum K K† = I_m. Needs k·n >= m for the
// sum to be invertible.
inline CPMap rand_ucp(Rng& rng, int n, int m, int k) {
  k = std::max(k, (m + n - 1) / n);
  for (;;) {
    std::vector<CMat> kraus;
    CMat s = CMat::Zero(m, m);
    for (int i = 0; i < k; ++i) {
      kraus.push_back(random_complex(m, n, rng));
      s += kraus.back() * kraus.back().adjoint();
    }
    Eigen::SelfAdjointEigenSolver<CMat> eig(s);
    if (eig.eigenvalues().minCoeff() < 1e-6) continue;  // redraw
    CMat root = eig.operatorInverseSqrt();
    for (CMat& kk : kraus) kk = root * kk;
    return CPMap::from_kraus(kraus);
  }
}

// A seeded extension instance with a known feasible map: random
// generators redrawn until they generate the full matrix algebra, a
// random unital CP map, targets = its values on the generators.
struct RandomInstance {
  int n = 0, m = 0;
  std::vector<CMat> generators;
  CPMap phi;
  ExtensionProblem problem;
};

inline RandomInstance random_extension_instance(std::uint64_t seed) {
  Rng rng(seed);
  RandomInstance inst;
  inst.n = rng.uniform_int(2, 3);
  inst.m = rng.uniform_int(1, 3);
  int count = rng.uniform_int(1, 2);
  for (;;) {
    inst.generators.clear();
    for (int i = 0; i < count; ++i)
      inst.generators.push_back(random_complex(inst.n, inst.n, rng));
    if (generate_star_algebra(inst.generators, inst.n).dim() ==
        inst.n * inst.n)
      break;
  }
  inst.phi = rand_ucp(rng, inst.n, inst.m, rng.uniform_int(1, 3));
  std::vector<CMat> targets;
  for (const CMat& g : inst.generators) targets.push_back(inst.phi.apply(g));
  inst.problem = make_extension_problem(inst.n, inst.generators, targets,
                                        inst.m, true);
  return inst;
}

// ---- brute-force uniqueness oracle --------------------------------------
//
// Works directly from the definition: a Hermitian D is a constraint-kernel
// direction when the map induced by D (blocks of D as values on matrix
// units) vanishes on every system basis element and sums to zero on the
// diagonal blocks. The instance is non-unique iff some kernel direction
// can be added to the known feasible Choi matrix without leaving the PSD
// cone. Two search phases, both on the exact kernel parameterization:
// +/- probes over kernel basis vectors and random signed combinations at
// two step sizes, then supergradient ascent on the concave function
// y -> lambda_min(base + sum_j y_j K_j). Any ascent point that is strictly
// PSD at distance >= 1e-4 lies on the affine slice by construction, so it
// certifies a second solution; the ascent exists because the feasible
// directions out of a rank-deficient base can form a measure-zero cone in
// the kernel that blind sampling never hits.

inline std::vector<CMat> oracle_herm_basis(int d) {
  std::vector<CMat> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) basis.push_back(unit(d, i, i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      basis.push_back(r * (unit(d, i, j) + unit(d, j, i)));
      basis.push_back(cd(0, r) * (unit(d, i, j) - unit(d, j, i)));
    }
  return basis;
}

inline CMat oracle_induced(const CMat& choi, const CMat& b, int n, int m) {
  CMat out = CMat::Zero(m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out += b(i, j) * choi.block(i * m, j * m, m, m);
  return out;
}

inline std::vector<CMat> oracle_kernel(const ExtensionProblem& p) {
  const int n = p.in_dim, m = p.out_dim, d = n * m;
  std::vector<CMat> basis = oracle_herm_basis(d);
  const int cols = int(basis.size());
  const int block_rows = 2 * m * m;
  const int rows = block_rows * (int(p.system.basis.size()) + (p.unital ? 1 : 0));
  Eigen::MatrixXd a(rows, cols);
  for (int c = 0; c < cols; ++c) {
    int r = 0;
    auto put = [&](const CMat& v) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          a(r++, c) = v(i, j).real();
          a(r++, c) = v(i, j).imag();
        }
    };
    for (const CMat& b : p.system.basis) put(oracle_induced(basis[c], b, n, m));
    if (p.unital) {
      CMat tr = CMat::Zero(m, m);
      for (int i = 0; i < n; ++i) tr += basis[c].block(i * m, i * m, m, m);
      put(tr);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = sv.size() > 0 ? 1e-9 * std::max(1.0, sv(0)) : 0.0;
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  std::vector<CMat> kernel;
  for (int k = rank; k < cols; ++k) {
    CMat dmat = CMat::Zero(d, d);
    for (int c = 0; c < cols; ++c) dmat += svd.matrixV()(c, k) * basis[c];
    kernel.push_back(dmat);
  }
  return kernel;
}

inline bool oracle_direction_feasible(const CMat& base, const CMat& dir) {
  Eigen::SelfAdjointEigenSolver<CMat> eb(base);
  double slack = -1e-10 * std::max(1.0, eb.eigenvalues().maxCoeff());
  for (double eps : {1e-3, 1e-4}) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(base + eps * dir);
    if (eig.eigenvalues().minCoeff() >= slack) return true;
  }
  return false;
}

// Ascent on the concave y -> lambda_min of the slice point, through the
// smooth softmin surrogate -log tr exp(-beta C(y)) / beta. Its gradient
// weights the whole near-minimal eigenspace, so every minimal eigenvalue
// is pushed up together and the kinks where lambda_min has multiplicity
// do not stall the climb; beta doubles whenever the surrogate stops
// improving. Success is self-certifying: a strictly PSD point of the
// slice away from the base. One start aims at the kernel projection of
// the scaled identity (the natural deep-interior candidate), the rest
// are random.
inline bool oracle_ascent_finds_second(const CMat& base,
                                       const std::vector<CMat>& kernel,
                                       Rng& rng) {
  const int k = int(kernel.size());
  const Eigen::Index d = base.rows();
  const double scale = std::max(1.0, base.norm());
  auto assemble = [&](const Eigen::VectorXd& y) {
    CMat c = base;
    for (int j = 0; j < k; ++j) c += y(j) * kernel[j];
    return c;
  };
  auto softmin = [](const Eigen::VectorXd& lam, double beta) {
    double lo = lam.minCoeff(), s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      s += std::exp(-beta * (lam(i) - lo));
    return lo - std::log(s) / beta;
  };
  Eigen::VectorXd center(k);
  CMat gap = (base.trace() / double(d)) * CMat::Identity(d, d) - base;
  for (int j = 0; j < k; ++j)
    center(j) = std::real((kernel[j].adjoint() * gap).trace());
  for (int start = 0; start < 3; ++start) {
    Eigen::VectorXd y;
    if (start == 0) {
      y = center;
    } else if (start == 1) {
      y = Eigen::VectorXd::Zero(k);
    } else {
      y.resize(k);
      for (int j = 0; j < k; ++j) y(j) = rng.normal();
      y *= 0.1 / std::max(y.norm(), 1e-12);
    }
    double beta = 50.0 / scale;
    Eigen::SelfAdjointEigenSolver<CMat> eig(assemble(y));
    double f = softmin(eig.eigenvalues(), beta);
    double step = 0.05 * scale;
    for (int it = 0; it < 600; ++it) {
      if (eig.eigenvalues().minCoeff() > 1e-7 * scale && y.norm() >= 1e-4)
        return true;
      if (step < 1e-12) {
        if (beta > 1e7 / scale) break;
        beta *= 2.0;
        f = softmin(eig.eigenvalues(), beta);
        step = 0.01 * scale;
        continue;
      }
      const Eigen::VectorXd& lam = eig.eigenvalues();
      double lo = lam.minCoeff();
      Eigen::VectorXd w(lam.size());
      for (Eigen::Index i = 0; i < lam.size(); ++i)
        w(i) = std::exp(-beta * (lam(i) - lo));
      w /= w.sum();
      Eigen::VectorXd grad(k);
      for (int j = 0; j < k; ++j) {
        double g = 0.0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
          g += w(i) * std::real(eig.eigenvectors().col(i).dot(
                          kernel[j] * eig.eigenvectors().col(i)));
        grad(j) = g;
      }
      double gn = grad.norm();
      if (gn < 1e-14) break;
      Eigen::VectorXd ytry = y + (step / gn) * grad;
      Eigen::SelfAdjointEigenSolver<CMat> etry(assemble(ytry));
      double ftry = softmin(etry.eigenvalues(), beta);
      if (ftry > f) {
        y = ytry;
        eig = etry;
        f = ftry;
        step *= 1.3;
      } else {
        step *= 0.5;
      }
    }

    // Douglas-Rachford finisher between the kernel slice and the PSD
    // cone, started at the plateau: the slice-projected shadow iterate
    // converges to a solution point, and does so orders of magnitude
    // faster than plain alternating projections when the face is thin.
    // When the solution face is more than the base point but its interior
    // is too thin for the strictly-positive exit above, the shadow lands
    // on a second solution; a shadow that shrinks back toward the base is
    // the unique case and is abandoned early.
    CMat z = assemble(y);
    for (int round = 0; round < 3000; ++round) {
      CMat dz = z - base;
      Eigen::VectorXd ya(k);
      for (int j = 0; j < k; ++j)
        ya(j) = std::real((kernel[j].adjoint() * dz).trace());
      CMat a = assemble(ya);
      Eigen::SelfAdjointEigenSolver<CMat> ea(a);
      if (ea.eigenvalues().minCoeff() >= -1e-10 * scale) {
        if (ya.norm() >= 1e-3) return true;
        break;
      }
      if (round > 50 && ya.norm() < 1e-4) break;
      CMat refl = a + a - z;
      Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (refl + refl.adjoint()));
      CMat b = CMat::Zero(d, d);
      for (Eigen::Index i = 0; i < d; ++i)
        if (es.eigenvalues()(i) > 0.0)
          b += es.eigenvalues()(i) * es.eigenvectors().col(i) *
               es.eigenvectors().col(i).adjoint();
      z += b - a;
    }
  }
  return false;
}

// True when the known-feasible Choi matrix is the only solution.
inline bool oracle_unique(const ExtensionProblem& p, const CMat& base_choi,
                          std::uint64_t seed) {
  std::vector<CMat> kernel = oracle_kernel(p);
  if (kernel.empty()) return true;
  for (const CMat& dir : kernel) {
    if (oracle_direction_feasible(base_choi, dir)) return false;
    if (oracle_direction_feasible(base_choi, -dir)) return false;
  }
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (int t = 0; t < 50; ++t) {
    CMat dir = CMat::Zero(base_choi.rows(), base_choi.cols());
    for (const CMat& k : kernel) dir += rng.normal() * k;
    double norm = dir.norm();
    if (norm < 1e-12) continue;
    dir /= norm;
    if (oracle_direction_feasible(base_choi, dir)) return false;
    if (oracle_direction_feasible(base_choi, -dir)) return false;
  }
  return !oracle_ascent_finds_second(base_choi, kernel, rng);
}

}  // namespace ncbkw::test
