#include "ncbkw/extension.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "ncbkw/rng.hpp"

namespace ncbkw {

namespace {

constexpr double kSupportCutRel = 1e-7;  // support eigenvalue threshold
constexpr double kRankCutRel = 1e-9;     // singular-value threshold
constexpr double kBorderline = 10.0;     // ambiguity window factor

struct HermPair {
  CMat op;      // Hermitian element of M_n
  CMat target;  // Hermitian element of M_m
};

std::vector<HermPair> hermitized_family(int in_dim,
                                        const std::vector<CMat>& generators,
                                        const std::vector<CMat>& targets,
                                        int out_dim, bool unital) {
  std::vector<HermPair> family;
  const cd inv2i(0.0, -0.5);  // 1/(2i)
  if (unital)
    family.push_back(
        {CMat::Identity(in_dim, in_dim), CMat::Identity(out_dim, out_dim)});
  for (std::size_t j = 0; j < generators.size(); ++j) {
    const CMat& g = generators[j];
    const CMat& t = targets[j];
    family.push_back({0.5 * (g + g.adjoint()), 0.5 * (t + t.adjoint())});
    family.push_back(
        {inv2i * (g - g.adjoint()), inv2i * (t - t.adjoint())});
  }
  return family;
}

CMat apply_choi(const CMat& c, int n, int m, const CMat& x) {
  CMat out = CMat::Zero(m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out += x(i, j) * c.block(Eigen::Index(i) * m, Eigen::Index(j) * m, m, m);
  return out;
}

double trace_norm(const CMat& h) {
  return eig_herm(h, 1.0).values.cwiseAbs().sum();
}

// Rows pinning the induced map on the Hermitian element h to the
// Hermitian target t: one real equation per entry (r ≤ c real part,
// r < c imaginary part).
void add_value_rows(AffinePSDProblem& spec, const CMat& h, const CMat& t,
                    int out_dim) {
  const CMat hbar = h.conjugate();
  for (int r = 0; r < out_dim; ++r)
    for (int c = r; c < out_dim; ++c) {
      CMat e = CMat::Zero(out_dim, out_dim);
      e(r, c) = 1.0;
      CMat m = kron(hbar, e);
      spec.add_constraint(0.5 * (m + m.adjoint()), std::real(t(r, c)));
      if (r < c) {
        CMat h2 = (m - m.adjoint()) / cd(0.0, 2.0);
        spec.add_constraint(h2, -std::imag(t(r, c)));
      }
    }
}

}  // namespace

ExtensionProblem make_extension_problem(int in_dim,
                                        const std::vector<CMat>& generators,
                                        const std::vector<CMat>& targets,
                                        int out_dim, bool unital) {
  if (in_dim <= 0 || out_dim <= 0)
    throw DimensionMismatch("extension problem: dimensions must be positive");
  if (generators.size() != targets.size())
    throw DimensionMismatch("extension problem: " +
                            std::to_string(generators.size()) +
                            " generators vs " +
                            std::to_string(targets.size()) + " targets");
  if (!unital && generators.empty())
    throw InvalidArgument("extension problem: nothing prescribed");
  for (const CMat& g : generators)
    if (g.rows() != in_dim || g.cols() != in_dim)
      throw DimensionMismatch("extension problem: generator is not " +
                              std::to_string(in_dim) + "x" +
                              std::to_string(in_dim));
  for (const CMat& t : targets)
    if (t.rows() != out_dim || t.cols() != out_dim)
      throw DimensionMismatch("extension problem: target is not " +
                              std::to_string(out_dim) + "x" +
                              std::to_string(out_dim));

  std::vector<HermPair> family =
      hermitized_family(in_dim, generators, targets, out_dim, unital);
  std::vector<CMat> ops;
  ops.reserve(family.size());
  for (const HermPair& p : family) ops.push_back(p.op);

  ExtensionProblem prob;
  prob.in_dim = in_dim;
  prob.out_dim = out_dim;
  prob.unital = unital;
  prob.system = {in_dim, orthonormal_herm_span(ops, in_dim)};

  // Without the unitality constraint the slice is only a bounded (and
  // honestly posed) problem when the prescription itself pins the value
  // at 1, i.e. the identity lies in the span.
  if (!unital) {
    Eigen::VectorXd ic = herm_coords(CMat::Identity(in_dim, in_dim));
    Eigen::VectorXd res = ic;
    for (const CMat& b : prob.system.basis) {
      Eigen::VectorXd bc = herm_coords(b);
      res -= ic.dot(bc) * bc;
    }
    if (res.norm() > 1e-9 * std::sqrt(double(in_dim)))
      throw InconsistentTargets(
          "non-unital prescription does not span the identity, so the "
          "value at 1 is undetermined");
  }

  // Express each basis element over the family and carry the combination
  // to the targets.
  const Eigen::Index nn = Eigen::Index(in_dim) * in_dim;
  Eigen::MatrixXd fam(nn, Eigen::Index(family.size()));
  for (Eigen::Index j = 0; j < Eigen::Index(family.size()); ++j)
    fam.col(j) = herm_coords(family[j].op);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(fam);
  for (const CMat& b : prob.system.basis) {
    Eigen::VectorXd alpha = cod.solve(herm_coords(b));
    CMat tau = CMat::Zero(out_dim, out_dim);
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
      tau += alpha(j) * family[j].target;
    prob.targets.push_back(0.5 * (tau + tau.adjoint()));
  }

  // The prescription must be a well-defined linear map: re-expressing any
  // family pair over the basis must reproduce its target.
  for (const HermPair& p : family) {
    Eigen::VectorXd pc = herm_coords(p.op);
    CMat rebuilt = CMat::Zero(out_dim, out_dim);
    for (std::size_t q = 0; q < prob.system.basis.size(); ++q)
      rebuilt += pc.dot(herm_coords(prob.system.basis[q])) * prob.targets[q];
    if ((rebuilt - p.target).norm() > 1e-9 * std::max(1.0, p.target.norm()))
      throw InconsistentTargets(
          "prescribed values do not define a linear map on the span "
          "(mismatch " +
          std::to_string((rebuilt - p.target).norm()) + ")");
  }
  return prob;
}

ExtensionProblem restriction_problem(const std::vector<CMat>& generators,
                                     const CPMap& phi, bool unital) {
  std::vector<CMat> targets;
  targets.reserve(generators.size());
  for (const CMat& g : generators) targets.push_back(phi.apply(g));
  return make_extension_problem(phi.in_dim(), generators, targets,
                                phi.out_dim(), unital);
}

AffinePSDProblem build_spectrahedron(const ExtensionProblem& p) {
  AffinePSDProblem spec(p.in_dim * p.out_dim);
  for (std::size_t q = 0; q < p.system.basis.size(); ++q)
    add_value_rows(spec, p.system.basis[q], p.targets[q], p.out_dim);
  if (p.unital) {
    // Unitality is one more prescribed value, Ψ(I) = I.
    add_value_rows(spec, CMat::Identity(p.in_dim, p.in_dim),
                   CMat::Identity(p.out_dim, p.out_dim), p.out_dim);
  }
  return spec;
}

double restriction_distance(const ExtensionProblem& p, const CPMap& phi) {
  if (phi.in_dim() != p.in_dim || phi.out_dim() != p.out_dim)
    throw DimensionMismatch("restriction_distance: map has wrong shape");
  double worst = 0.0;
  for (std::size_t q = 0; q < p.system.basis.size(); ++q)
    worst = std::max(
        worst, op_norm(phi.apply(p.system.basis[q]) - p.targets[q]));
  return worst;
}

const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::Unique: return "UNIQUE";
    case Uniqueness::NonUnique: return "NON_UNIQUE";
    case Uniqueness::NoExtension: return "INFEASIBLE";
    case Uniqueness::Undecided: return "UNDECIDED";
  }
  return "?";
}

FaceReport analyze_face(const AffinePSDProblem& p, double tol,
                        std::uint64_t seed, int pairs) {
  FaceReport rep;
  SolveReport interior = relative_interior_point(p, pairs, tol, seed);
  rep.iterations = interior.iterations;
  if (interior.status == SolveStatus::Infeasible) {
    rep.verdict = Uniqueness::NoExtension;
    rep.certificate = interior.certificate;
    return rep;
  }
  if (interior.status != SolveStatus::Feasible) {
    rep.detail = std::string("interior solve ") + to_string(interior.status);
    return rep;
  }
  rep.interior = *interior.point;
  CMat cstar = herm_from_coords(rep.interior, p.dim);
  EigHerm eig = eig_herm(cstar, 1.0);
  double top = eig.values.maxCoeff();
  if (top <= 1e-12) {
    // Zero is the only solution.
    rep.verdict = Uniqueness::Unique;
    return rep;
  }
  double theta = kSupportCutRel * top;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) >= theta / kBorderline &&
        eig.values(i) <= theta * kBorderline) {
      rep.detail = "support split is ambiguous at the cutoff";
      return rep;
    }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > theta) kept.push_back(i);
  const int r = int(kept.size());
  rep.support_rank = r;
  CMat b(p.dim, r);
  double min_kept = top;
  for (int i = 0; i < r; ++i) {
    b.col(i) = eig.vectors.col(kept[i]);
    min_kept = std::min(min_kept, eig.values(kept[i]));
  }

  // Feasible perturbations live in the face C = B C' B†; the kernel of
  // the restricted constraint rows parameterizes them.
  Eigen::MatrixXd rows(p.n_constraints(), Eigen::Index(r) * r);
  for (Eigen::Index l = 0; l < p.n_constraints(); ++l) {
    CMat al = herm_from_coords(p.constraints.row(l).transpose(), p.dim);
    CMat rl = b.adjoint() * al * b;
    rows.row(l) = herm_coords(0.5 * (rl + rl.adjoint())).transpose();
  }
  int null_dim = r * r;
  Eigen::MatrixXd nullbasis;
  if (rows.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax > 1e-300) {
      double cut = kRankCutRel * smax;
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= cut / kBorderline && sv(i) <= cut * kBorderline) {
          rep.detail = "perturbation rank is ambiguous at the cutoff";
          return rep;
        }
        if (sv(i) > cut) ++rank;
      }
      null_dim = int(Eigen::Index(r) * r - rank);
      nullbasis = svd.matrixV().rightCols(null_dim);
    } else {
      nullbasis = Eigen::MatrixXd::Identity(Eigen::Index(r) * r,
                                            Eigen::Index(r) * r);
    }
  } else {
    nullbasis = Eigen::MatrixXd::Identity(Eigen::Index(r) * r,
                                          Eigen::Index(r) * r);
  }
  rep.null_dim = null_dim;
  for (int j = 0; j < null_dim; ++j) {
    CMat d = b * herm_from_coords(nullbasis.col(j), r) * b.adjoint();
    rep.null_directions.push_back(herm_coords(0.5 * (d + d.adjoint())));
  }

  if (null_dim == 0) {
    rep.verdict = Uniqueness::Unique;
    return rep;
  }

  // Step half the support margin along the most-null direction; this
  // stays inside the cone and on the affine slice, giving a concrete
  // second solution.
  const Eigen::VectorXd& dir = rep.null_directions.back();
  CMat d = herm_from_coords(dir, p.dim);
  double step = 0.5 * min_kept / std::max(op_norm(d), 1e-300);
  Eigen::VectorXd second = rep.interior + step * dir;
  CMat c2 = herm_from_coords(second, p.dim);
  double bscale =
      std::max(1.0, p.rhs.size() ? p.rhs.cwiseAbs().maxCoeff() : 0.0);
  double affine = p.n_constraints()
                      ? (p.constraints * second - p.rhs).cwiseAbs().maxCoeff()
                      : 0.0;
  double cone = -eig_herm(c2, 1.0).values.minCoeff();
  if (affine > 10.0 * tol * bscale || cone > tol || step < 1e-6) {
    rep.detail = "second solution failed verification";
    return rep;
  }
  rep.second = second;
  rep.second_distance = step;  // direction has unit Frobenius norm
  rep.verdict = Uniqueness::NonUnique;
  return rep;
}

UniquenessReport analyze_uniqueness(const ExtensionProblem& p, double tol,
                                    std::uint64_t seed) {
  AffinePSDProblem spec = build_spectrahedron(p);
  FaceReport face = analyze_face(spec, tol, seed);
  UniquenessReport rep;
  rep.verdict = face.verdict;
  rep.iterations = face.iterations;
  rep.support_rank = face.support_rank;
  rep.null_dim = face.null_dim;
  rep.null_directions = face.null_directions;
  rep.certificate = face.certificate;
  rep.detail = face.detail;
  if (face.interior.size() > 0)
    rep.choi_interior = herm_from_coords(face.interior, spec.dim);
  if (face.second) rep.second_choi = herm_from_coords(*face.second, spec.dim);
  rep.second_distance = face.second_distance;
  return rep;
}

BkwReport bkw_check(const CPMap& phi, const OperatorSystem& system,
                    const StarAlgebra& algebra, double tol,
                    std::uint64_t seed) {
  const int n = system.ambient_dim;
  if (phi.in_dim() != n || algebra.ambient_dim != n)
    throw DimensionMismatch("bkw_check: map, system, algebra dimensions");
  if (!phi.completely_positive())
    throw NotCompletelyPositive("bkw_check: map is not completely positive");
  if (!phi.unital_flag())
    throw InvalidArgument("bkw_check: map is not unital");
  for (const CMat& b : system.basis)
    if (!contains(algebra, b))
      throw InvalidArgument("bkw_check: system is not inside the algebra");
  StarAlgebra generated = generate_star_algebra(system.basis, n);
  if (generated.dim() != algebra.dim())
    throw NotGenerating("bkw_check: system does not generate the algebra");

  ExtensionProblem p;
  p.in_dim = n;
  p.out_dim = phi.out_dim();
  p.unital = true;
  p.system = system;
  for (const CMat& b : system.basis) p.targets.push_back(phi.apply(b));

  BkwReport rep;
  rep.base = analyze_uniqueness(p, tol, seed);
  rep.uniqueness = rep.base.verdict;
  rep.null_dim = rep.base.null_dim;
  rep.algebra = algebra;

  if (rep.uniqueness != Uniqueness::NonUnique) {
    rep.algebra_uniqueness = rep.uniqueness;
    rep.rigid = rep.uniqueness == Uniqueness::Unique;
    return rep;
  }

  // How do the feasible Choi perturbations act on the algebra?
  // Directions acting as zero never change the restricted map.
  const int m = p.out_dim;
  const Eigen::Index na = Eigen::Index(rep.algebra.basis.size());
  const int k = rep.base.null_dim;
  Eigen::MatrixXd action(2 * na * m * m, k);
  std::vector<CMat> dmats;
  for (int j = 0; j < k; ++j) {
    CMat d = herm_from_coords(rep.base.null_directions[j], n * m);
    dmats.push_back(d);
    Eigen::Index row = 0;
    for (Eigen::Index q = 0; q < na; ++q) {
      CMat delta = apply_choi(d, n, m, rep.algebra.basis[q]);
      for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index rr = 0; rr < m; ++rr) {
          action(row++, j) = std::real(delta(rr, c));
          action(row++, j) = std::imag(delta(rr, c));
        }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(action);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  // Directions have unit norm and the algebra basis is orthonormal, so
  // genuine action is O(1); cut against that absolute scale, or the noise
  // floor of an all-zero action would masquerade as rank.
  double cut = kRankCutRel * std::max(1.0, smax);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) >= cut / kBorderline && sv(i) <= cut * kBorderline) {
      rep.algebra_uniqueness = Uniqueness::Undecided;
      return rep;
    }
    if (sv(i) > cut) ++rank;
  }
  rep.algebra_null_dim = rank;

  if (rank == 0) {
    rep.algebra_uniqueness = Uniqueness::Unique;
    rep.rigid = true;
    return rep;
  }

  // Certify with a second map along the direction of largest action.
  int jstar = 0;
  double best = -1.0;
  for (int j = 0; j < k; ++j) {
    double a = action.col(j).norm();
    if (a > best) {
      best = a;
      jstar = j;
    }
  }
  EigHerm eig = eig_herm(rep.base.choi_interior, 1.0);
  double top = eig.values.maxCoeff();
  double theta = kSupportCutRel * top;
  double min_kept = top;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > theta) min_kept = std::min(min_kept, eig.values(i));
  double step = 0.5 * min_kept / std::max(op_norm(dmats[jstar]), 1e-300);
  CMat c2 = rep.base.choi_interior + step * dmats[jstar];
  double gap = 0.0;
  for (Eigen::Index q = 0; q < na; ++q)
    gap = std::max(
        gap, op_norm(CMat(step * apply_choi(dmats[jstar], n, m,
                                            rep.algebra.basis[q]))));
  if (eig_herm(c2, 1.0).values.minCoeff() < -tol || gap < 1e-12) {
    rep.algebra_uniqueness = Uniqueness::Undecided;
    return rep;
  }
  rep.algebra_second_choi = c2;
  rep.algebra_distance = gap;
  rep.algebra_uniqueness = Uniqueness::NonUnique;
  return rep;
}

SpreadReport extension_spread(const ExtensionProblem& p, const CMat& probe,
                              int directions, double tol,
                              std::uint64_t seed) {
  if (probe.rows() != p.in_dim || probe.cols() != p.in_dim)
    throw DimensionMismatch("extension_spread: probe has wrong dimension");
  if (directions <= 0)
    throw InvalidArgument("extension_spread: need at least one direction");
  AffinePSDProblem spec = build_spectrahedron(p);
  const int m = p.out_dim;
  Rng rng(seed);

  std::vector<CMat> components;
  CMat h1 = 0.5 * (probe + probe.adjoint());
  CMat h2 = (probe - probe.adjoint()) / cd(0.0, 2.0);
  if (h1.norm() > 1e-14) components.push_back(h1);
  if (h2.norm() > 1e-14) components.push_back(h2);
  if (components.empty()) components.push_back(h1);  // zero probe

  SpreadReport rep;
  for (int j = 0; j < directions; ++j) {
    CMat r;
    if (j < m * m) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(Eigen::Index(m) * m);
      e(j) = 1.0;
      r = herm_from_coords(e, m);
    } else {
      r = random_herm_direction(m, rng);
    }
    double gap = 0.0;
    for (const CMat& h : components) {
      CMat g = kron(h.conjugate(), r);
      g = 0.5 * (g + g.adjoint());
      AffinePSDProblem q = spec;
      q.set_objective(g);
      SolveReport up = maximize_linear(q, tol);
      rep.iterations += up.iterations;
      if (up.status != SolveStatus::Optimal) return rep;
      q.set_objective(CMat(-g));
      SolveReport down = maximize_linear(q, tol);
      rep.iterations += down.iterations;
      if (down.status != SolveStatus::Optimal) return rep;
      gap = std::max(gap, *up.value + *down.value);
    }
    rep.gaps.push_back(gap);
    rep.spread = std::max(rep.spread, gap / trace_norm(r));
  }
  rep.decided = true;
  return rep;
}

SequenceReport sequence_convergence_check(const std::vector<CPMap>& seq,
                                          const CPMap& target,
                                          const OperatorSystem& s,
                                          const StarAlgebra& a, double tol) {
  if (seq.empty())
    throw InvalidArgument("sequence_convergence_check: empty sequence");
  auto sup_distance = [&](const CPMap& phi, const std::vector<CMat>& basis) {
    double worst = 0.0;
    for (const CMat& x : basis)
      worst = std::max(worst, op_norm(phi.apply(x) - target.apply(x)));
    return worst;
  };
  SequenceReport rep;
  for (const CPMap& phi : seq) {
    if (phi.in_dim() != target.in_dim() || phi.out_dim() != target.out_dim())
      throw DimensionMismatch("sequence_convergence_check: shape mismatch");
    rep.system_distances.push_back(sup_distance(phi, s.basis));
    rep.algebra_distances.push_back(sup_distance(phi, a.basis));
  }
  auto judge = [&](const std::vector<double>& d, double& slope) {
    std::size_t first = (3 * d.size()) / 4;
    if (first + 1 >= d.size()) first = d.size() - 1;
    slope = log_log_slope(d, first, d.size() - first);
    double tail = 0.0;
    for (std::size_t i = first; i < d.size(); ++i) tail = std::max(tail, d[i]);
    return d.back() < 10.0 * tol && (slope < 0.0 || tail <= tol);
  };
  rep.system_converges = judge(rep.system_distances, rep.system_slope);
  rep.algebra_converges = judge(rep.algebra_distances, rep.algebra_slope);
  return rep;
}

double log_log_slope(const std::vector<double>& y, std::size_t first,
                     std::size_t count) {
  if (first >= y.size() || count < 2) return 0.0;
  count = std::min(count, y.size() - first);
  if (count < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double x = std::log(double(first + 1 + i));
    double v = std::log(std::max(y[first + i], 1e-18));
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return 0.0;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace ncbkw
