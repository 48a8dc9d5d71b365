#include "ncbkw/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>

#include "ncbkw/rng.hpp"

namespace ncbkw {

namespace {

constexpr double kBarrierShrink = 0.2;
constexpr double kMuFloorRel = 1e-12;    // final path parameter, relative
constexpr double kFaceCut = 1e-6;        // dual witness eigenvalue split
constexpr double kInteriorMargin = 1e-5; // min-eig above this: real interior
constexpr double kFacialSlack = 1e-6;    // rhs drift allowed after a cut
constexpr double kAffineCut = 1e-10;     // singular-value cutoff, constraints

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---- affine elimination ----------------------------------------------

struct Reduced {
  VectorXd c0;       // min-norm solution of A c = b
  MatrixXd nullsp;   // orthonormal columns spanning ker A
  double residual = 0.0;
  bool consistent = true;
  VectorXd farkas_y;  // set when !consistent: Aᵀy = 0, b·y = 1
};

Reduced reduce_affine(const MatrixXd& a, const VectorXd& b) {
  Reduced red;
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) {
    red.c0 = VectorXd::Zero(cols);
    red.nullsp = MatrixXd::Identity(cols, cols);
    return red;
  }
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  double cut = sv.size() > 0 ? kAffineCut * sv(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  VectorXd ub = svd.matrixU().transpose() * b;
  VectorXd scaled = VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < rank; ++i) scaled(i) = ub(i) / sv(i);
  red.c0 = svd.matrixV().leftCols(sv.size()) * scaled;
  red.nullsp = svd.matrixV().rightCols(cols - rank);
  VectorXd r = a * red.c0 - b;
  red.residual = r.norm();
  red.consistent = red.residual <= 1e-9 * std::max(1.0, b.norm());
  if (!red.consistent) {
    // r ⊥ range(A), so y = -r/||r||² satisfies Aᵀy = 0 and b·y = 1.
    red.farkas_y = -r / (red.residual * red.residual);
  }
  return red;
}

// ---- barrier machinery ------------------------------------------------

// X(z) = X0 + Σ z_i Xi on the current face, all Hermitian d×d.
struct Lmi {
  CMat x0;
  std::vector<CMat> xi;
  int d = 0;

  CMat eval(const VectorXd& z) const {
    CMat x = x0;
    for (Eigen::Index i = 0; i < z.size(); ++i) x += z(i) * xi[i];
    return x;
  }
};

Lmi make_lmi(const VectorXd& c0, const MatrixXd& nullsp, int d) {
  Lmi lmi;
  lmi.d = d;
  lmi.x0 = herm_from_coords(c0, d);
  lmi.xi.reserve(nullsp.cols());
  for (Eigen::Index k = 0; k < nullsp.cols(); ++k)
    lmi.xi.push_back(herm_from_coords(nullsp.col(k), d));
  return lmi;
}

double logdet_pd(const CMat& y, bool& ok) {
  Eigen::LLT<CMat> llt(y);
  if (llt.info() != Eigen::Success) {
    ok = false;
    return 0.0;
  }
  ok = true;
  double ld = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    ld += std::log(std::real(llt.matrixL()(i, i)));
  return 2.0 * ld;
}

CMat herm_inverse(const CMat& y) {
  Eigen::LLT<CMat> llt(y);
  return llt.solve(CMat::Identity(y.rows(), y.cols()));
}

double re_dot(const CMat& a, const CMat& b) {  // Re tr(a b)
  return (a.array() * b.transpose().array()).sum().real();
}

// Solve (-H) dz = grad with a tiny ridge if the factorization fails.
VectorXd ascent_step(MatrixXd neg_h, const VectorXd& grad) {
  double ridge = 1e-13 * std::max(1.0, neg_h.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LDLT<MatrixXd> ldlt(neg_h);
    if (ldlt.info() == Eigen::Success) {
      VectorXd step = ldlt.solve(grad);
      if (step.allFinite() && grad.dot(step) >= 0.0) return step;
    }
    neg_h.diagonal().array() += ridge;
    ridge *= 100.0;
  }
  return grad;  // gradient ascent as a last resort
}

struct PhaseF {
  VectorXd z;
  double achieved = 0.0;  // lambda_min(X(z)) at the returned point
  CMat witness;           // normalized mu·Y⁻¹ at the path end
  bool converged = false;
};

// Maximize t + mu·logdet(X(z) - tI) along mu -> 0; the limit value of t
// is sup over the slice of lambda_min(X).
PhaseF max_min_eig(const Lmi& lmi, double scale, long max_iter, long& used) {
  const int k = int(lmi.xi.size());
  const int d = lmi.d;
  VectorXd u = VectorXd::Zero(k + 1);
  Eigen::SelfAdjointEigenSolver<CMat> es0(lmi.x0, Eigen::EigenvaluesOnly);
  u(k) = es0.eigenvalues().minCoeff() - 1.0 - 0.001 * scale;

  const double mu_floor = kMuFloorRel * scale;
  double mu = std::max(1.0, scale);
  CMat s;  // Y⁻¹ at the current iterate
  PhaseF out;
  bool guard_hit = false;

  auto eval_f = [&](const VectorXd& uu, bool& ok) {
    CMat y = lmi.eval(uu.head(k)) - uu(k) * CMat::Identity(d, d);
    double ld = logdet_pd(y, ok);
    return ok ? uu(k) + mu * ld : 0.0;
  };

  while (true) {
    for (int inner = 0; inner < 80; ++inner) {
      if (++used > max_iter) return out;
      CMat y = lmi.eval(u.head(k)) - u(k) * CMat::Identity(d, d);
      s = herm_inverse(y);
      std::vector<CMat> m(k);
      for (int i = 0; i < k; ++i) m[i] = s * lmi.xi[i];
      VectorXd grad(k + 1);
      for (int i = 0; i < k; ++i) grad(i) = mu * m[i].trace().real();
      grad(k) = 1.0 - mu * s.trace().real();
      MatrixXd neg_h(k + 1, k + 1);
      for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
          double v = mu * re_dot(m[i], m[j]);
          neg_h(i, j) = v;
          neg_h(j, i) = v;
        }
        double v = -mu * re_dot(m[i], s);
        neg_h(i, k) = v;
        neg_h(k, i) = v;
      }
      neg_h(k, k) = mu * re_dot(s, s);
      VectorXd step = ascent_step(neg_h, grad);
      double decrement = grad.dot(step);
      bool ok = false;
      double f0 = eval_f(u, ok);
      if (!ok) return out;  // should not happen: u stays strictly inside
      if (decrement * 0.5 <= 1e-13 * std::max(1.0, std::abs(f0))) break;
      double alpha = 1.0;
      while (alpha > 1e-16) {
        VectorXd cand = u + alpha * step;
        bool cok = false;
        double fc = eval_f(cand, cok);
        if (cok && fc >= f0 + 1e-4 * alpha * decrement) {
          u = cand;
          break;
        }
        alpha *= 0.5;
      }
      if (alpha <= 1e-16) break;
      if (u(k) > 1e8 * scale) {  // unbounded lambda_min: strictly feasible
        guard_hit = true;
        break;
      }
    }
    if (guard_hit || mu <= mu_floor) break;
    mu = std::max(mu * kBarrierShrink, mu_floor * 0.999);
  }

  out.z = u.head(k);
  Eigen::SelfAdjointEigenSolver<CMat> es(lmi.eval(out.z),
                                         Eigen::EigenvaluesOnly);
  out.achieved = es.eigenvalues().minCoeff();
  CMat w = mu * s;
  double tr = w.trace().real();
  if (tr > 0.0) w /= tr;
  out.witness = 0.5 * (w + w.adjoint());
  out.converged = true;
  return out;
}

struct PhaseO {
  VectorXd z;
  bool converged = false;
};

// Maximize g·z + mu·logdet X(z) from a strictly feasible start.
PhaseO barrier_maximize(const Lmi& lmi, const VectorXd& g, VectorXd z,
                        long max_iter, long& used) {
  const int k = int(lmi.xi.size());
  const int d = lmi.d;
  PhaseO out;
  double gscale = std::max(1.0, g.norm());
  double mu = gscale;
  const double mu_floor = 1e-11 * gscale;
  const bool centering_only = g.norm() == 0.0;

  auto eval_f = [&](const VectorXd& zz, bool& ok) {
    double ld = logdet_pd(lmi.eval(zz), ok);
    return ok ? g.dot(zz) + mu * ld : 0.0;
  };

  double z_guard = 1e10 * (1.0 + z.norm());
  while (true) {
    for (int inner = 0; inner < 80; ++inner) {
      if (++used > max_iter) return out;
      CMat s = herm_inverse(lmi.eval(z));
      std::vector<CMat> m(k);
      for (int i = 0; i < k; ++i) m[i] = s * lmi.xi[i];
      VectorXd grad(k);
      for (int i = 0; i < k; ++i) grad(i) = g(i) + mu * m[i].trace().real();
      MatrixXd neg_h(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
          double v = mu * re_dot(m[i], m[j]);
          neg_h(i, j) = v;
          neg_h(j, i) = v;
        }
      VectorXd step = ascent_step(neg_h, grad);
      double decrement = grad.dot(step);
      bool ok = false;
      double f0 = eval_f(z, ok);
      if (!ok) return out;
      if (decrement * 0.5 <= 1e-13 * std::max(1.0, std::abs(f0))) break;
      double alpha = 1.0;
      while (alpha > 1e-16) {
        VectorXd cand = z + alpha * step;
        bool cok = false;
        double fc = eval_f(cand, cok);
        if (cok && fc >= f0 + 1e-4 * alpha * decrement) {
          z = cand;
          break;
        }
        alpha *= 0.5;
      }
      if (alpha <= 1e-16) break;
      if (z.norm() > z_guard) return out;  // objective unbounded on slice
    }
    if (centering_only || mu * d <= mu_floor * std::max(1.0, double(d)))
      break;
    mu = std::max(mu * kBarrierShrink, mu_floor * 0.999);
  }
  out.z = z;
  out.converged = true;
  return out;
}

// ---- certificates ------------------------------------------------------

std::optional<FarkasCertificate> certificate_from_witness(
    const AffinePSDProblem& p, const CMat& witness) {
  VectorXd w = herm_coords(witness);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(
      p.constraints.transpose());
  VectorXd y = cod.solve(w);
  double by = p.rhs.dot(y);
  if (!(by < -1e-14)) return std::nullopt;
  FarkasCertificate cert;
  cert.y = y / by;
  CMat m = herm_from_coords(p.constraints.transpose() * cert.y, p.dim);
  cert.lambda_max = eig_herm(m, 1.0).values.maxCoeff();
  cert.b_dot_y = p.rhs.dot(cert.y);
  return cert;
}

std::optional<FarkasCertificate> affine_inconsistency_certificate(
    const AffinePSDProblem& p, const VectorXd& y) {
  FarkasCertificate cert;
  cert.y = y;
  CMat m = herm_from_coords(p.constraints.transpose() * y, p.dim);
  cert.lambda_max = eig_herm(m, 1.0).values.maxCoeff();
  cert.b_dot_y = p.rhs.dot(y);
  if (!verify_certificate(p, cert)) return std::nullopt;
  return cert;
}

// ---- shared driver ------------------------------------------------------

struct FaceState {
  CMat basis;  // dim × df, orthonormal columns; C = B C' B†
  std::vector<CMat> amats;
  CMat robj;  // objective matrix (zero if absent)
};

void fill_residuals(const AffinePSDProblem& p, const VectorXd& c,
                    SolveReport& rep) {
  if (p.n_constraints() > 0)
    rep.affine_residual =
        (p.constraints * c - p.rhs).cwiseAbs().maxCoeff();
  else
    rep.affine_residual = 0.0;
  CMat cm = herm_from_coords(c, p.dim);
  rep.cone_residual =
      std::max(0.0, -eig_herm(cm, 1.0).values.minCoeff());
}

bool residuals_ok(const AffinePSDProblem& p, const SolveReport& rep,
                  double tol) {
  double bscale = std::max(1.0, p.rhs.size() ? p.rhs.cwiseAbs().maxCoeff()
                                             : 0.0);
  return rep.affine_residual <= tol * bscale && rep.cone_residual <= tol;
}

// One solve: optimize = false does pure feasibility (single round, no
// facial recursion); optimize = true maximizes p.objective with facial
// reduction rounds for empty-interior regions.
SolveReport drive(const AffinePSDProblem& p, double tol, long max_iter,
                  bool optimize) {
  SolveReport rep;
  if (p.dim <= 0) throw InvalidArgument("solver: empty problem");
  if (optimize && !p.objective)
    throw InvalidArgument("maximize_linear: objective missing");

  FaceState face;
  face.basis = CMat::Identity(p.dim, p.dim);
  face.amats.reserve(p.n_constraints());
  for (Eigen::Index l = 0; l < p.n_constraints(); ++l)
    face.amats.push_back(
        herm_from_coords(p.constraints.row(l).transpose(), p.dim));
  face.robj = p.objective
                  ? herm_from_coords(*p.objective, p.dim)
                  : CMat::Zero(p.dim, p.dim);

  long used = 0;
  auto lift_coords = [&](const VectorXd& cf, int df) {
    CMat c = face.basis * herm_from_coords(cf, df) * face.basis.adjoint();
    return herm_coords(0.5 * (c + c.adjoint()));
  };

  for (int round = 0; round <= p.dim + 1; ++round) {
    const int df = int(face.basis.cols());
    MatrixXd af(p.n_constraints(), Eigen::Index(df) * df);
    for (Eigen::Index l = 0; l < p.n_constraints(); ++l) {
      CMat restricted =
          face.basis.adjoint() * face.amats[l] * face.basis;
      af.row(l) = herm_coords(0.5 * (restricted + restricted.adjoint()))
                      .transpose();
    }
    CMat robj_f = face.basis.adjoint() * face.robj * face.basis;
    VectorXd rf = herm_coords(0.5 * (robj_f + robj_f.adjoint()));

    Reduced red = reduce_affine(af, p.rhs);
    rep.iterations = used;
    if (!red.consistent) {
      if (round == 0) {
        auto cert = affine_inconsistency_certificate(p, red.farkas_y);
        if (cert) {
          rep.status = SolveStatus::Infeasible;
          rep.certificate = *cert;
          return rep;
        }
        rep.status = SolveStatus::Stalled;
        return rep;
      }
      // A restricted round inherits the rotation of the numerical witness
      // kernel, so the cut face misses the data by the duality-gap noise.
      // Within that slack, continue on the least-squares projection of the
      // system; the accept paths still verify the lifted point against the
      // original constraints.
      if (red.residual > kFacialSlack * std::max(1.0, p.rhs.norm())) {
        rep.status = SolveStatus::Stalled;
        return rep;
      }
    }

    const int k = int(red.nullsp.cols());
    double scale = std::max(1.0, red.c0.norm());

    if (k == 0) {
      CMat pinned = herm_from_coords(red.c0, df);
      double lmin = eig_herm(pinned, 1.0).values.minCoeff();
      if (lmin >= -tol * scale) {
        rep.point = lift_coords(red.c0, df);
        if (optimize) rep.value = rf.dot(red.c0);
        fill_residuals(p, *rep.point, rep);
        rep.status = residuals_ok(p, rep, tol)
                         ? (optimize ? SolveStatus::Optimal
                                     : SolveStatus::Feasible)
                         : SolveStatus::Stalled;
        if (rep.status == SolveStatus::Stalled) rep.point.reset();
        return rep;
      }
      // Pinned but not PSD: separate with the bottom eigenvector.
      EigHerm e = eig_herm(pinned, 1.0);
      Eigen::VectorXcd v = face.basis * e.vectors.col(0);
      auto cert = certificate_from_witness(p, CMat(v * v.adjoint()));
      if (cert && verify_certificate(p, *cert)) {
        rep.status = SolveStatus::Infeasible;
        rep.certificate = *cert;
        return rep;
      }
      rep.status = SolveStatus::Stalled;
      return rep;
    }

    Lmi lmi = make_lmi(red.c0, red.nullsp, df);
    PhaseF phf = max_min_eig(lmi, scale, max_iter, used);
    rep.iterations = used;
    if (!phf.converged) break;

    if (phf.achieved >= -tol * scale &&
        (!optimize || phf.achieved > kInteriorMargin * scale)) {
      VectorXd cf = red.c0 + red.nullsp * phf.z;
      if (optimize) {
        VectorXd g = red.nullsp.transpose() * rf;
        PhaseO pho = barrier_maximize(lmi, g, phf.z, max_iter, used);
        rep.iterations = used;
        if (!pho.converged) break;
        cf = red.c0 + red.nullsp * pho.z;
      }
      rep.point = lift_coords(cf, df);
      if (optimize) rep.value = rf.dot(cf);
      fill_residuals(p, *rep.point, rep);
      rep.status = residuals_ok(p, rep, tol)
                       ? (optimize ? SolveStatus::Optimal
                                   : SolveStatus::Feasible)
                       : SolveStatus::Stalled;
      if (rep.status == SolveStatus::Stalled) rep.point.reset();
      return rep;
    }

    if (phf.achieved < -tol * scale) {
      CMat lifted =
          face.basis * phf.witness * face.basis.adjoint();
      auto cert = certificate_from_witness(p, 0.5 * (lifted + lifted.adjoint()));
      if (cert && verify_certificate(p, *cert)) {
        rep.status = SolveStatus::Infeasible;
        rep.certificate = *cert;
        return rep;
      }
      rep.status = SolveStatus::Stalled;
      return rep;
    }

    // Near-zero margin: restrict to the kernel of the dual witness.
    EigHerm we = eig_herm(phf.witness, 1.0);
    double wcut = kFaceCut * std::max(0.0, we.values.maxCoeff());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < we.values.size(); ++i)
      if (we.values(i) < wcut) keep.push_back(i);
    if (keep.empty()) {
      // Feasible set is (numerically) {0}.
      VectorXd zero = VectorXd::Zero(Eigen::Index(p.dim) * p.dim);
      SolveReport zr;
      zr.iterations = used;
      zr.point = zero;
      if (optimize) zr.value = 0.0;
      fill_residuals(p, zero, zr);
      if (residuals_ok(p, zr, tol)) {
        zr.status = optimize ? SolveStatus::Optimal : SolveStatus::Feasible;
        return zr;
      }
      break;
    }
    if (int(keep.size()) == df) break;  // no progress
    CMat sub(df, keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      sub.col(i) = we.vectors.col(keep[i]);
    face.basis = face.basis * sub;
  }

  rep.status = SolveStatus::Stalled;
  return rep;
}

}  // namespace

void AffinePSDProblem::add_constraint(const CMat& a, double b) {
  if (a.rows() != dim || a.cols() != dim)
    throw DimensionMismatch("constraint matrix has wrong dimension");
  add_constraint_row(herm_coords(0.5 * (a + a.adjoint())), b);
}

void AffinePSDProblem::add_constraint_row(const Eigen::VectorXd& row,
                                          double b) {
  if (row.size() != Eigen::Index(dim) * dim)
    throw DimensionMismatch("constraint row has wrong length");
  constraints.conservativeResize(constraints.rows() + 1, Eigen::NoChange);
  constraints.row(constraints.rows() - 1) = row.transpose();
  rhs.conservativeResize(rhs.size() + 1);
  rhs(rhs.size() - 1) = b;
}

void AffinePSDProblem::set_objective(const CMat& r) {
  if (r.rows() != dim || r.cols() != dim)
    throw DimensionMismatch("objective matrix has wrong dimension");
  objective = herm_coords(0.5 * (r + r.adjoint()));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Feasible: return "FEASIBLE";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Stalled: return "STALLED";
  }
  return "?";
}

bool verify_certificate(const AffinePSDProblem& p,
                        const FarkasCertificate& cert) {
  if (cert.y.size() != p.n_constraints()) return false;
  CMat m = herm_from_coords(p.constraints.transpose() * cert.y, p.dim);
  double lmax = eig_herm(m, 1.0).values.maxCoeff();
  double by = p.rhs.dot(cert.y);
  return by >= 1.0 - 1e-9 && lmax <= 1e-10 * std::max(1.0, m.norm());
}

SolveReport solve_feasibility(const AffinePSDProblem& p, double tol,
                              long max_iter) {
  SolveReport rep = drive(p, tol, max_iter, /*optimize=*/false);
  if (rep.status == SolveStatus::Stalled) {
    SolveReport fallback = dykstra_feasibility(p, tol, max_iter);
    if (fallback.status == SolveStatus::Feasible) return fallback;
  }
  return rep;
}

SolveReport maximize_linear(const AffinePSDProblem& p, double tol,
                            long max_iter) {
  return drive(p, tol, max_iter, /*optimize=*/true);
}

SolveReport relative_interior_point(const AffinePSDProblem& p, int pairs,
                                    double tol, std::uint64_t seed,
                                    long max_iter) {
  if (pairs <= 0) throw InvalidArgument("pairs must be positive");
  Rng rng(seed);
  VectorXd sum = VectorXd::Zero(Eigen::Index(p.dim) * p.dim);
  long iters = 0;
  for (int j = 0; j < pairs; ++j) {
    CMat r = random_herm_direction(p.dim, rng);
    for (int sign = 0; sign < 2; ++sign) {
      AffinePSDProblem q = p;
      q.set_objective(sign == 0 ? r : CMat(-r));
      SolveReport sub = maximize_linear(q, tol, max_iter);
      iters += sub.iterations;
      if (sub.status != SolveStatus::Optimal) {
        sub.iterations = iters;
        return sub;  // propagate INFEASIBLE / STALLED
      }
      sum += *sub.point;
    }
  }
  SolveReport rep;
  rep.iterations = iters;
  rep.point = sum / (2.0 * pairs);
  fill_residuals(p, *rep.point, rep);
  rep.status = residuals_ok(p, rep, tol) ? SolveStatus::Feasible
                                         : SolveStatus::Stalled;
  if (rep.status == SolveStatus::Stalled) rep.point.reset();
  return rep;
}

SolveReport dykstra_feasibility(const AffinePSDProblem& p, double tol,
                                long max_iter) {
  SolveReport rep;
  Reduced red = reduce_affine(p.constraints, p.rhs);
  if (!red.consistent) return rep;  // stalled; certificates live elsewhere
  const Eigen::Index dd = Eigen::Index(p.dim) * p.dim;
  VectorXd x = red.c0;
  VectorXd pcorr = VectorXd::Zero(dd), qcorr = VectorXd::Zero(dd);
  auto proj_affine = [&](const VectorXd& v) {
    return VectorXd(red.c0 + red.nullsp * (red.nullsp.transpose() *
                                           (v - red.c0)));
  };
  auto proj_psd = [&](const VectorXd& v) {
    EigHerm e = eig_herm(herm_from_coords(v, p.dim), 1.0);
    Eigen::VectorXd clipped = e.values.cwiseMax(0.0);
    CMat m = e.vectors * clipped.asDiagonal() * e.vectors.adjoint();
    return herm_coords(0.5 * (m + m.adjoint()));
  };
  for (long it = 0; it < max_iter; ++it) {
    ++rep.iterations;
    VectorXd y = proj_psd(x + pcorr);
    pcorr = x + pcorr - y;
    VectorXd xn = proj_affine(y + qcorr);
    qcorr = y + qcorr - xn;
    x = xn;
    if ((x - y).norm() <= 0.1 * tol) break;
  }
  rep.point = x;
  fill_residuals(p, x, rep);
  rep.status = residuals_ok(p, rep, tol) ? SolveStatus::Feasible
                                         : SolveStatus::Stalled;
  if (rep.status == SolveStatus::Stalled) rep.point.reset();
  return rep;
}

}  // namespace ncbkw
