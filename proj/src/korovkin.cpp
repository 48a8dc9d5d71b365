#include "ncbkw/korovkin.hpp"

#include <cmath>
#include <limits>

namespace ncbkw {

namespace {

CMat phi_one(const CPMap& phi) {
  return phi.apply(CMat::Identity(phi.in_dim(), phi.in_dim()));
}

// Finite-sequence reading of "→ 0": the last-quarter log-log trend must
// point down (or the tail must already sit below tol) and the final
// distance must be small.
bool judge_track(const std::vector<double>& d, double tol, double& slope) {
  if (d.empty()) return false;
  std::size_t first = (3 * d.size()) / 4;
  if (first + 1 >= d.size()) first = d.size() - 1;
  slope = log_log_slope(d, first, d.size() - first);
  double tail = 0.0;
  for (std::size_t i = first; i < d.size(); ++i) tail = std::max(tail, d[i]);
  return d.back() < 10.0 * tol && (slope < 0.0 || tail <= tol);
}

}  // namespace

PopaProblem make_popa_problem(const CPMap& phi, const CMat& a,
                              std::vector<CPMap> sequence) {
  const int n = phi.in_dim();
  if (a.rows() != n || a.cols() != n)
    throw DimensionMismatch("distinguished element must match the domain");
  for (const CPMap& f : sequence)
    if (f.in_dim() != n || f.out_dim() != phi.out_dim())
      throw DimensionMismatch("sequence entry does not match the limit map");
  PopaProblem p;
  p.ambient_dim = n;
  p.a = a;
  p.algebra = generate_star_algebra({a}, n);
  p.phi = phi;
  p.sequence = std::move(sequence);
  return p;
}

PopaConditions popa_conditions(const CPMap& phi, const CMat& a) {
  const int n = phi.in_dim();
  if (a.rows() != n || a.cols() != n)
    throw DimensionMismatch("distinguished element must match the domain");
  PopaConditions c;
  EigHerm e = eig_herm(phi_one(phi), 1.0);
  c.margin = e.values.minCoeff();
  if (c.margin <= 1e-12) {
    c.residual_left = std::numeric_limits<double>::infinity();
    c.residual_right = c.residual_left;
    return c;
  }
  CMat inv = e.vectors * e.values.cwiseInverse().asDiagonal().toDenseMatrix() *
             e.vectors.adjoint();
  CMat fa = phi.apply(a);
  CMat fad = phi.apply(a.adjoint());
  c.residual_left = op_norm(phi.apply(a.adjoint() * a) - fad * inv * fa);
  c.residual_right = op_norm(phi.apply(a * a.adjoint()) - fa * inv * fad);
  return c;
}

CPMap rescale(const CPMap& phi, double tol) {
  CMat s = inv_sqrt_pd(phi_one(phi), tol);
  CMat big = kron(CMat::Identity(phi.in_dim(), phi.in_dim()), s);
  return CPMap::from_choi(big * phi.choi() * big.adjoint(), phi.in_dim(),
                          phi.out_dim());
}

double homomorphism_residual(const CPMap& psi, const StarAlgebra& a) {
  if (psi.in_dim() != a.ambient_dim)
    throw DimensionMismatch("homomorphism_residual: algebra/map mismatch");
  double worst = 0.0;
  std::vector<CMat> images;
  images.reserve(a.basis.size());
  for (const CMat& x : a.basis) images.push_back(psi.apply(x));
  for (std::size_t i = 0; i < a.basis.size(); ++i) {
    worst = std::max(
        worst, op_norm(psi.apply(a.basis[i].adjoint()) - images[i].adjoint()));
    for (std::size_t j = 0; j < a.basis.size(); ++j)
      worst = std::max(worst, op_norm(psi.apply(a.basis[i] * a.basis[j]) -
                                      images[i] * images[j]));
  }
  return worst;
}

const char* to_string(PopaVerdict v) {
  switch (v) {
    case PopaVerdict::Pass: return "PASS";
    case PopaVerdict::HypothesesViolated: return "HYPOTHESES_VIOLATED";
    case PopaVerdict::PremiseNotConvergent: return "PREMISE_NOT_CONVERGENT";
    case PopaVerdict::ConclusionFails: return "CONCLUSION_FAILS";
  }
  return "?";
}

PopaReport popa_verdict(const PopaProblem& p, double tol) {
  if (p.sequence.empty())
    throw InvalidArgument("popa_verdict: empty sequence");
  PopaReport rep;
  rep.conditions = popa_conditions(p.phi, p.a);
  if (!rep.conditions.satisfied(tol))
    throw ConditionsNotMet(
        "multiplicative-domain conditions fail at the limit (margin " +
        std::to_string(rep.conditions.margin) + ", residuals " +
        std::to_string(rep.conditions.residual_left) + ", " +
        std::to_string(rep.conditions.residual_right) + ")");
  CMat one = phi_one(p.phi);
  rep.kappa = eig_herm(one, 1.0).values.maxCoeff();  // ‖phi(1)^{1/2}‖²

  const int n = p.phi.in_dim();
  std::vector<CMat> test = {CMat::Identity(n, n), p.a,
                            CMat(p.a.adjoint() * p.a),
                            CMat(p.a * p.a.adjoint())};
  CMat s = inv_sqrt_pd(one);
  auto sup_dist = [&](const CPMap& phi_n, const std::vector<CMat>& elems,
                      bool conjugate) {
    double worst = 0.0;
    for (const CMat& x : elems) {
      CMat diff = phi_n.apply(x) - p.phi.apply(x);
      if (conjugate) diff = s * diff * s;
      worst = std::max(worst, op_norm(diff));
    }
    return worst;
  };

  bool hypotheses_ok = true;
  for (std::size_t i = 0; i < p.sequence.size(); ++i) {
    const CPMap& phi_n = p.sequence[i];
    // Positivity probe: the map rescaled by its own unit image is
    // unital, so any Schwarz violation there disqualifies the entry.
    CMat one_n = phi_one(phi_n);
    if (eig_herm(one_n, 1.0).values.minCoeff() > 1e-12) {
      if (schwarz_falsify(rescale(phi_n), 12, 1234)) {
        hypotheses_ok = false;
        rep.schwarz_failures.push_back(i);
      }
    }
    rep.premise_distances.push_back(sup_dist(phi_n, test, false));
    rep.conclusion_distances.push_back(
        sup_dist(phi_n, p.algebra.basis, false));
    rep.rescaled_distances.push_back(sup_dist(phi_n, p.algebra.basis, true));
  }

  rep.kappa_inequality = true;
  for (std::size_t i = 0; i < p.sequence.size(); ++i)
    if (rep.conclusion_distances[i] >
        rep.kappa * rep.rescaled_distances[i] + 1e-8)
      rep.kappa_inequality = false;

  bool premise_ok = judge_track(rep.premise_distances, tol, rep.premise_slope);
  bool conclusion_ok =
      judge_track(rep.conclusion_distances, tol, rep.conclusion_slope);

  if (!hypotheses_ok)
    rep.verdict = PopaVerdict::HypothesesViolated;
  else if (!premise_ok)
    rep.verdict = PopaVerdict::PremiseNotConvergent;
  else if (!conclusion_ok)
    rep.verdict = PopaVerdict::ConclusionFails;
  else
    rep.verdict = PopaVerdict::Pass;
  return rep;
}

// ---- representation-family rigidity ------------------------------------

int BlockStructure::total() const {
  int n = 0;
  for (int s : sizes) {
    if (s <= 0) throw DimensionMismatch("block sizes must be positive");
    n += s;
  }
  if (n == 0) throw DimensionMismatch("no blocks");
  return n;
}

int BlockStructure::offset(int k) const {
  int off = 0;
  for (int l = 0; l < k; ++l) off += sizes[l];
  return off;
}

CPMap representation_build(const BlockStructure& blocks,
                           const std::vector<int>& mults) {
  const int n = blocks.total();
  if (int(mults.size()) != blocks.count())
    throw DimensionMismatch("one multiplicity per block expected");
  int m = 0;
  for (int k = 0; k < blocks.count(); ++k) {
    if (mults[k] < 0)
      throw InvalidArgument("multiplicities must be nonnegative");
    m += blocks.sizes[k] * mults[k];
  }
  if (m == 0)
    throw EmptyRepresentation("every block has multiplicity zero");

  std::vector<CMat> kraus;
  int out_off = 0;
  for (int k = 0; k < blocks.count(); ++k) {
    const int nk = blocks.sizes[k];
    const int mk = mults[k];
    for (int j = 0; j < mk; ++j) {
      CMat v = CMat::Zero(m, n);
      for (int c = 0; c < nk; ++c)
        v(out_off + c * mk + j, blocks.offset(k) + c) = 1.0;
      kraus.push_back(v);
    }
    out_off += nk * mk;
  }
  return CPMap::from_kraus(kraus);
}

namespace {

std::vector<std::vector<int>> default_family(int blocks) {
  std::vector<std::vector<int>> family;
  std::vector<int> cur(blocks, 0);
  while (true) {
    int k = 0;
    while (k < blocks && cur[k] == 2) cur[k++] = 0;
    if (k == blocks) break;
    ++cur[k];
    family.push_back(cur);
  }
  return family;
}

double off_block_mass(const CMat& x, const BlockStructure& bs) {
  CMat off_diag = x;
  for (int k = 0; k < bs.count(); ++k)
    off_diag.block(bs.offset(k), bs.offset(k), bs.sizes[k], bs.sizes[k])
        .setZero();
  return off_diag.norm();
}

}  // namespace

HyperrigidityProblem make_hyperrigidity_problem(
    const std::vector<int>& sizes, const std::vector<CMat>& generators,
    const CPMap& eta, std::vector<std::vector<int>> family) {
  BlockStructure bs{sizes};
  const int n = bs.total();
  for (const CMat& g : generators) {
    if (g.rows() != n || g.cols() != n)
      throw DimensionMismatch("generator does not match the block algebra");
    if (off_block_mass(g, bs) > 1e-12 * std::max(1.0, g.norm()))
      throw InvalidArgument(
          "generator has support outside the diagonal blocks");
  }
  if (eta.in_dim() != n || eta.out_dim() != n)
    throw DimensionMismatch("eta must act on the block algebra");
  if (!eta.completely_positive())
    throw NotCompletelyPositive("eta is not completely positive");
  if (!eta.unital_flag()) throw InvalidArgument("eta is not unital");

  std::vector<CMat> hermitized;
  hermitized.push_back(CMat::Identity(n, n));
  const cd inv2i(0.0, -0.5);
  for (const CMat& g : generators) {
    hermitized.push_back(0.5 * (g + g.adjoint()));
    hermitized.push_back(inv2i * (g - g.adjoint()));
  }
  HyperrigidityProblem prob;
  prob.blocks = bs;
  prob.system = {n, orthonormal_herm_span(hermitized, n)};
  prob.eta = eta;

  for (const CMat& b : prob.system.basis)
    if (off_block_mass(eta.apply(b), bs) > 1e-9)
      throw InvalidArgument("eta does not preserve the block algebra");

  StarAlgebra alg = generate_star_algebra(prob.system.basis, n);
  int want = 0;
  for (int s : sizes) want += s * s;
  if (alg.dim() != want)
    throw NotGenerating("the system generates a *-algebra of dimension " +
                        std::to_string(alg.dim()) + ", need " +
                        std::to_string(want) + " for the full block algebra");

  if (family.empty()) {
    if (bs.count() > 4)
      throw InvalidArgument(
          "default family is too large; pass multiplicity vectors "
          "explicitly");
    family = default_family(bs.count());
  }
  for (const std::vector<int>& mults : family) {
    if (int(mults.size()) != bs.count())
      throw DimensionMismatch("one multiplicity per block expected");
    int total = 0;
    for (int v : mults) {
      if (v < 0) throw InvalidArgument("multiplicities must be nonnegative");
      total += v;
    }
    if (total == 0)
      throw EmptyRepresentation("every block has multiplicity zero");
  }
  prob.family = std::move(family);
  return prob;
}

HyperrigidityReport hyperrigidity_check(const HyperrigidityProblem& p,
                                        double tol, std::uint64_t seed) {
  const int n = p.blocks.total();
  if (p.family.empty())
    throw InvalidArgument("hyperrigidity_check: empty representation family");

  std::vector<int> block_of(n);
  for (int k = 0; k < p.blocks.count(); ++k)
    for (int c = 0; c < p.blocks.sizes[k]; ++c)
      block_of[p.blocks.offset(k) + c] = k;

  HyperrigidityReport rep;
  bool all_unique = true;
  bool any_undecided = false;
  for (const std::vector<int>& mults : p.family) {
    CPMap pi = representation_build(p.blocks, mults);
    const int m = pi.out_dim();
    std::vector<CMat> targets;
    targets.reserve(p.system.basis.size());
    for (const CMat& b : p.system.basis)
      targets.push_back(pi.apply(p.eta.apply(b)));
    ExtensionProblem ext =
        make_extension_problem(n, p.system.basis, targets, m, true);
    AffinePSDProblem spec = build_spectrahedron(ext);
    // Maps factoring through the block algebra: Choi entries coupling
    // inputs from different blocks vanish.
    const int d = n * m;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (block_of[i] == block_of[j]) continue;
        for (int r = 0; r < m; ++r)
          for (int s = 0; s < m; ++s) {
            Eigen::Index u = Eigen::Index(i) * m + r;
            Eigen::Index v = Eigen::Index(j) * m + s;
            CMat e = CMat::Zero(d, d);
            e(u, v) = 1.0;
            spec.add_constraint(0.5 * (e + e.adjoint()), 0.0);
            spec.add_constraint(CMat((e - e.adjoint()) / cd(0.0, 2.0)), 0.0);
          }
      }

    FaceReport face = analyze_face(spec, tol, seed);
    HyperrigidityMember member;
    member.mults = mults;
    member.verdict = face.verdict;
    member.support_rank = face.support_rank;
    member.null_dim = face.null_dim;
    member.iterations = face.iterations;
    member.detail = face.detail;
    if (face.second) {
      member.witness =
          CPMap::from_choi(herm_from_coords(*face.second, d), n, m);
      member.witness_distance = face.second_distance;
    }
    if (face.verdict == Uniqueness::NonUnique) rep.refuted = true;
    if (face.verdict != Uniqueness::Unique) all_unique = false;
    if (face.verdict == Uniqueness::Undecided) any_undecided = true;
    rep.members.push_back(std::move(member));
  }
  rep.hyperrigid_on_family = all_unique;
  rep.decided = rep.refuted || !any_undecided;
  return rep;
}

}  // namespace ncbkw
