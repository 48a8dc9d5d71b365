#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncbkw/extension.hpp"
#include "support.hpp"

using namespace ncbkw;
using namespace ncbkw::test;

namespace {

CMat t_matrix() { return m2(1, cd(0, 1), cd(0, -1), 1); }

CPMap diag_compression() {
  return CPMap::from_kraus({unit(2, 0, 0), unit(2, 1, 1)});
}

CPMap swap_map() {
  CMat c = CMat::Zero(4, 4);
  c(1, 1) = 1.0;  // block(1,1) = E22
  c(2, 2) = 1.0;  // block(2,2) = E11
  return CPMap::from_choi(c, 2, 2);
}

ExtensionProblem unique_problem() {
  return restriction_problem({unit(2, 0, 0), t_matrix()}, diag_compression());
}

ExtensionProblem swap_problem() {
  return make_extension_problem(2, {unit(2, 0, 1)}, {CMat::Zero(2, 2)}, 2,
                                true);
}

}  // namespace

TEST_CASE("make_extension_problem hermitizes and validates targets") {
  ExtensionProblem p = swap_problem();
  CHECK(p.in_dim == 2);
  CHECK(p.out_dim == 2);
  CHECK(p.unital);
  CHECK(p.system.dim() == 3);
  CHECK(p.targets.size() == 3);
  for (std::size_t i = 0; i < p.targets.size(); ++i) {
    CHECK(mdiff(p.system.basis[i], p.system.basis[i].adjoint()) < 1e-12);
    CHECK(mdiff(p.targets[i], p.targets[i].adjoint()) < 1e-12);
  }

  // conflicting values on the same generator
  CHECK_THROWS_AS(
      make_extension_problem(2, {unit(2, 0, 0), unit(2, 0, 0)},
                             {unit(2, 0, 0), 2.0 * unit(2, 0, 0)}, 2, true),
      InconsistentTargets);
  // span relation violated: g and 2g must scale together
  CHECK_THROWS_AS(
      make_extension_problem(2, {unit(2, 0, 0), 2.0 * unit(2, 0, 0)},
                             {unit(2, 0, 0), unit(2, 0, 0)}, 2, true),
      InconsistentTargets);
  // non-unital problem whose span cannot determine the image of I
  CHECK_THROWS_AS(make_extension_problem(2, {unit(2, 0, 0)}, {unit(2, 1, 1)},
                                         2, false),
                  InconsistentTargets);
}

TEST_CASE("restriction_problem reproduces the map's own values") {
  CPMap phi = diag_compression();
  ExtensionProblem p = restriction_problem({unit(2, 0, 1)}, phi);
  CHECK(restriction_distance(p, phi) < 1e-12);
  CHECK(restriction_distance(p, swap_map()) < 1e-12);  // also feasible
  CHECK(restriction_distance(p, CPMap::identity(2)) > 0.5);
}

TEST_CASE("compression on span{I, E11, T} extends uniquely") {
  UniquenessReport r = analyze_uniqueness(unique_problem());
  CHECK(r.verdict == Uniqueness::Unique);
  CHECK(r.null_dim == 0);
  CMat expected = CMat::Zero(4, 4);
  expected(0, 0) = 1.0;
  expected(3, 3) = 1.0;
  CHECK(mdiff(r.choi_interior, expected) < 1e-8);
  CHECK(!r.second_choi.has_value());
}

TEST_CASE("compression on the swap system has a 4-dimensional solution set") {
  ExtensionProblem p = swap_problem();
  UniquenessReport r = analyze_uniqueness(p);
  CHECK(r.verdict == Uniqueness::NonUnique);
  CHECK(r.null_dim == 4);
  REQUIRE(r.second_choi.has_value());
  CPMap second = CPMap::from_choi(*r.second_choi, 2, 2);
  CHECK(second.choi_min_eig() > -1e-8);
  CHECK(restriction_distance(p, second) < 1e-8);
  CHECK((*r.second_choi - r.choi_interior).norm() > 1e-6);
  CHECK(r.second_distance > 1e-6);
  // the swap map itself solves the prescription
  CHECK(restriction_distance(p, swap_map()) < 1e-12);
}

TEST_CASE("verdict strings") {
  CHECK(std::string(to_string(Uniqueness::Unique)) == "UNIQUE");
  CHECK(std::string(to_string(Uniqueness::NonUnique)) == "NON_UNIQUE");
  CHECK(std::string(to_string(Uniqueness::NoExtension)) == "INFEASIBLE");
  CHECK(std::string(to_string(Uniqueness::Undecided)) == "UNDECIDED");
}

TEST_CASE("analyze_face flags inconsistent prescriptions with a certificate") {
  AffinePSDProblem p(2);
  p.add_constraint(m2(1, 0, 0, 0), -1.0);
  FaceReport r = analyze_face(p);
  CHECK(r.verdict == Uniqueness::NoExtension);
  REQUIRE(r.certificate.has_value());
  CHECK(verify_certificate(p, *r.certificate));
}

TEST_CASE("uniqueness is a property of the span, not the generators") {
  ExtensionProblem alt = make_extension_problem(
      2, {cd(0, 2) * unit(2, 0, 1)}, {CMat::Zero(2, 2)}, 2, true);
  UniquenessReport r = analyze_uniqueness(alt);
  CHECK(r.verdict == Uniqueness::NonUnique);
  CHECK(r.null_dim == 4);

  ExtensionProblem alt_unique = restriction_problem(
      {unit(2, 0, 0) + t_matrix(), t_matrix()}, diag_compression());
  CHECK(analyze_uniqueness(alt_unique).verdict == Uniqueness::Unique);
}

TEST_CASE("composing with a unitary conjugation preserves uniqueness") {
  CMat u(2, 2);  // hadamard
  const double r2 = 1.0 / std::sqrt(2.0);
  u << r2, r2, r2, -r2;
  CPMap rot = CPMap::from_conjugation({u, 1.0});
  CPMap phi = compose(rot, diag_compression());
  ExtensionProblem p = restriction_problem({unit(2, 0, 0), t_matrix()}, phi);
  CHECK(analyze_uniqueness(p).verdict == Uniqueness::Unique);
}

TEST_CASE("bkw_check validates its hypotheses") {
  OperatorSystem sys = make_operator_system({unit(2, 0, 1)}, 2);
  StarAlgebra full = generate_star_algebra({unit(2, 0, 1)}, 2);
  StarAlgebra diag = generate_star_algebra({unit(2, 0, 0)}, 2);

  // non-unital map
  CHECK_THROWS_AS(
      bkw_check(CPMap::from_conjugation({m2(2, 0, 0, 1), 1.0}), sys, full),
      InvalidArgument);
  // system outside the algebra
  CHECK_THROWS_AS(bkw_check(CPMap::identity(2), sys, diag), InvalidArgument);
  // system does not generate the algebra
  OperatorSystem small = make_operator_system({unit(2, 0, 0)}, 2);
  CHECK_THROWS_AS(bkw_check(diag_compression(), small, full), NotGenerating);
  // non-CP unital map (transpose)
  CMat tc = CMat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) tc.block(i * 2, j * 2, 2, 2) = unit(2, j, i);
  CHECK_THROWS_AS(bkw_check(CPMap::from_choi(tc, 2, 2), sys, full),
                  NotCompletelyPositive);
}

TEST_CASE("bkw_check on the two flagship prescriptions") {
  StarAlgebra full = generate_star_algebra({unit(2, 0, 1)}, 2);

  OperatorSystem su = make_operator_system({unit(2, 0, 0), t_matrix()}, 2);
  StarAlgebra full_u = generate_star_algebra({unit(2, 0, 0), t_matrix()}, 2);
  BkwReport unique = bkw_check(diag_compression(), su, full_u);
  CHECK(unique.uniqueness == Uniqueness::Unique);
  CHECK(unique.rigid);
  CHECK(unique.null_dim == 0);
  CHECK(unique.algebra_null_dim == 0);

  OperatorSystem ss = make_operator_system({unit(2, 0, 1)}, 2);
  BkwReport swap = bkw_check(diag_compression(), ss, full);
  CHECK(swap.uniqueness == Uniqueness::NonUnique);
  CHECK(!swap.rigid);
  CHECK(swap.null_dim == 4);
  CHECK(swap.algebra_null_dim == 4);
  REQUIRE(swap.algebra_second_choi.has_value());
  CHECK(swap.algebra_distance > 1e-6);
}

TEST_CASE("rigidity on the generated algebra can beat full-space uniqueness") {
  // prescribing the identity on span{I, E11}: the diagonal algebra values
  // are pinned, but psi(E12) is free in the full matrix space
  OperatorSystem sys = make_operator_system({unit(2, 0, 0)}, 2);
  StarAlgebra diag = generate_star_algebra({unit(2, 0, 0)}, 2);
  BkwReport r = bkw_check(CPMap::identity(2), sys, diag);
  CHECK(r.uniqueness == Uniqueness::NonUnique);
  CHECK(r.null_dim == 2);
  CHECK(r.algebra_uniqueness == Uniqueness::Unique);
  CHECK(r.algebra_null_dim == 0);
  CHECK(r.rigid);
}

TEST_CASE("extension spread: pinned directions have no width") {
  SpreadReport unique = extension_spread(unique_problem(), unit(2, 0, 1));
  CHECK(unique.decided);
  CHECK(unique.spread <= 1e-7);

  SpreadReport swap = extension_spread(swap_problem(), unit(2, 0, 0));
  CHECK(swap.decided);
  CHECK(swap.spread >= 1.0 - 1e-6);

  SpreadReport unital = extension_spread(swap_problem(),
                                         CMat::Identity(2, 2));
  CHECK(unital.decided);
  CHECK(unital.spread <= 1e-7);
}

TEST_CASE("constant certificate sequences refute convergence transfer") {
  OperatorSystem s = make_operator_system({unit(2, 0, 1)}, 2);
  StarAlgebra a = generate_star_algebra({unit(2, 0, 1)}, 2);
  std::vector<CPMap> seq(20, swap_map());
  SequenceReport r = sequence_convergence_check(seq, diag_compression(), s, a);
  CHECK(r.system_converges);
  CHECK(!r.algebra_converges);
  CHECK(r.system_distances.back() < 1e-10);
  CHECK(r.algebra_distances.back() > 0.5);
}

TEST_CASE("a genuinely converging sequence converges on both tracks") {
  OperatorSystem s = make_operator_system({unit(2, 0, 1)}, 2);
  StarAlgebra a = generate_star_algebra({unit(2, 0, 1)}, 2);
  CMat cid = CPMap::identity(2).choi();
  std::vector<CPMap> seq;
  for (int k = 1; k <= 40; ++k) {
    double eps = 1.0 / k;
    CMat c = (1.0 - eps) * cid + eps * 0.5 * CMat::Identity(4, 4);
    seq.push_back(CPMap::from_choi(c, 2, 2));
  }
  SequenceReport r =
      sequence_convergence_check(seq, CPMap::identity(2), s, a, 0.01);
  CHECK(r.system_converges);
  CHECK(r.algebra_converges);
  CHECK(r.system_slope < -0.5);
  CHECK(r.algebra_slope < -0.5);
}

TEST_CASE("log_log_slope fits power-law decay") {
  std::vector<double> inv, flat, zero;
  for (int i = 0; i < 50; ++i) {
    inv.push_back(1.0 / (i + 1));
    flat.push_back(0.7);
    zero.push_back(0.0);
  }
  CHECK(log_log_slope(inv, 0, inv.size()) == doctest::Approx(-1.0));
  CHECK(log_log_slope(flat, 0, flat.size()) == doctest::Approx(0.0));
  CHECK(std::isfinite(log_log_slope(zero, 0, zero.size())));
  CHECK(log_log_slope(inv, 37, 13) == doctest::Approx(-1.0));
}

TEST_CASE("oracle ground truth on the flagship prescriptions") {
  CHECK(oracle_unique(unique_problem(), diag_compression().choi(), 1));
  CHECK(!oracle_unique(swap_problem(), diag_compression().choi(), 1));
}

TEST_CASE("solver and oracle agree on seeded random instances") {
  for (std::uint64_t seed = 900; seed < 910; ++seed) {
    RandomInstance inst = random_extension_instance(seed);
    UniquenessReport r = analyze_uniqueness(inst.problem, kDefaultTol, seed);
    REQUIRE((r.verdict == Uniqueness::Unique ||
             r.verdict == Uniqueness::NonUnique));
    bool unique = oracle_unique(inst.problem, inst.phi.choi(), seed);
    CHECK(unique == (r.verdict == Uniqueness::Unique));
  }
}
