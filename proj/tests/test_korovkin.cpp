#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ncbkw/korovkin.hpp"
#include "support.hpp"

using namespace ncbkw;
using namespace ncbkw::test;

namespace {

CPMap conj_map(const CMat& t, double lambda = 1.0) {
  return CPMap::from_conjugation({t, lambda});
}

CPMap diag_compression() {
  return CPMap::from_kraus({unit(2, 0, 0), unit(2, 1, 1)});
}

CPMap transpose2() {
  CMat c = CMat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c.block(i * 2, j * 2, 2, 2) = unit(2, j, i);
  return CPMap::from_choi(c, 2, 2);
}

std::vector<CPMap> geometric_sequence() {
  std::vector<CPMap> seq;
  for (int k = 1; k <= 12; ++k)
    seq.push_back(conj_map(m2(2 + std::pow(10.0, -k), 0, 0, 1)));
  return seq;
}

}  // namespace

TEST_CASE("conjugations satisfy the multiplicative-domain identities exactly") {
  PopaConditions c = popa_conditions(conj_map(m2(2, 0, 0, 1)), unit(2, 0, 1));
  CHECK(c.margin == doctest::Approx(1.0));
  CHECK(c.residual_left <= 1e-12);
  CHECK(c.residual_right <= 1e-12);
  CHECK(c.satisfied());

  Rng rng(31);
  int checked = 0;
  while (checked < 100) {
    int n = rng.uniform_int(2, 3);
    CMat t = random_complex(n, n, rng);
    Eigen::JacobiSVD<CMat> svd(t);
    if (svd.singularValues().minCoeff() < 0.3) continue;
    double lambda = 0.1 + 2.0 * rng.uniform();
    CMat a = random_complex(n, n, rng);
    PopaConditions pc = popa_conditions(conj_map(t, lambda), a);
    CHECK(pc.margin > 1e-3);
    CHECK(pc.residual_left <= 1e-8);
    CHECK(pc.residual_right <= 1e-8);
    ++checked;
  }
}

TEST_CASE("the compression violates the conditions at E12") {
  PopaConditions c = popa_conditions(diag_compression(), unit(2, 0, 1));
  CHECK(c.margin == doctest::Approx(1.0));
  CHECK(c.residual_left == doctest::Approx(1.0));
  CHECK(!c.satisfied());
  PopaProblem p = make_popa_problem(diag_compression(), unit(2, 0, 1),
                                    {diag_compression()});
  CHECK_THROWS_AS(popa_verdict(p), ConditionsNotMet);
}

TEST_CASE("conditions honour the phi(1)-weighted inverse") {
  // x -> 2*x11*I: phi(1) = 2I, so phi(a)* phi(1)^{-1} phi(a) only matches
  // phi(a*a) at a = E11 when the middle inverse carries the 1/2; an
  // unweighted phi(a)*phi(a) would leave residual 2.
  CPMap flat = CPMap::from_choi(kron(unit(2, 0, 0),
                                     2.0 * CMat::Identity(2, 2)), 2, 2);
  PopaConditions ok = popa_conditions(flat, unit(2, 0, 0));
  CHECK(ok.margin == doctest::Approx(2.0));
  CHECK(ok.residual_left <= 1e-12);
  CHECK(ok.residual_right <= 1e-12);
  CHECK(ok.satisfied());

  // The same map is only one-sidedly multiplicative at E12: a*a = E22 is
  // annihilated while a a* = E11 is not.
  PopaConditions oneside = popa_conditions(flat, unit(2, 0, 1));
  CHECK(oneside.margin == doctest::Approx(2.0));
  CHECK(oneside.residual_left <= 1e-12);
  CHECK(oneside.residual_right == doctest::Approx(2.0));
  CHECK(!oneside.satisfied());

  CPMap pinched = CPMap::from_choi(kron(unit(2, 0, 0), unit(2, 0, 0)), 2, 2);
  PopaConditions bad = popa_conditions(pinched, unit(2, 0, 1));
  CHECK(bad.margin <= 1e-12);
  CHECK(std::isinf(bad.residual_left));
  CHECK(!bad.satisfied());
}

TEST_CASE("rescaling normalizes phi(1) away") {
  CPMap phi = conj_map(m2(2, 0, 0, 1));
  CPMap unitalized = rescale(phi);
  CHECK(unitalized.unital_flag());
  CHECK(mdiff(unitalized.choi(), CPMap::identity(2).choi()) < 1e-10);

  CPMap already = diag_compression();
  CHECK(mdiff(rescale(already).choi(), already.choi()) < 1e-12);

  // phi(x) = x11 * E11 has singular phi(1) = E11.
  CHECK_THROWS_AS(rescale(CPMap::from_kraus({unit(2, 0, 0)})),
                  NotPositiveDefinite);
}

TEST_CASE("homomorphism residual separates representations from compressions") {
  StarAlgebra full = generate_star_algebra({unit(2, 0, 1)}, 2);
  CHECK(homomorphism_residual(CPMap::identity(2), full) <= 1e-12);
  CHECK(homomorphism_residual(rescale(conj_map(m2(2, 0, 0, 1))), full) <=
        1e-10);
  CHECK(homomorphism_residual(diag_compression(), full) >= 0.4);
}

TEST_CASE("popa_verdict passes on a geometrically converging conjugation family") {
  PopaProblem p = make_popa_problem(conj_map(m2(2, 0, 0, 1)), unit(2, 0, 1),
                                    geometric_sequence());
  CHECK(p.algebra.dim() == 4);  // C*(E12) = M2
  PopaReport r = popa_verdict(p);
  CHECK(r.verdict == PopaVerdict::Pass);
  CHECK(std::string(to_string(r.verdict)) == "PASS");
  CHECK(r.kappa == doctest::Approx(4.0));
  CHECK(r.kappa_inequality);
  CHECK(r.schwarz_failures.empty());
  CHECK(r.conditions.satisfied());
  CHECK(r.premise_distances.back() < 1e-9);
  CHECK(r.conclusion_distances.back() < 1e-9);
  CHECK(r.premise_slope < 0.0);
  CHECK(r.conclusion_slope < 0.0);
}

TEST_CASE("popa_verdict flags a premise that stalls") {
  std::vector<CPMap> stuck(12, diag_compression());
  PopaProblem p = make_popa_problem(conj_map(m2(2, 0, 0, 1)), unit(2, 0, 1),
                                    std::move(stuck));
  PopaReport r = popa_verdict(p);
  CHECK(r.verdict == PopaVerdict::PremiseNotConvergent);
  CHECK(r.premise_distances.back() > 1.0);
}

TEST_CASE("a schwarz witness on a sequence entry voids the hypotheses") {
  std::vector<CPMap> seq(6, CPMap::identity(2));
  seq[3] = transpose2();
  PopaProblem p = make_popa_problem(CPMap::identity(2), unit(2, 0, 1),
                                    std::move(seq));
  PopaReport r = popa_verdict(p);
  CHECK(r.verdict == PopaVerdict::HypothesesViolated);
  REQUIRE(r.schwarz_failures.size() == 1);
  CHECK(r.schwarz_failures[0] == 3);
}

TEST_CASE("block structure bookkeeping") {
  BlockStructure b{{2, 3}};
  CHECK(b.count() == 2);
  CHECK(b.total() == 5);
  CHECK(b.offset(0) == 0);
  CHECK(b.offset(1) == 2);
}

TEST_CASE("representation_build assembles block ampliations") {
  CPMap id1 = representation_build({{2}}, {1});
  CHECK(mdiff(id1.choi(), CPMap::identity(2).choi()) < 1e-12);

  CPMap twice = representation_build({{2}}, {2});
  CHECK(twice.in_dim() == 2);
  CHECK(twice.out_dim() == 4);
  CHECK(twice.unital_flag());
  CHECK(twice.completely_positive());
  CHECK(mdiff(twice.apply(unit(2, 0, 1)),
              kron(unit(2, 0, 1), CMat::Identity(2, 2))) < 1e-12);

  CPMap ab = representation_build({{1, 1}}, {1, 1});
  CHECK(mdiff(ab.apply(unit(2, 0, 0)), unit(2, 0, 0)) < 1e-12);
  CHECK(mdiff(ab.apply(unit(2, 0, 1)), CMat::Zero(2, 2)) < 1e-12);

  CPMap mixed = representation_build({{2, 1}}, {2, 1});
  CHECK(mixed.in_dim() == 3);
  CHECK(mixed.out_dim() == 5);
  CHECK(mixed.unital_flag());

  CHECK_THROWS_AS(representation_build({{2}}, {0}), EmptyRepresentation);
  CHECK_THROWS_AS(representation_build({{2, 1}}, {1}), DimensionMismatch);
  CHECK_THROWS_AS(representation_build({{2}}, {-1}), InvalidArgument);
}

TEST_CASE("make_hyperrigidity_problem validates blocks, eta and family") {
  // generators must live on the diagonal blocks
  CHECK_THROWS_AS(make_hyperrigidity_problem({1, 1}, {unit(2, 0, 1)},
                                             CPMap::identity(2)),
                  InvalidArgument);
  // eta must be unital...
  CHECK_THROWS_AS(make_hyperrigidity_problem({2}, {unit(2, 0, 1)},
                                             conj_map(m2(2, 0, 0, 1))),
                  InvalidArgument);
  // ...completely positive...
  CHECK_THROWS_AS(make_hyperrigidity_problem({2}, {unit(2, 0, 1)},
                                             transpose2()),
                  NotCompletelyPositive);
  // ...and block preserving
  const double r2 = 1.0 / std::sqrt(2.0);
  CPMap hadamard = conj_map(m2(r2, r2, r2, -r2));
  CHECK_THROWS_AS(make_hyperrigidity_problem({1, 1}, {unit(2, 0, 0)},
                                             hadamard),
                  InvalidArgument);
  // the system must generate the whole block algebra
  CHECK_THROWS_AS(make_hyperrigidity_problem({2}, {unit(2, 0, 0)},
                                             CPMap::identity(2)),
                  NotGenerating);
  // family shape
  CHECK_THROWS_AS(make_hyperrigidity_problem({2}, {unit(2, 0, 1)},
                                             CPMap::identity(2), {{1, 2}}),
                  DimensionMismatch);
  CHECK_THROWS_AS(make_hyperrigidity_problem({2}, {unit(2, 0, 1)},
                                             CPMap::identity(2), {{-1}}),
                  InvalidArgument);
  CHECK_THROWS_AS(make_hyperrigidity_problem({2}, {unit(2, 0, 1)},
                                             CPMap::identity(2), {{0}}),
                  EmptyRepresentation);
  // default family enumerates {0,1,2}^K minus the origin, K <= 4
  HyperrigidityProblem p = make_hyperrigidity_problem(
      {1, 1}, {unit(2, 0, 0)}, CPMap::identity(2));
  CHECK(p.family.size() == 8);
  CHECK_THROWS_AS(make_hyperrigidity_problem({1, 1, 1, 1, 1},
                                             {unit(5, 0, 0), unit(5, 1, 1),
                                              unit(5, 2, 2), unit(5, 3, 3)},
                                             CPMap::identity(5)),
                  InvalidArgument);
}

TEST_CASE("a system equal to the block algebra is hyperrigid") {
  HyperrigidityProblem p = make_hyperrigidity_problem(
      {2}, {unit(2, 0, 1), unit(2, 0, 0)}, CPMap::identity(2), {{1}, {2}});
  HyperrigidityReport r = hyperrigidity_check(p);
  CHECK(r.decided);
  CHECK(r.hyperrigid_on_family);
  CHECK(!r.refuted);
  REQUIRE(r.members.size() == 2);
  for (const auto& m : r.members) {
    CHECK(m.verdict == Uniqueness::Unique);
    CHECK(m.null_dim == 0);
  }
}

TEST_CASE("abelian block algebra generated by its system is hyperrigid") {
  HyperrigidityProblem p = make_hyperrigidity_problem(
      {1, 1}, {unit(2, 0, 0)}, CPMap::identity(2));
  HyperrigidityReport r = hyperrigidity_check(p);
  CHECK(r.decided);
  CHECK(r.hyperrigid_on_family);
  CHECK(r.members.size() == 8);
}

TEST_CASE("the compressed swap system is refuted at multiplicity one") {
  CPMap eta = diag_compression();
  HyperrigidityProblem p =
      make_hyperrigidity_problem({2}, {unit(2, 0, 1)}, eta, {{1}});
  HyperrigidityReport r = hyperrigidity_check(p);
  CHECK(r.decided);
  CHECK(!r.hyperrigid_on_family);
  CHECK(r.refuted);
  REQUIRE(r.members.size() == 1);
  const HyperrigidityMember& m = r.members[0];
  CHECK(m.verdict == Uniqueness::NonUnique);
  CHECK(m.null_dim == 4);
  REQUIRE(m.witness.has_value());
  CHECK(m.witness->completely_positive());
  CHECK(m.witness->unital_flag());
  // the witness reproduces pi∘eta on the system but differs elsewhere
  OperatorSystem s = make_operator_system({unit(2, 0, 1)}, 2);
  double agree = 0.0;
  for (const CMat& b : s.basis)
    agree = std::max(agree, op_norm(m.witness->apply(b) - eta.apply(b)));
  CHECK(agree < 1e-7);
  CHECK(m.witness_distance > 1e-6);
}
