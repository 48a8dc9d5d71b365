#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncbkw/linalg.hpp"
#include "ncbkw/rng.hpp"
#include "support.hpp"

using namespace ncbkw;
using namespace ncbkw::test;

TEST_CASE("hermitian coordinates are an isometry and invert") {
  Rng rng(7);
  for (int d : {1, 2, 3, 5}) {
    CMat h = random_hermitian(d, rng);
    Eigen::VectorXd c = herm_coords(h);
    CHECK(c.size() == d * d);
    CHECK(c.norm() == doctest::Approx(h.norm()).epsilon(1e-12));
    CHECK(mdiff(herm_from_coords(c, d), h) < 1e-12);
  }
}

TEST_CASE("hermitian coordinate layout: diagonal, symmetric, antisymmetric") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(herm_coords(unit(2, 0, 0)).isApprox(Eigen::Vector4d(1, 0, 0, 0)));
  CHECK(herm_coords(unit(2, 1, 1)).isApprox(Eigen::Vector4d(0, 1, 0, 0)));
  CMat sym = r * (unit(2, 0, 1) + unit(2, 1, 0));
  CMat anti = cd(0, r) * (unit(2, 0, 1) - unit(2, 1, 0));
  CHECK(herm_coords(sym).isApprox(Eigen::Vector4d(0, 0, 1, 0)));
  CHECK(herm_coords(anti).isApprox(Eigen::Vector4d(0, 0, 0, 1)));
}

TEST_CASE("operator norm") {
  CHECK(op_norm(m2(0, 2, 0, 0)) == doctest::Approx(2.0));
  CHECK(op_norm(CMat::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(op_norm(CMat(0, 0)) == 0.0);
  // singular values of a non-normal matrix
  CHECK(op_norm(m2(1, 1, 0, 1)) == doctest::Approx((1 + std::sqrt(5.0)) / 2));
}

TEST_CASE("hermitian eigendecomposition") {
  CMat a = m2(2, 1, 1, 2);
  EigHerm e = eig_herm(a);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));
  CMat rebuilt = e.vectors * e.values.asDiagonal().toDenseMatrix().cast<cd>() *
                 e.vectors.adjoint();
  CHECK(mdiff(rebuilt, a) < 1e-12);
  CHECK_THROWS_AS(eig_herm(m2(0, 1, 0, 0)), NotHermitian);
}

TEST_CASE("psd detection and minimum eigenvalue") {
  CHECK(is_psd(m2(1, 0, 0, 0)));
  CHECK(is_psd(CMat::Zero(2, 2)));
  CHECK(!is_psd(m2(1, 0, 0, -1e-3)));
  CHECK(min_eig_herm(m2(2, 0, 0, -3)) == doctest::Approx(-3.0));
  CHECK_THROWS_AS(is_psd(m2(0, 1, 0, 0)), NotHermitian);
}

TEST_CASE("inverse square root of a positive definite matrix") {
  CMat a = m2(4, 0, 0, 9);
  CHECK(mdiff(inv_sqrt_pd(a), m2(0.5, 0, 0, 1.0 / 3)) < 1e-12);
  Rng rng(11);
  CMat g = random_complex(3, 3, rng);
  CMat pd = g * g.adjoint() + CMat::Identity(3, 3);
  CMat s = inv_sqrt_pd(pd);
  CHECK(mdiff(s * pd * s, CMat::Identity(3, 3)) < 1e-10);
  CHECK_THROWS_AS(inv_sqrt_pd(m2(1, 0, 0, 0)), NotPositiveDefinite);
}

TEST_CASE("kronecker product") {
  CMat a = m2(1, 2, 3, 4);
  CMat b = m2(0, 1, 1, 0);
  CMat k = kron(a, b);
  CHECK(k.rows() == 4);
  CHECK(k(0, 1) == cd(1, 0));   // a(0,0)*b(0,1)
  CHECK(k(0, 3) == cd(2, 0));   // a(0,1)*b(0,1)
  CHECK(k(3, 2) == cd(4, 0));   // a(1,1)*b(1,0)
  CHECK(mdiff(kron(CMat::Identity(2, 2), b).block(2, 2, 2, 2), b) == 0.0);
}

TEST_CASE("dagger") {
  CMat a = m2(cd(1, 2), cd(3, 4), cd(5, 6), cd(7, 8));
  CHECK(mdiff(dagger(a), a.adjoint()) == 0.0);
}
