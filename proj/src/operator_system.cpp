#include "ncbkw/operator_system.hpp"

#include <Eigen/SVD>

namespace ncbkw {

namespace {

constexpr double kSpanCutoff = 1e-10;  // relative singular-value cutoff

void check_dims(const std::vector<CMat>& mats, int n, const char* what) {
  for (const CMat& g : mats)
    if (g.rows() != n || g.cols() != n)
      throw DimensionMismatch(std::string(what) + ": expected " +
                              std::to_string(n) + "x" + std::to_string(n) +
                              ", got " + std::to_string(g.rows()) + "x" +
                              std::to_string(g.cols()));
}

}  // namespace

std::vector<CMat> orthonormal_span(const std::vector<CMat>& mats, int n) {
  check_dims(mats, n, "orthonormal_span");
  if (mats.empty()) return {};
  CMat stacked(Eigen::Index(n) * n, Eigen::Index(mats.size()));
  for (Eigen::Index k = 0; k < Eigen::Index(mats.size()); ++k)
    stacked.col(k) = Eigen::Map<const Eigen::VectorXcd>(mats[k].data(),
                                                        Eigen::Index(n) * n);
  Eigen::JacobiSVD<CMat> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cut = sv.size() > 0 ? kSpanCutoff * sv(0) : 0.0;
  std::vector<CMat> basis;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cut) break;  // singular values are nonincreasing
    Eigen::VectorXcd col = svd.matrixU().col(k);
    basis.push_back(Eigen::Map<const CMat>(col.data(), n, n));
  }
  return basis;
}

std::vector<CMat> orthonormal_herm_span(const std::vector<CMat>& mats,
                                        int n) {
  check_dims(mats, n, "orthonormal_herm_span");
  if (mats.empty()) return {};
  Eigen::MatrixXd stacked(Eigen::Index(n) * n, Eigen::Index(mats.size()));
  for (Eigen::Index k = 0; k < Eigen::Index(mats.size()); ++k)
    stacked.col(k) = herm_coords(0.5 * (mats[k] + mats[k].adjoint()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cut = sv.size() > 0 ? kSpanCutoff * sv(0) : 0.0;
  std::vector<CMat> basis;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cut) break;
    basis.push_back(herm_from_coords(svd.matrixU().col(k), n));
  }
  return basis;
}

OperatorSystem make_operator_system(const std::vector<CMat>& generators,
                                    int n) {
  if (n <= 0) throw DimensionMismatch("ambient dimension must be positive");
  check_dims(generators, n, "make_operator_system");
  std::vector<CMat> family;
  family.push_back(CMat::Identity(n, n));
  for (const CMat& g : generators) {
    // The system is adjoint-closed, so its complex span is spanned by the
    // hermitian parts of the generators; keeping the basis hermitian lets
    // downstream spectrahedron builders treat basis elements as observables.
    family.push_back(0.5 * (g + g.adjoint()));
    family.push_back(cd(0.0, -0.5) * (g - g.adjoint()));
  }
  return {n, orthonormal_herm_span(family, n)};
}

StarAlgebra generate_star_algebra(const std::vector<CMat>& generators,
                                  int n) {
  if (n <= 0) throw DimensionMismatch("ambient dimension must be positive");
  check_dims(generators, n, "generate_star_algebra");
  std::vector<CMat> family;
  family.push_back(CMat::Identity(n, n));
  for (const CMat& g : generators) {
    family.push_back(g);
    family.push_back(g.adjoint());
  }
  std::vector<CMat> basis = orthonormal_span(family, n);
  // Product closure. Dimension strictly grows each round, so this
  // terminates after at most n² rounds.
  while (int(basis.size()) < n * n) {
    std::vector<CMat> extended = basis;
    for (const CMat& x : basis)
      for (const CMat& y : basis) extended.push_back(x * y);
    std::vector<CMat> next = orthonormal_span(extended, n);
    if (next.size() == basis.size()) break;
    basis = std::move(next);
  }
  return {n, std::move(basis), generators};
}

double span_residual(const std::vector<CMat>& basis, const CMat& x) {
  CMat r = x;
  for (const CMat& b : basis) {
    cd coeff = (b.adjoint() * x).trace();
    r -= coeff * b;
  }
  return r.norm();
}

namespace {

bool contains_impl(const std::vector<CMat>& basis, int n, const CMat& x,
                   double tol) {
  if (x.rows() != n || x.cols() != n)
    throw DimensionMismatch("contains: element has wrong ambient dimension");
  return span_residual(basis, x) <= tol * std::max(1.0, x.norm());
}

}  // namespace

bool contains(const OperatorSystem& s, const CMat& x, double tol) {
  return contains_impl(s.basis, s.ambient_dim, x, tol);
}

bool contains(const StarAlgebra& a, const CMat& x, double tol) {
  return contains_impl(a.basis, a.ambient_dim, x, tol);
}

}  // namespace ncbkw
