#include "ncbkw/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ncbkw {

CMat dagger(const CMat& a) { return a.adjoint(); }

double op_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  CMat gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<CMat> es(gram, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

namespace {

void require_square(const CMat& a) {
  if (a.rows() != a.cols())
    throw NotHermitian("matrix is not square (" + std::to_string(a.rows()) +
                       "x" + std::to_string(a.cols()) + ")");
}

double herm_scale(const CMat& a) { return std::max(1.0, op_norm(a)); }

}  // namespace

EigHerm eig_herm(const CMat& a, double tol) {
  require_square(a);
  double dev = op_norm(a - a.adjoint());
  if (dev > tol * herm_scale(a))
    throw NotHermitian("matrix deviates from Hermitian by " +
                       std::to_string(dev));
  // Symmetrize so the solver sees an exactly Hermitian input.
  CMat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eig_herm(const CMat& a, double tol) {
  return eig_herm(a, tol).values.minCoeff();
}

bool is_psd(const CMat& a, double tol) {
  EigHerm e = eig_herm(a, tol);
  return e.values.minCoeff() >= -tol * herm_scale(a);
}

CMat inv_sqrt_pd(const CMat& a, double tol) {
  EigHerm e = eig_herm(a, tol);
  double floor = tol * herm_scale(a);
  if (e.values.minCoeff() <= floor)
    throw NotPositiveDefinite("smallest eigenvalue " +
                              std::to_string(e.values.minCoeff()) +
                              " is not positive");
  Eigen::VectorXd inv_roots =
      e.values.array().sqrt().inverse().matrix();
  return e.vectors * inv_roots.asDiagonal() * e.vectors.adjoint();
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::VectorXd herm_coords(const CMat& h) {
  require_square(h);
  const Eigen::Index d = h.rows();
  const double s2 = std::sqrt(2.0);
  Eigen::VectorXd c(d * d);
  for (Eigen::Index i = 0; i < d; ++i) c(i) = h(i, i).real();
  Eigen::Index p = 0;
  const Eigen::Index npairs = d * (d - 1) / 2;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j, ++p) {
      c(d + p) = s2 * h(i, j).real();
      c(d + npairs + p) = s2 * h(i, j).imag();
    }
  return c;
}

CMat herm_from_coords(const Eigen::VectorXd& c, int d) {
  if (c.size() != Eigen::Index(d) * d)
    throw DimensionMismatch("coordinate vector has size " +
                            std::to_string(c.size()) + ", expected " +
                            std::to_string(d * d));
  const double inv_s2 = 1.0 / std::sqrt(2.0);
  CMat h = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i) h(i, i) = c(i);
  Eigen::Index p = 0;
  const Eigen::Index npairs = Eigen::Index(d) * (d - 1) / 2;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++p) {
      cd v(c(d + p) * inv_s2, c(d + npairs + p) * inv_s2);
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  return h;
}

}  // namespace ncbkw
