#include "ncbkw/cpmap.hpp"

#include <cmath>

#include "ncbkw/rng.hpp"

namespace ncbkw {

namespace {

// Partial trace of the Choi matrix over the input factor: Σ_i block(i,i).
CMat input_partial_trace(const CMat& choi, int n, int m) {
  CMat out = CMat::Zero(m, m);
  for (int i = 0; i < n; ++i) out += choi.block(i * m, i * m, m, m);
  return out;
}

}  // namespace

CPMap CPMap::from_choi(CMat choi, int in_dim, int out_dim) {
  if (in_dim <= 0 || out_dim <= 0)
    throw DimensionMismatch("map dimensions must be positive");
  const Eigen::Index d = Eigen::Index(in_dim) * out_dim;
  if (choi.rows() != d || choi.cols() != d)
    throw DimensionMismatch("Choi matrix is " + std::to_string(choi.rows()) +
                            "x" + std::to_string(choi.cols()) + ", expected " +
                            std::to_string(d) + "x" + std::to_string(d));
  double scale = std::max(1.0, op_norm(choi));
  if (op_norm(choi - choi.adjoint()) > kHermTol * scale)
    throw NotHermitian("Choi matrix is not Hermitian; only "
                       "Hermiticity-preserving maps are representable");
  CPMap m;
  m.in_dim_ = in_dim;
  m.out_dim_ = out_dim;
  m.choi_ = 0.5 * (choi + choi.adjoint());
  m.choi_min_eig_ = eig_herm(m.choi_).values.minCoeff();
  m.cp_ = m.choi_min_eig_ >= -kHermTol * scale;
  m.unital_ =
      op_norm(input_partial_trace(m.choi_, in_dim, out_dim) -
              CMat::Identity(out_dim, out_dim)) <= kHermTol;
  return m;
}

CMat choi_from_kraus(const std::vector<CMat>& kraus) {
  if (kraus.empty()) throw InvalidArgument("empty Kraus family");
  const Eigen::Index m = kraus[0].rows(), n = kraus[0].cols();
  CMat choi = CMat::Zero(n * m, n * m);
  for (const CMat& k : kraus) {
    if (k.rows() != m || k.cols() != n)
      throw DimensionMismatch("Kraus operators have mixed shapes");
    // C += v v† with v = Σ_i e_i ⊗ (K e_i).
    Eigen::VectorXcd v(n * m);
    for (Eigen::Index i = 0; i < n; ++i) v.segment(i * m, m) = k.col(i);
    choi += v * v.adjoint();
  }
  return choi;
}

CPMap CPMap::from_kraus(const std::vector<CMat>& kraus) {
  CMat choi = choi_from_kraus(kraus);
  return from_choi(std::move(choi), int(kraus[0].cols()),
                   int(kraus[0].rows()));
}

CPMap CPMap::from_conjugation(const ConjugationSpec& spec) {
  if (spec.t.rows() != spec.t.cols())
    throw DimensionMismatch("conjugation operator must be square");
  if (!(spec.lambda > 0.0))
    throw InvalidArgument("conjugation weight must be positive");
  Eigen::JacobiSVD<CMat> svd(spec.t);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
    throw InvalidArgument("conjugation operator is numerically singular");
  return from_kraus({std::sqrt(spec.lambda) * spec.t.adjoint()});
}

CPMap CPMap::identity(int n) {
  return from_kraus({CMat::Identity(n, n)});
}

CMat CPMap::block(int i, int j) const {
  return choi_.block(Eigen::Index(i) * out_dim_, Eigen::Index(j) * out_dim_,
                     out_dim_, out_dim_);
}

CMat CPMap::apply(const CMat& x) const {
  if (x.rows() != in_dim_ || x.cols() != in_dim_)
    throw DimensionMismatch("apply: argument is " + std::to_string(x.rows()) +
                            "x" + std::to_string(x.cols()) + ", map expects " +
                            std::to_string(in_dim_));
  CMat out = CMat::Zero(out_dim_, out_dim_);
  for (int i = 0; i < in_dim_; ++i)
    for (int j = 0; j < in_dim_; ++j) out += x(i, j) * block(i, j);
  return out;
}

std::vector<CMat> kraus_from_choi(const CPMap& m, double tol) {
  EigHerm e = eig_herm(m.choi());
  double scale = std::max(1.0, std::abs(e.values.cwiseAbs().maxCoeff()));
  if (e.values.minCoeff() < -tol * scale)
    throw NotCompletelyPositive("Choi matrix has eigenvalue " +
                                std::to_string(e.values.minCoeff()));
  std::vector<CMat> kraus;
  const int n = m.in_dim(), mm = m.out_dim();
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) <= tol * scale) continue;
    Eigen::VectorXcd v = std::sqrt(e.values(k)) * e.vectors.col(k);
    CMat op(mm, n);
    for (int i = 0; i < n; ++i) op.col(i) = v.segment(Eigen::Index(i) * mm, mm);
    kraus.push_back(std::move(op));
  }
  if (kraus.empty()) kraus.push_back(CMat::Zero(mm, n));
  return kraus;
}

bool is_unital(const CPMap& m, double tol) {
  return op_norm(m.apply(CMat::Identity(m.in_dim(), m.in_dim())) -
                 CMat::Identity(m.out_dim(), m.out_dim())) <= tol;
}

namespace {

// Deterministic sample prefix shared by the falsifiers: matrix units in
// row-major order, then pairwise sums/differences (+ an i-weighted sum).
std::vector<CMat> unit_prefix(int n, int cap) {
  std::vector<CMat> units;
  for (int i = 0; i < n && int(units.size()) < cap; ++i)
    for (int j = 0; j < n && int(units.size()) < cap; ++j) {
      CMat e = CMat::Zero(n, n);
      e(i, j) = 1.0;
      units.push_back(e);
    }
  std::vector<CMat> out = units;
  for (std::size_t a = 0; a < units.size() && int(out.size()) < cap; ++a)
    for (std::size_t b = a + 1; b < units.size() && int(out.size()) < cap;
         ++b) {
      out.push_back(units[a] + units[b]);
      if (int(out.size()) < cap) out.push_back(units[a] - units[b]);
      if (int(out.size()) < cap) out.push_back(units[a] + cd(0, 1) * units[b]);
    }
  return out;
}

}  // namespace

std::optional<CMat> schwarz_falsify(const CPMap& m, int trials,
                                    std::uint64_t seed) {
  const int n = m.in_dim();
  const double viol = 1e-8;
  Rng rng(seed);
  std::vector<CMat> prefix = unit_prefix(n, trials);
  for (int t = 0; t < trials; ++t) {
    CMat x = t < int(prefix.size()) ? prefix[t] : random_complex(n, n, rng);
    CMat gap = m.apply(x.adjoint() * x) - m.apply(x).adjoint() * m.apply(x);
    // gap is Hermitian for Hermiticity-preserving maps.
    if (min_eig_herm(0.5 * (gap + gap.adjoint()), 1.0) < -viol) return x;
  }
  return std::nullopt;
}

std::optional<CMat> two_positive_falsify(const CPMap& m, int trials,
                                         std::uint64_t seed) {
  const int n = m.in_dim();
  const double viol = 1e-8;
  Rng rng(seed);
  // Entangled rank-one projectors across coordinate pairs first; the
  // i<j phase-free one catches the transpose map immediately.
  std::vector<CMat> prefix;
  auto proj = [&](const Eigen::VectorXcd& v) { return CMat(v * v.adjoint()); };
  for (int i = 0; i < n && int(prefix.size()) < trials; ++i)
    for (int j = i + 1; j < n && int(prefix.size()) < trials; ++j) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n);
      v(i) = 1.0;          // e_0 ⊗ e_i
      v(n + j) = 1.0;      // e_1 ⊗ e_j
      prefix.push_back(proj(v));
      v(n + j) = cd(0, 1);
      prefix.push_back(proj(v));
    }
  for (int i = 0; i < n && int(prefix.size()) < trials; ++i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * n);
    v(i) = 1.0;
    v(n + i) = 1.0;
    prefix.push_back(proj(v));
  }
  for (int t = 0; t < trials; ++t) {
    CMat p;
    if (t < int(prefix.size())) {
      p = prefix[t];
    } else if (t % 2 == 0) {
      Eigen::VectorXcd v(2 * n);
      for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = cd(rng.normal(), rng.normal());
      p = proj(v);
    } else {
      p = random_psd(2 * n, rng);
    }
    // (id_2 ⊗ φ)(P): apply φ to each n×n block of P.
    CMat out(2 * m.out_dim(), 2 * m.out_dim());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        out.block(a * m.out_dim(), b * m.out_dim(), m.out_dim(),
                  m.out_dim()) = m.apply(p.block(a * n, b * n, n, n));
    if (min_eig_herm(0.5 * (out + out.adjoint()), 1.0) <
        -viol * std::max(1.0, op_norm(p)))
      return p;
  }
  return std::nullopt;
}

CPMap compose(const CPMap& f, const CPMap& g) {
  if (g.out_dim() != f.in_dim())
    throw DimensionMismatch("compose: inner dimensions disagree (" +
                            std::to_string(f.in_dim()) + " vs " +
                            std::to_string(g.out_dim()) + ")");
  const int n = g.in_dim(), m = f.out_dim();
  CMat choi(Eigen::Index(n) * m, Eigen::Index(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      choi.block(Eigen::Index(i) * m, Eigen::Index(j) * m, m, m) =
          f.apply(g.block(i, j));
  return CPMap::from_choi(std::move(choi), n, m);
}

CPMap ampliate(const CPMap& m, int k) {
  if (k <= 0) throw DimensionMismatch("ampliation factor must be positive");
  const int n = m.in_dim(), mm = m.out_dim();
  const int N = k * n, M = k * mm;
  CMat choi = CMat::Zero(Eigen::Index(N) * M, Eigen::Index(N) * M);
  // Input index (a,i) ↦ a·n+i, output index (b,r) ↦ b·mm+r; the block of
  // the ampliated Choi at input pair ((a,i),(b,j)) is E_ab ⊗ φ(E_ij).
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CMat blk = m.block(i, j);  // goes to output sub-block (a,b)
          choi.block(Eigen::Index(a * n + i) * M + a * mm,
                     Eigen::Index(b * n + j) * M + b * mm, mm, mm) = blk;
        }
  return CPMap::from_choi(std::move(choi), N, M);
}

}  // namespace ncbkw
