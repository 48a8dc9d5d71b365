#pragma once

#include <optional>
#include <vector>

#include "ncbkw/linalg.hpp"

namespace ncbkw {

// Conjugation map x ↦ lambda·T†xT (single Kraus operator √lambda·T†).
struct ConjugationSpec {
  CMat t;
  double lambda = 1.0;
};

// Hermiticity-preserving linear map M_n → M_m, stored through its Choi
// matrix C = Σ_ij E_ij ⊗ φ(E_ij); block (i,j) of size m×m is φ(E_ij).
// The Choi matrix is required Hermitian at construction. Flags record
// whether C is PSD (complete positivity) and whether φ(I_n) = I_m,
// both detected numerically at 1e-9 (scaled).
class CPMap {
 public:
  CPMap() = default;  // empty placeholder; in_dim() == 0

  static CPMap from_choi(CMat choi, int in_dim, int out_dim);
  static CPMap from_kraus(const std::vector<CMat>& kraus);
  static CPMap from_conjugation(const ConjugationSpec& spec);
  static CPMap identity(int n);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const CMat& choi() const { return choi_; }
  bool completely_positive() const { return cp_; }
  bool unital_flag() const { return unital_; }
  double choi_min_eig() const { return choi_min_eig_; }

  // φ(E_ij), i.e. the (i,j) block of the Choi matrix.
  CMat block(int i, int j) const;
  CMat apply(const CMat& x) const;

 private:
  int in_dim_ = 0, out_dim_ = 0;
  CMat choi_;
  bool cp_ = false, unital_ = false;
  double choi_min_eig_ = 0.0;
};

// Eigendecomposition of the Choi matrix; throws NotCompletelyPositive if
// an eigenvalue is below -tol·max(1,||C||). Kraus operators K_k satisfy
// φ(x) = Σ K_k x K_k† up to the discarded (<= tol) eigenvalues.
std::vector<CMat> kraus_from_choi(const CPMap& m, double tol = kHermTol);

CMat choi_from_kraus(const std::vector<CMat>& kraus);

bool is_unital(const CPMap& m, double tol = kDefaultTol);

// Searches for x with φ(x†x) - φ(x)†φ(x) not PSD (Schwarz violation).
// Deterministic sample prefix (matrix units, then unit sums/differences),
// then seeded random samples; at most `trials` candidates. Returns a
// witness or nullopt. Finding nothing proves nothing.
std::optional<CMat> schwarz_falsify(const CPMap& m, int trials,
                                    std::uint64_t seed);

// Searches for PSD P in M_2 ⊗ M_n with (id_2 ⊗ φ)(P) not PSD.
// Deterministic prefix of entangled projectors, then seeded random PSD.
std::optional<CMat> two_positive_falsify(const CPMap& m, int trials,
                                         std::uint64_t seed);

CPMap compose(const CPMap& f, const CPMap& g);  // f ∘ g

// id_k ⊗ φ : M_k ⊗ M_n → M_k ⊗ M_m.
CPMap ampliate(const CPMap& m, int k);

}  // namespace ncbkw
