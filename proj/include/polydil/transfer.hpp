#pragma once

// Transfer function theta(z) = zD + zC (I - zA)^{-1} zB of a colligation and
// its evaluation on commuting operator tuples.

#include <optional>
#include <span>

#include "polydil/linalg.hpp"

namespace polydil {

inline constexpr double kResolventConditionCap = 1e12;

/// theta(z). Throws SingularityError when cond(I - zA) exceeds 1e12.
CMatrix transfer_eval(const Colligation& alpha, std::span<const Complex> z);

/// Coefficient of z^s in theta: 0 at s = 0, D_k at s = e_k, and the
/// unnormalized (C@A#B)^s word sum for |s| >= 2.
CMatrix taylor_coeff(const Colligation& alpha, const MultiIndex& s);

/// N pairwise-commuting contractions on a common space C^dim.
class CommutingTuple {
 public:
  /// Throws ShapeError on non-square or mismatched matrices and
  /// PreconditionError when a commutator or norm exceeds its tolerance.
  explicit CommutingTuple(std::vector<CMatrix> mats, double commutator_tol = 1e-12,
                          double contraction_tol = 1e-10);

  static CommutingTuple zeros(int n, Index dim);

  int size() const { return mats_.size(); }
  Index dim() const { return mats_.rows(); }
  const CMatrix& operator[](int k) const { return mats_[k]; }
  const OperatorTuple& mats() const { return mats_; }
  /// max_{k<l} ||T_k T_l - T_l T_k||
  double commutator_residual() const;

 private:
  OperatorTuple mats_;
};

/// Random commuting contractions: even seeds give unitarily diagonal tuples,
/// odd seeds polynomials in one random non-normal matrix. Each entry is scaled
/// to a norm drawn from [0.5, 1].
CommutingTuple random_commuting_tuple(int n, Index dim, Rng& rng);

struct TupleEvalResult {
  CMatrix value;  ///< acts on C^(system dim) (x) C^(tuple dim)
  double norm = 0.0;
  double r = 0.0;
  std::optional<double> resolvent_margin;  ///< 1 - ||sum_k A_k (x) rT_k|| when a resolvent was used
};

/// theta(rT) via sum D_k(x)rT_k + (sum C_k(x)rT_k)(I - sum A_k(x)rT_k)^{-1}(sum B_k(x)rT_k).
/// r must lie in [0, 1]; throws PreconditionError when the margin is not positive.
TupleEvalResult eval_on_tuple(const Colligation& alpha, const CommutingTuple& t, double r);

/// sum_k G_k (x) rT_k, r in [0, 1].
TupleEvalResult pencil_on_tuple(const OperatorTuple& g, const CommutingTuple& t, double r);

/// sum_k X_k (x) (c T_k); shared by the tuple evaluations and their tests.
CMatrix tensor_pencil(const OperatorTuple& x, const OperatorTuple& t, double c);

}  // namespace polydil
