#pragma once

// Dilations of colligations: moment verifiers (symmetrized and torus-sampled),
// the invariant-subspace decomposition at a fixed torus point, the block moves
// between a colligation with an embedded state space and its "beta" system,
// compression, and a uniform minimal reduction.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "polydil/linalg.hpp"
#include "polydil/multipower.hpp"

namespace polydil {

inline constexpr double kMomentTol = 1e-8;

/// Orthonormal columns spanning a subspace of C^ambient_dim.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  /// Throws ShapeError on a row mismatch, PreconditionError when the columns
  /// are not orthonormal within 1e-10.
  SubspaceBasis(Index ambient_dim, CMatrix basis);

  /// Orthonormalizes the given columns first.
  static SubspaceBasis span_of(const CMatrix& cols);
  static SubspaceBasis coordinates(Index ambient_dim, Index offset, Index count);
  static SubspaceBasis whole(Index dim) { return coordinates(dim, 0, dim); }
  static SubspaceBasis none(Index ambient_dim) { return coordinates(ambient_dim, 0, 0); }

  Index ambient_dim() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  const CMatrix& basis() const { return basis_; }
  SubspaceBasis complement() const;

 private:
  Index ambient_ = 0;
  CMatrix basis_;
};

/// Residuals of the four moment families, indexed by SymPowerKind.
using FamilyResiduals = std::array<double, 4>;

struct MomentReport {
  int degree_cap = 0;
  double tol = 0.0;
  FamilyResiduals residuals{};            ///< maxima over all degrees <= degree_cap
  std::vector<FamilyResiduals> by_degree;  ///< entry d holds the maxima over |s| = d (or n-words of degree d)
  bool pass = true;
  std::optional<int> first_failing_degree;
  std::optional<SymPowerKind> first_failing_family;

  double max_residual() const;
};

/// Symmetrized moment identities P_X A~^s|X = A^s etc. for |s| <= M.
/// Throws StructuralError when N, the I/O dimensions or the D-tuples differ.
MomentReport is_dilation(const Colligation& big, const Colligation& small, const SubspaceBasis& embed, int max_degree,
                         double tol = kMomentTol);

/// The same identities for zeta-pencils at each sampled torus point, word
/// degree <= M (so (zA)^n zB is checked for n + 1 <= M).
MomentReport is_dilation_sampled(const Colligation& big, const Colligation& small, const SubspaceBasis& embed,
                                 std::span<const TorusPoint> samples, int max_degree, double tol = kMomentTol);

/// Default degree cap 2 * dim of the large state space.
int default_degree_cap(const Colligation& big);

struct SubspacePair {
  SubspaceBasis d;
  SubspaceBasis dstar;
};

/// D = span of (zeta A~)^n [(zeta A~ - zeta A) X + (zeta B~ - zeta B) N-] and
/// D* = complement of X + D. Throws PreconditionError naming the failed moment
/// family when the sampled check at zeta (degree dim X~) does not pass.
SubspacePair build_subspaces_fixed_zeta(const Colligation& big, const Colligation& small, const SubspaceBasis& embed,
                                        const TorusPoint& zeta, double tol = kMomentTol);

/// Residuals of the decomposition X~ = D + X + D* at zeta.
struct DecompositionReport {
  double orthogonality = 0.0;     ///< pairwise overlaps and dimension count
  double d_invariant = 0.0;       ///< ||(I - P_D) zeta A~ P_D||
  double d_unobserved = 0.0;      ///< ||zeta C~ P_D||
  double dstar_invariant = 0.0;   ///< ||(I - P_D*) (zeta A~)* P_D*||
  double dstar_unreached = 0.0;   ///< ||(zeta B~)* P_D*||
  double compress_a = 0.0;        ///< ||P_X zeta A~|X - zeta A||
  double compress_b = 0.0;        ///< ||P_X zeta B~ - zeta B||
  double compress_c = 0.0;        ///< ||zeta C~|X - zeta C||

  double max() const;
};

DecompositionReport check_decomposition(const Colligation& big, const Colligation& small, const SubspaceBasis& embed,
                                        const SubspacePair& parts, const TorusPoint& zeta);

/// Places beta = (T, F, H, S) around alpha: state space Y + X with
///   A~_k = [[T_k, F_k|X], [P_X H_k, A_k]], B~_k = [F_k|N-; B_k],
///   C~_k = [P_N+ H_k, C_k],                D~ = D.
/// beta's input splits as X + N-, its output as X + N+. Throws StructuralError
/// when S differs from alpha's stacked pencil by more than 1e-12.
Colligation assemble_dilation(const Colligation& beta, Index small_state_dim, const Colligation& alpha);

/// beta on Y = X~ (-) X: T = P_Y A~|Y, F = P_Y [A~|X, B~], H = [P_X A~|Y; C~|Y],
/// S = [[P_X A~|X, P_X B~], [C~|X, D]].
Colligation extract_embedded(const Colligation& big, const SubspaceBasis& embed);

/// The system on X sitting in beta's S-block.
Colligation corner_system(const Colligation& beta, Index small_state_dim);

/// max_{|s| = d} ||(H@T#F)^s|| for d = 2 .. M + 2; entry i holds degree i + 2.
struct VanishResiduals {
  std::vector<double> by_degree;
  double max() const;
};

VanishResiduals vanish_residual(const Colligation& beta, Index small_state_dim, int max_degree);

/// Compression onto x0: A*_k = P A_k|x0, B*_k = P B_k, C*_k = C_k|x0, D unchanged.
Colligation compress(const Colligation& alpha, const SubspaceBasis& x0);

struct Reduction {
  Colligation minimal;
  SubspaceBasis kept;   ///< basis of the state space of `minimal` inside alpha's
  SubspaceBasis d;      ///< A_k-invariant, annihilated by every C_k
  SubspaceBasis dstar;  ///< A_k*-invariant, annihilated by every B_k*
  MomentReport check;   ///< is_dilation(alpha, minimal, kept, M, tol)
};

/// Uniform reduction: D is the unobservable subspace, D* the complement of
/// reachable + D; the result lives on (reachable + D) (-) D.
Reduction reduce_uniform(const Colligation& alpha, int max_degree, double tol = kMomentTol);

/// A dilation together with the embedding of the small state space.
struct DilationPair {
  Colligation big;
  Colligation small;
  SubspaceBasis embed;
};

/// Block upper-triangular extension on D + X + D* with random off-diagonal
/// blocks of the given scale; always a dilation of `small`.
DilationPair random_triangular_extension(const Colligation& small, Index d_dim, Index dstar_dim, double scale,
                                         Rng& rng);

/// Conservative colligation (conservative pencil on Y) (+) (random conservative
/// small system), conjugated by a Haar unitary of the whole state space.
DilationPair random_conservative_dilation(int n, Index y_dim, Index x_dim, Index io_dim, Rng& rng);

}  // namespace polydil
