#pragma once

// Multivariable von Neumann inequality: commuting contraction tuples that
// violate it for a linear pencil, and the dissipative-but-not-N-dissipative
// systems built from such a violation.

#include "polydil/pencil.hpp"
#include "polydil/transfer.hpp"

namespace polydil {

inline constexpr double kWitnessMargin = 1e-9;
inline constexpr double kOpenRadius = 1.0 - 1e-6;

/// T_k(a, v, b) = (0, a x_k, <v, y_k>) on C + C^m + C (basis order a, v, b).
/// Throws PreconditionError unless <x_l, y_k> = <x_k, y_l> within 1e-12 and
/// every vector has norm <= 1.
CommutingTuple varopoulos_tuple(std::span<const CVector> x, std::span<const CVector> y);

/// T_k = [[0, 0], [X_k, 0]] on C^p + C^p; products of two entries vanish.
/// Throws PreconditionError when some ||X_k|| > 1.
CommutingTuple parrott_tuple(std::span<const CMatrix> x);

struct ViolationWitness {
  OperatorTuple m;
  CommutingTuple t;
  double r = 1.0;
  double lhs = 0.0;    ///< ||L_M(rT)||
  double rhs = 0.0;    ///< torus max of ||L_M(z)||
  double ratio = 0.0;
  std::uint64_t seed = 0;
  int rhs_grid = 0;    ///< torus grid used for rhs

  bool valid() const { return ratio > 1.0 + kWitnessMargin; }
};

/// Settings for the rhs of a reported witness (not of the inner search).
inline constexpr int kWitnessGrid = 128;
inline constexpr int kWitnessRestarts = 8;

/// rhs of a witness: torus_norm_max at kWitnessGrid.
double witness_rhs(const OperatorTuple& m, int grid = kWitnessGrid);

enum class TupleFamily { Parrott, Varopoulos };

struct ViolationSearchOptions {
  Index matrix_dim = 2;     ///< size of the square M_k
  Index defect_dim = 2;     ///< p for Parrott blocks, m for Varopoulos vectors
  std::uint64_t seed = 0;
  int restarts = 4;
  int iters = 30;           ///< coordinate-ascent sweeps per restart
  int search_grid = 24;     ///< torus grid inside the ascent
  TupleFamily family = TupleFamily::Parrott;
};

/// Maximizes ||L_M(T)|| / max_torus ||L_M(z)|| over M and the tuple family by
/// seeded restarts of coordinate ascent. Returns the best witness found,
/// whether or not it violates.
ViolationWitness violation_search(int n, const ViolationSearchOptions& opts = {});

/// A witness with lhs, rhs and ratio filled in from scratch.
ViolationWitness make_witness(const OperatorTuple& m, const CommutingTuple& t, double r = 1.0, std::uint64_t seed = 0);

struct Revalidation {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double ratio_open = 0.0;   ///< ratio at r = kOpenRadius * witness r
  double mismatch = 0.0;     ///< |ratio - stored ratio|
  bool valid = false;        ///< mismatch <= 1e-10 and ratio_open > 1 + kWitnessMargin
};

/// Recomputes lhs by an explicit Kronecker assembly and SVD, and rhs from
/// witness_rhs at the stored grid.
Revalidation revalidate(const ViolationWitness& w);

struct CounterexampleSystem {
  Colligation alpha;   ///< stacked pencil G = M / normalizer, split C^(n_M-1) + C
  double normalizer = 0.0;
};

/// G_k = M_k / max_torus ||L_M(z)||, with state space C^(n_M - 1) and scalar
/// input and output. Throws ShapeError unless M_k are square with n_M >= 2,
/// PreconditionError when every M_k is zero.
CounterexampleSystem build_counterexample_system(const OperatorTuple& m);

/// Largest pad norm that keeps a strict violation: (ratio - 1) rhs / (4 (n - 3)).
double safe_pad_norm(const ViolationWitness& w3, int n);

/// Appends M_4..M_n = pad_norm * I and T_4..T_n = 0 to a three-variable
/// witness and recomputes it. Throws DomainError for n <= 3 or a witness that
/// is not three-variable, PreconditionError when pad_norm exceeds safe_pad_norm.
ViolationWitness extend_to_higher_n(const ViolationWitness& w3, int n, double pad_norm);

}  // namespace polydil
