#pragma once

// Approximate conservative realizations beta = (T, F, H, S = G) of a linear
// pencil: [[T_k, F_k], [H_k, G_k]] should form a conservative pencil while
// every symmetrized word (H@T#F)^s vanishes.

#include <optional>
#include <vector>

#include "polydil/dilation.hpp"
#include "polydil/pencil.hpp"

namespace polydil {

struct RealizeOptions {
  Index aux_dim = 0;      ///< dim Y; 0 selects 2 * g.cols()
  int max_degree = 4;     ///< vanish words of degree 2 .. max_degree + 2
  std::uint64_t seed = 0;
  int restarts = 4;       ///< restart 0 is the warm start
  int iters = 2000;       ///< gradient steps per restart
  double fd_step = 1e-6;  ///< central-difference step
  /// Replaces the default warm start (conservative T on Y, F = H = 0). Its
  /// state dimension may be smaller than aux_dim; the rest of Y is padded
  /// with a conservative pencil.
  std::optional<Colligation> warm_start;
  /// Multiplies the k-th blocks of every starting point by phases[k].
  std::optional<std::vector<Complex>> phases;
};

struct RealizationResult {
  Colligation beta;
  Index aux_dim = 0;
  double objective = 0.0;
  double unitarity_residual = 0.0;   ///< max of the four conservativity families of beta's stacked pencil
  VanishResiduals vanish;
  std::vector<double> objective_trace;  ///< objective after each step of the winning restart
  int best_restart = 0;
  std::uint64_t seed = 0;
  int iters = 0;
  int restarts = 0;
  int max_degree = 0;

  double total_residual() const { return unitarity_residual + vanish.max(); }
};

/// dY = 0 realization of a conservative pencil. Throws PreconditionError otherwise.
RealizationResult trivial_realization(const OperatorTuple& g);

/// Sum of squared Frobenius norms of the conservativity families of beta's
/// stacked pencil plus those of (H@T#F)^s for 2 <= |s| <= max_degree + 2.
double realization_objective(const Colligation& beta, int max_degree);

/// Seeded restarts of adaptive-step descent along central-difference gradients
/// of realization_objective, with S fixed at G. Deterministic given the options.
RealizationResult search_realization(const OperatorTuple& g, const RealizeOptions& opts = {});

/// Searches each dimension in increasing order, warm-starting from the
/// previous best padded with a conservative pencil, so the best objective
/// never increases along the ladder.
std::vector<RealizationResult> search_realization_ladder(const OperatorTuple& g, std::span<const Index> aux_dims,
                                                         const RealizeOptions& opts = {});

}  // namespace polydil
