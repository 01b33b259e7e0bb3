#pragma once

// Linear pencil L_G(z) = sum_k z_k G_k: torus norm maximization and the
// dissipative / conservative decisions.

#include <array>
#include <cstdint>
#include <string_view>

#include "polydil/linalg.hpp"

namespace polydil {

inline constexpr double kConservativeTol = 1e-10;
inline constexpr double kViolationMargin = 1e-9;
inline constexpr std::int64_t kTorusGridCap = std::int64_t{1} << 20;

enum class Verdict { Dissipative, ViolationFound };

std::string_view to_string(Verdict v);

struct TorusSearchOptions {
  int grid = 64;           ///< phase samples per free coordinate
  int restarts = 8;        ///< random starting points for local ascent
  std::uint64_t seed = 0;
  bool allow_sampling = true;  ///< fall back to quasi-random points above the grid cap
};

/// Outcome of a torus norm search. ViolationFound is a certificate (the
/// argmax is re-checked); Dissipative only means no violation was found.
struct PencilReport {
  double torus_max = 0.0;
  TorusPoint argmax;
  Verdict verdict = Verdict::Dissipative;
  double necessary_bound = 0.0;  ///< || sum_k G_k* G_k ||
  int grid_density = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  bool sampled = false;          ///< quasi-random fallback replaced the grid
  std::int64_t evaluations = 0;
};

/// Best-found lower bound on sup over the torus of ||sum_k zeta_k G_k||.
/// The first coordinate is pinned to 1 since the norm ignores a global phase.
PencilReport torus_norm_max(const OperatorTuple& g, const TorusSearchOptions& opts = {});

/// The four Fourier-coefficient families of (zeta G)*(zeta G) = I = (zeta G)(zeta G)*.
struct ConservativityResiduals {
  double cross_left = 0.0;   ///< max_{k != l} ||G_k* G_l||
  double cross_right = 0.0;  ///< max_{k != l} ||G_k G_l*||
  double sum_left = 0.0;     ///< ||sum G_k* G_k - I||
  double sum_right = 0.0;    ///< ||sum G_k G_k* - I||

  double max() const;
};

struct ConservativityCheck {
  bool conservative = false;
  ConservativityResiduals residuals;
};

ConservativityResiduals conservativity_residuals(const OperatorTuple& g);
ConservativityCheck is_conservative_algebraic(const OperatorTuple& g, double tol = kConservativeTol);

/// G_k = P_k U with U Haar unitary and P_k a random resolution of the identity
/// into orthogonal projections (ranks may be zero when dim < n).
OperatorTuple random_conservative_pencil(int n, Index dim, std::uint64_t seed);

/// Gaussian tuple rescaled so that sum_k ||G_k|| = rho; dissipative for rho <= 1.
OperatorTuple random_dissipative_pencil(int n, Index rows, Index cols, double rho, Rng& rng);

}  // namespace polydil
