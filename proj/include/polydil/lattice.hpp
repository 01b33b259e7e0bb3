#pragma once

// Simulation of the N-parameter recurrence
//   x(t)  = sum_k A_k x(t - e_k) + B_k u(t - e_k)
//   y(t)  = sum_k C_k x(t - e_k) + D_k u(t - e_k)
// on the cone {base + s : s in Z^N_+, |s| <= levels}, one level at a time.

#include <map>
#include <vector>

#include "polydil/linalg.hpp"

namespace polydil {

using LatticePoint = std::vector<int>;

std::string point_str(const LatticePoint& t);

struct LatticeWindow {
  LatticePoint base;
  int levels = 0;

  int n() const { return static_cast<int>(base.size()); }
  /// Level of t above the base, or -1 when t is not in the cone.
  int level_of(const LatticePoint& t) const;
  bool contains(const LatticePoint& t) const;
  /// Points of one level in the order of indices_of_degree.
  std::vector<LatticePoint> level(int l) const;
};

/// Vectors of one dimension attached to points of a window.
class LatticeSignal {
 public:
  LatticeSignal() = default;
  LatticeSignal(LatticeWindow window, Index value_dim);

  const LatticeWindow& window() const { return window_; }
  Index value_dim() const { return value_dim_; }
  /// Throws DomainError outside the window, ShapeError on a length mismatch.
  void set(const LatticePoint& t, CVector v);
  const CVector* find(const LatticePoint& t) const;
  /// Throws GapError naming t when nothing is stored there.
  const CVector& at(const LatticePoint& t) const;
  const std::map<LatticePoint, CVector>& data() const { return data_; }

 private:
  LatticeWindow window_;
  Index value_dim_ = 0;
  std::map<LatticePoint, CVector> data_;
};

/// Zero input on levels 0 .. levels-1 of the window.
LatticeSignal zero_input(const LatticeWindow& window, Index dim);

struct Trajectory {
  LatticeSignal states;   ///< levels 0 .. L
  LatticeSignal outputs;  ///< levels 1 .. L
};

/// x0 must hold the base point, input every point of levels 0 .. L-1 (both
/// over input's window). Predecessors outside the cone are at rest.
Trajectory simulate(const Colligation& alpha, const LatticeSignal& x0, const LatticeSignal& input);

/// Output at s under a unit impulse at the origin with zero initial state,
/// one column per input coordinate, for 1 <= |s| <= max_level.
std::map<MultiIndex, CMatrix> impulse_response(const Colligation& alpha, int max_level);

}  // namespace polydil
