#pragma once

// Symmetrized multipowers: permutation averages of noncommutative words in
// A_1..A_N, optionally bordered on the right by a B-letter and/or on the left
// by a C-letter.

#include <cstdint>
#include <map>
#include <string_view>

#include "polydil/linalg.hpp"

namespace polydil {

enum class SymPowerKind {
  Plain,     ///< A^s, any s
  SharpB,    ///< (A#B)^s, |s| >= 1, last letter B
  FlatC,     ///< (C@A)^s, |s| >= 1, first letter C
  FlatSharp  ///< (C@A#B)^s, |s| >= 2, first letter C and last letter B
};

std::string_view to_string(SymPowerKind kind);

/// |s|! / (s_1! ... s_N!), exact. Throws CapacityError beyond 64 bits.
std::uint64_t polynomial_coefficient(const MultiIndex& s);

/// True when s lies in the index domain of the kind.
bool in_domain(SymPowerKind kind, const MultiIndex& s);

/// Symmetrized multipower through the left-factor recursion over the box
/// {t <= s}. b is required for SharpB/FlatSharp, c for FlatC/FlatSharp.
/// reverse_order sums the recursion terms with k descending; the result is
/// identical up to rounding.
CMatrix sym_power(SymPowerKind kind, const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                  const MultiIndex& s, bool reverse_order = false);

/// Literal enumeration of all c_s words. Throws CapacityError for |s| > 8.
CMatrix sym_power_oracle(SymPowerKind kind, const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                         const MultiIndex& s);

/// Normalized multipowers of every kind for all |s| <= max_degree, sharing
/// one recursion pass. Kinds whose bordering tuple is absent are not stored.
class SymPowerTable {
 public:
  SymPowerTable(const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c, int max_degree);

  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  bool has(SymPowerKind kind) const;
  /// Throws DomainError outside the kind's domain or above max_degree.
  const CMatrix& get(SymPowerKind kind, const MultiIndex& s) const;

 private:
  int n_ = 0;
  int max_degree_ = 0;
  bool has_b_ = false;
  bool has_c_ = false;
  std::map<MultiIndex, CMatrix> plain_, sharp_, flat_, flat_sharp_;
};

}  // namespace polydil
