#pragma once

#include <polydil/linalg.hpp>
#include <polydil/pencil.hpp>

#include <doctest.h>

namespace testsupport {

using namespace polydil;

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

inline OperatorTuple random_tuple(int n, Index rows, Index cols, Rng& rng, double scale = 1.0) {
  std::vector<CMatrix> mats;
  for (int k = 0; k < n; ++k) mats.push_back(scale * gaussian_matrix(rows, cols, rng));
  return OperatorTuple(std::move(mats));
}

inline CMatrix diag(std::initializer_list<Complex> d) {
  CMatrix m = CMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (auto v : d) m(i, i) = v, ++i;
  return m;
}

inline CMatrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r ? static_cast<Index>(rows.begin()->size()) : 0;
  CMatrix m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (auto v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

/// Random colligation whose stacked pencil has sum_k ||G_k|| = rho, hence dissipative.
inline Colligation random_dissipative(int n, Index dx, Index din, Index dout, Rng& rng, double rho = 0.9) {
  return unstack(random_dissipative_pencil(n, dx + dout, dx + din, rho, rng), dx, din);
}

}  // namespace testsupport
