#pragma once

// Dense complex linear algebra and the domain types shared by every module.

#include <complex>
#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polydil/errors.hpp"

namespace polydil {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

/// N same-shaped matrices (G_1, ..., G_N): the coefficients of a linear pencil.
class OperatorTuple {
 public:
  OperatorTuple() = default;
  /// Throws ShapeError on an empty list or mixed shapes, DomainError on NaN/Inf.
  explicit OperatorTuple(std::vector<CMatrix> mats);

  static OperatorTuple zeros(int n, Index rows, Index cols);

  int size() const { return static_cast<int>(mats_.size()); }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const CMatrix& operator[](int k) const { return mats_[static_cast<std::size_t>(k)]; }
  std::span<const CMatrix> mats() const { return mats_; }

  OperatorTuple scaled(Complex c) const;
  /// Multiplies G_k by phases[k].
  OperatorTuple rotated(std::span<const Complex> phases) const;

 private:
  std::vector<CMatrix> mats_;
  Index rows_ = 0;
  Index cols_ = 0;
};

/// alpha = (N; A, B, C, D; X, N-, N+). Dimensions are read off the shapes.
class Colligation {
 public:
  Colligation() = default;
  /// Throws ShapeError unless A is dX x dX, B dX x dIn, C dOut x dX, D dOut x dIn, all with one N.
  Colligation(OperatorTuple a, OperatorTuple b, OperatorTuple c, OperatorTuple d);

  int n() const { return a_.size(); }
  Index state_dim() const { return a_.rows(); }
  Index input_dim() const { return d_.cols(); }
  Index output_dim() const { return d_.rows(); }

  const OperatorTuple& a() const { return a_; }
  const OperatorTuple& b() const { return b_; }
  const OperatorTuple& c() const { return c_; }
  const OperatorTuple& d() const { return d_; }

 private:
  OperatorTuple a_, b_, c_, d_;
};

/// A point of the N-torus; every coordinate unimodular to 1e-12.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<Complex> coords);
  static TorusPoint from_angles(std::span<const double> angles);
  static TorusPoint ones(int n);

  int size() const { return static_cast<int>(coords_.size()); }
  const Complex& operator[](int k) const { return coords_[static_cast<std::size_t>(k)]; }
  std::span<const Complex> coords() const { return coords_; }

 private:
  std::vector<Complex> coords_;
};

/// s in Z^N_+.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> s);
  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }
  static MultiIndex unit(int n, int k);

  int size() const { return static_cast<int>(s_.size()); }
  int degree() const;
  int operator[](int k) const { return s_[static_cast<std::size_t>(k)]; }
  std::span<const int> parts() const { return s_; }

  bool is_zero() const { return degree() == 0; }
  /// True when s = e_k for some k.
  bool is_unit() const;

  MultiIndex plus_unit(int k) const;
  MultiIndex minus_unit(int k) const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> s_;
};

/// All s with |s| = degree, lexicographically decreasing in s_1 (s=(d,0,..) first).
std::vector<MultiIndex> indices_of_degree(int n, int degree);
/// All s with |s| <= max_degree, grouped by degree ascending.
std::vector<MultiIndex> indices_up_to(int n, int max_degree);

/// "rows x cols" for error messages.
std::string shape_str(Index rows, Index cols);

/// Largest singular value; 0 for an empty matrix.
double spectral_norm(const CMatrix& m);
/// Largest singular value from the Hermitian eigenproblem of the smaller Gram
/// matrix. Cheaper than an SVD for the small matrices of inner search loops;
/// the relative error of the top singular value stays at rounding level.
double spectral_norm_gram(const CMatrix& m);
/// max(||m*m - I||, ||m m* - I||). Throws ShapeError for non-square input.
double unitarity_defect(const CMatrix& m);
/// Kronecker product; (a (x) b)[(i1,i2),(j1,j2)] = a[i1,j1] b[i2,j2].
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// [[A_k, B_k], [C_k, D_k]] for 0-based k.
CMatrix stack_colligation(const Colligation& alpha, int k);
/// The whole stacked pencil G = (stack(alpha, 0), ..., stack(alpha, N-1)).
OperatorTuple stacked_pencil(const Colligation& alpha);
/// Inverse of stacked_pencil given the state and input dimensions.
Colligation unstack(const OperatorTuple& g, Index state_dim, Index input_dim);

/// sum_k z_k G_k. Throws ShapeError when z.size() != g.size().
CMatrix eval_pencil(const OperatorTuple& g, std::span<const Complex> z);

/// Orthonormal basis of the column span (modified Gram-Schmidt, two passes).
/// Columns whose residual falls below rel_tol times the largest input column
/// norm are dropped.
CMatrix orthonormal_basis(const CMatrix& cols, double rel_tol = 1e-10);
/// Orthonormal basis of the complement of span(basis) in C^ambient, built by
/// pivoted Gram-Schmidt over the standard basis. A coordinate subspace yields
/// exact standard basis vectors.
CMatrix orthocomplement(const CMatrix& basis, Index ambient);

// Seeded random generators.
CMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
CMatrix haar_unitary(Index dim, Rng& rng);
TorusPoint random_torus_point(int n, Rng& rng);

}  // namespace polydil
