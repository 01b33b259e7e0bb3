#include "polydil/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace polydil {

std::string shape_str(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

OperatorTuple::OperatorTuple(std::vector<CMatrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw ShapeError("operator tuple needs at least one matrix");
  rows_ = mats_.front().rows();
  cols_ = mats_.front().cols();
  for (std::size_t k = 0; k < mats_.size(); ++k) {
    const auto& m = mats_[k];
    if (m.rows() != rows_ || m.cols() != cols_) {
      throw ShapeError("operator tuple entry " + std::to_string(k) + " has shape " +
                       shape_str(m.rows(), m.cols()) + ", expected " + shape_str(rows_, cols_));
    }
    if (!m.allFinite()) {
      throw DomainError("operator tuple entry " + std::to_string(k) + " has non-finite entries");
    }
  }
}

OperatorTuple OperatorTuple::zeros(int n, Index rows, Index cols) {
  if (n < 1) throw ShapeError("operator tuple needs n >= 1");
  return OperatorTuple(std::vector<CMatrix>(static_cast<std::size_t>(n), CMatrix::Zero(rows, cols)));
}

OperatorTuple OperatorTuple::scaled(Complex c) const {
  std::vector<CMatrix> out;
  out.reserve(mats_.size());
  for (const auto& m : mats_) out.push_back(c * m);
  return OperatorTuple(std::move(out));
}

OperatorTuple OperatorTuple::rotated(std::span<const Complex> phases) const {
  if (static_cast<int>(phases.size()) != size()) throw ShapeError("phase count must equal tuple size");
  std::vector<CMatrix> out;
  out.reserve(mats_.size());
  for (std::size_t k = 0; k < mats_.size(); ++k) out.push_back(phases[k] * mats_[k]);
  return OperatorTuple(std::move(out));
}

Colligation::Colligation(OperatorTuple a, OperatorTuple b, OperatorTuple c, OperatorTuple d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const int n = a_.size();
  if (n < 1 || b_.size() != n || c_.size() != n || d_.size() != n) {
    throw ShapeError("colligation tuples must share one parameter count N >= 1");
  }
  const Index dx = a_.rows(), din = d_.cols(), dout = d_.rows();
  if (a_.cols() != dx) throw ShapeError("A must be square, got " + shape_str(a_.rows(), a_.cols()));
  if (b_.rows() != dx || b_.cols() != din) {
    throw ShapeError("B must be " + shape_str(dx, din) + ", got " + shape_str(b_.rows(), b_.cols()));
  }
  if (c_.rows() != dout || c_.cols() != dx) {
    throw ShapeError("C must be " + shape_str(dout, dx) + ", got " + shape_str(c_.rows(), c_.cols()));
  }
}

TorusPoint::TorusPoint(std::vector<Complex> coords) : coords_(std::move(coords)) {
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!(std::abs(std::abs(coords_[k]) - 1.0) <= 1e-12)) {
      throw DomainError("torus coordinate " + std::to_string(k) + " is not unimodular");
    }
  }
}

TorusPoint TorusPoint::from_angles(std::span<const double> angles) {
  std::vector<Complex> c;
  c.reserve(angles.size());
  for (double t : angles) c.push_back(std::polar(1.0, t));
  return TorusPoint(std::move(c));
}

TorusPoint TorusPoint::ones(int n) {
  return TorusPoint(std::vector<Complex>(static_cast<std::size_t>(n), Complex(1.0, 0.0)));
}

MultiIndex::MultiIndex(std::vector<int> s) : s_(std::move(s)) {
  for (std::size_t k = 0; k < s_.size(); ++k) {
    if (s_[k] < 0) throw DomainError("multi-index component " + std::to_string(k) + " is negative");
  }
}

MultiIndex MultiIndex::unit(int n, int k) {
  if (k < 0 || k >= n) throw DomainError("unit multi-index position out of range");
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  s[static_cast<std::size_t>(k)] = 1;
  return MultiIndex(std::move(s));
}

int MultiIndex::degree() const { return std::accumulate(s_.begin(), s_.end(), 0); }

bool MultiIndex::is_unit() const { return degree() == 1; }

MultiIndex MultiIndex::plus_unit(int k) const {
  auto s = s_;
  ++s.at(static_cast<std::size_t>(k));
  return MultiIndex(std::move(s));
}

MultiIndex MultiIndex::minus_unit(int k) const {
  auto s = s_;
  --s.at(static_cast<std::size_t>(k));
  return MultiIndex(std::move(s));
}

namespace {

void fill_degree(int n, int pos, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[static_cast<std::size_t>(pos)] = v;
    fill_degree(n, pos + 1, remaining - v, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> indices_of_degree(int n, int degree) {
  if (n < 1) throw DomainError("multi-index length must be >= 1");
  std::vector<MultiIndex> out;
  if (degree < 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  fill_degree(n, 0, degree, cur, out);
  return out;
}

std::vector<MultiIndex> indices_up_to(int n, int max_degree) {
  std::vector<MultiIndex> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto level = indices_of_degree(n, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_norm_gram(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  const CMatrix gram = m.rows() <= m.cols() ? CMatrix(m * m.adjoint()) : CMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double unitarity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("unitarity defect needs a square matrix, got " + shape_str(m.rows(), m.cols()));
  }
  const Index d = m.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  return std::max(spectral_norm(m.adjoint() * m - id), spectral_norm(m * m.adjoint() - id));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  constexpr Index limit = std::numeric_limits<int>::max();
  auto checked = [](Index x, Index y) {
    if (x != 0 && y > limit / x) throw CapacityError("Kronecker dimension product overflows");
    return x * y;
  };
  const Index rows = checked(a.rows(), b.rows());
  const Index cols = checked(a.cols(), b.cols());
  CMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix stack_colligation(const Colligation& alpha, int k) {
  if (k < 0 || k >= alpha.n()) {
    throw DomainError("stack index " + std::to_string(k) + " outside [0, " + std::to_string(alpha.n()) + ")");
  }
  const Index dx = alpha.state_dim(), din = alpha.input_dim(), dout = alpha.output_dim();
  CMatrix g(dx + dout, dx + din);
  g.topLeftCorner(dx, dx) = alpha.a()[k];
  g.topRightCorner(dx, din) = alpha.b()[k];
  g.bottomLeftCorner(dout, dx) = alpha.c()[k];
  g.bottomRightCorner(dout, din) = alpha.d()[k];
  return g;
}

OperatorTuple stacked_pencil(const Colligation& alpha) {
  std::vector<CMatrix> g;
  g.reserve(static_cast<std::size_t>(alpha.n()));
  for (int k = 0; k < alpha.n(); ++k) g.push_back(stack_colligation(alpha, k));
  return OperatorTuple(std::move(g));
}

Colligation unstack(const OperatorTuple& g, Index state_dim, Index input_dim) {
  if (state_dim < 0 || input_dim < 0 || state_dim > g.rows() || state_dim + input_dim != g.cols()) {
    throw ShapeError("cannot split " + shape_str(g.rows(), g.cols()) + " pencil with state " +
                     std::to_string(state_dim) + " and input " + std::to_string(input_dim));
  }
  const Index dx = state_dim, din = input_dim, dout = g.rows() - dx;
  std::vector<CMatrix> a, b, c, d;
  for (const auto& m : g.mats()) {
    a.push_back(m.topLeftCorner(dx, dx));
    b.push_back(m.topRightCorner(dx, din));
    c.push_back(m.bottomLeftCorner(dout, dx));
    d.push_back(m.bottomRightCorner(dout, din));
  }
  return Colligation(OperatorTuple(std::move(a)), OperatorTuple(std::move(b)), OperatorTuple(std::move(c)),
                     OperatorTuple(std::move(d)));
}

CMatrix eval_pencil(const OperatorTuple& g, std::span<const Complex> z) {
  if (static_cast<int>(z.size()) != g.size()) {
    throw ShapeError("pencil has " + std::to_string(g.size()) + " coefficients but point has " +
                     std::to_string(z.size()) + " coordinates");
  }
  CMatrix out = CMatrix::Zero(g.rows(), g.cols());
  for (int k = 0; k < g.size(); ++k) out += z[static_cast<std::size_t>(k)] * g[k];
  return out;
}

CMatrix orthonormal_basis(const CMatrix& cols, double rel_tol) {
  const Index dim = cols.rows();
  double scale = 0.0;
  for (Index j = 0; j < cols.cols(); ++j) scale = std::max(scale, cols.col(j).norm());
  CMatrix q(dim, 0);
  if (scale == 0.0) return q;
  const double cutoff = rel_tol * scale;
  std::vector<CVector> kept;
  for (Index j = 0; j < cols.cols(); ++j) {
    CVector v = cols.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : kept) v -= u * u.dot(v);
    }
    const double nv = v.norm();
    if (nv > cutoff) kept.push_back(v / nv);
  }
  q.resize(dim, static_cast<Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) q.col(static_cast<Index>(j)) = kept[j];
  return q;
}

CMatrix orthocomplement(const CMatrix& basis, Index ambient) {
  if (basis.rows() != ambient) throw ShapeError("basis rows must equal the ambient dimension");
  const Index want = ambient - basis.cols();
  std::vector<CVector> kept;
  for (Index j = 0; j < basis.cols(); ++j) kept.emplace_back(basis.col(j));
  CMatrix out(ambient, std::max<Index>(want, 0));
  std::vector<bool> used(static_cast<std::size_t>(ambient), false);
  for (Index found = 0; found < want; ++found) {
    // Pick the standard basis vector with the largest residual; ties go to the lowest index.
    Index best = -1;
    double best_norm = -1.0;
    CVector best_v;
    for (Index i = 0; i < ambient; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      CVector v = CVector::Unit(ambient, i);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : kept) v -= u * u.dot(v);
      }
      const double nv = v.norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = i;
        best_v = std::move(v);
      }
    }
    if (best < 0 || best_norm < 1e-8) throw PreconditionError("basis columns are not linearly independent");
    used[static_cast<std::size_t>(best)] = true;
    best_v /= best_norm;
    out.col(found) = best_v;
    kept.push_back(best_v);
  }
  return out;
}

CMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(rows, cols);
  // Column-major fill order keeps streams reproducible across shapes with equal size.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

CMatrix haar_unitary(Index dim, Rng& rng) {
  if (dim == 0) return CMatrix(0, 0);
  const CMatrix z = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0.0) q.col(j) *= d / ad;
  }
  return q;
}

TorusPoint random_torus_point(int n, Rng& rng) {
  std::uniform_real_distribution<double> ud(0.0, 2.0 * M_PI);
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (auto& a : angles) a = ud(rng);
  return TorusPoint::from_angles(angles);
}

}  // namespace polydil
