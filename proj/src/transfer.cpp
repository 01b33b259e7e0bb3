#include "polydil/transfer.hpp"

#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "polydil/multipower.hpp"

namespace polydil {

namespace {

// (I - m)^{-1} rhs after checking the condition number of I - m.
CMatrix guarded_solve(const CMatrix& m, const CMatrix& rhs, const char* what) {
  const CMatrix lhs = CMatrix::Identity(m.rows(), m.cols()) - m;
  Eigen::BDCSVD<CMatrix> svd(lhs);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= kResolventConditionCap)) {
    throw SingularityError(std::string(what) + " resolvent is ill-conditioned (condition " + std::to_string(cond) +
                               " > 1e12)",
                           cond);
  }
  return lhs.partialPivLu().solve(rhs);
}

}  // namespace

CMatrix transfer_eval(const Colligation& alpha, std::span<const Complex> z) {
  if (static_cast<int>(z.size()) != alpha.n()) {
    throw ShapeError("transfer function of N = " + std::to_string(alpha.n()) + " evaluated at a point with " +
                     std::to_string(z.size()) + " coordinates");
  }
  CMatrix value = eval_pencil(alpha.d(), z);
  if (alpha.state_dim() == 0) return value;
  const CMatrix za = eval_pencil(alpha.a(), z);
  const CMatrix zb = eval_pencil(alpha.b(), z);
  const CMatrix zc = eval_pencil(alpha.c(), z);
  value.noalias() += zc * guarded_solve(za, zb, "state");
  return value;
}

CMatrix taylor_coeff(const Colligation& alpha, const MultiIndex& s) {
  if (s.size() != alpha.n()) {
    throw ShapeError("multi-index has " + std::to_string(s.size()) + " entries for N = " + std::to_string(alpha.n()));
  }
  const int deg = s.degree();
  if (deg == 0) return CMatrix::Zero(alpha.output_dim(), alpha.input_dim());
  if (deg == 1) {
    for (int k = 0; k < s.size(); ++k) {
      if (s[k] == 1) return alpha.d()[k];
    }
  }
  return static_cast<double>(polynomial_coefficient(s)) *
         sym_power(SymPowerKind::FlatSharp, alpha.a(), &alpha.b(), &alpha.c(), s);
}

CommutingTuple::CommutingTuple(std::vector<CMatrix> mats, double commutator_tol, double contraction_tol)
    : mats_(std::move(mats)) {
  if (mats_.rows() != mats_.cols()) {
    throw ShapeError("commuting tuple needs square matrices, got " + shape_str(mats_.rows(), mats_.cols()));
  }
  for (int k = 0; k < mats_.size(); ++k) {
    const double nk = spectral_norm(mats_[k]);
    if (nk > 1.0 + contraction_tol) {
      throw PreconditionError("tuple entry " + std::to_string(k) + " has norm " + std::to_string(nk) +
                              " > 1, not a contraction");
    }
  }
  const double comm = commutator_residual();
  if (comm > commutator_tol) {
    throw PreconditionError("tuple entries do not commute (commutator norm " + std::to_string(comm) + ")");
  }
}

CommutingTuple CommutingTuple::zeros(int n, Index dim) {
  return CommutingTuple(std::vector<CMatrix>(static_cast<std::size_t>(n), CMatrix::Zero(dim, dim)));
}

double CommutingTuple::commutator_residual() const {
  double worst = 0.0;
  for (int k = 0; k < mats_.size(); ++k) {
    for (int l = k + 1; l < mats_.size(); ++l) {
      worst = std::max(worst, spectral_norm(mats_[k] * mats_[l] - mats_[l] * mats_[k]));
    }
  }
  return worst;
}

CommutingTuple random_commuting_tuple(int n, Index dim, Rng& rng) {
  std::uniform_real_distribution<double> ud(0.5, 1.0);
  std::vector<CMatrix> mats;
  if (rng() % 2 == 0) {
    const CMatrix u = haar_unitary(dim, rng);
    for (int k = 0; k < n; ++k) {
      CVector lambda = gaussian_matrix(dim, 1, rng).col(0);
      const double top = lambda.cwiseAbs().maxCoeff();
      if (top > 0.0) lambda *= ud(rng) / top;
      mats.push_back(u * lambda.asDiagonal() * u.adjoint());
    }
  } else {
    const CMatrix s = gaussian_matrix(dim, dim, rng) / std::sqrt(static_cast<double>(std::max<Index>(dim, 1)));
    for (int k = 0; k < n; ++k) {
      const CMatrix c = gaussian_matrix(4, 1, rng);
      CMatrix p = CMatrix::Zero(dim, dim);
      CMatrix power = CMatrix::Identity(dim, dim);
      for (Index j = 0; j < 4; ++j) {
        p += c(j, 0) * power;
        power = power * s;
      }
      const double norm = spectral_norm(p);
      if (norm > 0.0) p *= ud(rng) / norm;
      mats.push_back(p);
    }
  }
  return CommutingTuple(std::move(mats));
}

CMatrix tensor_pencil(const OperatorTuple& x, const OperatorTuple& t, double c) {
  if (x.size() != t.size()) {
    throw ShapeError("tensor pencil of sizes " + std::to_string(x.size()) + " and " + std::to_string(t.size()));
  }
  CMatrix out = CMatrix::Zero(x.rows() * t.rows(), x.cols() * t.cols());
  for (int k = 0; k < x.size(); ++k) out += kron(x[k], c * t[k]);
  return out;
}

namespace {

void check_radius(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("radius must lie in [0, 1], got " + std::to_string(r));
}

}  // namespace

TupleEvalResult eval_on_tuple(const Colligation& alpha, const CommutingTuple& t, double r) {
  check_radius(r);
  if (t.size() != alpha.n()) {
    throw ShapeError("tuple of size " + std::to_string(t.size()) + " for N = " + std::to_string(alpha.n()));
  }
  TupleEvalResult res;
  res.r = r;
  res.value = tensor_pencil(alpha.d(), t.mats(), r);
  if (alpha.state_dim() > 0) {
    const CMatrix ta = tensor_pencil(alpha.a(), t.mats(), r);
    const double margin = 1.0 - spectral_norm(ta);
    res.resolvent_margin = margin;
    if (!(margin > 0.0)) {
      throw PreconditionError("resolvent margin 1 - ||sum A_k (x) rT_k|| = " + std::to_string(margin) +
                              " is not positive");
    }
    const CMatrix tb = tensor_pencil(alpha.b(), t.mats(), r);
    const CMatrix tc = tensor_pencil(alpha.c(), t.mats(), r);
    res.value.noalias() += tc * guarded_solve(ta, tb, "tensor");
  }
  res.norm = spectral_norm(res.value);
  return res;
}

TupleEvalResult pencil_on_tuple(const OperatorTuple& g, const CommutingTuple& t, double r) {
  check_radius(r);
  TupleEvalResult res;
  res.r = r;
  res.value = tensor_pencil(g, t.mats(), r);
  res.norm = spectral_norm(res.value);
  return res;
}

}  // namespace polydil
