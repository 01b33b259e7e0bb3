#include "polydil/vneumann.hpp"

#include <algorithm>
#include <cmath>

namespace polydil {

namespace {

CMatrix contracted(const CMatrix& x) {
  const double nx = spectral_norm(x);
  return nx > 1.0 ? CMatrix(x / nx) : x;
}

// Candidate (M, family parameters) of the ascent; the family blocks are
// normalized into contractions on every evaluation.
struct Candidate {
  std::vector<CMatrix> m;
  std::vector<CMatrix> fam;
};

CommutingTuple tuple_of(const Candidate& c, TupleFamily family) {
  if (family == TupleFamily::Parrott) {
    std::vector<CMatrix> x;
    for (const auto& f : c.fam) x.push_back(contracted(f));
    return parrott_tuple(x);
  }
  std::vector<CVector> x, y;
  for (const auto& f : c.fam) {
    x.push_back(contracted(f));
    y.push_back(x.back().conjugate());
  }
  return varopoulos_tuple(x, y);
}

double candidate_ratio(const Candidate& c, TupleFamily family, int grid) {
  const OperatorTuple m(c.m);
  TorusSearchOptions topts;
  topts.grid = grid;
  topts.restarts = 1;
  const double rhs = torus_norm_max(m, topts).torus_max;
  if (rhs == 0.0) return 0.0;
  double lhs;
  if (family == TupleFamily::Parrott) {
    CMatrix acc = CMatrix::Zero(m.rows() * c.fam.front().rows(), m.cols() * c.fam.front().cols());
    for (int k = 0; k < m.size(); ++k) acc += kron(m[k], contracted(c.fam[static_cast<std::size_t>(k)]));
    lhs = spectral_norm(acc);
  } else {
    lhs = pencil_on_tuple(m, tuple_of(c, family), 1.0).norm;
  }
  return lhs / rhs;
}

}  // namespace

CommutingTuple varopoulos_tuple(std::span<const CVector> x, std::span<const CVector> y) {
  if (x.empty() || x.size() != y.size()) {
    throw ShapeError("need equally many x and y vectors, got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  const Index m = x.front().size();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].size() != m || y[k].size() != m) throw ShapeError("vectors of mixed length in Varopoulos data");
    if (x[k].norm() > 1.0 + 1e-12 || y[k].norm() > 1.0 + 1e-12) {
      throw PreconditionError("Varopoulos vector " + std::to_string(k) + " has norm above 1");
    }
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t l = k + 1; l < x.size(); ++l) {
      const Complex a = y[k].dot(x[l]);
      const Complex b = y[l].dot(x[k]);
      if (std::abs(a - b) > 1e-12) {
        throw PreconditionError("<x_" + std::to_string(l) + ", y_" + std::to_string(k) + "> differs from <x_" +
                                std::to_string(k) + ", y_" + std::to_string(l) + "> by " +
                                std::to_string(std::abs(a - b)));
      }
    }
  }
  std::vector<CMatrix> t;
  for (std::size_t k = 0; k < x.size(); ++k) {
    CMatrix tk = CMatrix::Zero(m + 2, m + 2);
    tk.block(1, 0, m, 1) = x[k];
    tk.block(m + 1, 1, 1, m) = y[k].adjoint();
    t.push_back(std::move(tk));
  }
  return CommutingTuple(std::move(t));
}

CommutingTuple parrott_tuple(std::span<const CMatrix> x) {
  if (x.empty()) throw ShapeError("empty Parrott data");
  const Index p = x.front().rows();
  std::vector<CMatrix> t;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() != p || x[k].cols() != p) throw ShapeError("Parrott blocks must all be " + shape_str(p, p));
    if (spectral_norm(x[k]) > 1.0 + 1e-12) {
      throw PreconditionError("Parrott block " + std::to_string(k) + " is not a contraction");
    }
    CMatrix tk = CMatrix::Zero(2 * p, 2 * p);
    tk.bottomLeftCorner(p, p) = x[k];
    t.push_back(std::move(tk));
  }
  return CommutingTuple(std::move(t));
}

double witness_rhs(const OperatorTuple& m, int grid) {
  TorusSearchOptions opts;
  opts.grid = grid;
  opts.restarts = kWitnessRestarts;
  return torus_norm_max(m, opts).torus_max;
}

ViolationWitness make_witness(const OperatorTuple& m, const CommutingTuple& t, double r, std::uint64_t seed) {
  if (m.size() != t.size()) {
    throw ShapeError("pencil of size " + std::to_string(m.size()) + " and tuple of size " + std::to_string(t.size()));
  }
  ViolationWitness w{m, t, r, 0.0, 0.0, 0.0, seed, kWitnessGrid};
  w.lhs = pencil_on_tuple(m, t, r).norm;
  w.rhs = witness_rhs(m, w.rhs_grid);
  w.ratio = w.rhs > 0.0 ? w.lhs / w.rhs : 0.0;
  return w;
}

ViolationWitness violation_search(int n, const ViolationSearchOptions& opts) {
  if (n < 1) throw DomainError("pencil needs n >= 1");
  if (opts.matrix_dim < 1 || opts.defect_dim < 1) throw DomainError("search dimensions must be >= 1");
  if (opts.restarts < 1 || opts.iters < 0) throw DomainError("need at least one restart and a nonnegative budget");
  Rng rng(opts.seed);
  const Index fam_cols = opts.family == TupleFamily::Parrott ? opts.defect_dim : 1;

  Candidate best;
  double best_ratio = -1.0;
  for (int r = 0; r < opts.restarts; ++r) {
    Candidate c;
    for (int k = 0; k < n; ++k) {
      c.m.push_back(gaussian_matrix(opts.matrix_dim, opts.matrix_dim, rng));
      c.fam.push_back(gaussian_matrix(opts.defect_dim, fam_cols, rng) / std::sqrt(static_cast<double>(opts.defect_dim)));
    }
    double value = candidate_ratio(c, opts.family, opts.search_grid);
    double delta = 0.3;
    for (int sweep = 0; sweep < opts.iters && delta > 1e-6; ++sweep) {
      bool moved = false;
      for (auto* group : {&c.m, &c.fam}) {
        for (auto& mat : *group) {
          for (Index e = 0; e < mat.size(); ++e) {
            for (const Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
              const Complex keep = mat(e);
              mat(e) = keep + delta * dir;
              const double trial = candidate_ratio(c, opts.family, opts.search_grid);
              if (trial > value) {
                value = trial;
                moved = true;
              } else {
                mat(e) = keep;
              }
            }
          }
        }
      }
      if (!moved) delta *= 0.5;
    }
    if (value > best_ratio) {
      best_ratio = value;
      best = c;
    }
  }
  return make_witness(OperatorTuple(best.m), tuple_of(best, opts.family), 1.0, opts.seed);
}

Revalidation revalidate(const ViolationWitness& w) {
  Revalidation out;
  const OperatorTuple& m = w.m;
  const Index d = w.t.dim();
  CMatrix big = CMatrix::Zero(m.rows() * d, m.cols() * d);
  for (int k = 0; k < m.size(); ++k) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        big.block(i * d, j * d, d, d) += (w.r * m[k](i, j)) * w.t[k];
      }
    }
  }
  out.lhs = Eigen::JacobiSVD<CMatrix>(big).singularValues()(0);
  out.rhs = witness_rhs(m, w.rhs_grid);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  out.ratio_open = kOpenRadius * out.ratio;  // the pencil is homogeneous of degree one
  out.mismatch = std::abs(out.ratio - w.ratio);
  out.valid = out.mismatch <= 1e-10 && out.ratio_open > 1.0 + kWitnessMargin;
  return out;
}

CounterexampleSystem build_counterexample_system(const OperatorTuple& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw ShapeError("counterexample needs square M_k of size >= 2, got " + shape_str(m.rows(), m.cols()));
  }
  const double rhs = witness_rhs(m);
  if (rhs == 0.0) throw PreconditionError("every M_k is zero; nothing to normalize");
  CounterexampleSystem out;
  out.normalizer = rhs;
  out.alpha = unstack(m.scaled(1.0 / rhs), m.rows() - 1, 1);
  return out;
}

double safe_pad_norm(const ViolationWitness& w3, int n) {
  if (n <= 3) throw DomainError("padding needs n > 3, got " + std::to_string(n));
  return std::max(0.0, (w3.ratio - 1.0) * w3.rhs / (4.0 * (n - 3)));
}

ViolationWitness extend_to_higher_n(const ViolationWitness& w3, int n, double pad_norm) {
  if (w3.m.size() != 3) throw DomainError("padding starts from a three-variable witness");
  const double bound = safe_pad_norm(w3, n);
  if (!(pad_norm >= 0.0) || pad_norm > bound) {
    throw PreconditionError("pad norm " + std::to_string(pad_norm) + " exceeds the safe bound " +
                            std::to_string(bound));
  }
  std::vector<CMatrix> m(w3.m.mats().begin(), w3.m.mats().end());
  std::vector<CMatrix> t(w3.t.mats().mats().begin(), w3.t.mats().mats().end());
  for (int k = 3; k < n; ++k) {
    m.push_back(pad_norm * CMatrix::Identity(w3.m.rows(), w3.m.cols()));
    t.push_back(CMatrix::Zero(w3.t.dim(), w3.t.dim()));
  }
  ViolationWitness w{OperatorTuple(std::move(m)), CommutingTuple(std::move(t)), w3.r, 0.0, 0.0, 0.0, w3.seed,
                     w3.rhs_grid};
  w.lhs = pencil_on_tuple(w.m, w.t, w.r).norm;
  // Coarser grid as n grows to stay under the torus grid cap.
  w.rhs_grid = n <= 4 ? 32 : 16;
  w.rhs = witness_rhs(w.m, w.rhs_grid);
  w.ratio = w.rhs > 0.0 ? w.lhs / w.rhs : 0.0;
  return w;
}

}  // namespace polydil
