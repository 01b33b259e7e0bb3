#include "polydil/realize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace polydil {

namespace {

struct Blocks {
  std::vector<CMatrix> t, f, h;

  template <class Fn>
  void for_each_matrix(Fn&& fn) {
    for (auto* group : {&t, &f, &h}) {
      for (auto& m : *group) fn(m);
    }
  }
};

// J evaluated directly from the blocks; the word sums share a table indexed by
// position in indices_up_to(n, max_degree + 2).
class Objective {
 public:
  Objective(const OperatorTuple& g, Index aux, int max_degree) : g_(g), aux_(aux) {
    const int n = g.size();
    n_ = n;
    idx_ = indices_up_to(n, max_degree + 2);
    std::map<MultiIndex, int> pos;
    for (std::size_t i = 0; i < idx_.size(); ++i) pos.emplace(idx_[i], static_cast<int>(i));
    pred_.assign(idx_.size() * static_cast<std::size_t>(n), -1);
    coef_.resize(idx_.size());
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      coef_[i] = static_cast<double>(polynomial_coefficient(idx_[i]));
      for (int k = 0; k < n; ++k) {
        if (idx_[i][k] > 0) pred_[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = pos.at(idx_[i].minus_unit(k));
      }
    }
    u_.resize(idx_.size());
    stacked_.resize(static_cast<std::size_t>(n));
    for (auto& m : stacked_) m = CMatrix::Zero(aux + g.rows(), aux + g.cols());
  }

  double operator()(const Blocks& x) {
    const int n = n_;
    const Index rows = g_.rows(), cols = g_.cols();
    for (int k = 0; k < n; ++k) {
      CMatrix& s = stacked_[static_cast<std::size_t>(k)];
      s.topLeftCorner(aux_, aux_) = x.t[static_cast<std::size_t>(k)];
      s.topRightCorner(aux_, cols) = x.f[static_cast<std::size_t>(k)];
      s.bottomLeftCorner(rows, aux_) = x.h[static_cast<std::size_t>(k)];
      s.bottomRightCorner(rows, cols) = g_[k];
    }
    double j = 0.0;
    CMatrix left = -CMatrix::Identity(aux_ + cols, aux_ + cols);
    CMatrix right = -CMatrix::Identity(aux_ + rows, aux_ + rows);
    for (int k = 0; k < n; ++k) {
      const CMatrix& a = stacked_[static_cast<std::size_t>(k)];
      left.noalias() += a.adjoint() * a;
      right.noalias() += a * a.adjoint();
      for (int l = k + 1; l < n; ++l) {
        const CMatrix& b = stacked_[static_cast<std::size_t>(l)];
        j += (a.adjoint() * b).squaredNorm() + (a * b.adjoint()).squaredNorm();
      }
    }
    j += left.squaredNorm() + right.squaredNorm();

    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      const int d = idx_[i].degree();
      if (d == 0) continue;
      if (d == 1) {
        for (int k = 0; k < n; ++k) {
          if (pred_[i * nn + static_cast<std::size_t>(k)] >= 0) u_[i] = x.f[static_cast<std::size_t>(k)];
        }
        continue;
      }
      CMatrix word = CMatrix::Zero(rows, cols);
      const bool need_u = d < idx_.back().degree();
      if (need_u) u_[i].setZero(aux_, cols);
      for (int k = 0; k < n; ++k) {
        const int p = pred_[i * nn + static_cast<std::size_t>(k)];
        if (p < 0) continue;
        word.noalias() += x.h[static_cast<std::size_t>(k)] * u_[static_cast<std::size_t>(p)];
        if (need_u) u_[i].noalias() += x.t[static_cast<std::size_t>(k)] * u_[static_cast<std::size_t>(p)];
      }
      j += word.squaredNorm() / (coef_[i] * coef_[i]);
    }
    return j;
  }

 private:
  const OperatorTuple& g_;
  Index aux_;
  int n_ = 0;
  std::vector<MultiIndex> idx_;
  std::vector<int> pred_;
  std::vector<double> coef_;
  std::vector<CMatrix> u_;
  std::vector<CMatrix> stacked_;
};

Colligation to_colligation(const Blocks& x, const OperatorTuple& g) {
  return Colligation(OperatorTuple(x.t), OperatorTuple(x.f), OperatorTuple(x.h), g);
}

Blocks from_colligation(const Colligation& beta) {
  Blocks x;
  for (int k = 0; k < beta.n(); ++k) {
    x.t.push_back(beta.a()[k]);
    x.f.push_back(beta.b()[k]);
    x.h.push_back(beta.c()[k]);
  }
  return x;
}

// Adds a conservative pencil on the remaining aux dimensions; F and H vanish there.
Blocks pad_conservative(const Blocks& x, Index aux, std::uint64_t seed) {
  const Index have = x.t.front().rows();
  const int n = static_cast<int>(x.t.size());
  const OperatorTuple p = random_conservative_pencil(n, aux - have, seed);
  Blocks out;
  for (int k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    CMatrix t = CMatrix::Zero(aux, aux);
    t.topLeftCorner(have, have) = x.t[kk];
    t.bottomRightCorner(aux - have, aux - have) = p[k];
    CMatrix f = CMatrix::Zero(aux, x.f[kk].cols());
    f.topRows(have) = x.f[kk];
    CMatrix h = CMatrix::Zero(x.h[kk].rows(), aux);
    h.leftCols(have) = x.h[kk];
    out.t.push_back(std::move(t));
    out.f.push_back(std::move(f));
    out.h.push_back(std::move(h));
  }
  return out;
}

Blocks empty_blocks(int n, Index aux, Index rows, Index cols) {
  Blocks x;
  x.t.assign(static_cast<std::size_t>(n), CMatrix::Zero(aux, aux));
  x.f.assign(static_cast<std::size_t>(n), CMatrix::Zero(aux, cols));
  x.h.assign(static_cast<std::size_t>(n), CMatrix::Zero(rows, aux));
  return x;
}

void apply_phases(Blocks& x, const std::optional<std::vector<Complex>>& phases) {
  if (!phases) return;
  for (std::size_t k = 0; k < x.t.size(); ++k) {
    const Complex lam = (*phases)[k];
    x.t[k] *= lam;
    x.f[k] *= lam;
    x.h[k] *= lam;
  }
}

struct Descent {
  Blocks x;
  double j = 0.0;
  std::vector<double> trace;
};

Descent descend(Objective& objective, Blocks x, const RealizeOptions& opts) {
  Descent out;
  double j = objective(x);
  out.trace.push_back(j);
  double step = 0.05;
  const double h = opts.fd_step;

  std::vector<double> grad;
  for (int it = 0; it < opts.iters; ++it) {
    grad.clear();
    double gnorm2 = 0.0;
    x.for_each_matrix([&](CMatrix& m) {
      for (Index e = 0; e < m.size(); ++e) {
        for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
          const Complex keep = m(e);
          m(e) = keep + h * dir;
          const double up = objective(x);
          m(e) = keep - h * dir;
          const double down = objective(x);
          m(e) = keep;
          const double d = (up - down) / (2 * h);
          grad.push_back(d);
          gnorm2 += d * d;
        }
      }
    });
    if (gnorm2 == 0.0) break;
    const double gnorm = std::sqrt(gnorm2);

    double improvement = -1.0;
    for (int tries = 0; tries < 60 && improvement < 0.0; ++tries) {
      Blocks trial = x;
      std::size_t p = 0;
      trial.for_each_matrix([&](CMatrix& m) {
        for (Index e = 0; e < m.size(); ++e) {
          m(e) -= step / gnorm * Complex(grad[p], grad[p + 1]);
          p += 2;
        }
      });
      const double jt = objective(trial);
      if (jt < j) {
        improvement = j - jt;
        x = std::move(trial);
        j = jt;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    out.trace.push_back(j);
    if (improvement < 1e-14) break;
  }
  out.x = std::move(x);
  out.j = j;
  return out;
}

RealizationResult make_result(const Colligation& beta, Index small_state_dim, int max_degree) {
  RealizationResult r;
  r.beta = beta;
  r.aux_dim = beta.state_dim();
  r.max_degree = max_degree;
  r.unitarity_residual = conservativity_residuals(stacked_pencil(beta)).max();
  r.vanish = vanish_residual(beta, small_state_dim, max_degree);
  return r;
}

}  // namespace

double realization_objective(const Colligation& beta, int max_degree) {
  if (max_degree < 0) throw DomainError("degree cap must be nonnegative");
  Objective objective(beta.d(), beta.state_dim(), max_degree);
  return objective(from_colligation(beta));
}

RealizationResult trivial_realization(const OperatorTuple& g) {
  const auto check = is_conservative_algebraic(g);
  if (!check.conservative) {
    throw PreconditionError("pencil is not conservative (residual " + std::to_string(check.residuals.max()) +
                            "); only conservative pencils have a dY = 0 realization");
  }
  const int n = g.size();
  const Colligation beta(OperatorTuple::zeros(n, 0, 0), OperatorTuple::zeros(n, 0, g.cols()),
                         OperatorTuple::zeros(n, g.rows(), 0), g);
  RealizationResult r = make_result(beta, 0, 0);
  r.objective = realization_objective(beta, 0);
  return r;
}

RealizationResult search_realization(const OperatorTuple& g, const RealizeOptions& opts) {
  const int n = g.size();
  const Index aux = opts.aux_dim == 0 ? 2 * g.cols() : opts.aux_dim;
  if (aux < 1) throw DomainError("auxiliary dimension must be >= 1, got " + std::to_string(aux));
  if (opts.max_degree < 0) throw DomainError("degree cap must be nonnegative");
  if (opts.restarts < 1) throw DomainError("need at least one restart");
  if (opts.iters < 0) throw DomainError("iteration count must be nonnegative");
  if (!(opts.fd_step > 0.0)) throw DomainError("difference step must be positive");
  if (opts.phases && static_cast<int>(opts.phases->size()) != n) {
    throw ShapeError(std::to_string(opts.phases->size()) + " phases for a pencil of size " + std::to_string(n));
  }

  Blocks warm = empty_blocks(n, aux, g.rows(), g.cols());
  if (opts.warm_start && opts.warm_start->state_dim() > 0) {
    const Colligation& w = *opts.warm_start;
    if (w.n() != n || w.input_dim() != g.cols() || w.output_dim() != g.rows() || w.state_dim() > aux) {
      throw ShapeError("warm start with N=" + std::to_string(w.n()) + ", state " + std::to_string(w.state_dim()) +
                       ", I/O " + shape_str(w.output_dim(), w.input_dim()) + " does not fit a pencil of size " +
                       std::to_string(n) + ", " + shape_str(g.rows(), g.cols()) + ", aux " + std::to_string(aux));
    }
    warm = w.state_dim() < aux ? pad_conservative(from_colligation(w), aux, opts.seed) : from_colligation(w);
  } else {
    const OperatorTuple p = random_conservative_pencil(n, aux, opts.seed);
    for (int k = 0; k < n; ++k) warm.t[static_cast<std::size_t>(k)] = p[k];
  }

  Objective objective(g, aux, opts.max_degree);
  Rng rng(opts.seed ^ 0x5bd1e995u);
  const double scale = 1.0 / std::sqrt(static_cast<double>(aux + std::max(g.rows(), g.cols())));

  Descent best;
  int best_restart = -1;
  for (int r = 0; r < opts.restarts; ++r) {
    Blocks start;
    if (r == 0) {
      start = warm;
    } else {
      start = empty_blocks(n, aux, g.rows(), g.cols());
      start.for_each_matrix([&](CMatrix& m) { m = scale * gaussian_matrix(m.rows(), m.cols(), rng); });
    }
    // The warm start is phase-aligned too, so the whole schedule rotates with g.
    if (r > 0 || !opts.warm_start || opts.warm_start->state_dim() == 0) apply_phases(start, opts.phases);
    Descent run = descend(objective, std::move(start), opts);
    if (best_restart < 0 || run.j < best.j) {
      best = std::move(run);
      best_restart = r;
    }
  }

  RealizationResult out = make_result(to_colligation(best.x, g), 0, opts.max_degree);
  out.objective = best.j;
  out.objective_trace = std::move(best.trace);
  out.best_restart = best_restart;
  out.seed = opts.seed;
  out.iters = opts.iters;
  out.restarts = opts.restarts;
  return out;
}

std::vector<RealizationResult> search_realization_ladder(const OperatorTuple& g, std::span<const Index> aux_dims,
                                                         const RealizeOptions& opts) {
  std::vector<RealizationResult> out;
  for (std::size_t i = 0; i < aux_dims.size(); ++i) {
    if (i > 0 && aux_dims[i] < aux_dims[i - 1]) throw DomainError("ladder dimensions must be nondecreasing");
    RealizeOptions step = opts;
    step.aux_dim = aux_dims[i];
    if (i > 0) step.warm_start = out.back().beta;
    out.push_back(search_realization(g, step));
  }
  return out;
}

}  // namespace polydil
