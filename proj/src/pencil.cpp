#include "polydil/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace polydil {

std::string_view to_string(Verdict v) {
  return v == Verdict::Dissipative ? "dissipative(heuristic)" : "violation-found";
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kInvPhi = 0.6180339887498949;

// ||G_0 + sum_{k>=1} e^{i theta_k} G_k|| with the first phase pinned to 1.
class PhaseObjective {
 public:
  explicit PhaseObjective(const OperatorTuple& g) : g_(g), work_(g.rows(), g.cols()) {}

  int free_dims() const { return g_.size() - 1; }

  double operator()(std::span<const double> theta) {
    ++evaluations_;
    work_ = g_[0];
    for (int k = 1; k < g_.size(); ++k) {
      work_ += std::polar(1.0, theta[static_cast<std::size_t>(k - 1)]) * g_[k];
    }
    return spectral_norm_gram(work_);
  }

  std::int64_t evaluations() const { return evaluations_; }

 private:
  const OperatorTuple& g_;
  CMatrix work_;
  std::int64_t evaluations_ = 0;
};

// Golden-section maximization of f along coordinate k within [c - h, c + h].
double golden_max(PhaseObjective& f, std::vector<double>& theta, std::size_t k, double h, double current) {
  const double center = theta[k];
  double lo = center - h, hi = center + h;
  auto at = [&](double t) {
    theta[k] = t;
    return f(theta);
  };
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = at(x1), f2 = at(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = at(x1);
    }
  }
  const double best_t = f1 >= f2 ? x1 : x2;
  const double best_f = std::max(f1, f2);
  if (best_f > current) {
    theta[k] = best_t;
    return best_f;
  }
  theta[k] = center;
  return current;
}

// Coordinate-wise golden-section ascent; sweeps until the gain drops below 1e-12.
double local_ascent(PhaseObjective& f, std::vector<double>& theta, double h) {
  double value = f(theta);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = value;
    for (std::size_t k = 0; k < theta.size(); ++k) value = golden_max(f, theta, k, h, value);
    if (value - before < 1e-12) break;
  }
  for (auto& t : theta) t = std::remainder(t, kTwoPi);
  return value;
}

TorusPoint to_torus(std::span<const double> free_theta) {
  std::vector<double> angles{0.0};
  angles.insert(angles.end(), free_theta.begin(), free_theta.end());
  return TorusPoint::from_angles(angles);
}

std::int64_t checked_pow(int base, int exp, std::int64_t cap) {
  std::int64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

}  // namespace

PencilReport torus_norm_max(const OperatorTuple& g, const TorusSearchOptions& opts) {
  if (opts.grid < 2) throw ConfigError("torus grid density must be >= 2, got " + std::to_string(opts.grid));
  if (opts.restarts < 0) throw ConfigError("restart count must be >= 0");

  PencilReport rep;
  rep.grid_density = opts.grid;
  rep.restarts = opts.restarts;
  rep.seed = opts.seed;

  CMatrix gram = CMatrix::Zero(g.cols(), g.cols());
  for (const auto& m : g.mats()) gram.noalias() += m.adjoint() * m;
  rep.necessary_bound = spectral_norm(gram);

  PhaseObjective f(g);
  const int free = f.free_dims();
  std::vector<double> best_theta(static_cast<std::size_t>(free), 0.0);
  double best = -1.0;

  if (free == 0) {
    best = f(best_theta);
  } else {
    const std::int64_t points = checked_pow(opts.grid, free, kTorusGridCap);
    std::vector<double> theta(static_cast<std::size_t>(free), 0.0);
    if (points <= kTorusGridCap) {
      std::vector<int> idx(static_cast<std::size_t>(free), 0);
      for (std::int64_t p = 0; p < points; ++p) {
        for (std::size_t k = 0; k < idx.size(); ++k) theta[k] = kTwoPi * idx[k] / opts.grid;
        const double v = f(theta);
        if (v > best) {
          best = v;
          best_theta = theta;
        }
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (++idx[k] < opts.grid) break;
          idx[k] = 0;
        }
      }
    } else {
      if (!opts.allow_sampling) {
        throw ConfigError("grid " + std::to_string(opts.grid) + "^" + std::to_string(free) +
                          " exceeds the 2^20 point cap and sampling is disabled");
      }
      rep.sampled = true;
      // Kronecker sequence with irrational steps sqrt(prime) and seeded offsets.
      static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
      Rng rng(opts.seed);
      std::uniform_real_distribution<double> ud(0.0, 1.0);
      std::vector<double> step(static_cast<std::size_t>(free)), offset(static_cast<std::size_t>(free));
      for (int k = 0; k < free; ++k) {
        const double s = std::sqrt(static_cast<double>(primes[k % 16] + 16 * (k / 16)));
        step[static_cast<std::size_t>(k)] = s - std::floor(s);
        offset[static_cast<std::size_t>(k)] = ud(rng);
      }
      for (std::int64_t p = 0; p < kTorusGridCap; ++p) {
        for (std::size_t k = 0; k < theta.size(); ++k) {
          const double u = offset[k] + static_cast<double>(p) * step[k];
          theta[k] = kTwoPi * (u - std::floor(u));
        }
        const double v = f(theta);
        if (v > best) {
          best = v;
          best_theta = theta;
        }
      }
    }

    const double h = kTwoPi / opts.grid;
    best = local_ascent(f, best_theta, h);

    Rng rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> ud(-M_PI, M_PI);
    for (int r = 0; r < opts.restarts; ++r) {
      for (auto& t : theta) t = ud(rng);
      const double v = local_ascent(f, theta, h);
      if (v > best) {
        best = v;
        best_theta = theta;
      }
    }
  }

  rep.argmax = to_torus(best_theta);
  // Independent re-check of the reported point through the SVD path.
  rep.torus_max = spectral_norm(eval_pencil(g, rep.argmax.coords()));
  rep.verdict = rep.torus_max > 1.0 + kViolationMargin ? Verdict::ViolationFound : Verdict::Dissipative;
  rep.evaluations = f.evaluations();
  return rep;
}

double ConservativityResiduals::max() const {
  return std::max({cross_left, cross_right, sum_left, sum_right});
}

ConservativityResiduals conservativity_residuals(const OperatorTuple& g) {
  ConservativityResiduals r;
  const int n = g.size();
  CMatrix left = -CMatrix::Identity(g.cols(), g.cols());
  CMatrix right = -CMatrix::Identity(g.rows(), g.rows());
  for (int k = 0; k < n; ++k) {
    left.noalias() += g[k].adjoint() * g[k];
    right.noalias() += g[k] * g[k].adjoint();
    for (int l = k + 1; l < n; ++l) {
      r.cross_left = std::max(r.cross_left, spectral_norm(g[k].adjoint() * g[l]));
      r.cross_right = std::max(r.cross_right, spectral_norm(g[k] * g[l].adjoint()));
    }
  }
  r.sum_left = spectral_norm(left);
  r.sum_right = spectral_norm(right);
  return r;
}

ConservativityCheck is_conservative_algebraic(const OperatorTuple& g, double tol) {
  ConservativityCheck out;
  out.residuals = conservativity_residuals(g);
  out.conservative = out.residuals.max() <= tol;
  return out;
}

OperatorTuple random_conservative_pencil(int n, Index dim, std::uint64_t seed) {
  if (n < 1) throw DomainError("pencil needs n >= 1");
  if (dim < 0) throw DomainError("dimension must be nonnegative");
  Rng rng(seed);
  const CMatrix u = haar_unitary(dim, rng);
  const CMatrix v = haar_unitary(dim, rng);

  // Assign the columns of v to the n projections; every projection gets one
  // column first when dim >= n.
  std::vector<int> owner(static_cast<std::size_t>(dim));
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (Index j = 0; j < dim; ++j) {
    owner[static_cast<std::size_t>(j)] = (dim >= n && j < n) ? static_cast<int>(j) : pick(rng);
  }
  std::shuffle(owner.begin(), owner.end(), rng);

  std::vector<CMatrix> g;
  for (int k = 0; k < n; ++k) {
    CMatrix p = CMatrix::Zero(dim, dim);
    for (Index j = 0; j < dim; ++j) {
      if (owner[static_cast<std::size_t>(j)] == k) p.noalias() += v.col(j) * v.col(j).adjoint();
    }
    g.push_back(p * u);
  }
  return OperatorTuple(std::move(g));
}

OperatorTuple random_dissipative_pencil(int n, Index rows, Index cols, double rho, Rng& rng) {
  if (n < 1) throw DomainError("pencil needs n >= 1");
  if (!(rho >= 0.0)) throw DomainError("norm budget must be nonnegative");
  std::vector<CMatrix> g;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    g.push_back(gaussian_matrix(rows, cols, rng));
    total += spectral_norm(g.back());
  }
  if (total > 0.0) {
    for (auto& m : g) m *= rho / total;
  }
  return OperatorTuple(std::move(g));
}

}  // namespace polydil
