#include "polydil/dilation.hpp"

#include <algorithm>
#include <string>

#include "polydil/pencil.hpp"

namespace polydil {

SubspaceBasis::SubspaceBasis(Index ambient_dim, CMatrix basis) : ambient_(ambient_dim), basis_(std::move(basis)) {
  if (basis_.rows() != ambient_) {
    throw ShapeError("subspace basis has " + std::to_string(basis_.rows()) + " rows in ambient dimension " +
                     std::to_string(ambient_));
  }
  if (basis_.cols() > 0) {
    const double defect =
        (basis_.adjoint() * basis_ - CMatrix::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
      throw PreconditionError("subspace basis columns are not orthonormal (defect " + std::to_string(defect) + ")");
    }
  }
}

SubspaceBasis SubspaceBasis::span_of(const CMatrix& cols) { return SubspaceBasis(cols.rows(), orthonormal_basis(cols)); }

SubspaceBasis SubspaceBasis::coordinates(Index ambient_dim, Index offset, Index count) {
  if (offset < 0 || count < 0 || offset + count > ambient_dim) {
    throw ShapeError("coordinate block [" + std::to_string(offset) + ", " + std::to_string(offset + count) +
                     ") does not fit in dimension " + std::to_string(ambient_dim));
  }
  CMatrix b = CMatrix::Zero(ambient_dim, count);
  for (Index j = 0; j < count; ++j) b(offset + j, j) = 1.0;
  return SubspaceBasis(ambient_dim, std::move(b));
}

SubspaceBasis SubspaceBasis::complement() const { return SubspaceBasis(ambient_, orthocomplement(basis_, ambient_)); }

double MomentReport::max_residual() const { return *std::max_element(residuals.begin(), residuals.end()); }

namespace {

constexpr SymPowerKind kFamilies[] = {SymPowerKind::Plain, SymPowerKind::SharpB, SymPowerKind::FlatC,
                                      SymPowerKind::FlatSharp};

std::size_t slot(SymPowerKind k) { return static_cast<std::size_t>(k); }

void check_pair(const Colligation& big, const Colligation& small, const SubspaceBasis& embed) {
  if (big.n() != small.n()) {
    throw StructuralError("parameter counts differ: " + std::to_string(big.n()) + " vs " + std::to_string(small.n()));
  }
  if (big.input_dim() != small.input_dim() || big.output_dim() != small.output_dim()) {
    throw StructuralError("input/output dimensions differ: " + shape_str(big.output_dim(), big.input_dim()) +
                          " vs " + shape_str(small.output_dim(), small.input_dim()));
  }
  for (int k = 0; k < big.n(); ++k) {
    if (!(big.d()[k].array() == small.d()[k].array()).all()) {
      throw StructuralError("D-tuples differ at k = " + std::to_string(k) + "; a dilation keeps D fixed");
    }
  }
  if (embed.ambient_dim() != big.state_dim() || embed.dim() != small.state_dim()) {
    throw StructuralError("embedding maps dimension " + std::to_string(embed.dim()) + " into " +
                          std::to_string(embed.ambient_dim()) + ", expected " + std::to_string(small.state_dim()) +
                          " into " + std::to_string(big.state_dim()));
  }
}

void finalize(MomentReport& rep) {
  rep.residuals.fill(0.0);
  rep.pass = true;
  for (std::size_t d = 0; d < rep.by_degree.size(); ++d) {
    for (auto kind : kFamilies) {
      const double r = rep.by_degree[d][slot(kind)];
      rep.residuals[slot(kind)] = std::max(rep.residuals[slot(kind)], r);
      if (r > rep.tol && rep.pass) {
        rep.pass = false;
        rep.first_failing_degree = static_cast<int>(d);
        rep.first_failing_family = kind;
      }
    }
  }
}

void record(MomentReport& rep, int degree, SymPowerKind kind, double value) {
  auto& cell = rep.by_degree[static_cast<std::size_t>(degree)][slot(kind)];
  cell = std::max(cell, value);
}

// Orthonormal basis of the smallest subspace containing `start` and invariant
// under every map. Start columns at or below `floor` count as zero.
CMatrix invariant_span(std::span<const CMatrix> maps, const CMatrix& start, double floor) {
  const Index dim = start.rows();
  std::vector<Index> live;
  for (Index j = 0; j < start.cols(); ++j) {
    if (start.col(j).norm() > floor) live.push_back(j);
  }
  CMatrix seed(dim, static_cast<Index>(live.size()));
  for (std::size_t j = 0; j < live.size(); ++j) seed.col(static_cast<Index>(j)) = start.col(live[j]);
  CMatrix q = orthonormal_basis(seed);
  CMatrix frontier = q;
  while (frontier.cols() > 0 && q.cols() < dim) {
    CMatrix cand(dim, q.cols() + static_cast<Index>(maps.size()) * frontier.cols());
    cand.leftCols(q.cols()) = q;
    Index at = q.cols();
    for (const auto& m : maps) {
      cand.middleCols(at, frontier.cols()) = m * frontier;
      at += frontier.cols();
    }
    CMatrix next = orthonormal_basis(cand);
    frontier = next.rightCols(next.cols() - q.cols());
    q = std::move(next);
  }
  return q;
}

double operator_scale(const Colligation& alpha) {
  double s = 1.0;
  for (int k = 0; k < alpha.n(); ++k) s = std::max(s, spectral_norm(stack_colligation(alpha, k)));
  return s;
}

std::string family_name(SymPowerKind kind) {
  switch (kind) {
    case SymPowerKind::Plain: return "P_X (zA~)^n|X = (zA)^n";
    case SymPowerKind::SharpB: return "P_X (zA~)^n zB~ = (zA)^n zB";
    case SymPowerKind::FlatC: return "zC~ (zA~)^n|X = zC (zA)^n";
    case SymPowerKind::FlatSharp: return "zC~ (zA~)^n zB~ = zC (zA)^n zB";
  }
  return "?";
}

}  // namespace

MomentReport is_dilation(const Colligation& big, const Colligation& small, const SubspaceBasis& embed, int max_degree,
                         double tol) {
  check_pair(big, small, embed);
  if (max_degree < 0) throw DomainError("degree cap must be nonnegative");
  MomentReport rep;
  rep.degree_cap = max_degree;
  rep.tol = tol;
  rep.by_degree.assign(static_cast<std::size_t>(max_degree) + 1, FamilyResiduals{});

  const SymPowerTable tb(big.a(), &big.b(), &big.c(), max_degree);
  const SymPowerTable ts(small.a(), &small.b(), &small.c(), max_degree);
  const CMatrix& v = embed.basis();
  for (const auto& s : indices_up_to(big.n(), max_degree)) {
    const int d = s.degree();
    record(rep, d, SymPowerKind::Plain,
           spectral_norm(ts.get(SymPowerKind::Plain, s) - v.adjoint() * tb.get(SymPowerKind::Plain, s) * v));
    if (d >= 1) {
      record(rep, d, SymPowerKind::SharpB,
             spectral_norm(ts.get(SymPowerKind::SharpB, s) - v.adjoint() * tb.get(SymPowerKind::SharpB, s)));
      record(rep, d, SymPowerKind::FlatC,
             spectral_norm(ts.get(SymPowerKind::FlatC, s) - tb.get(SymPowerKind::FlatC, s) * v));
    }
    if (d >= 2) {
      record(rep, d, SymPowerKind::FlatSharp,
             spectral_norm(ts.get(SymPowerKind::FlatSharp, s) - tb.get(SymPowerKind::FlatSharp, s)));
    }
  }
  finalize(rep);
  return rep;
}

MomentReport is_dilation_sampled(const Colligation& big, const Colligation& small, const SubspaceBasis& embed,
                                 std::span<const TorusPoint> samples, int max_degree, double tol) {
  check_pair(big, small, embed);
  if (max_degree < 0) throw DomainError("degree cap must be nonnegative");
  MomentReport rep;
  rep.degree_cap = max_degree;
  rep.tol = tol;
  rep.by_degree.assign(static_cast<std::size_t>(max_degree) + 1, FamilyResiduals{});

  const CMatrix& v = embed.basis();
  for (const auto& zeta : samples) {
    const auto z = zeta.coords();
    const CMatrix za = eval_pencil(big.a(), z), zb = eval_pencil(big.b(), z), zc = eval_pencil(big.c(), z);
    const CMatrix sa = eval_pencil(small.a(), z), sb = eval_pencil(small.b(), z), sc = eval_pencil(small.c(), z);
    CMatrix big_x = v, big_b = zb;  // (zA~)^n V and (zA~)^n zB~
    CMatrix small_x = CMatrix::Identity(sa.rows(), sa.cols()), small_b = sb;
    for (int n = 0; n <= max_degree; ++n) {
      record(rep, n, SymPowerKind::Plain, spectral_norm(small_x - v.adjoint() * big_x));
      if (n + 1 <= max_degree) {
        record(rep, n + 1, SymPowerKind::SharpB, spectral_norm(small_b - v.adjoint() * big_b));
        record(rep, n + 1, SymPowerKind::FlatC, spectral_norm(sc * small_x - zc * big_x));
      }
      if (n + 2 <= max_degree) record(rep, n + 2, SymPowerKind::FlatSharp, spectral_norm(sc * small_b - zc * big_b));
      big_x = za * big_x;
      big_b = za * big_b;
      small_x = sa * small_x;
      small_b = sa * small_b;
    }
  }
  finalize(rep);
  return rep;
}

int default_degree_cap(const Colligation& big) { return static_cast<int>(2 * big.state_dim()); }

SubspacePair build_subspaces_fixed_zeta(const Colligation& big, const Colligation& small, const SubspaceBasis& embed,
                                        const TorusPoint& zeta, double tol) {
  const std::vector<TorusPoint> one{zeta};
  const auto rep = is_dilation_sampled(big, small, embed, one, static_cast<int>(big.state_dim()), tol);
  if (!rep.pass) {
    const auto kind = *rep.first_failing_family;
    throw PreconditionError("moment identity " + family_name(kind) + " fails at word degree " +
                            std::to_string(*rep.first_failing_degree) + " (residual " +
                            std::to_string(rep.by_degree[static_cast<std::size_t>(*rep.first_failing_degree)]
                                                        [static_cast<std::size_t>(kind)]) +
                            "); no decomposition exists at this torus point");
  }
  const auto z = zeta.coords();
  const CMatrix za = eval_pencil(big.a(), z), zb = eval_pencil(big.b(), z);
  const CMatrix sa = eval_pencil(small.a(), z), sb = eval_pencil(small.b(), z);
  const CMatrix& v = embed.basis();
  CMatrix start(big.state_dim(), v.cols() + zb.cols());
  start << za * v - v * sa, zb - v * sb;

  const std::vector<CMatrix> maps{za};
  const double floor = 1e-10 * std::max(operator_scale(big), operator_scale(small));
  const CMatrix d = invariant_span(maps, start, floor);
  CMatrix xd(big.state_dim(), v.cols() + d.cols());
  xd << v, d;
  return {SubspaceBasis(big.state_dim(), d), SubspaceBasis(big.state_dim(), orthocomplement(orthonormal_basis(xd), big.state_dim()))};
}

double DecompositionReport::max() const {
  return std::max({orthogonality, d_invariant, d_unobserved, dstar_invariant, dstar_unreached, compress_a,
                   compress_b, compress_c});
}

DecompositionReport check_decomposition(const Colligation& big, const Colligation& small, const SubspaceBasis& embed,
                                        const SubspacePair& parts, const TorusPoint& zeta) {
  check_pair(big, small, embed);
  const Index dim = big.state_dim();
  if (parts.d.ambient_dim() != dim || parts.dstar.ambient_dim() != dim) {
    throw ShapeError("decomposition subspaces live in the wrong ambient space");
  }
  const auto z = zeta.coords();
  const CMatrix za = eval_pencil(big.a(), z), zb = eval_pencil(big.b(), z), zc = eval_pencil(big.c(), z);
  const CMatrix& v = embed.basis();
  const CMatrix& d = parts.d.basis();
  const CMatrix& ds = parts.dstar.basis();
  const CMatrix id = CMatrix::Identity(dim, dim);

  DecompositionReport r;
  r.orthogonality = std::max({spectral_norm(d.adjoint() * v), spectral_norm(d.adjoint() * ds),
                              spectral_norm(v.adjoint() * ds),
                              static_cast<double>(std::abs(d.cols() + v.cols() + ds.cols() - dim))});
  r.d_invariant = spectral_norm((id - d * d.adjoint()) * za * d);
  r.d_unobserved = spectral_norm(zc * d);
  r.dstar_invariant = spectral_norm((id - ds * ds.adjoint()) * za.adjoint() * ds);
  r.dstar_unreached = spectral_norm(zb.adjoint() * ds);
  r.compress_a = spectral_norm(v.adjoint() * za * v - eval_pencil(small.a(), z));
  r.compress_b = spectral_norm(v.adjoint() * zb - eval_pencil(small.b(), z));
  r.compress_c = spectral_norm(zc * v - eval_pencil(small.c(), z));
  return r;
}

Colligation assemble_dilation(const Colligation& beta, Index small_state_dim, const Colligation& alpha) {
  const Index dx = small_state_dim;
  if (alpha.state_dim() != dx) {
    throw StructuralError("split dimension " + std::to_string(dx) + " differs from the state dimension " +
                          std::to_string(alpha.state_dim()));
  }
  if (beta.n() != alpha.n()) throw StructuralError("beta and alpha have different parameter counts");
  if (beta.input_dim() != dx + alpha.input_dim() || beta.output_dim() != dx + alpha.output_dim()) {
    throw StructuralError("beta's I/O " + shape_str(beta.output_dim(), beta.input_dim()) + " does not split as " +
                          shape_str(dx + alpha.output_dim(), dx + alpha.input_dim()));
  }
  for (int k = 0; k < alpha.n(); ++k) {
    const double gap = (beta.d()[k] - stack_colligation(alpha, k)).cwiseAbs().maxCoeff();
    if (beta.d()[k].size() > 0 && gap > 1e-12) {
      throw StructuralError("beta's S_" + std::to_string(k) + " differs from alpha's stacked G_" + std::to_string(k) +
                            " by " + std::to_string(gap));
    }
  }
  const Index dy = beta.state_dim();
  const Index din = alpha.input_dim(), dout = alpha.output_dim();
  std::vector<CMatrix> a, b, c;
  for (int k = 0; k < alpha.n(); ++k) {
    const CMatrix& t = beta.a()[k];
    const CMatrix& f = beta.b()[k];
    const CMatrix& h = beta.c()[k];
    CMatrix ak(dy + dx, dy + dx);
    ak << t, f.leftCols(dx), h.topRows(dx), alpha.a()[k];
    CMatrix bk(dy + dx, din);
    bk << f.rightCols(din), alpha.b()[k];
    CMatrix ck(dout, dy + dx);
    ck << h.bottomRows(dout), alpha.c()[k];
    a.push_back(std::move(ak));
    b.push_back(std::move(bk));
    c.push_back(std::move(ck));
  }
  return Colligation(OperatorTuple(std::move(a)), OperatorTuple(std::move(b)), OperatorTuple(std::move(c)),
                     alpha.d());
}

Colligation extract_embedded(const Colligation& big, const SubspaceBasis& embed) {
  if (embed.ambient_dim() != big.state_dim()) {
    throw ShapeError("embedding ambient dimension " + std::to_string(embed.ambient_dim()) +
                     " differs from the state dimension " + std::to_string(big.state_dim()));
  }
  const CMatrix& v = embed.basis();
  const CMatrix w = orthocomplement(v, big.state_dim());
  const Index dx = v.cols(), dy = w.cols();
  const Index din = big.input_dim(), dout = big.output_dim();
  std::vector<CMatrix> t, f, h, s;
  for (int k = 0; k < big.n(); ++k) {
    const CMatrix& a = big.a()[k];
    const CMatrix& b = big.b()[k];
    const CMatrix& c = big.c()[k];
    t.push_back(w.adjoint() * a * w);
    CMatrix fk(dy, dx + din);
    fk << w.adjoint() * a * v, w.adjoint() * b;
    f.push_back(std::move(fk));
    CMatrix hk(dx + dout, dy);
    hk << v.adjoint() * a * w, c * w;
    h.push_back(std::move(hk));
    CMatrix sk(dx + dout, dx + din);
    sk << v.adjoint() * a * v, v.adjoint() * b, c * v, big.d()[k];
    s.push_back(std::move(sk));
  }
  return Colligation(OperatorTuple(std::move(t)), OperatorTuple(std::move(f)), OperatorTuple(std::move(h)),
                     OperatorTuple(std::move(s)));
}

Colligation corner_system(const Colligation& beta, Index small_state_dim) {
  if (small_state_dim > beta.input_dim() || small_state_dim > beta.output_dim()) {
    throw ShapeError("split dimension " + std::to_string(small_state_dim) + " exceeds beta's I/O dimensions");
  }
  return unstack(beta.d(), small_state_dim, beta.input_dim() - small_state_dim);
}

double VanishResiduals::max() const {
  return by_degree.empty() ? 0.0 : *std::max_element(by_degree.begin(), by_degree.end());
}

VanishResiduals vanish_residual(const Colligation& beta, Index small_state_dim, int max_degree) {
  if (small_state_dim > beta.input_dim() || small_state_dim > beta.output_dim()) {
    throw ShapeError("split dimension " + std::to_string(small_state_dim) + " exceeds beta's I/O dimensions");
  }
  if (max_degree < 0) throw DomainError("degree cap must be nonnegative");
  VanishResiduals out;
  out.by_degree.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
  if (beta.state_dim() == 0) return out;
  const SymPowerTable table(beta.a(), &beta.b(), &beta.c(), max_degree + 2);
  for (int d = 2; d <= max_degree + 2; ++d) {
    double worst = 0.0;
    for (const auto& s : indices_of_degree(beta.n(), d)) {
      worst = std::max(worst, spectral_norm(table.get(SymPowerKind::FlatSharp, s)));
    }
    out.by_degree[static_cast<std::size_t>(d - 2)] = worst;
  }
  return out;
}

Colligation compress(const Colligation& alpha, const SubspaceBasis& x0) {
  if (x0.ambient_dim() != alpha.state_dim()) {
    throw ShapeError("subspace of dimension-" + std::to_string(x0.ambient_dim()) + " space for a state space of " +
                     "dimension " + std::to_string(alpha.state_dim()));
  }
  const CMatrix& q = x0.basis();
  std::vector<CMatrix> a, b, c;
  for (int k = 0; k < alpha.n(); ++k) {
    a.push_back(q.adjoint() * alpha.a()[k] * q);
    b.push_back(q.adjoint() * alpha.b()[k]);
    c.push_back(alpha.c()[k] * q);
  }
  return Colligation(OperatorTuple(std::move(a)), OperatorTuple(std::move(b)), OperatorTuple(std::move(c)),
                     alpha.d());
}

Reduction reduce_uniform(const Colligation& alpha, int max_degree, double tol) {
  const Index dim = alpha.state_dim();
  const double floor = 1e-10 * operator_scale(alpha);
  std::vector<CMatrix> a, a_adj;
  CMatrix reach(dim, alpha.n() * alpha.input_dim());
  CMatrix observe(dim, alpha.n() * alpha.output_dim());
  for (int k = 0; k < alpha.n(); ++k) {
    a.push_back(alpha.a()[k]);
    a_adj.push_back(alpha.a()[k].adjoint());
    reach.middleCols(k * alpha.input_dim(), alpha.input_dim()) = alpha.b()[k];
    observe.middleCols(k * alpha.output_dim(), alpha.output_dim()) = alpha.c()[k].adjoint();
  }
  const CMatrix obs = invariant_span(a_adj, observe, floor);
  const CMatrix d = orthocomplement(obs, dim);
  const CMatrix r = invariant_span(a, reach, floor);

  // Gram-Schmidt over [D, R] keeps D's columns and orthonormalizes R against them.
  CMatrix dr(dim, d.cols() + r.cols());
  dr << d, r;
  const CMatrix span_dr = orthonormal_basis(dr);
  const CMatrix kept = span_dr.rightCols(span_dr.cols() - d.cols());

  Reduction out;
  out.d = SubspaceBasis(dim, d);
  out.kept = SubspaceBasis(dim, kept);
  out.dstar = SubspaceBasis(dim, orthocomplement(span_dr, dim));
  out.minimal = compress(alpha, out.kept);
  out.check = is_dilation(alpha, out.minimal, out.kept, max_degree, tol);
  return out;
}

DilationPair random_triangular_extension(const Colligation& small, Index d_dim, Index dstar_dim, double scale,
                                         Rng& rng) {
  const Index dx = small.state_dim();
  const Index total = d_dim + dx + dstar_dim;
  const Index din = small.input_dim(), dout = small.output_dim();
  auto g = [&](Index r, Index c) { return CMatrix(scale * gaussian_matrix(r, c, rng)); };
  std::vector<CMatrix> a, b, c;
  for (int k = 0; k < small.n(); ++k) {
    CMatrix ak = CMatrix::Zero(total, total);
    ak.topLeftCorner(d_dim, d_dim) = g(d_dim, d_dim);
    ak.block(0, d_dim, d_dim, dx) = g(d_dim, dx);
    ak.topRightCorner(d_dim, dstar_dim) = g(d_dim, dstar_dim);
    ak.block(d_dim, d_dim, dx, dx) = small.a()[k];
    ak.block(d_dim, d_dim + dx, dx, dstar_dim) = g(dx, dstar_dim);
    ak.bottomRightCorner(dstar_dim, dstar_dim) = g(dstar_dim, dstar_dim);
    CMatrix bk = CMatrix::Zero(total, din);
    bk.topRows(d_dim) = g(d_dim, din);
    bk.middleRows(d_dim, dx) = small.b()[k];
    CMatrix ck = CMatrix::Zero(dout, total);
    ck.middleCols(d_dim, dx) = small.c()[k];
    ck.rightCols(dstar_dim) = g(dout, dstar_dim);
    a.push_back(std::move(ak));
    b.push_back(std::move(bk));
    c.push_back(std::move(ck));
  }
  return {Colligation(OperatorTuple(std::move(a)), OperatorTuple(std::move(b)), OperatorTuple(std::move(c)), small.d()),
          small, SubspaceBasis::coordinates(total, d_dim, dx)};
}

DilationPair random_conservative_dilation(int n, Index y_dim, Index x_dim, Index io_dim, Rng& rng) {
  const Colligation small = unstack(random_conservative_pencil(n, x_dim + io_dim, rng()), x_dim, io_dim);
  const OperatorTuple t = random_conservative_pencil(n, y_dim, rng());
  const Index total = y_dim + x_dim;
  const CMatrix u = haar_unitary(total, rng);
  std::vector<CMatrix> a, b, c;
  for (int k = 0; k < n; ++k) {
    CMatrix ak = CMatrix::Zero(total, total);
    ak.topLeftCorner(y_dim, y_dim) = t[k];
    ak.bottomRightCorner(x_dim, x_dim) = small.a()[k];
    CMatrix bk = CMatrix::Zero(total, io_dim);
    bk.bottomRows(x_dim) = small.b()[k];
    CMatrix ck = CMatrix::Zero(io_dim, total);
    ck.rightCols(x_dim) = small.c()[k];
    a.push_back(u * ak * u.adjoint());
    b.push_back(u * bk);
    c.push_back(ck * u.adjoint());
  }
  const CMatrix v = u * SubspaceBasis::coordinates(total, y_dim, x_dim).basis();
  return {Colligation(OperatorTuple(std::move(a)), OperatorTuple(std::move(b)), OperatorTuple(std::move(c)), small.d()),
          small, SubspaceBasis(total, v)};
}

}  // namespace polydil
