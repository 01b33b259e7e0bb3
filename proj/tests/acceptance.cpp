// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <polydil/dilation.hpp>
#include <polydil/io.hpp>
#include <polydil/lattice.hpp>
#include <polydil/multipower.hpp>
#include <polydil/pencil.hpp>
#include <polydil/realize.hpp>
#include <polydil/transfer.hpp>
#include <polydil/vneumann.hpp>

using namespace polydil;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Colligation random_dissipative(int n, Index dx, Index din, Index dout, Rng& rng, double rho = 0.9) {
  return unstack(random_dissipative_pencil(n, dx + dout, dx + din, rho, rng), dx, din);
}

Colligation bare(const CMatrix& a) {
  const Index d = a.rows();
  return Colligation(OperatorTuple({a}), OperatorTuple::zeros(1, d, 0), OperatorTuple::zeros(1, 0, d),
                     OperatorTuple::zeros(1, 0, 0));
}

Outcome conservativity_equivalence() {
  Rng rng(101);
  int agree = 0, cons = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const Index d = 1 + (trial / 4) % 8;
    auto g = random_conservative_pencil(n, d, static_cast<std::uint64_t>(trial / 2));
    if (trial % 2 == 1) {
      std::vector<CMatrix> mats(g.mats().begin(), g.mats().end());
      mats[static_cast<std::size_t>(trial % n)] += 1e-3 * gaussian_matrix(d, d, rng);
      g = OperatorTuple(std::move(mats));
    }
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      worst = std::max(worst, unitarity_defect(eval_pencil(g, random_torus_point(n, rng).coords())));
    }
    const bool alg = is_conservative_algebraic(g, 1e-10).conservative;
    cons += alg;
    agree += alg == (worst <= 1e-8);
  }
  return {agree == 100, std::to_string(agree) + "/100 agree, " + std::to_string(cons) + " conservative"};
}

Outcome multipower_oracle() {
  double worst = 0.0, collapse = 0.0;
  long compared = 0;
  const SymPowerKind kinds[] = {SymPowerKind::Plain, SymPowerKind::SharpB, SymPowerKind::FlatC,
                                SymPowerKind::FlatSharp};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const int n = 1 + static_cast<int>(seed % 3);
    const auto alpha = random_dissipative(n, 3, 2, 2, rng, 1.5);
    for (const auto& s : indices_up_to(n, 6)) {
      for (auto kind : kinds) {
        if (!in_domain(kind, s)) continue;
        const CMatrix fast = sym_power(kind, alpha.a(), &alpha.b(), &alpha.c(), s);
        const CMatrix slow = sym_power_oracle(kind, alpha.a(), &alpha.b(), &alpha.c(), s);
        worst = std::max(worst, max_abs_diff(fast, slow));
        ++compared;
      }
    }
    // Simultaneously diagonalizable, hence commuting.
    const CMatrix p = gaussian_matrix(3, 3, rng);
    const CMatrix pinv = p.inverse();
    std::vector<CMatrix> mats;
    for (int k = 0; k < n; ++k) mats.push_back(p * (0.6 * gaussian_matrix(3, 1, rng).col(0)).asDiagonal() * pinv);
    const OperatorTuple a(mats);
    for (const auto& s : indices_up_to(n, 6)) {
      CMatrix expected = CMatrix::Identity(3, 3);
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < s[k]; ++i) expected = expected * a[k];
      }
      collapse = std::max(collapse, max_abs_diff(sym_power(SymPowerKind::Plain, a, nullptr, nullptr, s), expected));
    }
  }
  return {worst <= 1e-12 && collapse <= 1e-10, std::to_string(compared) + " words, oracle diff " +
                                                   fmt("%.2e", worst) + ", commutative diff " + fmt("%.2e", collapse)};
}

Outcome impulse_identity() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto alpha = random_dissipative(n, 3, 2, 2, rng);
    for (const auto& [s, h] : impulse_response(alpha, 5)) {
      worst = std::max(worst, max_abs_diff(h, taylor_coeff(alpha, s)));
      if (s.degree() >= 2) {
        const CMatrix word = sym_power_oracle(SymPowerKind::FlatSharp, alpha.a(), &alpha.b(), &alpha.c(), s);
        worst = std::max(worst, max_abs_diff(h, static_cast<double>(polynomial_coefficient(s)) * word));
      }
    }
  }
  return {worst <= 1e-10, "max diff " + fmt("%.2e", worst)};
}

Colligation perturb_a(const Colligation& alpha, const SubspaceBasis& embed, double eps, Rng& rng) {
  std::vector<CMatrix> a(alpha.a().mats().begin(), alpha.a().mats().end());
  const CMatrix& v = embed.basis();
  a[0] += eps * v * gaussian_matrix(v.cols(), v.cols(), rng) * v.adjoint();
  return Colligation(OperatorTuple(std::move(a)), alpha.b(), alpha.c(), alpha.d());
}

Outcome verifier_exactness(std::vector<DilationPair>& passing) {
  CMatrix cycle = CMatrix::Zero(3, 3);
  cycle(1, 0) = cycle(2, 1) = cycle(0, 2) = 1.0;
  const auto big = bare(cycle);
  const auto small = bare(CMatrix::Zero(1, 1));
  const auto embed = SubspaceBasis::coordinates(3, 1, 1);
  const auto at2 = is_dilation(big, small, embed, 2);
  const auto at3 = is_dilation(big, small, embed, 3);
  const bool cycle_ok = at2.pass && !at3.pass && at3.max_residual() == 1.0 && at3.first_failing_degree == 3;

  Rng rng(404);
  double tri = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto s = random_dissipative(n, 2, 1 + trial % 2, 2, rng);
    auto pair = random_triangular_extension(s, 1 + trial % 3, trial % 2, 0.4, rng);
    const auto rep = is_dilation(pair.big, pair.small, pair.embed, 10);
    tri = std::max(tri, rep.max_residual());
    if (rep.max_residual() <= 1e-10) passing.push_back(std::move(pair));
  }

  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const auto s = random_dissipative(n, 2, 1, 1, rng);
    auto pair = random_triangular_extension(s, 1, 1, 0.4, rng);
    const int mode = trial % 3;
    if (mode == 1) pair.big = perturb_a(pair.big, pair.embed, 1e-6, rng);
    if (mode == 2) {
      const auto other = unstack(random_dissipative_pencil(n, 5, 5, 0.9, rng), 4, 1);
      pair.big = Colligation(other.a(), other.b(), other.c(), s.d());
    }
    std::vector<TorusPoint> zs;
    for (int i = 0; i < 8; ++i) zs.push_back(random_torus_point(n, rng));
    const bool sym = is_dilation(pair.big, pair.small, pair.embed, 6).pass;
    const bool smp = is_dilation_sampled(pair.big, pair.small, pair.embed, zs, 6).pass;
    agree += sym == smp && sym == (mode == 0);
  }
  return {cycle_ok && tri <= 1e-12 && agree == 100,
          std::string("cycle ") + (cycle_ok ? "ok" : "wrong") + " (M=3 residual " +
              fmt("%.17g", at3.max_residual()) + "), triangular max " + fmt("%.2e", tri) + ", sampled agreement " +
              std::to_string(agree) + "/100"};
}

Outcome exact_round_trip(std::vector<DilationPair>& passing) {
  Rng rng(505);
  double vanish = 0.0, norm = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const Index dx = 1 + trial % 2;
    auto pair = random_conservative_dilation(n, 2 + trial % 2, dx, 1, rng);
    const auto beta = extract_embedded(pair.big, pair.embed);
    vanish = std::max(vanish, vanish_residual(beta, dx, 6).max());
    const OperatorTuple g = stacked_pencil(pair.small);
    for (int i = 0; i < 50; ++i) {
      norm = std::max(norm, pencil_on_tuple(g, random_commuting_tuple(n, 3, rng), 1.0).norm);
    }
    if (trial < 5 && is_dilation(pair.big, pair.small, pair.embed, 4).max_residual() <= 1e-10) {
      passing.push_back(std::move(pair));
    }
  }
  return {vanish <= 1e-10 && norm <= 1 + 1e-6,
          "vanish max " + fmt("%.2e", vanish) + ", tuple norm max " + fmt("%.12f", norm)};
}

Outcome converse_approximate(Index dy, bool& bound_ok) {
  const Colligation alpha = unstack(OperatorTuple({CMatrix::Constant(1, 1, 0.5)}), 1, 0);
  RealizeOptions opts;
  opts.aux_dim = dy;
  opts.max_degree = 4;
  const auto res = search_realization(stacked_pencil(alpha), opts);
  const auto big = assemble_dilation(res.beta, 1, alpha);
  const auto rep = is_dilation(big, alpha, SubspaceBasis::coordinates(big.state_dim(), dy, 1), 4);
  const double eps = res.total_residual();
  bound_ok = rep.max_residual() <= 20 * 4 * eps;
  return {eps <= 0.05 && bound_ok, "dY=" + std::to_string(dy) + " epsilon " + fmt("%.3e", eps) + " (unitarity " +
                                       fmt("%.3e", res.unitarity_residual) + ", vanish " +
                                       fmt("%.3e", res.vanish.max()) + "), moment max " +
                                       fmt("%.3e", rep.max_residual()) + " vs bound " + fmt("%.3e", 80 * eps)};
}

Outcome ando_guard() {
  double worst[3] = {0, 0, 0};
  for (int n = 1; n <= 2; ++n) {
    ViolationSearchOptions opts;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      opts.seed = seed;
      worst[n] = std::max(worst[n], violation_search(n, opts).ratio);
    }
  }
  return {worst[1] <= 1 + 1e-8 && worst[2] <= 1 + 1e-8,
          "max ratio N=1 " + fmt("%.12f", worst[1]) + ", N=2 " + fmt("%.12f", worst[2])};
}

Outcome counterexample_pipeline() {
  const auto wf = parse_witness(read_text_file(std::string(POLYDIL_FIXTURE_DIR) + "/witness_n3.json"));
  const auto re = revalidate(wf.witness);
  const auto ce = build_counterexample_system(wf.witness.m);
  TorusSearchOptions topts;
  const auto rep = torus_norm_max(stacked_pencil(ce.alpha), topts);
  const bool ok = std::abs(rep.torus_max - 1.0) <= 1e-6 && rep.verdict == Verdict::Dissipative && re.valid &&
                  re.ratio > 1 + 1e-9;
  return {ok, "committed witness ratio " + fmt("%.12f", re.ratio) + " (open " + fmt("%.12f", re.ratio_open) +
                  "), counterexample torus max " + fmt("%.12f", rep.torus_max)};
}

Outcome transfer_invariance(const std::vector<DilationPair>& pairs) {
  Rng rng(909);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  for (const auto& p : pairs) {
    const int n = p.big.n();
    int tested = 0;
    while (tested < 200) {
      std::vector<Complex> z;
      for (int k = 0; k < n; ++k) z.push_back(std::polar(ud(rng), 2 * M_PI * ud(rng)));
      if (spectral_norm(eval_pencil(p.big.a(), z)) > 0.9) continue;
      ++tested;
      worst = std::max(worst, max_abs_diff(transfer_eval(p.big, z), transfer_eval(p.small, z)));
    }
  }
  return {!pairs.empty() && worst <= 1e-8,
          std::to_string(pairs.size()) + " dilations x 200 points, max diff " + fmt("%.2e", worst)};
}

Outcome serialization() {
  Rng rng(1010);
  int same = 0;
  for (int i = 0; i < 50; ++i) {
    const auto sys = random_dissipative(1 + i % 4, i % 4, 1 + i % 3, 1 + (i / 3) % 3, rng);
    SystemMetadata md;
    md.seed = static_cast<std::uint64_t>(i);
    const std::string text = serialize_system({sys, md});
    const auto back = parse_system(text);
    bool exact = serialize_system(back) == text;
    for (int k = 0; k < sys.n(); ++k) exact = exact && stack_colligation(back.system, k) == stack_colligation(sys, k);
    same += exact;
  }
  return {same == 50, std::to_string(same) + "/50 byte-identical"};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](int id, const char* name, double limit, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    std::string timing = fmt("%.1f s", secs);
    if (limit > 0 && secs > limit) {
      o.pass = false;
      timing += fmt(", over the %.0f s limit", limit);
    }
    failures += !o.pass;
    std::printf("criterion %2d %s: %s (%s; %s)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  };

  std::vector<DilationPair> passing;
  run(1, "algebraic vs sampled conservativity", 10, conservativity_equivalence);
  run(2, "multipower oracle", 30, multipower_oracle);
  run(3, "impulse = taylor = word", 30, impulse_identity);
  run(4, "dilation verifier", 0, [&] { return verifier_exactness(passing); });
  run(5, "exact realization round trip", 0, [&] { return exact_round_trip(passing); });
  bool bound_ok = false;
  run(6, "approximate realization of [[1/2]] at dY=4", 120, [&] { return converse_approximate(4, bound_ok); });
  {
    bool ok6 = false;
    const auto t0 = std::chrono::steady_clock::now();
    const auto o = converse_approximate(6, ok6);
    std::printf("   info: same search at dY=6: %s (%.1f s)\n", o.detail.c_str(), seconds_since(t0));
  }
  run(7, "no violation for N <= 2", 300, ando_guard);
  run(8, "counterexample pipeline", 0, counterexample_pipeline);
  run(9, "transfer invariance under dilation", 0, [&] { return transfer_invariance(passing); });
  run(10, "system file round trip", 0, serialization);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
