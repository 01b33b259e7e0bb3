#include <doctest.h>

#include <polydil/dilation.hpp>
#include <polydil/pencil.hpp>
#include <polydil/transfer.hpp>

#include "support.hpp"

using namespace polydil;
using testsupport::mat;
using testsupport::max_abs_diff;

namespace {

// No inputs or outputs: only the A-tuple matters.
Colligation bare(std::vector<CMatrix> a) {
  const int n = static_cast<int>(a.size());
  const Index d = a.front().rows();
  return Colligation(OperatorTuple(std::move(a)), OperatorTuple::zeros(n, d, 0), OperatorTuple::zeros(n, 0, d),
                     OperatorTuple::zeros(n, 0, 0));
}

// e_{-1} -> e_0 -> e_1 -> e_{-1} on C^3 with e_0 the middle coordinate.
Colligation three_cycle() {
  CMatrix p = CMatrix::Zero(3, 3);
  p(1, 0) = 1.0;
  p(2, 1) = 1.0;
  p(0, 2) = 1.0;
  return bare({p});
}

// A~ = [[0, 1], [0, 0]] over the second coordinate, with one input and output
// entering and leaving through that coordinate.
DilationPair triangular_with_io() {
  const Colligation big(OperatorTuple({mat({{0, 1}, {0, 0}})}), OperatorTuple({mat({{0}, {1}})}),
                        OperatorTuple({mat({{0, 1}})}), OperatorTuple({mat({{0}})}));
  const Colligation small(OperatorTuple({mat({{0}})}), OperatorTuple({mat({{1}})}), OperatorTuple({mat({{1}})}),
                          OperatorTuple({mat({{0}})}));
  return {big, small, SubspaceBasis::coordinates(2, 1, 1)};
}

Colligation perturb_a(const Colligation& alpha, const SubspaceBasis& embed, double eps, Rng& rng) {
  std::vector<CMatrix> a(alpha.a().mats().begin(), alpha.a().mats().end());
  const CMatrix& v = embed.basis();
  a[0] += eps * v * gaussian_matrix(v.cols(), v.cols(), rng) * v.adjoint();
  return Colligation(OperatorTuple(std::move(a)), alpha.b(), alpha.c(), alpha.d());
}

}  // namespace

TEST_CASE("subspace bases") {
  CHECK_THROWS_AS(SubspaceBasis(2, mat({{1, 1}, {0, 1}})), PreconditionError);
  CHECK_THROWS_AS(SubspaceBasis(3, CMatrix::Identity(2, 2)), ShapeError);
  const auto c = SubspaceBasis::coordinates(4, 1, 2);
  CHECK(c.dim() == 2);
  CHECK(c.complement().dim() == 2);
  CHECK(SubspaceBasis::span_of(mat({{1, 2}, {0, 0}, {1, 2}})).dim() == 1);
}

TEST_CASE("dilation verifier on reference examples") {
  SUBCASE("reflexive") {
    Rng rng(1);
    const auto alpha = testsupport::random_dissipative(2, 3, 2, 2, rng);
    const auto rep = is_dilation(alpha, alpha, SubspaceBasis::whole(3), 6);
    CHECK(rep.pass);
    CHECK(rep.max_residual() == 0.0);
  }
  SUBCASE("three-cycle around a zero operator") {
    const auto big = three_cycle();
    const auto small = bare({mat({{0}})});
    const auto embed = SubspaceBasis::coordinates(3, 1, 1);
    CHECK(is_dilation(big, small, embed, 2).pass);
    const auto rep = is_dilation(big, small, embed, 3);
    CHECK_FALSE(rep.pass);
    CHECK(rep.first_failing_degree == 3);
    CHECK(rep.first_failing_family == SymPowerKind::Plain);
    CHECK(rep.residuals[0] == 1.0);

    const std::vector<TorusPoint> zs{TorusPoint::ones(1), TorusPoint::from_angles(std::vector<double>{0.7})};
    const auto sampled = is_dilation_sampled(big, small, embed, zs, 3);
    CHECK(sampled.first_failing_degree == 3);
    CHECK(is_dilation_sampled(big, small, embed, zs, 2).pass);
    CHECK(is_dilation_sampled(big, small, embed, std::vector<TorusPoint>{}, 10).pass);
  }
  SUBCASE("nilpotent triangular extension") {
    const auto big = bare({mat({{0, 1}, {0, 0}})});
    const auto small = bare({mat({{0}})});
    for (int m = 0; m <= 8; ++m) CHECK(is_dilation(big, small, SubspaceBasis::coordinates(2, 1, 1), m).pass);
    const auto io = triangular_with_io();
    CHECK(is_dilation(io.big, io.small, io.embed, 8).max_residual() == 0.0);
  }
  SUBCASE("structural mismatch") {
    const auto io = triangular_with_io();
    const Colligation other_d(io.small.a(), io.small.b(), io.small.c(), OperatorTuple({mat({{1e-300}})}));
    CHECK_THROWS_AS(is_dilation(io.big, other_d, io.embed, 2), StructuralError);
    CHECK_THROWS_AS(is_dilation(io.big, io.small, SubspaceBasis::coordinates(2, 0, 2), 2), StructuralError);
  }
}

TEST_CASE("random triangular extensions are dilations") {
  Rng rng(2);
  for (int trial = 0; trial < 6; ++trial) {
    const auto small = testsupport::random_dissipative(1 + trial % 3, 2, 1, 2, rng);
    const auto pair = random_triangular_extension(small, 2, 1 + trial % 2, 0.4, rng);
    const auto rep = is_dilation(pair.big, pair.small, pair.embed, 8);
    CHECK(rep.max_residual() <= 1e-12);
  }
}

TEST_CASE("sampled and symmetrized verifiers agree") {
  Rng rng(3);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 3;
    const auto small = testsupport::random_dissipative(n, 2, 1, 1, rng);
    auto pair = random_triangular_extension(small, 1, 1, 0.4, rng);
    const int mode = trial % 3;
    if (mode == 1) pair.big = perturb_a(pair.big, pair.embed, 1e-6, rng);
    if (mode == 2) pair.big = unstack(random_dissipative_pencil(n, 4 + 1, 4 + 1, 0.9, rng), 4, 1);
    if (mode == 2) pair.big = Colligation(pair.big.a(), pair.big.b(), pair.big.c(), small.d());
    const int cap = 6;
    std::vector<TorusPoint> zs;
    for (int i = 0; i < 8; ++i) zs.push_back(random_torus_point(n, rng));
    const auto sym = is_dilation(pair.big, pair.small, pair.embed, cap);
    const auto smp = is_dilation_sampled(pair.big, pair.small, pair.embed, zs, cap);
    CHECK(sym.pass == smp.pass);
    CHECK(sym.pass == (mode == 0));
  }
}

TEST_CASE("subspaces at a fixed torus point") {
  SUBCASE("identity embedding") {
    Rng rng(4);
    const auto alpha = testsupport::random_dissipative(2, 3, 1, 1, rng);
    const auto parts = build_subspaces_fixed_zeta(alpha, alpha, SubspaceBasis::whole(3), TorusPoint::ones(2));
    CHECK(parts.d.dim() == 0);
    CHECK(parts.dstar.dim() == 0);
  }
  SUBCASE("nilpotent triangular extension") {
    const auto big = bare({mat({{0, 1}, {0, 0}})});
    const auto parts =
        build_subspaces_fixed_zeta(big, bare({mat({{0}})}), SubspaceBasis::coordinates(2, 1, 1), TorusPoint::ones(1));
    REQUIRE(parts.d.dim() == 1);
    CHECK(std::abs(parts.d.basis()(0, 0)) == doctest::Approx(1.0));
    CHECK(parts.dstar.dim() == 0);
  }
  SUBCASE("three-cycle fails the precondition") {
    try {
      build_subspaces_fixed_zeta(three_cycle(), bare({mat({{0}})}), SubspaceBasis::coordinates(3, 1, 1),
                                 TorusPoint::ones(1));
      FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find("degree 3") != std::string::npos);
    }
  }
  SUBCASE("random extensions satisfy the decomposition identities") {
    Rng rng(5);
    for (int trial = 0; trial < 6; ++trial) {
      const int n = 1 + trial % 3;
      const auto small = testsupport::random_dissipative(n, 2, 1, 1, rng);
      const auto pair = random_triangular_extension(small, 2, 2, 0.4, rng);
      const auto zeta = random_torus_point(n, rng);
      const auto parts = build_subspaces_fixed_zeta(pair.big, pair.small, pair.embed, zeta);
      CHECK(check_decomposition(pair.big, pair.small, pair.embed, parts, zeta).max() <= 1e-8);
    }
  }
}

TEST_CASE("block moves between dilations and beta systems") {
  Rng rng(6);
  SUBCASE("empty auxiliary space") {
    const auto alpha = unstack(random_conservative_pencil(2, 3, 7), 2, 1);
    const auto beta = extract_embedded(alpha, SubspaceBasis::whole(2));
    CHECK(beta.state_dim() == 0);
    const auto back = assemble_dilation(beta, 2, alpha);
    for (int k = 0; k < 2; ++k) CHECK(max_abs_diff(stack_colligation(back, k), stack_colligation(alpha, k)) == 0.0);
  }
  SUBCASE("shape bookkeeping") {
    const auto alpha = testsupport::random_dissipative(2, 2, 1, 1, rng);
    const Colligation beta(testsupport::random_tuple(2, 3, 3, rng), testsupport::random_tuple(2, 3, 3, rng),
                           testsupport::random_tuple(2, 3, 3, rng), stacked_pencil(alpha));
    const auto big = assemble_dilation(beta, 2, alpha);
    CHECK(big.state_dim() == 5);
    CHECK(big.b().rows() == 5);
    CHECK(big.b().cols() == 1);
    CHECK(big.c().cols() == 5);
    const Colligation wrong(beta.a(), beta.b(), beta.c(), beta.d().scaled(1.001));
    CHECK_THROWS_AS(assemble_dilation(wrong, 2, alpha), StructuralError);
  }
  SUBCASE("extract then assemble round-trips with the small space last") {
    const auto small = testsupport::random_dissipative(3, 2, 2, 1, rng);
    const auto pair = random_triangular_extension(small, 3, 0, 0.5, rng);
    const auto beta = extract_embedded(pair.big, pair.embed);
    const auto back = assemble_dilation(beta, 2, corner_system(beta, 2));
    for (int k = 0; k < 3; ++k) CHECK(max_abs_diff(stack_colligation(back, k), stack_colligation(pair.big, k)) == 0.0);
  }
  SUBCASE("extraction preserves conservativity") {
    const auto pair = random_conservative_dilation(2, 3, 2, 1, rng);
    const auto beta = extract_embedded(pair.big, pair.embed);
    CHECK(is_conservative_algebraic(stacked_pencil(pair.big)).conservative);
    CHECK(is_conservative_algebraic(stacked_pencil(beta)).conservative);
    CHECK(vanish_residual(beta, 2, 6).max() <= 1e-10);
  }
}

TEST_CASE("vanishing words") {
  const auto empty = extract_embedded(bare({mat({{0.3}})}), SubspaceBasis::whole(1));
  CHECK(vanish_residual(empty, 1, 4).max() == 0.0);

  // Julia colligation of G = [1/2]: T = -1/2, F = H = sqrt(3)/2.
  const double s = std::sqrt(3.0) / 2;
  const Colligation julia(OperatorTuple({mat({{-0.5}})}), OperatorTuple({mat({{s}})}), OperatorTuple({mat({{s}})}),
                          OperatorTuple({mat({{0.5}})}));
  const auto v = vanish_residual(julia, 1, 3);
  CHECK(v.by_degree.size() == 4);
  CHECK(v.by_degree[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(v.by_degree[1] == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("converse block move on exact conservative beta") {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 1 + trial % 3;
    const auto alpha = unstack(random_conservative_pencil(n, 3, rng()), 2, 1);
    const auto t = random_conservative_pencil(n, 2, rng());
    // beta = T on Y with F = H = 0 and S = G.
    const Colligation beta(t, OperatorTuple::zeros(n, 2, 3), OperatorTuple::zeros(n, 3, 2), stacked_pencil(alpha));
    CHECK(vanish_residual(beta, 2, 6).max() == 0.0);
    const auto big = assemble_dilation(beta, 2, alpha);
    const auto rep = is_dilation(big, alpha, SubspaceBasis::coordinates(4, 2, 2), 6);
    CHECK(rep.max_residual() <= 1e-14);
    CHECK(is_conservative_algebraic(stacked_pencil(big)).conservative);
  }
}

TEST_CASE("compression") {
  Rng rng(8);
  const auto alpha = testsupport::random_dissipative(2, 3, 1, 2, rng);
  const auto full = compress(alpha, SubspaceBasis::whole(3));
  for (int k = 0; k < 2; ++k) CHECK(max_abs_diff(stack_colligation(full, k), stack_colligation(alpha, k)) == 0.0);
  const auto trivial = compress(alpha, SubspaceBasis::none(3));
  CHECK(trivial.state_dim() == 0);
  const std::vector<Complex> z{0.3, Complex(0, 0.2)};
  CHECK(max_abs_diff(transfer_eval(trivial, z), eval_pencil(alpha.d(), z)) == 0.0);

  const auto pair = random_triangular_extension(alpha, 2, 1, 0.5, rng);
  const auto back = compress(pair.big, pair.embed);
  for (int k = 0; k < 2; ++k) CHECK(max_abs_diff(stack_colligation(back, k), stack_colligation(alpha, k)) == 0.0);
}

TEST_CASE("uniform reduction") {
  SUBCASE("triangular example recovers the small system") {
    const auto io = triangular_with_io();
    const auto red = reduce_uniform(io.big, 6);
    CHECK(red.d.dim() == 1);
    CHECK(red.dstar.dim() == 0);
    REQUIRE(red.minimal.state_dim() == 1);
    CHECK(std::abs(red.kept.basis()(1, 0)) == doctest::Approx(1.0));
    CHECK(red.check.pass);
    CHECK(std::abs(red.minimal.a()[0](0, 0)) < 1e-15);
  }
  SUBCASE("generic systems are already minimal") {
    Rng rng(9);
    const auto alpha = testsupport::random_dissipative(2, 3, 2, 2, rng);
    const auto red = reduce_uniform(alpha, 6);
    CHECK(red.minimal.state_dim() == 3);
    CHECK(red.d.dim() == 0);
    CHECK(red.dstar.dim() == 0);
  }
  SUBCASE("extensions reduce back and the reduction is idempotent") {
    Rng rng(10);
    for (int trial = 0; trial < 4; ++trial) {
      const int n = 1 + trial % 3;
      const auto small = testsupport::random_dissipative(n, 2, 1, 1, rng);
      const auto pair = random_triangular_extension(small, 2, 2, 0.4, rng);
      const auto red = reduce_uniform(pair.big, 6);
      CHECK(red.minimal.state_dim() == 2);
      CHECK(red.check.pass);
      const auto again = reduce_uniform(red.minimal, 6);
      CHECK(again.minimal.state_dim() == 2);
      CHECK(again.d.dim() == 0);
      CHECK(again.dstar.dim() == 0);
      CHECK(is_dilation(red.minimal, again.minimal, again.kept, 6).pass);
    }
  }
}

TEST_CASE("dilations share the transfer function") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 1 + trial % 3;
    const auto small = testsupport::random_dissipative(n, 2, 2, 1, rng);
    const auto pair = random_triangular_extension(small, 2, 2, 0.3, rng);
    REQUIRE(is_dilation(pair.big, pair.small, pair.embed, 4, 1e-10).pass);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int tested = 0;
    while (tested < 50) {
      std::vector<Complex> z;
      for (int k = 0; k < n; ++k) z.push_back(std::polar(ud(rng), 2 * M_PI * ud(rng)));
      if (spectral_norm(eval_pencil(pair.big.a(), z)) > 0.9) continue;
      ++tested;
      CHECK(max_abs_diff(transfer_eval(pair.big, z), transfer_eval(pair.small, z)) <= 1e-8);
    }
  }
}
