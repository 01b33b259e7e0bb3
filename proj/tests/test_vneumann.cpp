#include <doctest.h>

#include <polydil/vneumann.hpp>

#include "support.hpp"

using namespace polydil;
using testsupport::mat;
using testsupport::max_abs_diff;

namespace {

std::vector<CMatrix> pauli_triple() {
  return {mat({{1, 0}, {0, 1}}), mat({{0, 1}, {1, 0}}), mat({{1, 0}, {0, -1}})};
}

ViolationWitness pauli_witness() {
  const auto p = pauli_triple();
  return make_witness(OperatorTuple(p), parrott_tuple(p));
}

}  // namespace

TEST_CASE("Varopoulos tuples") {
  std::vector<CVector> e;
  for (int k = 0; k < 3; ++k) e.push_back(CVector::Unit(3, k));
  const auto t = varopoulos_tuple(e, e);
  CHECK(t.commutator_residual() == 0.0);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      CMatrix expected = CMatrix::Zero(5, 5);
      expected(4, 0) = k == l ? 1.0 : 0.0;
      CHECK(max_abs_diff(t[k] * t[l], expected) == 0.0);
    }
  }

  // y_k = conj(x_k) satisfies the symmetry condition for any x.
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<CVector> x, y;
    for (int k = 0; k < 3; ++k) {
      CVector v = gaussian_matrix(4, 1, rng);
      v /= 1.5 * v.norm();
      x.push_back(v);
      y.push_back(v.conjugate());
    }
    const auto tt = varopoulos_tuple(x, y);
    CHECK(tt.commutator_residual() <= 1e-14);
    for (int a = 0; a < 3; ++a) {
      CHECK(spectral_norm(tt[a]) == doctest::Approx(std::max(x[a].norm(), y[a].norm())).epsilon(1e-12));
      for (int b = 0; b < 3; ++b) {
        for (int c = 0; c < 3; ++c) CHECK((tt[a] * tt[b] * tt[c]).norm() == 0.0);
      }
    }
  }

  std::vector<CVector> bad{CVector::Unit(2, 0), CVector::Unit(2, 1)};
  std::vector<CVector> bad_y{CVector::Unit(2, 1), CVector::Unit(2, 1)};
  CHECK_THROWS_AS(varopoulos_tuple(bad, bad_y), PreconditionError);
  std::vector<CVector> long_x{2.0 * CVector::Unit(2, 0)};
  CHECK_THROWS_AS(varopoulos_tuple(long_x, long_x), PreconditionError);
}

TEST_CASE("Parrott tuples") {
  const auto t = parrott_tuple(pauli_triple());
  CHECK(t.dim() == 4);
  CHECK(t.commutator_residual() == 0.0);
  const std::vector<CMatrix> too_big{mat({{1.5}})};
  CHECK_THROWS_AS(parrott_tuple(too_big), PreconditionError);
}

TEST_CASE("Pauli witness") {
  const auto w = pauli_witness();
  CHECK(w.lhs == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(w.rhs == doctest::Approx(std::sqrt(6.0)).epsilon(1e-10));
  CHECK(w.valid());
  const auto re = revalidate(w);
  CHECK(re.valid);
  CHECK(re.mismatch <= 1e-10);
  CHECK(re.ratio_open > 1.2);
}

TEST_CASE("von Neumann and Ando guards") {
  for (int n = 1; n <= 2; ++n) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      ViolationSearchOptions opts;
      opts.seed = seed;
      opts.restarts = 2;
      opts.iters = 10;
      const auto w = violation_search(n, opts);
      CHECK(w.ratio <= 1.0 + 1e-8);
      CHECK(revalidate(w).mismatch <= 1e-10);
    }
  }
}

TEST_CASE("three-variable search") {
  ViolationSearchOptions opts;
  opts.seed = 0;
  opts.restarts = 1;
  opts.iters = 15;
  const auto a = violation_search(3, opts);
  const auto b = violation_search(3, opts);
  CHECK(a.ratio == b.ratio);
  CHECK(revalidate(a).mismatch <= 1e-10);
  MESSAGE("best ratio at n = 3: " << a.ratio);

  opts.family = TupleFamily::Varopoulos;
  opts.defect_dim = 3;
  const auto v = violation_search(3, opts);
  CHECK(v.t.commutator_residual() <= 1e-14);
  CHECK(v.ratio <= 1.0 + 1e-8);
}

TEST_CASE("counterexample system") {
  const auto w = pauli_witness();
  const auto sys = build_counterexample_system(w.m);
  CHECK(sys.alpha.state_dim() == 1);
  CHECK(sys.alpha.input_dim() == 1);
  CHECK(sys.alpha.output_dim() == 1);
  const OperatorTuple g = stacked_pencil(sys.alpha);
  CHECK(std::abs(torus_norm_max(g).torus_max - 1.0) <= 1e-6);
  // Dissipative, yet the witness tuple pushes the pencil above 1.
  CHECK(pencil_on_tuple(g, w.t, kOpenRadius).norm > 1.0 + 1e-9);

  CHECK_THROWS_AS(build_counterexample_system(OperatorTuple::zeros(3, 2, 2)), PreconditionError);
  CHECK_THROWS_AS(build_counterexample_system(OperatorTuple::zeros(3, 1, 1)), ShapeError);
  CHECK_THROWS_AS(build_counterexample_system(OperatorTuple::zeros(3, 2, 3)), ShapeError);
}

TEST_CASE("padding to more variables") {
  const auto w = pauli_witness();
  const auto same = extend_to_higher_n(w, 4, 0.0);
  CHECK(same.lhs == doctest::Approx(w.lhs).epsilon(1e-14));
  CHECK(same.rhs == doctest::Approx(w.rhs).epsilon(1e-10));

  const double pad = safe_pad_norm(w, 4);
  const auto padded = extend_to_higher_n(w, 4, pad);
  CHECK(padded.m.size() == 4);
  CHECK(padded.lhs - padded.rhs >= (w.lhs - w.rhs) - 2 * pad - 1e-10);
  CHECK(padded.valid());
  CHECK(revalidate(padded).valid);

  const auto sys = build_counterexample_system(padded.m);
  const OperatorTuple g = stacked_pencil(sys.alpha);
  CHECK(pencil_on_tuple(g, padded.t, kOpenRadius).norm > 1.0 + 1e-9);

  CHECK_THROWS_AS(extend_to_higher_n(w, 4, 2 * pad), PreconditionError);
  CHECK_THROWS_AS(extend_to_higher_n(w, 3, 0.0), DomainError);
}
