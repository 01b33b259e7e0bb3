#include <doctest.h>

#include <polydil/lattice.hpp>
#include <polydil/multipower.hpp>
#include <polydil/transfer.hpp>

#include "support.hpp"

using namespace polydil;
using testsupport::max_abs_diff;

namespace {

LatticeSignal random_input(const LatticeWindow& w, Index dim, Rng& rng) {
  LatticeSignal u(w, dim);
  for (int l = 0; l < w.levels; ++l) {
    for (const auto& t : w.level(l)) u.set(t, gaussian_matrix(dim, 1, rng));
  }
  return u;
}

LatticeSignal initial(const LatticeWindow& w, CVector x) {
  LatticeSignal s(w, x.size());
  s.set(w.base, std::move(x));
  return s;
}

}  // namespace

TEST_CASE("lattice windows") {
  const LatticeWindow w{{1, -2}, 3};
  CHECK(w.level_of({1, -2}) == 0);
  CHECK(w.level_of({3, -1}) == 3);
  CHECK(w.level_of({0, 5}) == -1);
  CHECK(w.contains({2, -2}));
  CHECK_FALSE(w.contains({5, -2}));
  CHECK(w.level(2).size() == 3);
  LatticeSignal s(w, 2);
  CHECK_THROWS_AS(s.set({0, 0}, CVector::Zero(2)), DomainError);
  CHECK_THROWS_AS(s.set({1, -2}, CVector::Zero(3)), ShapeError);
  CHECK_THROWS_AS(s.at({1, -2}), GapError);
  CHECK(point_str({1, -2}) == "(1, -2)");
}

TEST_CASE("zero data stays zero") {
  Rng rng(1);
  const auto alpha = testsupport::random_dissipative(2, 3, 2, 1, rng);
  const LatticeWindow w{{0, 0}, 4};
  const auto tr = simulate(alpha, initial(w, CVector::Zero(3)), zero_input(w, 2));
  for (const auto& [t, v] : tr.states.data()) CHECK(v.norm() == 0.0);
  for (const auto& [t, v] : tr.outputs.data()) CHECK(v.norm() == 0.0);
  CHECK(tr.outputs.data().size() == 14);
}

TEST_CASE("one-parameter recursion") {
  Rng rng(2);
  const auto alpha = testsupport::random_dissipative(1, 3, 2, 2, rng);
  const LatticeWindow w{{0}, 8};
  const CVector x0 = gaussian_matrix(3, 1, rng);
  const auto u = random_input(w, 2, rng);
  const auto tr = simulate(alpha, initial(w, x0), u);
  CVector x = x0;
  for (int t = 1; t <= 8; ++t) {
    const CVector& ut = u.at({t - 1});
    const CVector y = alpha.c()[0] * x + alpha.d()[0] * ut;
    x = alpha.a()[0] * x + alpha.b()[0] * ut;
    CHECK(max_abs_diff(tr.states.at({t}), x) <= 1e-14);
    CHECK(max_abs_diff(tr.outputs.at({t}), y) <= 1e-14);
  }
}

TEST_CASE("missing input is a gap") {
  Rng rng(3);
  const auto alpha = testsupport::random_dissipative(2, 2, 1, 1, rng);
  const LatticeWindow w{{0, 0}, 3};
  LatticeSignal u = zero_input(w, 1);
  LatticeSignal partial(w, 1);
  for (const auto& [t, v] : u.data()) {
    if (t != LatticePoint{1, 1}) partial.set(t, v);
  }
  try {
    simulate(alpha, initial(w, CVector::Zero(2)), partial);
    FAIL("expected a gap error");
  } catch (const GapError& e) {
    CHECK(std::string(e.what()).find("(1, 1)") != std::string::npos);
  }
  CHECK_THROWS_AS(simulate(alpha, LatticeSignal(w, 2), u), GapError);
}

TEST_CASE("impulse response") {
  Rng rng(4);
  const auto alpha = testsupport::random_dissipative(3, 3, 2, 2, rng);
  const auto h = impulse_response(alpha, 3);
  for (int k = 0; k < 3; ++k) CHECK(max_abs_diff(h.at(MultiIndex::unit(3, k)), alpha.d()[k]) <= 1e-15);
  const CMatrix pair = alpha.c()[0] * alpha.b()[2] + alpha.c()[2] * alpha.b()[0];
  CHECK(max_abs_diff(h.at(MultiIndex({1, 0, 1})), pair) <= 1e-14);

  const auto scalar = testsupport::random_dissipative(1, 2, 1, 1, rng);
  const auto h1 = impulse_response(scalar, 3);
  CHECK(max_abs_diff(h1.at(MultiIndex({3})), scalar.c()[0] * scalar.a()[0] * scalar.b()[0]) <= 1e-15);

  CHECK_THROWS_AS(impulse_response(alpha, 0), DomainError);
}

TEST_CASE("impulse response, Taylor coefficients and words agree") {
  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 3;
    const auto alpha = testsupport::random_dissipative(n, 3, 2, 2, rng);
    const auto h = impulse_response(alpha, 5);
    for (const auto& [s, m] : h) {
      CHECK(max_abs_diff(m, taylor_coeff(alpha, s)) <= 1e-10);
      if (s.degree() >= 2) {
        const CMatrix word = sym_power_oracle(SymPowerKind::FlatSharp, alpha.a(), &alpha.b(), &alpha.c(), s);
        CHECK(max_abs_diff(m, static_cast<double>(polynomial_coefficient(s)) * word) <= 1e-10);
      }
    }
  }
}

TEST_CASE("linearity and shift invariance") {
  Rng rng(6);
  const auto alpha = testsupport::random_dissipative(2, 3, 2, 2, rng);
  const LatticeWindow w{{0, 0}, 5};
  const auto x0 = initial(w, CVector::Zero(3));
  const auto u1 = random_input(w, 2, rng);
  const auto u2 = random_input(w, 2, rng);
  LatticeSignal sum(w, 2);
  for (const auto& [t, v] : u1.data()) sum.set(t, v + u2.at(t));
  const auto a = simulate(alpha, x0, u1);
  const auto b = simulate(alpha, x0, u2);
  const auto c = simulate(alpha, x0, sum);
  for (const auto& [t, v] : c.outputs.data()) {
    CHECK(max_abs_diff(v, a.outputs.at(t) + b.outputs.at(t)) <= 1e-12);
  }

  const LatticeWindow shifted{{3, -2}, 5};
  LatticeSignal moved(shifted, 2);
  for (const auto& [t, v] : u1.data()) moved.set({t[0] + 3, t[1] - 2}, v);
  const auto d = simulate(alpha, initial(shifted, CVector::Zero(3)), moved);
  for (const auto& [t, v] : a.outputs.data()) CHECK(max_abs_diff(d.outputs.at({t[0] + 3, t[1] - 2}), v) == 0.0);
}
