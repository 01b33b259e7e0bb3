#include "polydil/lattice.hpp"

namespace polydil {

std::string point_str(const LatticePoint& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(t[i]);
  }
  return out + ")";
}

int LatticeWindow::level_of(const LatticePoint& t) const {
  if (t.size() != base.size()) return -1;
  int l = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < base[i]) return -1;
    l += t[i] - base[i];
  }
  return l;
}

bool LatticeWindow::contains(const LatticePoint& t) const {
  const int l = level_of(t);
  return l >= 0 && l <= levels;
}

std::vector<LatticePoint> LatticeWindow::level(int l) const {
  std::vector<LatticePoint> out;
  for (const auto& s : indices_of_degree(n(), l)) {
    LatticePoint t = base;
    for (int k = 0; k < n(); ++k) t[static_cast<std::size_t>(k)] += s[k];
    out.push_back(std::move(t));
  }
  return out;
}

LatticeSignal::LatticeSignal(LatticeWindow window, Index value_dim) : window_(std::move(window)), value_dim_(value_dim) {
  if (window_.n() < 1) throw DomainError("lattice window needs n >= 1");
  if (window_.levels < 0) throw DomainError("lattice window needs levels >= 0");
  if (value_dim < 0) throw DomainError("value dimension must be nonnegative");
}

void LatticeSignal::set(const LatticePoint& t, CVector v) {
  if (!window_.contains(t)) {
    throw DomainError("lattice point " + point_str(t) + " lies outside the window based at " + point_str(window_.base) +
                      " with " + std::to_string(window_.levels) + " levels");
  }
  if (v.size() != value_dim_) {
    throw ShapeError("value of length " + std::to_string(v.size()) + " at " + point_str(t) + ", expected " +
                     std::to_string(value_dim_));
  }
  data_[t] = std::move(v);
}

const CVector* LatticeSignal::find(const LatticePoint& t) const {
  const auto it = data_.find(t);
  return it == data_.end() ? nullptr : &it->second;
}

const CVector& LatticeSignal::at(const LatticePoint& t) const {
  const CVector* v = find(t);
  if (!v) throw GapError("no value at lattice point " + point_str(t));
  return *v;
}

LatticeSignal zero_input(const LatticeWindow& window, Index dim) {
  LatticeSignal u(window, dim);
  for (int l = 0; l < window.levels; ++l) {
    for (const auto& t : window.level(l)) u.set(t, CVector::Zero(dim));
  }
  return u;
}

Trajectory simulate(const Colligation& alpha, const LatticeSignal& x0, const LatticeSignal& input) {
  const LatticeWindow& w = input.window();
  const int n = alpha.n();
  if (w.n() != n) throw ShapeError("window of dimension " + std::to_string(w.n()) + " for a system with N=" + std::to_string(n));
  if (x0.window().base != w.base) {
    throw StructuralError("initial state based at " + point_str(x0.window().base) + ", input at " + point_str(w.base));
  }
  if (x0.value_dim() != alpha.state_dim() || input.value_dim() != alpha.input_dim()) {
    throw ShapeError("signal dimensions " + std::to_string(x0.value_dim()) + "/" + std::to_string(input.value_dim()) +
                     " do not match state/input dimensions " + std::to_string(alpha.state_dim()) + "/" +
                     std::to_string(alpha.input_dim()));
  }

  Trajectory out{LatticeSignal(w, alpha.state_dim()), LatticeSignal(w, alpha.output_dim())};
  out.states.set(w.base, x0.at(w.base));
  for (int l = 1; l <= w.levels; ++l) {
    for (const auto& t : w.level(l)) {
      CVector x = CVector::Zero(alpha.state_dim());
      CVector y = CVector::Zero(alpha.output_dim());
      for (int k = 0; k < n; ++k) {
        LatticePoint p = t;
        p[static_cast<std::size_t>(k)] -= 1;
        if (w.level_of(p) < 0) continue;  // at rest outside the cone
        const CVector& xp = out.states.at(p);
        const CVector& up = input.at(p);
        x.noalias() += alpha.a()[k] * xp + alpha.b()[k] * up;
        y.noalias() += alpha.c()[k] * xp + alpha.d()[k] * up;
      }
      out.states.set(t, std::move(x));
      out.outputs.set(t, std::move(y));
    }
  }
  return out;
}

std::map<MultiIndex, CMatrix> impulse_response(const Colligation& alpha, int max_level) {
  if (max_level < 1) throw DomainError("impulse response needs max_level >= 1");
  const int n = alpha.n();
  const LatticeWindow w{LatticePoint(static_cast<std::size_t>(n), 0), max_level};
  std::map<MultiIndex, CMatrix> out;
  for (const auto& s : indices_up_to(n, max_level)) {
    if (!s.is_zero()) out.emplace(s, CMatrix::Zero(alpha.output_dim(), alpha.input_dim()));
  }
  LatticeSignal x0(w, alpha.state_dim());
  x0.set(w.base, CVector::Zero(alpha.state_dim()));
  for (Index j = 0; j < alpha.input_dim(); ++j) {
    LatticeSignal u = zero_input(w, alpha.input_dim());
    u.set(w.base, CVector::Unit(alpha.input_dim(), j));
    const Trajectory tr = simulate(alpha, x0, u);
    for (auto& [s, m] : out) {
      const LatticePoint t(s.parts().begin(), s.parts().end());
      m.col(j) = tr.outputs.at(t);
    }
  }
  return out;
}

}  // namespace polydil
