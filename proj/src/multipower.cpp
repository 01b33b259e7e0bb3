#include "polydil/multipower.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace polydil {

std::string_view to_string(SymPowerKind kind) {
  switch (kind) {
    case SymPowerKind::Plain: return "plain";
    case SymPowerKind::SharpB: return "sharp-b";
    case SymPowerKind::FlatC: return "flat-c";
    case SymPowerKind::FlatSharp: return "flat-sharp";
  }
  return "?";
}

std::uint64_t polynomial_coefficient(const MultiIndex& s) {
  // Product of binomials C(s_1 + ... + s_k, s_k), each built incrementally so
  // every intermediate value is itself a binomial coefficient.
  unsigned __int128 total = 1;
  std::uint64_t partial = 0;
  for (int v : s.parts()) {
    unsigned __int128 binom = 1;
    for (int i = 1; i <= v; ++i) {
      binom = binom * (partial + static_cast<std::uint64_t>(i)) / static_cast<unsigned>(i);
      if (binom > std::numeric_limits<std::uint64_t>::max()) {
        throw CapacityError("polynomial coefficient overflows 64 bits at |s| = " + std::to_string(s.degree()));
      }
    }
    partial += static_cast<std::uint64_t>(v);
    total *= binom;
    if (total > std::numeric_limits<std::uint64_t>::max()) {
      throw CapacityError("polynomial coefficient overflows 64 bits at |s| = " + std::to_string(s.degree()));
    }
  }
  return static_cast<std::uint64_t>(total);
}

bool in_domain(SymPowerKind kind, const MultiIndex& s) {
  switch (kind) {
    case SymPowerKind::Plain: return true;
    case SymPowerKind::SharpB:
    case SymPowerKind::FlatC: return s.degree() >= 1;
    case SymPowerKind::FlatSharp: return s.degree() >= 2;
  }
  return false;
}

namespace {

bool needs_b(SymPowerKind k) { return k == SymPowerKind::SharpB || k == SymPowerKind::FlatSharp; }
bool needs_c(SymPowerKind k) { return k == SymPowerKind::FlatC || k == SymPowerKind::FlatSharp; }

void check_tuples(const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c) {
  if (a.rows() != a.cols()) throw ShapeError("A-tuple must be square, got " + shape_str(a.rows(), a.cols()));
  if (b && (b->size() != a.size() || b->rows() != a.rows())) {
    throw ShapeError("B-tuple of size " + std::to_string(b->size()) + " and shape " +
                     shape_str(b->rows(), b->cols()) + " does not border A of shape " +
                     shape_str(a.rows(), a.cols()));
  }
  if (c && (c->size() != a.size() || c->cols() != a.rows())) {
    throw ShapeError("C-tuple of size " + std::to_string(c->size()) + " and shape " +
                     shape_str(c->rows(), c->cols()) + " does not border A of shape " +
                     shape_str(a.rows(), a.cols()));
  }
}

void check_request(SymPowerKind kind, const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                   const MultiIndex& s) {
  if (s.size() != a.size()) {
    throw ShapeError("multi-index has " + std::to_string(s.size()) + " entries for a tuple of size " +
                     std::to_string(a.size()));
  }
  if (needs_b(kind) && !b) throw ShapeError(std::string(to_string(kind)) + " multipower needs a B-tuple");
  if (needs_c(kind) && !c) throw ShapeError(std::string(to_string(kind)) + " multipower needs a C-tuple");
  check_tuples(a, needs_b(kind) ? b : nullptr, needs_c(kind) ? c : nullptr);
  if (!in_domain(kind, s)) {
    throw DomainError(std::string(to_string(kind)) + " multipower is undefined at |s| = " +
                      std::to_string(s.degree()));
  }
}

// Unnormalized word sums over a downward-closed index set listed by degree:
//   W(0) = I,        W(s) = sum_k A_k W(s - e_k)
//   U(e_k) = B_k,    U(s) = sum_k A_k U(s - e_k)     (|s| >= 2)
//   V(s) = sum_k C_k W(s - e_k)                        (|s| >= 1)
//   X(s) = sum_k C_k U(s - e_k)                        (|s| >= 2)
// where k runs over the coordinates with s_k > 0.
struct WordSums {
  std::map<MultiIndex, CMatrix> w, u, v, x;
};

WordSums word_sums(const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                   const std::vector<MultiIndex>& order, bool want_w, bool want_u, bool reverse) {
  const int n = a.size();
  const Index dx = a.rows();
  std::vector<int> ks(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) ks[static_cast<std::size_t>(k)] = reverse ? n - 1 - k : k;

  WordSums out;
  for (const auto& s : order) {
    const int deg = s.degree();
    if (want_w) {
      if (deg == 0) {
        out.w.emplace(s, CMatrix::Identity(dx, dx));
      } else {
        CMatrix acc = CMatrix::Zero(dx, dx);
        for (int k : ks) {
          if (s[k] > 0) acc.noalias() += a[k] * out.w.at(s.minus_unit(k));
        }
        out.w.emplace(s, std::move(acc));
      }
      if (c && deg >= 1) {
        CMatrix acc = CMatrix::Zero(c->rows(), dx);
        for (int k : ks) {
          if (s[k] > 0) acc.noalias() += (*c)[k] * out.w.at(s.minus_unit(k));
        }
        out.v.emplace(s, std::move(acc));
      }
    }
    if (want_u && b && deg >= 1) {
      if (deg == 1) {
        for (int k = 0; k < n; ++k) {
          if (s[k] == 1) out.u.emplace(s, (*b)[k]);
        }
      } else {
        CMatrix acc = CMatrix::Zero(dx, b->cols());
        for (int k : ks) {
          if (s[k] > 0) acc.noalias() += a[k] * out.u.at(s.minus_unit(k));
        }
        out.u.emplace(s, std::move(acc));
      }
      if (c && deg >= 2) {
        CMatrix acc = CMatrix::Zero(c->rows(), b->cols());
        for (int k : ks) {
          if (s[k] > 0) acc.noalias() += (*c)[k] * out.u.at(s.minus_unit(k));
        }
        out.x.emplace(s, std::move(acc));
      }
    }
  }
  return out;
}

// All t <= s componentwise, ordered by degree.
std::vector<MultiIndex> box_indices(const MultiIndex& s) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(s.size()), 0);
  while (true) {
    out.emplace_back(cur);
    int k = 0;
    for (; k < s.size(); ++k) {
      if (cur[static_cast<std::size_t>(k)] < s[k]) {
        ++cur[static_cast<std::size_t>(k)];
        break;
      }
      cur[static_cast<std::size_t>(k)] = 0;
    }
    if (k == s.size()) break;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MultiIndex& x, const MultiIndex& y) { return x.degree() < y.degree(); });
  return out;
}

}  // namespace

CMatrix sym_power(SymPowerKind kind, const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                  const MultiIndex& s, bool reverse_order) {
  check_request(kind, a, b, c, s);
  const bool want_u = needs_b(kind);
  const auto sums = word_sums(a, want_u ? b : nullptr, needs_c(kind) ? c : nullptr, box_indices(s), !want_u,
                              want_u, reverse_order);
  const double cs = static_cast<double>(polynomial_coefficient(s));
  switch (kind) {
    case SymPowerKind::Plain: return sums.w.at(s) / cs;
    case SymPowerKind::SharpB: return sums.u.at(s) / cs;
    case SymPowerKind::FlatC: return sums.v.at(s) / cs;
    case SymPowerKind::FlatSharp: return sums.x.at(s) / cs;
  }
  return {};
}

CMatrix sym_power_oracle(SymPowerKind kind, const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                         const MultiIndex& s) {
  check_request(kind, a, b, c, s);
  if (s.degree() > 8) throw CapacityError("oracle enumeration is limited to |s| <= 8");

  std::vector<int> types;
  for (int k = 0; k < s.size(); ++k) types.insert(types.end(), static_cast<std::size_t>(s[k]), k);
  const std::size_t len = types.size();
  const Index rows = needs_c(kind) ? c->rows() : a.rows();
  const Index cols = needs_b(kind) ? b->cols() : a.rows();

  if (len == 0) return CMatrix::Identity(a.rows(), a.rows());

  CMatrix sum = CMatrix::Zero(rows, cols);
  std::uint64_t count = 0;
  do {
    CMatrix word;
    for (std::size_t i = 0; i < len; ++i) {
      const int k = types[i];
      const CMatrix* letter = &a[k];
      if (i == 0 && needs_c(kind)) letter = &(*c)[k];
      else if (i + 1 == len && needs_b(kind)) letter = &(*b)[k];
      word = i == 0 ? *letter : CMatrix(word * *letter);
    }
    sum += word;
    ++count;
  } while (std::next_permutation(types.begin(), types.end()));
  return sum / static_cast<double>(count);
}

SymPowerTable::SymPowerTable(const OperatorTuple& a, const OperatorTuple* b, const OperatorTuple* c,
                             int max_degree)
    : n_(a.size()), max_degree_(max_degree) {
  if (max_degree < 0) throw DomainError("degree cap must be nonnegative");
  check_tuples(a, b, c);
  auto sums = word_sums(a, b, c, indices_up_to(n_, max_degree), true, true, false);
  auto normalize = [](std::map<MultiIndex, CMatrix>& src, std::map<MultiIndex, CMatrix>& dst) {
    for (auto& [s, m] : src) {
      m /= static_cast<double>(polynomial_coefficient(s));
      dst.emplace(s, std::move(m));
    }
  };
  normalize(sums.w, plain_);
  normalize(sums.u, sharp_);
  normalize(sums.v, flat_);
  normalize(sums.x, flat_sharp_);
  has_b_ = b != nullptr;
  has_c_ = c != nullptr;
}

bool SymPowerTable::has(SymPowerKind kind) const {
  return (!needs_b(kind) || has_b_) && (!needs_c(kind) || has_c_);
}

const CMatrix& SymPowerTable::get(SymPowerKind kind, const MultiIndex& s) const {
  if (!has(kind)) throw DomainError(std::string(to_string(kind)) + " multipowers were not tabulated");
  if (!in_domain(kind, s) || s.degree() > max_degree_ || s.size() != n_) {
    throw DomainError(std::string(to_string(kind)) + " multipower requested outside the table at |s| = " +
                      std::to_string(s.degree()));
  }
  switch (kind) {
    case SymPowerKind::Plain: return plain_.at(s);
    case SymPowerKind::SharpB: return sharp_.at(s);
    case SymPowerKind::FlatC: return flat_.at(s);
    case SymPowerKind::FlatSharp: return flat_sharp_.at(s);
  }
  return plain_.at(s);
}

}  // namespace polydil
