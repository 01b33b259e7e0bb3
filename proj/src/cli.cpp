#include "polydil/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "polydil/io.hpp"
#include "polydil/lattice.hpp"
#include "polydil/realize.hpp"
#include "polydil/transfer.hpp"

namespace polydil {

namespace {

// Key-value lines in insertion order, then one human-readable summary line.
class Report {
 public:
  explicit Report(std::string command) { put("command", std::move(command)); put("tool_version", kToolVersion); }

  void put(const std::string& key, std::string value) { lines_.emplace_back(key, std::move(value)); }
  void put(const std::string& key, double value) { put(key, format_double(value)); }
  void put(const std::string& key, int value) { put(key, std::to_string(value)); }
  void put(const std::string& key, long value) { put(key, std::to_string(value)); }
  void put(const std::string& key, long long value) { put(key, std::to_string(value)); }
  void put(const std::string& key, std::uint64_t value) { put(key, std::to_string(value)); }
  void put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }
  void put(const std::string& key, const char* value) { put(key, std::string(value)); }
  void summary(std::string s) { summary_ = std::move(s); }

  void print(std::ostream& out) const {
    for (const auto& [k, v] : lines_) out << k << '=' << v << '\n';
    if (!summary_.empty()) out << "# " << summary_ << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
  std::string summary_;
};

struct Options {
  std::string in, out, small, embed, input, x0, out_d, out_dstar, family = "parrott", kind = "dissipative";
  std::string experiment, s, out_states;
  std::vector<std::string> z;
  std::vector<double> zeta;
  std::uint64_t seed = 0;
  int degree = -1;
  int grid = 64;
  int restarts = -1;
  int iters = -1;
  int n = 3;
  int count = 100;
  int sampled = 0;
  long embed_offset = -1;
  long dy = -1;
  long state = 2, input_dim = 1, output_dim = 1, matrix_dim = 2, defect_dim = 2;
  double tol = -1.0;
  double rho = 0.9;
};

// Re-throws library errors with the file path prepended.
template <class Fn>
auto with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(path + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

SystemFile load_system(const std::string& path) {
  if (path.empty()) throw FormatError("missing system file");
  const std::string text = read_text_file(path);
  return with_path(path, [&] { return parse_system(text); });
}

WitnessFile load_witness(const std::string& path) {
  if (path.empty()) throw FormatError("missing witness file");
  const std::string text = read_text_file(path);
  return with_path(path, [&] { return parse_witness(text); });
}

LatticeSignal load_signal(const std::string& path) {
  const std::string text = read_text_file(path);
  return with_path(path, [&] { return parse_signal(text); });
}

void save_system(const std::string& path, const Colligation& sys, const std::string& provenance,
                 std::optional<std::uint64_t> seed = std::nullopt) {
  if (path.empty()) return;
  SystemMetadata md;
  md.provenance = provenance;
  md.seed = seed;
  write_text_file(path, serialize_system({sys, md}));
}

SubspaceBasis load_subspace(const std::string& path) {
  const std::string text = read_text_file(path);
  return with_path(path, [&] { return parse_subspace(text); });
}

SubspaceBasis resolve_embed(const Options& o, const Colligation& big, const Colligation& small) {
  if (!o.embed.empty()) return load_subspace(o.embed);
  const Index offset = o.embed_offset < 0 ? big.state_dim() - small.state_dim() : o.embed_offset;
  if (offset < 0 || offset + small.state_dim() > big.state_dim()) {
    throw ShapeError("embedding offset " + std::to_string(offset) + " does not fit a " +
                     std::to_string(small.state_dim()) + "-dimensional state space into " +
                     std::to_string(big.state_dim()) + " dimensions");
  }
  return SubspaceBasis::coordinates(big.state_dim(), offset, small.state_dim());
}

Complex parse_complex(const std::string& text) {
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    const double re = std::stod(text.substr(0, colon), &used);
    if (used != (colon == std::string::npos ? text.size() : colon)) throw std::invalid_argument(text);
    double im = 0.0;
    if (colon != std::string::npos) {
      const std::string rest = text.substr(colon + 1);
      im = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(text);
    }
    return {re, im};
  } catch (const std::exception&) {
    throw FormatError("cannot read complex number '" + text + "' (expected re or re:im)");
  }
}

MultiIndex parse_index(const std::string& text, int n) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      parts.push_back(v);
    } catch (const std::exception&) {
      throw FormatError("cannot read multi-index '" + text + "' (expected comma-separated nonnegative integers)");
    }
  }
  if (static_cast<int>(parts.size()) != n) {
    throw ShapeError("multi-index '" + text + "' has " + std::to_string(parts.size()) + " parts, system has N=" +
                     std::to_string(n));
  }
  return MultiIndex(std::move(parts));
}

std::string index_str(const MultiIndex& s) {
  std::string out;
  for (int k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k]);
  return out;
}

std::string angles_str(const TorusPoint& p) {
  std::string out;
  for (int k = 0; k < p.size(); ++k) out += (k ? "," : "") + format_double(std::arg(p[k]));
  return out;
}

void put_moments(Report& r, const MomentReport& m) {
  r.put("degree", m.degree_cap);
  r.put("tol", m.tol);
  for (int f = 0; f < 4; ++f) {
    r.put("residual." + std::string(to_string(static_cast<SymPowerKind>(f))), m.residuals[static_cast<std::size_t>(f)]);
  }
  for (std::size_t d = 0; d < m.by_degree.size(); ++d) {
    const auto& row = m.by_degree[d];
    r.put("residual_by_degree." + std::to_string(d), *std::max_element(row.begin(), row.end()));
  }
  r.put("max_residual", m.max_residual());
  r.put("pass", m.pass);
  if (m.first_failing_degree) {
    r.put("first_failing_degree", *m.first_failing_degree);
    r.put("first_failing_family", std::string(to_string(*m.first_failing_family)));
  }
}

void put_realization(Report& r, const RealizationResult& res) {
  r.put("dy", static_cast<long>(res.aux_dim));
  r.put("degree", res.max_degree);
  r.put("seed", res.seed);
  r.put("restarts", res.restarts);
  r.put("iters", res.iters);
  r.put("best_restart", res.best_restart);
  r.put("steps", static_cast<long>(res.objective_trace.size()));
  r.put("objective", res.objective);
  r.put("unitarity_residual", res.unitarity_residual);
  for (std::size_t i = 0; i < res.vanish.by_degree.size(); ++i) {
    r.put("vanish." + std::to_string(i + 2), res.vanish.by_degree[i]);
  }
  r.put("vanish_max", res.vanish.max());
  r.put("total_residual", res.total_residual());
}

void put_witness(Report& r, const ViolationWitness& w) {
  r.put("n", w.m.size());
  r.put("matrix_dim", static_cast<long>(w.m.rows()));
  r.put("tuple_dim", static_cast<long>(w.t.dim()));
  r.put("r", w.r);
  r.put("lhs", w.lhs);
  r.put("rhs", w.rhs);
  r.put("rhs_grid", w.rhs_grid);
  r.put("ratio", w.ratio);
}

RealizeOptions realize_options(const Options& o, int default_degree) {
  RealizeOptions ro;
  ro.aux_dim = o.dy < 0 ? 0 : o.dy;
  ro.max_degree = o.degree < 0 ? default_degree : o.degree;
  ro.seed = o.seed;
  if (o.restarts >= 0) ro.restarts = o.restarts;
  if (o.iters >= 0) ro.iters = o.iters;
  return ro;
}

ViolationSearchOptions search_options(const Options& o) {
  ViolationSearchOptions vo;
  vo.seed = o.seed;
  vo.matrix_dim = o.matrix_dim;
  vo.defect_dim = o.defect_dim;
  if (o.restarts >= 0) vo.restarts = o.restarts;
  if (o.iters >= 0) vo.iters = o.iters;
  if (o.family == "parrott") {
    vo.family = TupleFamily::Parrott;
  } else if (o.family == "varopoulos") {
    vo.family = TupleFamily::Varopoulos;
  } else {
    throw FormatError("unknown tuple family '" + o.family + "' (expected parrott or varopoulos)");
  }
  return vo;
}

// ---- subcommands ---------------------------------------------------------

int cmd_check_dissipative(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  TorusSearchOptions topts;
  topts.grid = o.grid;
  topts.restarts = o.restarts < 0 ? topts.restarts : o.restarts;
  topts.seed = o.seed;
  const auto rep = torus_norm_max(stacked_pencil(sys), topts);
  Report r("check-dissipative");
  r.put("in", o.in);
  r.put("grid", rep.grid_density);
  r.put("restarts", rep.restarts);
  r.put("seed", rep.seed);
  r.put("margin", kViolationMargin);
  r.put("sampled", rep.sampled);
  r.put("evaluations", static_cast<long long>(rep.evaluations));
  r.put("torus_max", rep.torus_max);
  r.put("argmax_angles", angles_str(rep.argmax));
  r.put("necessary_bound", rep.necessary_bound);
  r.put("verdict", std::string(to_string(rep.verdict)));
  const bool ok = rep.verdict == Verdict::Dissipative;
  r.summary(ok ? "no torus point with norm above 1 found" : "torus point with norm above 1 found");
  r.print(out);
  return ok ? 0 : 1;
}

int cmd_check_conservative(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  const double tol = o.tol < 0 ? kConservativeTol : o.tol;
  const auto chk = is_conservative_algebraic(stacked_pencil(sys), tol);
  Report r("check-conservative");
  r.put("in", o.in);
  r.put("tol", tol);
  r.put("cross_left", chk.residuals.cross_left);
  r.put("cross_right", chk.residuals.cross_right);
  r.put("sum_left", chk.residuals.sum_left);
  r.put("sum_right", chk.residuals.sum_right);
  r.put("max_residual", chk.residuals.max());
  r.put("conservative", chk.conservative);
  r.summary(chk.conservative ? "conservative" : "not conservative");
  r.print(out);
  return chk.conservative ? 0 : 1;
}

int cmd_transfer_eval(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  std::vector<Complex> z;
  for (const auto& v : o.z) z.push_back(parse_complex(v));
  if (static_cast<int>(z.size()) != sys.n()) {
    throw ShapeError("--z gave " + std::to_string(z.size()) + " coordinates, system has N=" + std::to_string(sys.n()));
  }
  const CMatrix value = transfer_eval(sys, z);
  Report r("transfer-eval");
  r.put("in", o.in);
  r.put("value", format_matrix(value));
  r.put("norm", spectral_norm(value));
  r.summary("theta(z) evaluated");
  r.print(out);
  return 0;
}

int cmd_taylor(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  Report r("taylor");
  r.put("in", o.in);
  std::vector<MultiIndex> idx;
  if (!o.s.empty()) {
    idx.push_back(parse_index(o.s, sys.n()));
  } else {
    const int m = o.degree < 0 ? 3 : o.degree;
    r.put("degree", m);
    idx = indices_up_to(sys.n(), m);
  }
  for (const auto& s : idx) r.put("coeff[" + index_str(s) + "]", format_matrix(taylor_coeff(sys, s)));
  r.summary(std::to_string(idx.size()) + " Taylor coefficients");
  r.print(out);
  return 0;
}

int cmd_verify_dilation(const Options& o, std::ostream& out) {
  const auto big = load_system(o.in).system;
  const auto small = load_system(o.small).system;
  const auto embed = resolve_embed(o, big, small);
  const int m = o.degree < 0 ? default_degree_cap(big) : o.degree;
  const double tol = o.tol < 0 ? kMomentTol : o.tol;
  Report r("verify-dilation");
  r.put("in", o.in);
  r.put("small", o.small);
  MomentReport rep;
  if (o.sampled > 0) {
    Rng rng(o.seed);
    std::vector<TorusPoint> pts;
    for (int i = 0; i < o.sampled; ++i) pts.push_back(random_torus_point(big.n(), rng));
    rep = is_dilation_sampled(big, small, embed, pts, m, tol);
    r.put("mode", "sampled");
    r.put("samples", o.sampled);
    r.put("seed", o.seed);
  } else {
    rep = is_dilation(big, small, embed, m, tol);
    r.put("mode", "symmetrized");
  }
  put_moments(r, rep);
  r.summary(rep.pass ? "moment identities hold up to the degree cap" : "moment identity fails");
  r.print(out);
  return rep.pass ? 0 : 1;
}

int cmd_build_subspaces(const Options& o, std::ostream& out) {
  const auto big = load_system(o.in).system;
  const auto small = load_system(o.small).system;
  const auto embed = resolve_embed(o, big, small);
  const double tol = o.tol < 0 ? kMomentTol : o.tol;
  TorusPoint zeta = TorusPoint::ones(big.n());
  if (!o.zeta.empty()) {
    if (static_cast<int>(o.zeta.size()) != big.n()) {
      throw ShapeError("--zeta gave " + std::to_string(o.zeta.size()) + " angles, system has N=" + std::to_string(big.n()));
    }
    zeta = TorusPoint::from_angles(o.zeta);
  }
  const auto parts = build_subspaces_fixed_zeta(big, small, embed, zeta, tol);
  const auto chk = check_decomposition(big, small, embed, parts, zeta);
  if (!o.out_d.empty()) write_text_file(o.out_d, serialize_subspace(parts.d));
  if (!o.out_dstar.empty()) write_text_file(o.out_dstar, serialize_subspace(parts.dstar));
  Report r("build-subspaces");
  r.put("in", o.in);
  r.put("small", o.small);
  r.put("zeta_angles", angles_str(zeta));
  r.put("tol", tol);
  r.put("dim_d", static_cast<long>(parts.d.dim()));
  r.put("dim_x", static_cast<long>(embed.dim()));
  r.put("dim_dstar", static_cast<long>(parts.dstar.dim()));
  r.put("orthogonality", chk.orthogonality);
  r.put("d_invariant", chk.d_invariant);
  r.put("d_unobserved", chk.d_unobserved);
  r.put("dstar_invariant", chk.dstar_invariant);
  r.put("dstar_unreached", chk.dstar_unreached);
  r.put("compress_a", chk.compress_a);
  r.put("compress_b", chk.compress_b);
  r.put("compress_c", chk.compress_c);
  const bool ok = chk.max() <= tol;
  r.put("pass", ok);
  r.summary(ok ? "decomposition verified" : "decomposition residual above tolerance");
  r.print(out);
  return ok ? 0 : 1;
}

int cmd_assemble(const Options& o, std::ostream& out) {
  const auto beta = load_system(o.in).system;
  const auto alpha = load_system(o.small).system;
  const auto big = assemble_dilation(beta, alpha.state_dim(), alpha);
  save_system(o.out, big, "assemble-dilation");
  Report r("assemble-dilation");
  r.put("in", o.in);
  r.put("small", o.small);
  r.put("out", o.out);
  r.put("state_dim", static_cast<long>(big.state_dim()));
  r.put("embed_offset", static_cast<long>(beta.state_dim()));
  r.summary("dilation assembled; the small state space sits after the auxiliary one");
  r.print(out);
  return 0;
}

int cmd_extract(const Options& o, std::ostream& out) {
  const auto big = load_system(o.in).system;
  SubspaceBasis embed;
  if (!o.embed.empty()) {
    embed = load_subspace(o.embed);
  } else {
    if (o.embed_offset < 0 || o.dy < 0) throw FormatError("extract needs --embed or both --embed-offset and --dx");
    embed = SubspaceBasis::coordinates(big.state_dim(), o.embed_offset, o.dy);
  }
  const auto beta = extract_embedded(big, embed);
  save_system(o.out, beta, "extract");
  Report r("extract");
  r.put("in", o.in);
  r.put("out", o.out);
  r.put("dy", static_cast<long>(beta.state_dim()));
  r.put("conservative", is_conservative_algebraic(stacked_pencil(beta)).conservative);
  r.summary("beta system extracted");
  r.print(out);
  return 0;
}

int cmd_reduce(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  const int m = o.degree < 0 ? default_degree_cap(sys) : o.degree;
  const double tol = o.tol < 0 ? kMomentTol : o.tol;
  const auto red = reduce_uniform(sys, m, tol);
  save_system(o.out, red.minimal, "reduce");
  Report r("reduce");
  r.put("in", o.in);
  r.put("out", o.out);
  r.put("state_dim", static_cast<long>(sys.state_dim()));
  r.put("minimal_dim", static_cast<long>(red.minimal.state_dim()));
  r.put("dim_d", static_cast<long>(red.d.dim()));
  r.put("dim_dstar", static_cast<long>(red.dstar.dim()));
  put_moments(r, red.check);
  r.summary(red.check.pass ? "reduced system verified as compression" : "reduction failed its moment check");
  r.print(out);
  return red.check.pass ? 0 : 1;
}

int cmd_realize(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  const OperatorTuple g = stacked_pencil(sys);
  Report r("realize");
  r.put("in", o.in);
  r.put("out", o.out);
  RealizationResult res;
  if (o.dy == 0) {
    res = trivial_realization(g);
    r.put("mode", "trivial");
  } else {
    res = search_realization(g, realize_options(o, 4));
    r.put("mode", "search");
  }
  put_realization(r, res);
  save_system(o.out, res.beta, "realize", res.seed);
  r.summary("best realization found; residuals are evidence, not a certificate");
  r.print(out);
  return 0;
}

int cmd_vn_search(const Options& o, std::ostream& out) {
  const auto vo = search_options(o);
  const auto w = violation_search(o.n, vo);
  const auto re = revalidate(w);
  if (!o.out.empty()) {
    write_text_file(o.out, serialize_witness({w, {vo.seed, o.family, vo.restarts, vo.iters, kToolVersion}}));
  }
  Report r("vn-search");
  r.put("seed", vo.seed);
  r.put("family", o.family);
  r.put("restarts", vo.restarts);
  r.put("iters", vo.iters);
  r.put("search_grid", vo.search_grid);
  put_witness(r, w);
  r.put("revalidation_mismatch", re.mismatch);
  r.put("ratio_open_radius", re.ratio_open);
  r.put("valid", re.valid);
  r.put("out", o.out);
  r.summary(re.valid ? "von Neumann inequality violated" : "no violation found (search is best effort)");
  r.print(out);
  return 0;
}

int cmd_build_counterexample(const Options& o, std::ostream& out) {
  const auto wf = load_witness(o.in);
  const auto sys = build_counterexample_system(wf.witness.m);
  const OperatorTuple g = stacked_pencil(sys.alpha);
  const auto torus = torus_norm_max(g, TorusSearchOptions{o.grid, 8, o.seed, true});
  const double on_tuple = pencil_on_tuple(g, wf.witness.t, kOpenRadius).norm;
  save_system(o.out, sys.alpha, "build-counterexample");
  Report r("build-counterexample");
  r.put("in", o.in);
  r.put("out", o.out);
  r.put("normalizer", sys.normalizer);
  r.put("grid", o.grid);
  r.put("torus_max", torus.torus_max);
  r.put("dissipative", torus.verdict == Verdict::Dissipative);
  r.put("radius", kOpenRadius);
  r.put("norm_on_witness_tuple", on_tuple);
  const bool split = torus.verdict == Verdict::Dissipative && on_tuple > 1.0 + kWitnessMargin;
  r.put("dissipative_not_n_dissipative", split);
  r.summary(split ? "dissipative but not N-dissipative" : "witness does not separate the classes");
  r.print(out);
  return split ? 0 : 1;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto sys = load_system(o.in).system;
  if (o.input.empty()) throw FormatError("simulate needs --input");
  const auto u = load_signal(o.input);
  LatticeSignal x0;
  if (o.x0.empty()) {
    x0 = LatticeSignal(u.window(), sys.state_dim());
    x0.set(u.window().base, CVector::Zero(sys.state_dim()));
  } else {
    x0 = load_signal(o.x0);
  }
  const auto tr = simulate(sys, x0, u);
  if (!o.out.empty()) write_text_file(o.out, serialize_signal(tr.outputs));
  if (!o.out_states.empty()) write_text_file(o.out_states, serialize_signal(tr.states));
  double peak = 0.0;
  for (const auto& [t, v] : tr.outputs.data()) peak = std::max(peak, v.norm());
  Report r("simulate");
  r.put("in", o.in);
  r.put("input", o.input);
  r.put("levels", u.window().levels);
  r.put("output_points", static_cast<long>(tr.outputs.data().size()));
  r.put("max_output_norm", peak);
  r.put("out", o.out);
  r.summary("simulated level by level");
  r.print(out);
  return 0;
}

int cmd_validate_witness(const Options& o, std::ostream& out) {
  const auto wf = load_witness(o.in);
  const auto re = revalidate(wf.witness);
  Report r("validate-witness");
  r.put("in", o.in);
  r.put("search_seed", wf.provenance.search_seed);
  r.put("family", wf.provenance.family);
  r.put("fixture_tool_version", wf.provenance.tool_version);
  r.put("stored_ratio", wf.witness.ratio);
  r.put("lhs", re.lhs);
  r.put("rhs", re.rhs);
  r.put("ratio", re.ratio);
  r.put("ratio_open_radius", re.ratio_open);
  r.put("mismatch", re.mismatch);
  r.put("valid", re.valid);
  r.summary(re.valid ? "witness revalidated" : "witness does not revalidate");
  r.print(out);
  return re.valid ? 0 : 1;
}

int cmd_generate(const Options& o, std::ostream& out) {
  if (o.n < 1 || o.state < 0 || o.input_dim < 0 || o.output_dim < 0) throw DomainError("generate: sizes must be nonnegative and n >= 1");
  Colligation sys;
  if (o.kind == "conservative") {
    if (o.input_dim != o.output_dim) throw ShapeError("a conservative system needs equal input and output dimensions");
    sys = unstack(random_conservative_pencil(o.n, o.state + o.input_dim, o.seed), o.state, o.input_dim);
  } else if (o.kind == "dissipative") {
    Rng rng(o.seed);
    sys = unstack(random_dissipative_pencil(o.n, o.state + o.output_dim, o.state + o.input_dim, o.rho, rng), o.state,
                  o.input_dim);
  } else {
    throw FormatError("unknown kind '" + o.kind + "' (expected conservative or dissipative)");
  }
  if (o.out.empty()) throw FormatError("generate needs --out");
  save_system(o.out, sys, "generate " + o.kind, o.seed);
  Report r("generate");
  r.put("kind", o.kind);
  r.put("seed", o.seed);
  r.put("n", o.n);
  r.put("out", o.out);
  r.summary("random " + o.kind + " system written");
  r.print(out);
  return 0;
}

int experiment_ando_guard(const Options& o, std::ostream& out) {
  ViolationSearchOptions vo = search_options(o);
  Report r("experiment ando-guard");
  r.put("seed", o.seed);
  r.put("instances", o.count);
  r.put("n", 2);
  r.put("restarts", vo.restarts);
  r.put("iters", vo.iters);
  double worst = 0.0;
  for (int i = 0; i < o.count; ++i) {
    vo.seed = o.seed + static_cast<std::uint64_t>(i);
    worst = std::max(worst, violation_search(2, vo).ratio);
  }
  const bool pass = worst <= 1.0 + 1e-8;
  r.put("threshold", 1.0 + 1e-8);
  r.put("max_ratio", worst);
  r.put("verdict", pass ? "pass" : "fail");
  r.summary(pass ? "no two-variable violation, as Ando's theorem requires" : "two-variable ratio above 1");
  r.print(out);
  return pass ? 0 : 1;
}

int experiment_n3_search(const Options& o, std::ostream& out) {
  const auto vo = search_options(o);
  const auto w = violation_search(3, vo);
  const auto re = revalidate(w);
  if (!o.out.empty()) {
    write_text_file(o.out, serialize_witness({w, {vo.seed, o.family, vo.restarts, vo.iters, kToolVersion}}));
  }
  Report r("experiment n3-search");
  r.put("seed", vo.seed);
  r.put("family", o.family);
  r.put("restarts", vo.restarts);
  r.put("iters", vo.iters);
  put_witness(r, w);
  r.put("valid", re.valid);
  r.put("verdict", "informational");
  r.summary("best three-variable ratio " + format_double(w.ratio) + (re.valid ? " (violation)" : " (no violation)"));
  r.print(out);
  return 0;
}

int experiment_converse42(const Options& o, std::ostream& out) {
  Colligation alpha;
  if (o.in.empty()) {
    alpha = unstack(OperatorTuple({CMatrix::Constant(1, 1, 0.5)}), 1, 0);
  } else {
    alpha = load_system(o.in).system;
  }
  const OperatorTuple g = stacked_pencil(alpha);
  Options ro = o;
  if (ro.dy < 0) ro.dy = 4;
  const RealizeOptions opts = realize_options(ro, 4);
  const auto res = search_realization(g, opts);
  const auto big = assemble_dilation(res.beta, alpha.state_dim(), alpha);
  const auto embed = SubspaceBasis::coordinates(big.state_dim(), res.aux_dim, alpha.state_dim());
  const int m = 4;
  const auto rep = is_dilation(big, alpha, embed, m);
  const double eps = res.total_residual();
  const double bound = 20.0 * m * eps;
  Report r("experiment converse42");
  r.put("in", o.in.empty() ? std::string("builtin:G=[[1/2]]") : o.in);
  put_realization(r, res);
  r.put("moment_degree", m);
  for (std::size_t d = 0; d < rep.by_degree.size(); ++d) {
    const auto& row = rep.by_degree[d];
    r.put("moment_residual." + std::to_string(d), *std::max_element(row.begin(), row.end()));
  }
  r.put("moment_max", rep.max_residual());
  r.put("epsilon", eps);
  r.put("bound", bound);
  const bool ok = rep.max_residual() <= bound;
  r.put("verdict", ok ? "pass" : "fail");
  r.summary("moment residuals " + std::string(ok ? "within" : "above") + " 20*M*epsilon");
  r.print(out);
  return ok ? 0 : 1;
}

int cmd_experiment(const Options& o, std::ostream& out) {
  if (o.experiment == "ando-guard") return experiment_ando_guard(o, out);
  if (o.experiment == "n3-search") return experiment_n3_search(o, out);
  if (o.experiment == "converse42") return experiment_converse42(o, out);
  throw FormatError("unknown experiment '" + o.experiment + "' (expected ando-guard, n3-search or converse42)");
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("POLYDIL_SEED");
  if (!env || !*env) return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used == std::string(env).size() && env[0] != '-') return v;
  } catch (const std::exception&) {
  }
  return 0;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  o.seed = default_seed();
  CLI::App app{"Dilations and realizations of multiparameter scattering systems", "polydil"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  using Handler = std::function<int(const Options&, std::ostream&)>;
  std::map<std::string, Handler> handlers;

  auto add = [&](const std::string& name, const std::string& help, Handler h) {
    CLI::App* sc = app.add_subcommand(name, help);
    handlers[name] = std::move(h);
    sc->add_option("--in", o.in, "input file");
    sc->add_option("--out", o.out, "output file");
    sc->add_option("--seed", o.seed, "random seed (default: POLYDIL_SEED or 0)");
    sc->add_option("--degree", o.degree, "degree cap M");
    sc->add_option("--grid", o.grid, "torus grid density")->check(CLI::Range(2, 1 << 20));
    sc->add_option("--restarts", o.restarts, "random restarts")->check(CLI::NonNegativeNumber);
    sc->add_option("--tol", o.tol, "tolerance")->check(CLI::NonNegativeNumber);
    return sc;
  };

  add("check-dissipative", "search the torus for a point where the pencil norm exceeds 1", cmd_check_dissipative);
  add("check-conservative", "algebraic conservativity test", cmd_check_conservative);
  add("transfer-eval", "evaluate the transfer function", cmd_transfer_eval)
      ->add_option("--z", o.z, "coordinates as re or re:im")->required();
  add("taylor", "Taylor coefficients of the transfer function", cmd_taylor)
      ->add_option("--s", o.s, "multi-index, e.g. 1,0,2");
  for (const char* name : {"verify-dilation", "build-subspaces"}) {
    CLI::App* sc = add(name, std::string(name) == "verify-dilation" ? "check the moment identities of a dilation"
                                                                    : "invariant subspaces at a torus point",
                       std::string(name) == "verify-dilation" ? Handler(cmd_verify_dilation) : Handler(cmd_build_subspaces));
    sc->add_option("--small", o.small, "the small system")->required();
    sc->add_option("--embed", o.embed, "subspace file embedding the small state space");
    sc->add_option("--embed-offset", o.embed_offset, "coordinate embedding offset (default: trailing coordinates)");
    if (std::string(name) == "verify-dilation") {
      sc->add_option("--sampled", o.sampled, "check at this many random torus points instead");
    } else {
      sc->add_option("--zeta", o.zeta, "torus point as angles");
      sc->add_option("--out-d", o.out_d, "write D here");
      sc->add_option("--out-dstar", o.out_dstar, "write D* here");
    }
  }
  add("assemble-dilation", "place a beta system around a small system", cmd_assemble)
      ->add_option("--small", o.small, "the small system")->required();
  {
    CLI::App* sc = add("extract", "beta system of a dilation with an embedded state space", cmd_extract);
    sc->add_option("--embed", o.embed, "subspace file");
    sc->add_option("--embed-offset", o.embed_offset, "coordinate embedding offset");
    sc->add_option("--dx", o.dy, "dimension of the embedded state space (with --embed-offset)");
  }
  add("reduce", "uniform reduction to a smaller system", cmd_reduce);
  {
    CLI::App* sc = add("realize", "search an approximate conservative realization of the stacked pencil", cmd_realize);
    sc->add_option("--dy", o.dy, "auxiliary dimension (0: exact, conservative input only)");
    sc->add_option("--iters", o.iters, "descent steps per restart");
  }
  {
    CLI::App* sc = add("vn-search", "search a von Neumann inequality violation", cmd_vn_search);
    sc->add_option("--n", o.n, "number of variables")->check(CLI::PositiveNumber);
    sc->add_option("--iters", o.iters, "ascent sweeps per restart");
    sc->add_option("--matrix-dim", o.matrix_dim, "size of M_k")->check(CLI::PositiveNumber);
    sc->add_option("--defect-dim", o.defect_dim, "tuple block size")->check(CLI::PositiveNumber);
    sc->add_option("--family", o.family, "parrott or varopoulos");
  }
  add("build-counterexample", "dissipative system from a witness file", cmd_build_counterexample);
  {
    CLI::App* sc = add("simulate", "run the lattice recurrence", cmd_simulate);
    sc->add_option("--input", o.input, "input signal file");
    sc->add_option("--x0", o.x0, "initial state signal file (default zero)");
    sc->add_option("--out-states", o.out_states, "write the states here");
  }
  add("validate-witness", "recompute a witness file", cmd_validate_witness);
  {
    CLI::App* sc = add("experiment", "canned reproductions", cmd_experiment);
    sc->add_option("name", o.experiment, "ando-guard, n3-search or converse42")->required();
    sc->add_option("--count", o.count, "instances (ando-guard)")->check(CLI::PositiveNumber);
    sc->add_option("--iters", o.iters, "search budget per restart");
    sc->add_option("--dy", o.dy, "auxiliary dimension (converse42)");
    sc->add_option("--family", o.family, "parrott or varopoulos");
  }
  {
    CLI::App* sc = add("generate", "write a random system", cmd_generate);
    sc->add_option("--kind", o.kind, "conservative or dissipative");
    sc->add_option("--n", o.n, "number of variables");
    sc->add_option("--state", o.state, "state dimension");
    sc->add_option("--input", o.input_dim, "input dimension");
    sc->add_option("--output", o.output_dim, "output dimension");
    sc->add_option("--rho", o.rho, "sum of the norms (dissipative)");
  }

  if (!args.empty() && !args.front().starts_with("-") && !handlers.contains(args.front())) {
    err << "error: unknown subcommand '" << args.front() << "'\nRun with --help for the list.\n";
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return handlers.at(name)(o, out);
  } catch (const SingularityError& e) {
    err << "numerical guard: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace polydil
