#include "polydil/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polydil {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where + ": expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw FormatError(where + ": expected an integer");
  return j.get<long long>();
}

CMatrix matrix_from(const json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw FormatError(where + ": expected " + std::to_string(rows) + " rows");
  }
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw FormatError(where + ": row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2) {
        throw FormatError(where + ": entry (" + std::to_string(i) + ", " + std::to_string(c) + ") is not an [re, im] pair");
      }
      m(i, c) = Complex(number(z[0], where), number(z[1], where));
    }
  }
  return m;
}

OperatorTuple tuple_from(const json& j, int n, Index rows, Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw FormatError(where + ": expected " + std::to_string(n) + " matrices");
  }
  std::vector<CMatrix> mats;
  for (int k = 0; k < n; ++k) {
    mats.push_back(matrix_from(j[static_cast<std::size_t>(k)], rows, cols, where + "[" + std::to_string(k) + "]"));
  }
  return OperatorTuple(std::move(mats));
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string format_tuple(const OperatorTuple& t, const std::string& indent) {
  std::string out = "[";
  for (int k = 0; k < t.size(); ++k) {
    out += k ? ",\n" + indent + " " : "";
    out += format_matrix(t[k]);
  }
  return out + "]";
}

std::string format_vector(const CVector& v) {
  std::string out = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += "[" + format_double(v(i).real()) + ", " + format_double(v(i).imag()) + "]";
  }
  return out + "]";
}

std::string format_point(const LatticePoint& t) {
  std::string out = "[";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + std::to_string(t[i]);
  return out + "]";
}

int format_version(const json& j, const std::string& where) {
  const long long v = integer(field(j, "format_version", where), where + ".format_version");
  if (v != kFormatVersion) throw FormatError(where + ": unsupported format_version " + std::to_string(v));
  return static_cast<int>(v);
}

Index dim_field(const json& j, const char* key, const std::string& where) {
  const long long v = integer(field(j, key, where), where + "." + key);
  if (v < 0) throw FormatError(where + "." + key + " must be nonnegative");
  return static_cast<Index>(v);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string format_matrix(const CMatrix& m) {
  std::string out = "[";
  for (Index i = 0; i < m.rows(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out += ", ";
      out += "[" + format_double(m(i, c).real()) + ", " + format_double(m(i, c).imag()) + "]";
    }
    out += "]";
  }
  return out + "]";
}

std::string serialize_system(const SystemFile& f) {
  const Colligation& s = f.system;
  std::ostringstream o;
  o << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"kind\": \"system\",\n  \"n\": " << s.n()
    << ",\n  \"dims\": {\"state\": " << s.state_dim() << ", \"input\": " << s.input_dim()
    << ", \"output\": " << s.output_dim() << "},\n";
  o << "  \"a\": " << format_tuple(s.a(), "       ") << ",\n";
  o << "  \"b\": " << format_tuple(s.b(), "       ") << ",\n";
  o << "  \"c\": " << format_tuple(s.c(), "       ") << ",\n";
  o << "  \"d\": " << format_tuple(s.d(), "       ");
  const auto& md = f.metadata;
  if (md.name || md.seed || md.provenance) {
    o << ",\n  \"metadata\": {";
    bool first = true;
    auto sep = [&] { o << (first ? "" : ", "); first = false; };
    if (md.name) sep(), o << "\"name\": " << quoted(*md.name);
    if (md.seed) sep(), o << "\"seed\": " << *md.seed;
    if (md.provenance) sep(), o << "\"provenance\": " << quoted(*md.provenance);
    o << "}";
  }
  o << "\n}\n";
  return o.str();
}

SystemFile parse_system(const std::string& text) {
  const json j = parse_json(text);
  const std::string where = "system";
  format_version(j, where);
  const long long n = integer(field(j, "n", where), "system.n");
  if (n < 1) throw FormatError("system.n must be >= 1");
  const json& dims = field(j, "dims", where);
  const Index dx = dim_field(dims, "state", "system.dims");
  const Index din = dim_field(dims, "input", "system.dims");
  const Index dout = dim_field(dims, "output", "system.dims");
  const int nn = static_cast<int>(n);
  SystemFile f{Colligation(tuple_from(field(j, "a", where), nn, dx, dx, "system.a"),
                           tuple_from(field(j, "b", where), nn, dx, din, "system.b"),
                           tuple_from(field(j, "c", where), nn, dout, dx, "system.c"),
                           tuple_from(field(j, "d", where), nn, dout, din, "system.d")),
               {}};
  if (j.contains("metadata")) {
    const json& md = j.at("metadata");
    if (!md.is_object()) throw FormatError("system.metadata must be an object");
    if (md.contains("name")) {
      if (!md.at("name").is_string()) throw FormatError("system.metadata.name must be a string");
      f.metadata.name = md.at("name").get<std::string>();
    }
    if (md.contains("seed")) {
      if (!md.at("seed").is_number_unsigned()) throw FormatError("system.metadata.seed must be a nonnegative integer");
      f.metadata.seed = md.at("seed").get<std::uint64_t>();
    }
    if (md.contains("provenance")) {
      if (!md.at("provenance").is_string()) throw FormatError("system.metadata.provenance must be a string");
      f.metadata.provenance = md.at("provenance").get<std::string>();
    }
  }
  return f;
}

std::string serialize_witness(const WitnessFile& f) {
  const ViolationWitness& w = f.witness;
  std::ostringstream o;
  o << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"kind\": \"witness\",\n  \"n\": " << w.m.size()
    << ",\n  \"matrix_dim\": " << w.m.rows() << ",\n  \"tuple_dim\": " << w.t.dim() << ",\n";
  o << "  \"m\": " << format_tuple(w.m, "       ") << ",\n";
  o << "  \"t\": " << format_tuple(w.t.mats(), "       ") << ",\n";
  o << "  \"r\": " << format_double(w.r) << ",\n  \"lhs\": " << format_double(w.lhs)
    << ",\n  \"rhs\": " << format_double(w.rhs) << ",\n  \"ratio\": " << format_double(w.ratio)
    << ",\n  \"rhs_grid\": " << w.rhs_grid << ",\n  \"seed\": " << w.seed << ",\n";
  const auto& p = f.provenance;
  o << "  \"provenance\": {\"search_seed\": " << p.search_seed << ", \"family\": " << quoted(p.family)
    << ", \"restarts\": " << p.restarts << ", \"iters\": " << p.iters
    << ", \"tool_version\": " << quoted(p.tool_version) << "}\n}\n";
  return o.str();
}

WitnessFile parse_witness(const std::string& text) {
  const json j = parse_json(text);
  const std::string where = "witness";
  format_version(j, where);
  const long long n = integer(field(j, "n", where), "witness.n");
  if (n < 1) throw FormatError("witness.n must be >= 1");
  const Index md = dim_field(j, "matrix_dim", where);
  const Index td = dim_field(j, "tuple_dim", where);
  const int nn = static_cast<int>(n);
  const OperatorTuple m = tuple_from(field(j, "m", where), nn, md, md, "witness.m");
  const OperatorTuple t = tuple_from(field(j, "t", where), nn, td, td, "witness.t");
  WitnessFile f{ViolationWitness{m, CommutingTuple(std::vector<CMatrix>(t.mats().begin(), t.mats().end())),
                                 number(field(j, "r", where), "witness.r"),
                                 number(field(j, "lhs", where), "witness.lhs"),
                                 number(field(j, "rhs", where), "witness.rhs"),
                                 number(field(j, "ratio", where), "witness.ratio"),
                                 static_cast<std::uint64_t>(integer(field(j, "seed", where), "witness.seed")),
                                 static_cast<int>(integer(field(j, "rhs_grid", where), "witness.rhs_grid"))},
                {}};
  const json& p = field(j, "provenance", where);
  f.provenance.search_seed = static_cast<std::uint64_t>(integer(field(p, "search_seed", "witness.provenance"), "witness.provenance.search_seed"));
  f.provenance.restarts = static_cast<int>(integer(field(p, "restarts", "witness.provenance"), "witness.provenance.restarts"));
  f.provenance.iters = static_cast<int>(integer(field(p, "iters", "witness.provenance"), "witness.provenance.iters"));
  const json& fam = field(p, "family", "witness.provenance");
  const json& ver = field(p, "tool_version", "witness.provenance");
  if (!fam.is_string() || !ver.is_string()) throw FormatError("witness.provenance: family and tool_version must be strings");
  f.provenance.family = fam.get<std::string>();
  f.provenance.tool_version = ver.get<std::string>();
  return f;
}

std::string serialize_subspace(const SubspaceBasis& s) {
  std::ostringstream o;
  o << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"kind\": \"subspace\",\n  \"ambient\": "
    << s.ambient_dim() << ",\n  \"dim\": " << s.dim() << ",\n  \"basis\": " << format_matrix(s.basis()) << "\n}\n";
  return o.str();
}

SubspaceBasis parse_subspace(const std::string& text) {
  const json j = parse_json(text);
  const std::string where = "subspace";
  format_version(j, where);
  const Index ambient = dim_field(j, "ambient", where);
  const Index dim = dim_field(j, "dim", where);
  return SubspaceBasis(ambient, matrix_from(field(j, "basis", where), ambient, dim, "subspace.basis"));
}

std::string serialize_signal(const LatticeSignal& s) {
  std::ostringstream o;
  o << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"kind\": \"signal\",\n  \"base\": "
    << format_point(s.window().base) << ",\n  \"levels\": " << s.window().levels
    << ",\n  \"value_dim\": " << s.value_dim() << ",\n  \"points\": [";
  bool first = true;
  for (const auto& [t, v] : s.data()) {
    o << (first ? "\n" : ",\n") << "    {\"t\": " << format_point(t) << ", \"v\": " << format_vector(v) << "}";
    first = false;
  }
  o << (first ? "]" : "\n  ]") << "\n}\n";
  return o.str();
}

LatticeSignal parse_signal(const std::string& text) {
  const json j = parse_json(text);
  const std::string where = "signal";
  format_version(j, where);
  const json& base = field(j, "base", where);
  if (!base.is_array() || base.empty()) throw FormatError("signal.base must be a nonempty integer array");
  LatticeWindow w;
  for (const auto& b : base) w.base.push_back(static_cast<int>(integer(b, "signal.base")));
  w.levels = static_cast<int>(integer(field(j, "levels", where), "signal.levels"));
  const Index dim = dim_field(j, "value_dim", where);
  LatticeSignal s(w, dim);
  const json& pts = field(j, "points", where);
  if (!pts.is_array()) throw FormatError("signal.points must be an array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string at = "signal.points[" + std::to_string(i) + "]";
    const json& t = field(pts[i], "t", at);
    if (!t.is_array()) throw FormatError(at + ".t must be an integer array");
    LatticePoint p;
    for (const auto& c : t) p.push_back(static_cast<int>(integer(c, at + ".t")));
    const CMatrix v = matrix_from(json::array({field(pts[i], "v", at)}), 1, dim, at + ".v");
    s.set(p, v.row(0).transpose());
  }
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << text;
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace polydil
