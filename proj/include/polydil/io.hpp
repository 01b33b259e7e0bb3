#pragma once

// Text formats: systems, witnesses, subspaces and lattice signals as JSON with
// every double printed to 17 significant digits.

#include <optional>
#include <string>

#include "polydil/dilation.hpp"
#include "polydil/lattice.hpp"
#include "polydil/vneumann.hpp"

namespace polydil {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest faithful rendering: "%.17g", with ".0" appended to integral values
/// so that -0.0 and large integers survive a parse.
std::string format_double(double x);

struct SystemMetadata {
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> provenance;
};

struct SystemFile {
  Colligation system;
  SystemMetadata metadata;
};

std::string serialize_system(const SystemFile& f);
/// Throws FormatError on malformed JSON, missing fields or ragged arrays and
/// ShapeError when the declared dims disagree with the matrices.
SystemFile parse_system(const std::string& text);

struct WitnessProvenance {
  std::uint64_t search_seed = 0;
  std::string family;
  int restarts = 0;
  int iters = 0;
  std::string tool_version = kToolVersion;
};

struct WitnessFile {
  ViolationWitness witness;
  WitnessProvenance provenance;
};

std::string serialize_witness(const WitnessFile& f);
WitnessFile parse_witness(const std::string& text);

std::string serialize_subspace(const SubspaceBasis& s);
SubspaceBasis parse_subspace(const std::string& text);

std::string serialize_signal(const LatticeSignal& s);
LatticeSignal parse_signal(const std::string& text);

/// Matrix as rows of [re, im] pairs on one line.
std::string format_matrix(const CMatrix& m);

/// Whole-file helpers; errors name the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace polydil
