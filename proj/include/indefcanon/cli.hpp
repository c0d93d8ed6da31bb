#pragma once

// The indefcanon command-line front end. Every command returns its exit
// code instead of exiting so tests can drive it in-process.
//
// Exit codes: 0 success; 1 verification breach or unbounded stability
// report; 2 parse or precondition failure; 3 generation failure; 4 pipeline
// failure in canonize; 5 output could not be written.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "indefcanon/harness.hpp"

namespace indefcanon::cli {

enum Exit : int { kOk = 0, kBreach = 1, kParse = 2, kGenerate = 3, kPipeline = 4, kIo = 5 };

struct GenArgs {
  std::string spec_file;
  std::uint64_t seed = 0;
  std::string out_file;
  std::string kind = "focs";
  std::string gamma = "1";
};

struct CanonizeArgs {
  std::string in_file;
  std::string mode = "focs";  ///< fo | focs | rc
  std::string gamma = "1";
  std::string out_file;
  bool emit_trace = false;
  NormKind norm = NormKind::Spectral;
};

struct VerifyArgs {
  std::string in_file;
  std::string basis_file;
  double tol = kDefaultTol;
  std::string expect;  ///< fo | focs | rc; empty uses the basis file's role
  NormKind norm = NormKind::Spectral;
};

struct StabilityArgs {
  std::string in_file;
  std::string deltas = "1e-2,1e-3,1e-4,1e-5,1e-6";
  std::size_t trials = 20;
  std::string mode = "strict";
  std::string kind = "focs";
  std::optional<std::string> gamma;
  std::string out_csv;
  std::string summary_json;  ///< empty: out_csv with its extension replaced by .json
  unsigned jobs = 1;
  NormKind norm = NormKind::Spectral;
  double delta_max = 0.1;
};

int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err);
int cmd_canonize(const CanonizeArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_stability(const StabilityArgs& args, std::ostream& out, std::ostream& err);

/// Accepts "1", "-0.5", "i", "-i", "2i", "1+2i", "0.5-0.25i" and "[re, im]".
Complex parse_complex(const std::string& text);
/// Comma-separated list of reals; must be strictly decreasing.
std::vector<double> parse_deltas(const std::string& text);

/// Parses argv (subcommands gen, canonize, verify, stability) and dispatches.
/// Flags left unset fall back to INDEFCANON_<FLAG> environment variables.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace indefcanon::cli
