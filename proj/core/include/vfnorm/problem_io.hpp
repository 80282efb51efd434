// Problem-file parsing (strict JSON-shaped schema, complex entries as
// [re, im] pairs), canonical emission, report/CSV writers and the command
// driver behind the vfnorm CLI.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vfnorm/algebra.hpp"
#include "vfnorm/types.hpp"

namespace vfnorm::io {

struct AlgebraSpec {
  enum class Kind { Full, Csl, TwoSubspaceSpectrum, TwoSubspaceDense, BlockVonNeumann, DirectSum };
  Kind kind = Kind::Full;
  Index dim = 0;                    // resolved ambient dimension
  std::vector<CMatrix> projections; // csl generators
  RVector spectrum;                 // two_subspace, spectrum form
  CMatrix b;                        // two_subspace, dense form
  std::vector<std::pair<int, int>> blocks;
  std::vector<AlgebraSpec> parts;

  bool operator==(const AlgebraSpec& o) const;
};

struct ProblemFile {
  Index dim = 0;
  AlgebraSpec algebra;
  CVector x, y;
  Tolerances tolerances;
  std::optional<std::uint64_t> seed;

  bool operator==(const ProblemFile& o) const;
};

// Throws ParseError on malformed syntax, ValidationError (with the offending
// field path) on invariant violations. The algebra is constructed once to
// prove the file maps to a valid model.
ProblemFile parse_problem(const std::string& text);

// Canonical emission; emit(parse(text)) parses to an identical ProblemFile.
std::string emit_problem(const ProblemFile& pf);

AlgebraModel build_model(const AlgebraSpec& spec, const Tolerances& tol);

// Shortest round-trip decimal representation, locale-independent.
std::string format_double(double v);

// Subcommands: norm, latdist, vgap, witness, closure, halmos, scan, vprime.
// Exit codes: 0 success, 1 violated-inequality finding, 2 input error,
// 3 no convergence. args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vfnorm::io
