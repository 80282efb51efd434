#include "vfnorm/problem_io.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "vfnorm/csl_witness.hpp"
#include "vfnorm/funcnorm.hpp"
#include "vfnorm/verify.hpp"

namespace vfnorm::io {

using nlohmann::json;

namespace {

bool mat_eq(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

bool vec_eq(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

bool rvec_eq(const RVector& a, const RVector& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

// ---- strict JSON walking -------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) fail(path, "unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return obj.at(key);
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite number");
  return v;
}

Index as_positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    fail(path, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

Complex as_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected an [re, im] pair");
  return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

CVector as_cvector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [re, im] pairs");
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Index>(i)) = as_complex(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

CMatrix as_cmatrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  CMatrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail(rp, "expected a row array");
    if (r == 0) {
      cols = j[r].size();
      if (cols == 0) fail(rp, "empty row");
      m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (j[r].size() != cols) {
      fail(rp, "ragged row");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          as_complex(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json cvector_to_json(const CVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
  return arr;
}

json cmatrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

AlgebraSpec parse_algebra(const json& j, const std::string& path, Index ambient_dim);

AlgebraSpec parse_algebra_kinded(const json& j, const std::string& path, Index ambient_dim) {
  const std::string kind = require(j, "kind", path).get<std::string>();
  AlgebraSpec spec;

  if (kind == "full") {
    reject_unknown(j, path, {"kind", "dim"});
    spec.kind = AlgebraSpec::Kind::Full;
    spec.dim = j.contains("dim") ? as_positive_int(j.at("dim"), path + ".dim") : ambient_dim;
    if (spec.dim < 1) fail(path, "full algebra needs a dimension");
  } else if (kind == "csl") {
    reject_unknown(j, path, {"kind", "dim", "projections"});
    spec.kind = AlgebraSpec::Kind::Csl;
    const json& projs = require(j, "projections", path);
    if (!projs.is_array() || projs.empty()) fail(path + ".projections", "expected projections");
    for (std::size_t i = 0; i < projs.size(); ++i)
      spec.projections.push_back(
          as_cmatrix(projs[i], path + ".projections[" + std::to_string(i) + "]"));
    spec.dim = spec.projections[0].rows();
    for (std::size_t i = 0; i < spec.projections.size(); ++i)
      if (spec.projections[i].rows() != spec.dim || spec.projections[i].cols() != spec.dim)
        fail(path + ".projections[" + std::to_string(i) + "]", "dimension mismatch");
  } else if (kind == "two_subspace") {
    reject_unknown(j, path, {"kind", "dim", "spectrum", "b"});
    if (j.contains("spectrum") == j.contains("b"))
      fail(path, "two_subspace needs exactly one of 'spectrum' or 'b'");
    if (j.contains("spectrum")) {
      spec.kind = AlgebraSpec::Kind::TwoSubspaceSpectrum;
      const json& sp = j.at("spectrum");
      if (!sp.is_array() || sp.empty()) fail(path + ".spectrum", "expected numbers");
      spec.spectrum.resize(static_cast<Index>(sp.size()));
      for (std::size_t i = 0; i < sp.size(); ++i) {
        const std::string p = path + ".spectrum[" + std::to_string(i) + "]";
        const double v = as_double(sp[i], p);
        if (!(v > 0.0 && v < 1.0)) fail(p, "spectrum entry outside (0, 1)");
        spec.spectrum(static_cast<Index>(i)) = v;
      }
      spec.dim = 2 * spec.spectrum.size();
    } else {
      spec.kind = AlgebraSpec::Kind::TwoSubspaceDense;
      spec.b = as_cmatrix(j.at("b"), path + ".b");
      if (spec.b.rows() != spec.b.cols()) fail(path + ".b", "B must be square");
      spec.dim = 2 * spec.b.rows();
    }
  } else if (kind == "block_vn") {
    reject_unknown(j, path, {"kind", "dim", "blocks"});
    spec.kind = AlgebraSpec::Kind::BlockVonNeumann;
    const json& blocks = require(j, "blocks", path);
    if (!blocks.is_array() || blocks.empty()) fail(path + ".blocks", "expected block list");
    Index dim = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string p = path + ".blocks[" + std::to_string(i) + "]";
      if (!blocks[i].is_array() || blocks[i].size() != 2)
        fail(p, "expected [size, multiplicity]");
      const Index s = as_positive_int(blocks[i][0], p + "[0]");
      const Index m = as_positive_int(blocks[i][1], p + "[1]");
      spec.blocks.emplace_back(static_cast<int>(s), static_cast<int>(m));
      dim += s * m;
    }
    spec.dim = dim;
  } else if (kind == "direct_sum") {
    reject_unknown(j, path, {"kind", "dim", "parts"});
    spec.kind = AlgebraSpec::Kind::DirectSum;
    const json& parts = require(j, "parts", path);
    if (!parts.is_array() || parts.size() < 1) fail(path + ".parts", "expected parts");
    Index dim = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      spec.parts.push_back(
          parse_algebra(parts[i], path + ".parts[" + std::to_string(i) + "]", 0));
      dim += spec.parts.back().dim;
    }
    spec.dim = dim;
  } else {
    fail(path + ".kind", "unknown algebra kind '" + kind + "'");
  }

  if (j.contains("dim") && kind != "full") {
    const Index declared = as_positive_int(j.at("dim"), path + ".dim");
    if (declared != spec.dim) fail(path + ".dim", "declared dim disagrees with algebra data");
  }
  return spec;
}

AlgebraSpec parse_algebra(const json& j, const std::string& path, Index ambient_dim) {
  if (!j.is_object()) fail(path, "expected an object");
  return parse_algebra_kinded(j, path, ambient_dim);
}

json algebra_to_json(const AlgebraSpec& spec) {
  json j;
  switch (spec.kind) {
    case AlgebraSpec::Kind::Full:
      j["kind"] = "full";
      j["dim"] = spec.dim;
      break;
    case AlgebraSpec::Kind::Csl: {
      j["kind"] = "csl";
      json projs = json::array();
      for (const CMatrix& p : spec.projections) projs.push_back(cmatrix_to_json(p));
      j["projections"] = std::move(projs);
      break;
    }
    case AlgebraSpec::Kind::TwoSubspaceSpectrum: {
      j["kind"] = "two_subspace";
      json sp = json::array();
      for (Index i = 0; i < spec.spectrum.size(); ++i) sp.push_back(spec.spectrum(i));
      j["spectrum"] = std::move(sp);
      break;
    }
    case AlgebraSpec::Kind::TwoSubspaceDense:
      j["kind"] = "two_subspace";
      j["b"] = cmatrix_to_json(spec.b);
      break;
    case AlgebraSpec::Kind::BlockVonNeumann: {
      j["kind"] = "block_vn";
      json blocks = json::array();
      for (const auto& [s, m] : spec.blocks) blocks.push_back(json::array({s, m}));
      j["blocks"] = std::move(blocks);
      break;
    }
    case AlgebraSpec::Kind::DirectSum: {
      j["kind"] = "direct_sum";
      json parts = json::array();
      for (const AlgebraSpec& p : spec.parts) parts.push_back(algebra_to_json(p));
      j["parts"] = std::move(parts);
      break;
    }
  }
  return j;
}

}  // namespace

bool AlgebraSpec::operator==(const AlgebraSpec& o) const {
  if (kind != o.kind || dim != o.dim) return false;
  if (projections.size() != o.projections.size()) return false;
  for (std::size_t i = 0; i < projections.size(); ++i)
    if (!mat_eq(projections[i], o.projections[i])) return false;
  if (!rvec_eq(spectrum, o.spectrum) || !mat_eq(b, o.b)) return false;
  if (blocks != o.blocks || parts != o.parts) return false;
  return true;
}

bool ProblemFile::operator==(const ProblemFile& o) const {
  return dim == o.dim && algebra == o.algebra && vec_eq(x, o.x) && vec_eq(y, o.y) &&
         tolerances == o.tolerances && seed == o.seed;
}

AlgebraModel build_model(const AlgebraSpec& spec, const Tolerances& tol) {
  switch (spec.kind) {
    case AlgebraSpec::Kind::Full:
      return AlgebraModel::full(spec.dim);
    case AlgebraSpec::Kind::Csl: {
      std::vector<Projection> gens;
      gens.reserve(spec.projections.size());
      for (const CMatrix& p : spec.projections) gens.push_back(Projection::from_matrix(p, tol));
      const SubspaceLattice lat = lattice_closure(gens, 256, tol);
      if (!lat.is_commutative)
        throw ValidationError("algebra.projections: generated lattice is not commutative");
      return AlgebraModel::csl(lat, tol);
    }
    case AlgebraSpec::Kind::TwoSubspaceSpectrum: {
      RVector sp = spec.spectrum;
      std::sort(sp.data(), sp.data() + sp.size(), std::greater<double>());
      CMatrix b = CMatrix::Zero(sp.size(), sp.size());
      for (Index i = 0; i < sp.size(); ++i) b(i, i) = sp(i);
      return AlgebraModel::two_subspace(build_halmos(b, tol, /*scan_mode=*/true), tol);
    }
    case AlgebraSpec::Kind::TwoSubspaceDense:
      return AlgebraModel::two_subspace(build_halmos(spec.b, tol, /*scan_mode=*/true), tol);
    case AlgebraSpec::Kind::BlockVonNeumann:
      return AlgebraModel::block_von_neumann(spec.blocks, tol);
    case AlgebraSpec::Kind::DirectSum: {
      std::vector<AlgebraModel> parts;
      parts.reserve(spec.parts.size());
      for (const AlgebraSpec& p : spec.parts) parts.push_back(build_model(p, tol));
      return AlgebraModel::direct_sum(std::move(parts));
    }
  }
  throw Error("build_model: unknown kind");
}

ProblemFile parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("problem: expected a top-level object");
  reject_unknown(j, "problem", {"dim", "algebra", "x", "y", "tolerances", "seed"});

  ProblemFile pf;
  pf.dim = as_positive_int(require(j, "dim", "problem"), "problem.dim");
  pf.algebra = parse_algebra(require(j, "algebra", "problem"), "algebra", pf.dim);
  if (pf.algebra.dim != pf.dim)
    fail("algebra", "algebra dimension " + std::to_string(pf.algebra.dim) +
                        " disagrees with problem.dim " + std::to_string(pf.dim));
  pf.x = as_cvector(require(j, "x", "problem"), "x");
  pf.y = as_cvector(require(j, "y", "problem"), "y");
  if (pf.x.size() != pf.dim) fail("x", "length disagrees with problem.dim");
  if (pf.y.size() != pf.dim) fail("y", "length disagrees with problem.dim");

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) fail("tolerances", "expected an object");
    reject_unknown(t, "tolerances", {"eq_tol", "rank_tol", "solver_tol"});
    if (t.contains("eq_tol")) pf.tolerances.eq_tol = as_double(t.at("eq_tol"), "tolerances.eq_tol");
    if (t.contains("rank_tol"))
      pf.tolerances.rank_tol = as_double(t.at("rank_tol"), "tolerances.rank_tol");
    if (t.contains("solver_tol"))
      pf.tolerances.solver_tol = as_double(t.at("solver_tol"), "tolerances.solver_tol");
    try {
      pf.tolerances.validate();
    } catch (const std::invalid_argument& e) {
      fail("tolerances", e.what());
    }
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned()) fail("problem.seed", "expected a nonnegative integer");
    pf.seed = s.get<std::uint64_t>();
  }

  // Prove the description maps to a model before returning it.
  try {
    (void)build_model(pf.algebra, pf.tolerances);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(std::string("algebra: ") + e.what());
  }
  return pf;
}

std::string emit_problem(const ProblemFile& pf) {
  json j;
  j["dim"] = pf.dim;
  j["algebra"] = algebra_to_json(pf.algebra);
  j["x"] = cvector_to_json(pf.x);
  j["y"] = cvector_to_json(pf.y);
  j["tolerances"] = {{"eq_tol", pf.tolerances.eq_tol},
                     {"rank_tol", pf.tolerances.rank_tol},
                     {"solver_tol", pf.tolerances.solver_tol}};
  if (pf.seed) j["seed"] = *pf.seed;
  return j.dump(2) + "\n";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---- command driver --------------------------------------------------------

namespace {

struct Output {
  std::string path;  // empty = stdout
  std::ostream& fallback;

  void write(const std::string& content) const {
    if (path.empty()) {
      fallback << content;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output file: " + path);
    f << content;
  }
};

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string status_str(VGapStatus s) {
  switch (s) {
    case VGapStatus::Satisfied:
      return "satisfied";
    case VGapStatus::Inconclusive:
      return "inconclusive";
    case VGapStatus::Violated:
      return "violated";
  }
  return "?";
}

int env_threads() {
  const char* v = std::getenv("VFNORM_THREADS");
  if (!v) return 1;
  const int n = std::atoi(v);
  return n < 1 ? 1 : n;
}

struct CommonOpts {
  std::string problem_path;
  std::string out_path;
  std::string format = "text";
  double tol = 1e-7;
  int max_iter = 50000;
  std::optional<std::uint64_t> seed;
};

ProblemFile load_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open problem file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_problem(ss.str());
}

NormOptions norm_options(const CommonOpts& c, const ProblemFile& pf) {
  NormOptions opt;
  opt.tol = c.tol;
  opt.max_iter = c.max_iter;
  opt.tolerances = pf.tolerances;
  return opt;
}

int cmd_norm(const CommonOpts& c, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);
  const AlgebraModel model = build_model(pf.algebra, pf.tolerances);
  const NormResult r = functional_norm(model, pf.x, pf.y, norm_options(c, pf));

  std::ostringstream os;
  if (c.format == "csv") {
    os << "lower,upper,width,converged,iterations\n"
       << format_double(r.lower) << ',' << format_double(r.upper) << ','
       << format_double(r.upper - r.lower) << ',' << bool_str(r.converged) << ','
       << r.iterations << '\n';
  } else {
    os << "functional norm bracket for " << model.summary() << '\n'
       << "  lower: " << format_double(r.lower) << '\n'
       << "  upper: " << format_double(r.upper) << '\n'
       << "  width: " << format_double(r.upper - r.lower) << '\n'
       << "  converged: " << bool_str(r.converged) << " (" << r.iterations << " iterations)\n";
  }
  Output{c.out_path, out}.write(os.str());
  return r.converged ? 0 : 3;
}

int cmd_latdist(const CommonOpts& c, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);
  const AlgebraModel model = build_model(pf.algebra, pf.tolerances);

  double value = 0.0;
  int argmin_rank = 0;
  if (model.kind() == AlgebraModel::Kind::BlockVonNeumann) {
    const LatInfResult r = lat_inf_vn(model, pf.x, pf.y);
    value = r.value;
    argmin_rank = r.witness.rank;
  } else if (model.kind() == AlgebraModel::Kind::DirectSum) {
    Index off = 0;
    for (const AlgebraModel& p : model.parts()) {
      const CVector xi = pf.x.segment(off, p.dim());
      const CVector yi = pf.y.segment(off, p.dim());
      if (p.kind() == AlgebraModel::Kind::BlockVonNeumann) {
        const LatInfResult r = lat_inf_vn(p, xi, yi);
        value += r.value;
        argmin_rank += r.witness.rank;
      } else {
        const LatDistance r = lat_distance_sq(p.finite_lattice(), xi, yi, pf.tolerances);
        value += r.value;
        argmin_rank += r.argmin.rank;
      }
      off += p.dim();
    }
  } else {
    const LatDistance r = lat_distance_sq(model.finite_lattice(), pf.x, pf.y, pf.tolerances);
    value = r.value;
    argmin_rank = r.argmin.rank;
  }

  std::ostringstream os;
  if (c.format == "csv") {
    os << "value,argmin_rank\n" << format_double(value) << ',' << argmin_rank << '\n';
  } else {
    os << "lattice minimax for " << model.summary() << '\n'
       << "  value: " << format_double(value) << '\n'
       << "  argmin rank: " << argmin_rank << '\n';
  }
  Output{c.out_path, out}.write(os.str());
  return 0;
}

int cmd_vgap(const CommonOpts& c, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);
  const AlgebraModel model = build_model(pf.algebra, pf.tolerances);
  const std::uint64_t seed = c.seed ? *c.seed : pf.seed.value_or(0);
  const VGapReport r = vgap(model, pf.x, pf.y, norm_options(c, pf), seed);

  std::ostringstream os;
  if (c.format == "csv") {
    os << "lhs,norm_lower,norm_upper,margin,satisfied,status,converged,iterations\n"
       << format_double(r.lhs) << ',' << format_double(r.norm_lower) << ','
       << format_double(r.norm_upper) << ',' << format_double(r.margin) << ','
       << bool_str(r.satisfied) << ',' << status_str(r.status) << ',' << bool_str(r.converged)
       << ',' << r.iterations << '\n';
  } else {
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(r.pair_hash));
    os << "vgap report for " << r.model_summary << '\n'
       << "  lhs (lattice minimax): " << format_double(r.lhs) << '\n'
       << "  norm bracket: [" << format_double(r.norm_lower) << ", "
       << format_double(r.norm_upper) << "]\n"
       << "  margin: " << format_double(r.margin) << '\n'
       << "  satisfied: " << bool_str(r.satisfied) << '\n'
       << "  status: " << status_str(r.status) << '\n'
       << "  pair hash: " << hash << '\n'
       << "  seed: " << r.seed << '\n'
       << "  converged: " << bool_str(r.converged) << " (" << r.iterations << " iterations)\n";
  }
  Output{c.out_path, out}.write(os.str());
  if (r.status == VGapStatus::Violated) return 1;
  return r.converged ? 0 : 3;
}

int cmd_witness(const CommonOpts& c, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);
  const AlgebraModel model = build_model(pf.algebra, pf.tolerances);
  if (model.kind() != AlgebraModel::Kind::Csl)
    throw ValidationError("witness: requires a csl algebra");

  const SubspaceLattice& lat = model.csl_lattice();
  const WitnessResult w =
      build_witness(lat, pf.x, pf.y, c.tol, c.max_iter, pf.tolerances);
  const LatDistance ld = lat_distance_sq(lat, pf.x, pf.y, pf.tolerances);
  const double opn = op_norm(w.t);
  const bool member = membership(model, w.t, 10.0 * pf.tolerances.eq_tol);

  std::ostringstream os;
  if (c.format == "csv") {
    os << "value,lat_value,op_norm,membership_ok\n"
       << format_double(w.value) << ',' << format_double(ld.value) << ','
       << format_double(opn) << ',' << bool_str(member) << '\n';
  } else {
    os << "witness report for " << model.summary() << '\n'
       << "  (Tx, y): " << format_double(w.value) << '\n'
       << "  lattice minimax: " << format_double(ld.value) << '\n'
       << "  operator norm of T: " << format_double(opn) << '\n'
       << "  membership: " << bool_str(member) << '\n';
  }
  Output{c.out_path, out}.write(os.str());
  return 0;
}

int cmd_closure(const CommonOpts& c, int max_size, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);

  SubspaceLattice lat;
  if (pf.algebra.kind == AlgebraSpec::Kind::Csl) {
    std::vector<Projection> gens;
    for (const CMatrix& p : pf.algebra.projections)
      gens.push_back(Projection::from_matrix(p, pf.tolerances));
    lat = lattice_closure(gens, max_size, pf.tolerances);
  } else {
    const AlgebraModel model = build_model(pf.algebra, pf.tolerances);
    if (!model.has_finite_lattice())
      throw ValidationError("closure: model has no finite lattice");
    lat = SubspaceLattice::from_elements(model.dim(), model.finite_lattice(), pf.tolerances);
  }

  std::ostringstream os;
  if (c.format == "csv") {
    os << "size,commutative,ranks\n" << lat.size() << ',' << bool_str(lat.is_commutative) << ',';
    for (std::size_t i = 0; i < lat.elements.size(); ++i)
      os << (i ? ";" : "") << lat.elements[i].rank;
    os << '\n';
  } else {
    os << "lattice closure\n"
       << "  size: " << lat.size() << '\n'
       << "  commutative: " << bool_str(lat.is_commutative) << '\n'
       << "  ranks:";
    for (const Projection& p : lat.elements) os << ' ' << p.rank;
    os << '\n';
  }
  Output{c.out_path, out}.write(os.str());
  return 0;
}

int cmd_halmos(const CommonOpts& c, int samples, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);
  const AlgebraModel model = build_model(pf.algebra, pf.tolerances);
  if (model.kind() != AlgebraModel::Kind::TwoSubspace)
    throw ValidationError("halmos: requires a two_subspace algebra");
  const HalmosModel& hm = model.halmos();

  const double lam_min = hm.spectrum(hm.spectrum.size() - 1);
  const double lam_max = hm.spectrum(0);

  std::ostringstream os;
  if (!hm.angle_positive) {
    if (c.format == "csv") {
      os << "h0_dim,angle_positive,lambda_min,lambda_max\n"
         << hm.h0_dim << ",false," << format_double(lam_min) << ',' << format_double(lam_max)
         << '\n';
    } else {
      os << "halmos model summary\n"
         << "  h0_dim: " << hm.h0_dim << '\n'
         << "  angle positive: false (lambda_min = " << format_double(lam_min) << ")\n"
         << "  similarity-dependent checks disabled\n";
    }
    Output{c.out_path, out}.write(os.str());
    return 0;
  }

  const LemmaConstants lc = lemma_constants(hm);
  const double t = op_norm(hm.s) * op_norm(hm.s_inv);

  // Sampled inequality checks: a_i <= c_i m_{sigma(i)}, min a <= c min m,
  // and min m <= block-algebra norm upper bound.
  const std::uint64_t seed = c.seed ? *c.seed : pf.seed.value_or(0);
  std::mt19937_64 rng(seed);
  const Index n = model.dim();
  const AlgebraModel block = AlgebraModel::block_von_neumann(
      {{static_cast<int>(hm.h0_dim), 1}, {static_cast<int>(hm.h0_dim), 1}}, pf.tolerances);
  NormOptions nopt;
  nopt.tol = c.tol;
  nopt.max_iter = c.max_iter;
  nopt.tolerances = pf.tolerances;

  double worst_pair_gap = -std::numeric_limits<double>::infinity();
  double worst_min_gap = -std::numeric_limits<double>::infinity();
  double worst_norm_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const CVector x = random_unit_vector(n, rng);
    const CVector y = random_unit_vector(n, rng);
    const MValues m = m_values(hm, x, y);
    const AValues a = a_values(hm, x, y);
    worst_pair_gap = std::max({worst_pair_gap, a.a1 - lc.c1 * m.m1, a.a2 - lc.c2 * m.m3,
                               a.a3 - lc.c3 * m.m2, a.a4 - lc.c4 * m.m4});
    worst_min_gap = std::max(worst_min_gap, a.min() - lc.c * m.min());
    const NormResult nr = functional_norm(block, hm.s_inv * x, hm.s.adjoint() * y, nopt);
    worst_norm_gap = std::max(worst_norm_gap, m.min() - nr.upper);
  }
  const bool ok = worst_pair_gap <= pf.tolerances.eq_tol &&
                  worst_min_gap <= pf.tolerances.eq_tol && worst_norm_gap <= c.tol;

  if (c.format == "csv") {
    os << "h0_dim,angle_positive,lambda_min,lambda_max,c1,c2,c3,c4,c,t,samples,"
          "worst_pair_gap,worst_min_gap,worst_norm_gap,ok\n"
       << hm.h0_dim << ",true," << format_double(lam_min) << ',' << format_double(lam_max) << ','
       << format_double(lc.c1) << ',' << format_double(lc.c2) << ',' << format_double(lc.c3)
       << ',' << format_double(lc.c4) << ',' << format_double(lc.c) << ',' << format_double(t)
       << ',' << samples << ',' << format_double(worst_pair_gap) << ','
       << format_double(worst_min_gap) << ',' << format_double(worst_norm_gap) << ','
       << bool_str(ok) << '\n';
  } else {
    os << "halmos model summary\n"
       << "  h0_dim: " << hm.h0_dim << '\n'
       << "  spectrum: [" << format_double(lam_min) << ", " << format_double(lam_max) << "]\n"
       << "  angle positive: true\n"
       << "  constants: c1 = " << format_double(lc.c1) << ", c2 = " << format_double(lc.c2)
       << ", c3 = " << format_double(lc.c3) << ", c4 = " << format_double(lc.c4)
       << ", c = " << format_double(lc.c) << '\n'
       << "  t = ||S|| ||S^-1||: " << format_double(t) << '\n'
       << "  sampled checks (" << samples << " pairs, seed " << seed << "):\n"
       << "    worst a_i - c_i m_sigma(i): " << format_double(worst_pair_gap) << '\n'
       << "    worst min a - c min m: " << format_double(worst_min_gap) << '\n'
       << "    worst min m - norm upper: " << format_double(worst_norm_gap) << '\n'
       << "    ok: " << bool_str(ok) << '\n';
  }
  Output{c.out_path, out}.write(os.str());
  return ok ? 0 : 1;
}

int cmd_scan(const std::string& spectrum_arg, const std::string& pairs_arg,
             const CommonOpts& c, std::ostream& out) {
  std::vector<double> spectrum;
  {
    std::istringstream ss(spectrum_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        spectrum.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ValidationError("scan: bad spectrum entry '" + tok + "'");
      }
    }
  }
  if (spectrum.empty()) throw ValidationError("scan: empty spectrum");
  RVector sp(static_cast<Index>(spectrum.size()));
  for (std::size_t i = 0; i < spectrum.size(); ++i) sp(static_cast<Index>(i)) = spectrum[i];

  std::vector<std::pair<int, int>> pairs;
  {
    std::istringstream ss(pairs_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ValidationError("scan: pair '" + tok + "' is not j:k");
      try {
        pairs.emplace_back(std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1)));
      } catch (const std::exception&) {
        throw ValidationError("scan: bad pair '" + tok + "'");
      }
    }
  }
  if (pairs.empty()) throw ValidationError("scan: no pairs requested");

  // Batch fan-out over row chunks; results land in index order regardless of
  // the thread count.
  const int threads = std::min<int>(env_threads(), static_cast<int>(pairs.size()));
  std::vector<ScanRow> rows(pairs.size());
  Tolerances tl;
  if (threads <= 1) {
    const std::vector<ScanRow> r = violation_scan(sp, pairs, tl);
    std::copy(r.begin(), r.end(), rows.begin());
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
          try {
            rows[i] = violation_scan(sp, {pairs[i]}, tl).front();
          } catch (...) {
            std::lock_guard<std::mutex> g(err_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::ostringstream os;
  os << "lambda_j,lambda_k,lhs,norm,ratio,paper_bound\n";
  bool finding = false;
  for (const ScanRow& r : rows) {
    os << format_double(r.lambda_j) << ',' << format_double(r.lambda_k) << ','
       << format_double(r.lhs) << ',' << format_double(r.norm) << ',' << format_double(r.ratio)
       << ',' << format_double(r.paper_bound) << '\n';
    if (r.lhs > r.norm + 10.0 * c.tol) finding = true;  // property (V) violated here
  }
  Output{c.out_path, out}.write(os.str());
  return finding ? 1 : 0;
}

int cmd_vprime(const CommonOpts& c, int trials, std::ostream& out) {
  const ProblemFile pf = load_problem(c.problem_path);
  const AlgebraModel model = build_model(pf.algebra, pf.tolerances);
  const std::uint64_t seed = c.seed ? *c.seed : pf.seed.value_or(0);
  const VPrimeEstimate est = vprime_estimate(model, trials, seed, norm_options(c, pf));

  std::ostringstream os;
  if (c.format == "csv") {
    os << "trial,lhs,norm_lower,norm_upper,ratio\n";
    for (const VPrimeTrial& r : est.rows)
      os << r.index << ',' << format_double(r.lhs) << ',' << format_double(r.norm_lower) << ','
         << format_double(r.norm_upper) << ',' << format_double(r.ratio) << '\n';
  } else {
    os << "vprime estimate for " << model.summary() << '\n'
       << "  trials: " << est.trials << " (seed " << est.seed << ")\n"
       << "  c_hat: " << format_double(est.c_hat) << '\n'
       << "  worst trial: " << est.worst_trial << '\n';
  }
  Output{c.out_path, out}.write(os.str());
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical laboratory for vector-functional norms and invariant "
               "subspace lattices"};
  app.require_subcommand(1);

  CommonOpts c;
  int closure_max_size = 256;
  int halmos_samples = 200;
  int vprime_trials = 100;
  std::string scan_spectrum, scan_pairs;

  auto add_common = [&](CLI::App* sub, bool with_problem) {
    if (with_problem)
      sub->add_option("problem", c.problem_path, "problem file (JSON)")->required();
    sub->add_option("--tol", c.tol, "solver tolerance");
    sub->add_option("--max-iter", c.max_iter, "iteration cap");
    sub->add_option("--out", c.out_path, "output file (default stdout)");
    sub->add_option("--format", c.format, "text or csv")
        ->check(CLI::IsMember({"text", "csv"}));
    sub->add_option("--seed", c.seed, "sampling seed (overrides the problem file)");
  };

  CLI::App* s_norm = app.add_subcommand("norm", "certified functional-norm bracket");
  add_common(s_norm, true);
  CLI::App* s_latdist = app.add_subcommand("latdist", "lattice-side minimax");
  add_common(s_latdist, true);
  CLI::App* s_vgap = app.add_subcommand("vgap", "property (V) gap report");
  add_common(s_vgap, true);
  CLI::App* s_witness = app.add_subcommand("witness", "constructive CSL witness");
  add_common(s_witness, true);
  CLI::App* s_closure = app.add_subcommand("closure", "lattice closure summary");
  add_common(s_closure, true);
  s_closure->add_option("--max-size", closure_max_size, "closure size guard");
  CLI::App* s_halmos = app.add_subcommand("halmos", "two-subspace model summary and checks");
  add_common(s_halmos, true);
  s_halmos->add_option("--samples", halmos_samples, "sampled pairs for the inequality checks");
  CLI::App* s_scan = app.add_subcommand("scan", "degenerate-angle violation scan (CSV)");
  add_common(s_scan, false);
  s_scan->add_option("--spectrum", scan_spectrum, "comma-separated B eigenvalues, descending")
      ->required();
  s_scan->add_option("--pairs", scan_pairs, "comma-separated j:k eigenvector index pairs")
      ->required();
  CLI::App* s_vprime = app.add_subcommand("vprime", "(V') constant estimate");
  add_common(s_vprime, true);
  s_vprime->add_option("--trials", vprime_trials, "number of sampled pairs");

  std::vector<const char*> argv;
  argv.push_back("vfnorm");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (s_norm->parsed()) return cmd_norm(c, out);
    if (s_latdist->parsed()) return cmd_latdist(c, out);
    if (s_vgap->parsed()) return cmd_vgap(c, out);
    if (s_witness->parsed()) return cmd_witness(c, out);
    if (s_closure->parsed()) return cmd_closure(c, closure_max_size, out);
    if (s_halmos->parsed()) return cmd_halmos(c, halmos_samples, out);
    if (s_scan->parsed()) return cmd_scan(scan_spectrum, scan_pairs, c, out);
    if (s_vprime->parsed()) return cmd_vprime(c, vprime_trials, out);
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace vfnorm::io
