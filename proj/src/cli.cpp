#include "cartanflow/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cartanflow/dynamics.hpp"
#include "cartanflow/errors.hpp"
#include "cartanflow/matrix_json.hpp"
#include "cartanflow/reduction.hpp"
#include "cartanflow/sampling.hpp"
#include "cartanflow/slice.hpp"
#include "cartanflow/spaces.hpp"

namespace cartanflow::cli {

namespace {

using nlohmann::json;

// Options shared by the per-space subcommands.
struct SpaceOptions {
  std::string kind;
  std::optional<int> m;
  std::optional<int> n;
};

void add_space_options(CLI::App* cmd, SpaceOptions& opts, bool class_required = true) {
  auto* cls = cmd->add_option("--class", opts.kind, "symmetric space class (aiii, bdi, cii, ai, aii, diii, ci, a2)");
  if (class_required) cls->required();
  cmd->add_option("--m", opts.m, "first size parameter (two-parameter classes)");
  cmd->add_option("--n", opts.n, "size parameter");
}

SymmetricSpace space_from(const SpaceOptions& opts) {
  const SpaceKind kind = parse_kind(opts.kind);
  if (!opts.n) throw ValidationError("--n is required");
  if (is_two_parameter(kind)) {
    if (!opts.m) throw ValidationError("--m is required for class " + opts.kind);
    return make_space(kind, *opts.m, *opts.n);
  }
  return make_space(kind, 0, *opts.n);
}

json meta_block(const std::string& command, const SymmetricSpace* space,
                std::optional<std::uint64_t> seed) {
  json meta{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}};
  if (space != nullptr) {
    meta["class"] = std::string(kind_name(space->kind()));
    meta["m"] = space->m();
    meta["n"] = space->n();
    meta["label"] = space->label();
  }
  if (seed) meta["seed"] = *seed;
  return meta;
}

// CSV metadata as "# key: value" lines ahead of the column header.
std::string csv_meta(const json& meta) {
  std::ostringstream os;
  for (const auto& [key, value] : meta.items()) {
    os << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
  return os.str();
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json vector_json(const Rvec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Rvec parse_vector(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string token = text.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size() || !std::isfinite(v)) {
      throw ValidationError("cannot parse number '" + token + "' in --q");
    }
    values.push_back(v);
    pos = comma + 1;
  }
  return Eigen::Map<Rvec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file_atomically(path, content);
  }
}

std::string rows_json(const json& j) { return j.dump(2) + "\n"; }

json root_json(const RestrictedRoot& root) {
  return {{"root", format_root(root)}, {"coeffs", root.coeffs}, {"multiplicity", root.multiplicity}};
}

json descriptor(const SymmetricSpace& space) {
  json roots = json::array();
  for (const auto& r : restricted_roots(space)) roots.push_back(root_json(r));
  return {{"class", std::string(kind_name(space.kind()))},
          {"m", space.m()},
          {"n", space.n()},
          {"label", space.label()},
          {"N", space.ambient_dim()},
          {"dim_p", space.dim_p()},
          {"real_rank", space.real_rank()},
          {"dim_M", static_cast<int>(space.basis(Subspace::m_centralizer).size())},
          {"positive_roots", roots}};
}

SymmetricSpace representative(SpaceKind kind) {
  return is_two_parameter(kind) ? make_space(kind, 3, 2) : make_space(kind, 0, 3);
}

std::string spaces_text(const std::vector<SymmetricSpace>& spaces) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "class" << std::setw(8) << "(m,n)" << std::setw(5) << "N"
     << std::setw(7) << "dim_p" << std::setw(6) << "rank" << std::setw(7) << "dim_M"
     << "positive roots (multiplicity)\n";
  for (const auto& s : spaces) {
    std::ostringstream size;
    if (is_two_parameter(s.kind())) {
      size << '(' << s.m() << ',' << s.n() << ')';
    } else {
      size << '(' << s.n() << ')';
    }
    std::ostringstream roots;
    bool first = true;
    for (const auto& r : restricted_roots(s)) {
      roots << (first ? "" : " ") << format_root(r) << '[' << r.multiplicity << ']';
      first = false;
    }
    os << std::setw(6) << kind_name(s.kind()) << std::setw(8) << size.str() << std::setw(5)
       << s.ambient_dim() << std::setw(7) << s.dim_p() << std::setw(6) << s.real_rank()
       << std::setw(7) << s.basis(Subspace::m_centralizer).size() << roots.str() << '\n';
  }
  return os.str();
}

struct ErrorReport {
  int code;
  const char* category;
  std::string message;
};

ErrorReport classify(std::exception_ptr ex) {
  try {
    std::rethrow_exception(ex);
  } catch (const ValidationError& e) {
    return {kExitValidation, "validation", e.what()};
  } catch (const ContractViolation& e) {
    return {kExitValidation, "validation", e.what()};
  } catch (const Unsupported& e) {
    return {kExitValidation, "unsupported", e.what()};
  } catch (const DegenerateError& e) {
    return {kExitValidation, "degenerate", e.what()};
  } catch (const ConsistencyError& e) {
    return {kExitConsistency, "consistency", e.what()};
  } catch (const std::exception& e) {
    return {kExitInternal, "internal", e.what()};
  }
}

void report(std::ostream& err, const char* category, const std::string& message) {
  err << json{{"error", category}, {"message", message}}.dump() << '\n';
}

}  // namespace

int resolve_threads(std::optional<int> flag_value) {
  int threads = 1;
  if (flag_value) {
    threads = *flag_value;
  } else if (const char* env = std::getenv("CARTANFLOW_THREADS"); env != nullptr && *env != '\0') {
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), threads);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ValidationError("CARTANFLOW_THREADS is not an integer: '" + text + "'");
    }
  }
  if (threads < 1) throw ValidationError("thread count must be >= 1, got " + std::to_string(threads));
  return threads;
}

void write_file_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw ValidationError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw ValidationError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level dynamics on classical noncompact symmetric spaces", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  // spaces list
  auto* spaces = app.add_subcommand("spaces", "catalog of symmetric spaces");
  spaces->require_subcommand(1);
  auto* list = spaces->add_subcommand("list", "list space descriptors");
  SpaceOptions list_space;
  std::string list_format = "json";
  int list_limit = 0;
  add_space_options(list, list_space, false);
  list->add_option("--format", list_format, "json or text")->check(CLI::IsMember({"json", "text"}));
  list->add_option("--limit", list_limit, "every space with m, n <= limit")->check(CLI::Range(1, 8));
  std::string list_out;
  list->add_option("--out", list_out, "output file (default stdout)");

  // decompose
  auto* decompose = app.add_subcommand("decompose", "radial decomposition X = k H(q) k^dagger");
  SpaceOptions dec_space;
  std::optional<std::uint64_t> dec_seed;
  std::string dec_input, dec_momentum, dec_out;
  bool dec_exact = false;
  add_space_options(decompose, dec_space);
  auto* seed_opt = decompose->add_option("--seed", dec_seed, "draw X (and Y) from this seed");
  auto* input_opt = decompose->add_option("--input", dec_input, "matrix file holding X");
  decompose->add_option("--momentum", dec_momentum, "matrix file holding Y (for --exact-slice)")
      ->needs(input_opt);
  seed_opt->excludes(input_opt);
  decompose->add_flag("--exact-slice", dec_exact, "canonicalize the slice point of (X, Y)");
  decompose->add_option("--out", dec_out, "output file (default stdout)");

  // density
  auto* density = app.add_subcommand("density", "radial density at a chamber point");
  SpaceOptions den_space;
  std::string den_q, den_method = "both", den_out;
  add_space_options(density, den_space);
  density->add_option("--q", den_q, "comma separated radial coordinates")->required();
  density->add_option("--method", den_method, "numeric, closed or both")
      ->check(CLI::IsMember({"numeric", "closed", "both"}));
  density->add_option("--out", den_out, "output file (default stdout)");

  // sample
  auto* sample = app.add_subcommand("sample", "histogram of radial coordinates of Gaussian samples");
  SpaceOptions smp_space;
  std::uint64_t smp_count = 100000, smp_seed = 7;
  int smp_bins = 64;
  std::optional<int> smp_threads;
  std::string smp_out;
  add_space_options(sample, smp_space);
  sample->add_option("--count", smp_count, "number of samples");
  sample->add_option("--bins", smp_bins, "bins per coordinate");
  sample->add_option("--seed", smp_seed, "root seed");
  sample->add_option("--threads", smp_threads, "worker threads (fallback CARTANFLOW_THREADS)");
  sample->add_option("--out", smp_out, "output CSV (default stdout)");

  // flow
  auto* flow = app.add_subcommand("flow", "reduced level dynamics from a random phase point");
  SpaceOptions flw_space;
  std::uint64_t flw_seed = 0;
  double flw_tmax = 1.0;
  int flw_steps = 1000;
  bool flw_compare = false;
  std::string flw_out;
  add_space_options(flow, flw_space);
  flow->add_option("--seed", flw_seed, "seed for the starting point (X, Y)")->required();
  flow->add_option("--t-max", flw_tmax, "final time");
  flow->add_option("--steps", flw_steps, "RK4 steps");
  flow->add_flag("--compare", flw_compare, "add the deviation from the direct flow X + tY");
  flow->add_option("--out", flw_out, "output CSV (default stdout)");

  // verify-density
  auto* verify = app.add_subcommand("verify-density", "density constant and Monte Carlo check");
  SpaceOptions ver_space;
  std::uint64_t ver_count = 100000, ver_seed = 7;
  int ver_bins = 64;
  std::optional<int> ver_threads;
  std::string ver_out;
  add_space_options(verify, ver_space);
  verify->add_option("--count", ver_count, "number of samples");
  verify->add_option("--bins", ver_bins, "histogram bins");
  verify->add_option("--seed", ver_seed, "root seed");
  verify->add_option("--threads", ver_threads, "worker threads (fallback CARTANFLOW_THREADS)");
  verify->add_option("--out", ver_out, "output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what());
    return kExitValidation;
  }

  try {
    if (*list) {
      std::vector<SymmetricSpace> chosen;
      if (!list_space.kind.empty()) {
        chosen.push_back(space_from(list_space));
      } else if (list_limit > 0) {
        chosen = enumerate_spaces(list_limit);
      } else {
        for (SpaceKind kind : kAllKinds) chosen.push_back(representative(kind));
      }
      if (list_format == "text") {
        emit(spaces_text(chosen), list_out, out);
      } else {
        json arr = json::array();
        for (const auto& s : chosen) arr.push_back(descriptor(s));
        emit(rows_json(arr), list_out, out);
      }
      return kExitOk;
    }

    if (*decompose) {
      const SymmetricSpace space = space_from(dec_space);
      if (!dec_seed && dec_input.empty()) throw ValidationError("decompose needs --seed or --input");
      Cmat x, y;
      if (dec_seed) {
        SplitMix64 rng(*dec_seed);
        x = random_p(space, rng);
        y = random_p(space, rng);
      } else {
        x = read_matrix_file(dec_input);
        if (!dec_momentum.empty()) y = read_matrix_file(dec_momentum);
      }
      const int dim = space.ambient_dim();
      if (x.rows() != dim || x.cols() != dim) {
        throw ValidationError("input matrix must be " + std::to_string(dim) + " x " + std::to_string(dim));
      }
      const RadialDecomposition rd = radial_decompose(space, x);
      const Cmat rebuilt = rd.k * space.radial_element(rd.q) * rd.k.adjoint();
      const double scale = std::max(frobenius_norm(x), kToleranceFloor);
      json j{{"meta", meta_block("decompose", &space, dec_seed)},
             {"q", vector_json(rd.q)},
             {"k", matrix_to_json(rd.k)},
             {"residual", frobenius_norm(rebuilt - x) / scale}};
      if (dec_exact) {
        if (y.size() == 0) throw ValidationError("--exact-slice with --input needs --momentum");
        if (y.rows() != dim || y.cols() != dim) throw ValidationError("momentum matrix has the wrong size");
        const PhaseReduction red = reduce_phase_point(space, x, y);
        const ExactSliceResult canon = exact_slice_reduce(space, red.slice);
        j["p"] = vector_json(canon.canonical.p);
        j["r_canonical"] = matrix_to_json(canon.canonical.r);
        j["generic"] = canon.generic;
        if (!canon.note.empty()) j["note"] = canon.note;
      }
      emit(rows_json(j), dec_out, out);
      return kExitOk;
    }

    if (*density) {
      const SymmetricSpace space = space_from(den_space);
      const Rvec q = parse_vector(den_q);
      if (q.size() != space.real_rank()) {
        throw ValidationError("--q needs " + std::to_string(space.real_rank()) + " values for " +
                              space.label());
      }
      if (!in_closed_chamber(space, q)) throw ValidationError("--q is outside the closed Weyl chamber");
      json j{{"meta", meta_block("density", &space, std::nullopt)}, {"q", vector_json(q)}};
      const bool numeric = den_method != "closed";
      const bool closed = den_method != "numeric";
      const double nv = numeric ? jacobian_density(space, q) : 0.0;
      const double cv = closed ? closed_form_density(space, q) : 0.0;
      if (numeric) j["numeric"] = nv;
      if (closed) j["closed"] = cv;
      if (numeric && closed) j["ratio"] = cv != 0.0 ? json(nv / cv) : json(nullptr);
      j["constant"] = density_constant(space);
      emit(rows_json(j), den_out, out);
      return kExitOk;
    }

    if (*sample) {
      const SymmetricSpace space = space_from(smp_space);
      const int threads = resolve_threads(smp_threads);
      if (smp_count < 1) throw ValidationError("--count must be >= 1");
      if (smp_bins < 2) throw ValidationError("--bins must be >= 2");
      const RadialHistogram hist = radial_histogram(space, smp_count, smp_bins, smp_seed, threads);
      const int rank = space.real_rank();
      json meta = meta_block("sample", &space, smp_seed);
      meta["count"] = smp_count;
      meta["bins"] = smp_bins;
      meta["clamped"] = hist.clamped;
      if (rank > 1) meta["theoretical_density"] = "marginals not computed for real rank > 1";
      std::ostringstream os;
      os << csv_meta(meta) << "bin_lo,bin_hi,count,empirical_density,theoretical_density\n";
      for (int c = 0; c < rank; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        if (rank > 1) os << "# coordinate " << c + 1 << '\n';
        double cdf_lo = rank == 1 ? theoretical_cdf(space, hist.edges[cc].front()) : 0.0;
        for (int b = 0; b < smp_bins; ++b) {
          const auto bb = static_cast<std::size_t>(b);
          const double lo = hist.edges[cc][bb], hi = hist.edges[cc][bb + 1];
          double theory = std::nan("");
          if (rank == 1) {
            const double cdf_hi = theoretical_cdf(space, hi);
            theory = (cdf_hi - cdf_lo) / (hi - lo);
            cdf_lo = cdf_hi;
          }
          os << format_double(lo) << ',' << format_double(hi) << ',' << hist.counts[cc][bb] << ','
             << format_double(hist.empirical_density(cc, bb)) << ',' << format_double(theory) << '\n';
        }
      }
      emit(os.str(), smp_out, out);
      return kExitOk;
    }

    if (*flow) {
      const SymmetricSpace space = space_from(flw_space);
      if (flw_steps < 1) throw ValidationError("--steps must be >= 1");
      if (!(flw_tmax > 0.0) || !std::isfinite(flw_tmax)) throw ValidationError("--t-max must be positive");
      SplitMix64 rng(flw_seed);
      const Cmat x = random_p(space, rng);
      const Cmat y = random_p(space, rng);
      OracleReport rep;
      if (flw_compare) {
        rep = compare_with_oracle(space, {x, y}, flw_tmax, flw_steps);
      } else {
        const PhaseReduction red = reduce_phase_point(space, x, y);
        rep.reduced = integrate_reduced(space, reduced_state_from_slice(space, red.slice), flw_tmax, flw_steps);
        rep.truncated = rep.reduced.aborted;
        rep.reason = rep.reduced.abort_reason;
      }
      const Trajectory& traj = rep.reduced;
      const int rank = space.real_rank();
      const int dim = space.ambient_dim();
      json meta = meta_block("flow", &space, flw_seed);
      meta["t_max"] = flw_tmax;
      meta["steps"] = flw_steps;
      meta["status"] = rep.truncated ? "truncated: " + rep.reason : std::string("complete");
      if (flw_compare) meta["max_deviation"] = rep.max_deviation;
      std::ostringstream os;
      os << csv_meta(meta) << 't';
      for (int i = 1; i <= rank; ++i) os << ",q_" << i;
      os << ",H";
      for (int i = 1; i <= dim; ++i) os << ",l_spec_" << i;
      if (flw_compare) os << ",deviation";
      os << '\n';
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]);
        for (int c = 0; c < rank; ++c) os << ',' << format_double(traj.states[i].q(c));
        os << ',' << format_double(traj.energy[i]);
        for (int c = 0; c < dim; ++c) os << ',' << format_double(traj.spectrum[i](c));
        if (flw_compare) os << ',' << format_double(rep.deviation[i]);
        os << '\n';
      }
      emit(os.str(), flw_out, out);
      if (rep.truncated) report(err, "warning", "trajectory truncated: " + rep.reason);
      return kExitOk;
    }

    if (*verify) {
      const SymmetricSpace space = space_from(ver_space);
      const int threads = resolve_threads(ver_threads);
      json j{{"meta", meta_block("verify-density", &space, ver_seed)}};
      bool constant_ok = true;
      try {
        j["constant"] = density_constant(space);
      } catch (const ConsistencyError& e) {
        constant_ok = false;
        j["constant"] = nullptr;
        j["constant_error"] = e.what();
      }
      j["constant_ratio_ok"] = constant_ok;
      bool pass = constant_ok;
      if (space.real_rank() == 1) {
        const RadialHistogram hist = radial_histogram(space, ver_count, ver_bins, ver_seed, threads);
        const KsReport ks = ks_test(space, hist);
        j["ks_statistic"] = ks.statistic;
        j["threshold"] = ks.threshold;
        pass = pass && ks.pass;
      } else {
        j["ks_statistic"] = nullptr;
        j["threshold"] = nullptr;
        j["note"] = "KS comparison is available for real rank one only";
      }
      j["pass"] = pass;
      emit(rows_json(j), ver_out, out);
      if (!constant_ok) {
        report(err, "consistency", "density ratio is not constant for " + space.label());
        return kExitConsistency;
      }
      return kExitOk;
    }
  } catch (...) {
    const ErrorReport r = classify(std::current_exception());
    report(err, r.category, r.message);
    return r.code;
  }
  report(err, "usage", "no subcommand given");
  return kExitValidation;
}

}  // namespace cartanflow::cli
