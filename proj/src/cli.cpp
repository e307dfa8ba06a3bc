#include "oqrw/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oqrw/asymptotics.hpp"
#include "oqrw/fourier.hpp"
#include "oqrw/models.hpp"
#include "oqrw/walk.hpp"

namespace oqrw::cli {

namespace {

using nlohmann::json;

// Domain refusal (exit 1) as opposed to I/O and schema trouble (exit 2).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string model;
  std::string out_path;
  std::string format;
  int steps = 1;
  int traj = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int grid = 0;
  std::vector<double> t;
  int threads = 1;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vector& v, char sep = ',') {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += fmt(v[i]);
  }
  return s;
}

json matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json block_operator_json(const std::vector<std::string>& vertices, const BlockOperator& x) {
  json out;
  for (std::size_t u = 0; u < vertices.size(); ++u) {
    json rows = json::array();
    const Matrix& b = x.blocks[u];
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c)
        row.push_back(json::array({b(r, c).real(), b(r, c).imag()}));
      rows.push_back(std::move(row));
    }
    out[vertices[u]] = std::move(rows);
  }
  return out;
}

json violations_json(const std::vector<Violation>& vs) {
  json out = json::array();
  for (const auto& v : vs) {
    out.push_back({{"severity", v.severity == Violation::Severity::error ? "error" : "warning"},
                   {"subject", v.subject},
                   {"message", v.message}});
  }
  return out;
}

ModelSpec resolve_model(const RunConfig& cfg, const Tolerances& tol) {
  if (is_builtin_model(cfg.model)) return builtin_model(cfg.model, tol);
  return load_model(cfg.model, tol);
}

// Lattice and Kraus validation shared by all analysis commands.
void require_valid(const ModelSpec& spec, const Tolerances& tol) {
  auto vs = validate_lattice(*spec.lattice, tol);
  const auto kv = validate_kraus(spec.kraus, tol);
  vs.insert(vs.end(), kv.begin(), kv.end());
  if (has_errors(vs)) {
    std::string msg = "model fails validation:";
    for (const auto& v : vs)
      if (v.severity == Violation::Severity::error) msg += "\n  " + v.subject + ": " + v.message;
    throw DomainError(msg);
  }
  const double tr = spec.initial_block.trace().real();
  if (std::abs(tr - 1.0) > 1e-9)
    throw DomainError("initial state trace is " + std::to_string(tr) + ", expected 1");
}

struct OutputFile {
  std::ofstream file;
  std::ostream* stream;

  OutputFile(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream = &fallback;
    } else {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      stream = &file;
    }
  }
  std::ostream& os() { return *stream; }
};

void csv_header(std::ostream& os, const ModelSpec& spec, const std::string& seed, int n) {
  os << "# model=" << spec.name << " seed=" << seed << " n=" << n << " version=" << kVersion
     << "\n";
}

int cmd_validate(const RunConfig& cfg, const Tolerances& tol, std::ostream& out,
                 std::ostream& err) {
  const ModelSpec spec = resolve_model(cfg, tol);
  auto vs = validate_lattice(*spec.lattice, tol);
  const auto kv = validate_kraus(spec.kraus, tol);
  vs.insert(vs.end(), kv.begin(), kv.end());
  err << violations_json(vs).dump(2) << "\n";
  if (has_errors(vs)) return 1;
  out << "ok: " << spec.name << " passes lattice and Kraus validation\n";
  return 0;
}

int cmd_clt(const RunConfig& cfg, const Tolerances& tol, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = resolve_model(cfg, tol);
  require_valid(spec, tol);
  const InvariantStateReport report = invariant_state(spec.kraus, tol);
  if (!report.unique) {
    err << "hypothesis (H) violated: invariant state multiplicity "
        << report.eigenvalue_one_multiplicity << "\n";
    return 1;
  }
  const CltParameters params = compute_clt_parameters(spec.kraus, report, tol);

  OutputFile dest(cfg.out_path, out);
  if (cfg.format == "csv") {
    csv_header(dest.os(), spec, "-", 0);
    const int d = spec.lattice->dimension();
    for (int i = 0; i < d; ++i) dest.os() << fmt_vec(params.covariance.row(i)) << "\n";
    return 0;
  }
  json j;
  j["model"] = spec.name;
  j["version"] = kVersion;
  j["unique"] = report.unique;
  j["multiplicity"] = report.eigenvalue_one_multiplicity;
  j["invariant_residual"] = report.residual;
  j["rho_inf"] = block_operator_json(spec.lattice->base().vertices, report.state);
  json mean = json::array();
  for (int i = 0; i < params.mean.size(); ++i) mean.push_back(params.mean[i]);
  j["mean"] = std::move(mean);
  j["covariance"] = matrix_json(params.covariance);
  json ls = json::array();
  for (const auto& L : params.L_basis)
    ls.push_back(block_operator_json(spec.lattice->base().vertices, L));
  j["L_basis"] = std::move(ls);
  j["L_residual_max"] = params.max_operator_residual;
  j["covariance_asymmetry"] = params.covariance_asymmetry;
  j["gamma_crosscheck_max_error"] = params.gamma_crosscheck_max_error;
  dest.os() << j.dump(2) << "\n";
  return 0;
}

int cmd_evolve(const RunConfig& cfg, const Tolerances& tol, std::ostream& out, std::ostream&) {
  const ModelSpec spec = resolve_model(cfg, tol);
  require_valid(spec, tol);
  LatticeState s = spec.initial_state();
  for (int i = 0; i < cfg.steps; ++i) s = oqrw_step(spec.kraus, s, tol);

  OutputFile dest(cfg.out_path, out);
  csv_header(dest.os(), spec, "-", cfg.steps);
  const int d = spec.lattice->dimension();
  for (int i = 0; i < d; ++i) dest.os() << "x" << i << ",";
  for (int i = 0; i < d; ++i) dest.os() << "pos" << i << ",";
  dest.os() << "probability\n";
  for (const auto& [x, p] : distribution(s)) {
    for (int i = 0; i < d; ++i) dest.os() << x[i] << ",";
    dest.os() << fmt_vec(embed(*spec.lattice, x)) << "," << fmt(p) << "\n";
  }
  return 0;
}

int cmd_sample(const RunConfig& cfg, const Tolerances& tol, std::ostream& out, std::ostream&) {
  const ModelSpec spec = resolve_model(cfg, tol);
  require_valid(spec, tol);

  SampleOptions opts;
  opts.threads = cfg.threads;
  const TrajectoryBatch batch =
      sample_trajectories(spec.kraus, spec.initial_block, spec.initial_site, cfg.steps, cfg.traj,
                          cfg.seed, opts, tol);

  if (cfg.out_path.empty()) throw std::runtime_error("sample requires --out");
  OutputFile dest(cfg.out_path, out);
  const std::string seed_str = std::to_string(cfg.seed);
  csv_header(dest.os(), spec, seed_str, cfg.steps);
  const int d = spec.lattice->dimension();
  dest.os() << "trajectory,";
  for (int i = 0; i < d; ++i) dest.os() << "x" << i << ",";
  for (int i = 0; i < d; ++i) dest.os() << "pos" << i << (i + 1 < d ? "," : "\n");
  RealMatrix positions(batch.final_coords.size(), d);
  for (std::size_t t = 0; t < batch.final_coords.size(); ++t) {
    const Vector pos = embed(*spec.lattice, batch.final_coords[t]);
    positions.row(t) = pos.transpose();
    dest.os() << t << ",";
    for (int i = 0; i < d; ++i) dest.os() << batch.final_coords[t][i] << ",";
    dest.os() << fmt_vec(pos) << "\n";
  }

  const Vector mean = positions.colwise().mean();
  RealMatrix centered = positions.rowwise() - mean.transpose();
  const double denom = positions.rows() > 1 ? positions.rows() - 1.0 : 1.0;
  const RealMatrix cov = (centered.transpose() * centered) / denom;

  json summary;
  summary["model"] = spec.name;
  summary["version"] = kVersion;
  summary["n"] = cfg.steps;
  summary["trajectories"] = cfg.traj;
  summary["seed"] = cfg.seed;
  json m = json::array();
  for (int i = 0; i < d; ++i) m.push_back(mean[i]);
  summary["empirical_mean"] = std::move(m);
  summary["empirical_cov"] = matrix_json(cov);
  summary["pruned_mass"] = 0.0;

  std::ofstream sf(cfg.out_path + ".summary.json");
  if (!sf) throw std::runtime_error("cannot open output file: " + cfg.out_path + ".summary.json");
  sf << summary.dump(2) << "\n";
  out << summary.dump(2) << "\n";
  return 0;
}

int cmd_dual(const RunConfig& cfg, const Tolerances& tol, std::ostream& out, std::ostream&) {
  const ModelSpec spec = resolve_model(cfg, tol);
  require_valid(spec, tol);
  const int N = cfg.grid > 0 ? cfg.grid : 8;
  const MomentumGrid grid{N};
  const LatticeState initial = spec.initial_state();

  OutputFile dest(cfg.out_path, out);
  csv_header(dest.os(), spec, "-", cfg.steps);
  const int d = spec.lattice->dimension();
  for (int i = 0; i < d; ++i) dest.os() << "k" << i << ",";
  dest.os() << "re,im\n";
  for (const Vector& k : grid.nodes(*spec.lattice)) {
    const Complex v = characteristic_function(spec.kraus, initial, k, cfg.steps);
    dest.os() << fmt_vec(k) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
  }
  return 0;
}

int cmd_invert(const RunConfig& cfg, const Tolerances& tol, std::ostream& out, std::ostream&) {
  const ModelSpec spec = resolve_model(cfg, tol);
  require_valid(spec, tol);
  const int N = cfg.grid > 0 ? cfg.grid : 2 * cfg.steps + 2;
  const MomentumGrid grid{N};
  std::map<LatticeCoord, double> p;
  try {
    p = invert(spec.kraus, spec.initial_state(), cfg.steps, grid, tol, nullptr, cfg.threads);
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).rfind("aliasing", 0) == 0) throw DomainError(e.what());
    throw;
  }

  OutputFile dest(cfg.out_path, out);
  csv_header(dest.os(), spec, "-", cfg.steps);
  const int d = spec.lattice->dimension();
  for (int i = 0; i < d; ++i) dest.os() << "x" << i << ",";
  for (int i = 0; i < d; ++i) dest.os() << "pos" << i << ",";
  dest.os() << "probability\n";
  for (const auto& [x, prob] : p) {
    for (int i = 0; i < d; ++i) dest.os() << x[i] << ",";
    dest.os() << fmt_vec(embed(*spec.lattice, x)) << "," << fmt(prob) << "\n";
  }
  return 0;
}

int cmd_cf_limit(const RunConfig& cfg, const Tolerances& tol, std::ostream& out, std::ostream&) {
  const ModelSpec spec = resolve_model(cfg, tol);
  require_valid(spec, tol);
  const int d = spec.lattice->dimension();
  if (static_cast<int>(cfg.t.size()) != d)
    throw DomainError("--t needs " + std::to_string(d) + " components");
  Vector t(d);
  for (int i = 0; i < d; ++i) t[i] = cfg.t[i];

  // Gaussian target from the CLT parameters; refuses when (H) fails.
  const InvariantStateReport report = invariant_state(spec.kraus, tol);
  if (!report.unique)
    throw DomainError("hypothesis (H) violated: invariant state multiplicity " +
                      std::to_string(report.eigenvalue_one_multiplicity));
  const CltParameters params = compute_clt_parameters(spec.kraus, report, tol);
  const double target = std::exp(-0.5 * t.dot(params.covariance * t));

  const LatticeState initial = spec.initial_state();
  OutputFile dest(cfg.out_path, out);
  csv_header(dest.os(), spec, "-", cfg.steps);
  dest.os() << "n,";
  for (int i = 0; i < d; ++i) dest.os() << "t" << i << ",";
  dest.os() << "re_scaled_cf,target,abs_error\n";
  for (int n = 100; n <= cfg.steps; n *= 10) {
    const Complex v = scaled_cf_limit_probe(spec.kraus, initial, t, n);
    dest.os() << n << "," << fmt_vec(t) << "," << fmt(v.real()) << "," << fmt(target) << ","
              << fmt(std::abs(v.real() - target)) << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"open quantum random walks on crystal lattices"};
  app.require_subcommand(1);

  RunConfig cfg;
  const Tolerances tol = Tolerances::from_env();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "model name or JSON file path")->required();
    sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
    sub->add_option("--threads", cfg.threads, "worker threads");
  };

  CLI::App* validate = app.add_subcommand("validate", "check lattice and Kraus invariants");
  add_common(validate);

  CLI::App* clt = app.add_subcommand("clt", "mean, covariance and L operators of the CLT");
  add_common(clt);
  clt->add_option("--format", cfg.format, "json|csv");

  CLI::App* evolve = app.add_subcommand("evolve", "exact distribution after n steps");
  add_common(evolve);
  evolve->add_option("--steps", cfg.steps, "number of steps");

  CLI::App* sample = app.add_subcommand("sample", "Monte Carlo trajectory sampling");
  add_common(sample);
  sample->add_option("--steps", cfg.steps, "number of steps");
  sample->add_option("--traj", cfg.traj, "number of trajectories");
  sample->add_option("--seed", cfg.seed, "root RNG seed");

  CLI::App* dual = app.add_subcommand("dual", "characteristic function over a momentum grid");
  add_common(dual);
  dual->add_option("--steps", cfg.steps, "number of steps");
  dual->add_option("--grid", cfg.grid, "grid points per dimension");

  CLI::App* inv = app.add_subcommand("invert", "Fourier inversion of the dual process");
  add_common(inv);
  inv->add_option("--steps", cfg.steps, "number of steps");
  inv->add_option("--grid", cfg.grid, "grid points per dimension (default 2n+2)");

  CLI::App* cf = app.add_subcommand("cf-limit", "scaled characteristic function vs Gaussian limit");
  add_common(cf);
  cf->add_option("--steps", cfg.steps, "largest probe n")->default_val(10000);
  cf->add_option("--t", cfg.t, "probe direction, comma separated")->delimiter(',')->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  cfg.seed_given = sample->count("--seed") > 0;
  if (!cfg.seed_given && sample->parsed()) cfg.seed = std::random_device{}();
  if (cfg.format.empty()) cfg.format = "json";

  try {
    if (validate->parsed()) return cmd_validate(cfg, tol, out, err);
    if (clt->parsed()) return cmd_clt(cfg, tol, out, err);
    if (evolve->parsed()) return cmd_evolve(cfg, tol, out, err);
    if (sample->parsed()) return cmd_sample(cfg, tol, out, err);
    if (dual->parsed()) return cmd_dual(cfg, tol, out, err);
    if (inv->parsed()) return cmd_invert(cfg, tol, out, err);
    if (cf->parsed()) return cmd_cf_limit(cfg, tol, out, err);
  } catch (const DomainError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 2;
  }
  err << "no command given\n";
  return 2;
}

}  // namespace oqrw::cli
