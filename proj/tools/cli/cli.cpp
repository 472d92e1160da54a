#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdsense/crowdsense.hpp"

namespace crowdsense::cli {

namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
  bool strict = false;
  bool header = false;
};

void add_common(CLI::App* sub, Common& c, bool with_input) {
  sub->add_option("--seed", c.seed, "Seed for every random stream")->capture_default_str();
  if (with_input) {
    sub->add_option("-i,--input", c.input, "Data directory or matrix CSV")->required();
  }
  sub->add_option("-o,--output", c.output, "Output path (stdout when omitted)");
  sub->add_flag("--strict", c.strict, "Exit with status 2 when the solver does not converge");
  sub->add_flag("--header", c.header, "Matrix CSV files carry a header line");
}

struct SolverFlags {
  double lambda = 0.0;
  double mu0 = 0.0;
  double mu_max = 0.0;
  SolverConfig config;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* mu0_opt = nullptr;
  CLI::Option* mu_max_opt = nullptr;
};

void add_solver_flags(CLI::App* sub, SolverFlags& f) {
  f.lambda_opt = sub->add_option("--lambda", f.lambda, "Sparsity weight (default 1/sqrt(max(m, n)))");
  f.mu0_opt = sub->add_option("--mu0", f.mu0, "Initial penalty (default 1.25/sigma_max)");
  sub->add_option("--rho", f.config.rho, "Penalty adjustment factor")->capture_default_str();
  f.mu_max_opt = sub->add_option("--mu-max", f.mu_max, "Penalty cap (default 1e7 * mu0)");
  sub->add_option("--tol", f.config.tol, "Relative residual tolerance")->capture_default_str();
  sub->add_option("--max-iters", f.config.max_iters, "Iteration budget")->capture_default_str();
}

RecoveryProblem make_problem(const SolverFlags& f, Matrix y) {
  RecoveryProblem p;
  p.y = std::move(y);
  p.config = f.config;
  if (f.lambda_opt->count() > 0) p.lambda = f.lambda;
  if (f.mu0_opt->count() > 0) p.config.mu0 = f.mu0;
  if (f.mu_max_opt->count() > 0) p.config.mu_max = f.mu_max;
  return p;
}

void record_solver_flags(RunReport& r, const SolverFlags& f) {
  if (f.lambda_opt->count() > 0) r.parameters["lambda"] = format_double(f.lambda);
  if (f.mu0_opt->count() > 0) r.parameters["mu0"] = format_double(f.mu0);
  if (f.mu_max_opt->count() > 0) r.parameters["mu_max"] = format_double(f.mu_max);
  r.parameters["rho"] = format_double(f.config.rho);
  r.parameters["tol"] = format_double(f.config.tol);
  r.parameters["max_iters"] = std::to_string(f.config.max_iters);
}

RunReport new_report(const std::string& command, const Common& c) {
  RunReport r;
  r.command = command;
  r.seed = c.seed;
  if (!c.input.empty()) r.parameters["input"] = c.input;
  if (c.strict) r.parameters["strict"] = "true";
  if (c.header) r.parameters["header"] = "true";
  return r;
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int finish(const RunReport& report, const Common& c, std::ostream& out, std::ostream& err) {
  if (c.output.empty()) {
    out << to_json(report) << '\n';
  } else {
    write_report(c.output, report);
    out << report.command << ": wrote " << c.output << '\n';
  }
  if (!report.converged) {
    err << report.command << ": solver did not converge\n";
    if (c.strict) return kExitNotConverged;
  }
  return kExitOk;
}

// ---- matrix inputs ---------------------------------------------------------

struct Loaded {
  CsvMatrix data;
  std::optional<Mask> mask_file;
  std::optional<Matrix> truth_x;
  std::optional<Matrix> truth_a;
};

Loaded load_input(const Common& c, const std::string& mask_path) {
  const fs::path in(c.input);
  if (!fs::exists(in)) throw ValidationError("input '" + c.input + "' does not exist");
  Loaded l;
  if (fs::is_directory(in)) {
    l.data = read_matrix_csv(in / "observed.csv", c.header);
    if (fs::exists(in / "mask.csv")) l.mask_file = read_mask_csv(in / "mask.csv");
    if (fs::exists(in / "truth_x.csv")) l.truth_x = read_matrix_csv(in / "truth_x.csv", c.header).values;
    if (fs::exists(in / "truth_a.csv")) l.truth_a = read_matrix_csv(in / "truth_a.csv", c.header).values;
  } else {
    l.data = read_matrix_csv(in, c.header);
  }
  if (!mask_path.empty()) l.mask_file = read_mask_csv(mask_path);

  const auto rows = static_cast<std::size_t>(l.data.values.rows());
  const auto cols = static_cast<std::size_t>(l.data.values.cols());
  auto same_shape = [&](const Matrix& m) {
    return static_cast<std::size_t>(m.rows()) == rows && static_cast<std::size_t>(m.cols()) == cols;
  };
  if (l.mask_file && (l.mask_file->rows() != rows || l.mask_file->cols() != cols)) {
    throw DimensionError("mask shape does not match the data");
  }
  if ((l.truth_x && !same_shape(*l.truth_x)) || (l.truth_a && !same_shape(*l.truth_a))) {
    throw DimensionError("ground truth shape does not match the data");
  }
  return l;
}

// The mask file wins over empty cells, but it may not claim an empty cell.
Mask effective_mask(const Loaded& l) {
  if (!l.mask_file) return l.data.observed;
  for (const auto& idx : l.mask_file->indices()) {
    if (!l.data.observed.contains(idx.row, idx.col)) {
      throw ValidationError("mask marks an empty cell as observed");
    }
  }
  return *l.mask_file;
}

void write_matrix_if(const std::string& path, const Matrix& m, bool header) {
  if (!path.empty()) write_matrix_csv(fs::path(path), m, std::nullopt, header);
}

void add_recovery_metrics(RunReport& r, const RecoveryResult& res, double wall_ms) {
  r.converged = res.converged;
  r.metrics["iterations"] = res.iterations;
  r.metrics["residual"] = res.final_residual;
  r.metrics["stationarity"] =
      res.stationarity_history.empty() ? 0.0 : res.stationarity_history.back();
  r.metrics["rank"] = res.rank_estimate;
  r.metrics["sparsity"] = static_cast<double>(res.sparsity_estimate);
  r.metrics["lambda"] = res.lambda;
  r.metrics["objective"] = rpca_objective(res.x, res.a, res.lambda);
  r.metrics["wall_time_ms"] = wall_ms;
  r.histories["residual"] = res.residual_history;
  r.histories["stationarity"] = res.stationarity_history;
}

// ---- subcommands -----------------------------------------------------------

struct GenerateArgs {
  Common common;
  ScenarioSpec spec;
};

int cmd_generate(GenerateArgs& a, std::ostream& out) {
  if (a.common.output.empty()) throw ValidationError("generate needs -o <directory>");
  a.spec.seed = a.common.seed;
  const Dataset ds = generate_traffic(a.spec);
  const fs::path dir(a.common.output);
  fs::create_directories(dir);
  const bool h = a.common.header;
  write_matrix_csv(dir / "observed.csv", ds.observed, ds.mask, h);
  write_mask_csv(dir / "mask.csv", ds.mask);
  write_matrix_csv(dir / "truth_x.csv", ds.ground_truth_x, std::nullopt, h);
  write_matrix_csv(dir / "truth_a.csv", ds.ground_truth_a, std::nullopt, h);

  RunReport r = new_report("generate", a.common);
  r.parameters["rows"] = std::to_string(a.spec.rows);
  r.parameters["cols"] = std::to_string(a.spec.cols);
  r.parameters["rank"] = std::to_string(a.spec.rank);
  r.parameters["anomaly_frac"] = format_double(a.spec.anomaly_frac);
  r.parameters["noise_sigma"] = format_double(a.spec.noise_sigma);
  r.parameters["missing_frac"] = format_double(a.spec.missing_frac);
  r.parameters["anomaly_scale"] = format_double(a.spec.anomaly_scale);
  r.metrics["observed_count"] = static_cast<double>(ds.mask.observed_count());
  r.metrics["anomaly_count"] =
      static_cast<double>((ds.ground_truth_a.array() != 0.0).count());
  r.metrics["rank"] = numerical_rank(svd(ds.ground_truth_x).singular_values);
  write_report(dir / "scenario.json", r);
  out << "generate: wrote " << dir.string() << '\n';
  return kExitOk;
}

struct DenoiseArgs {
  Common common;
  double tau = 0.0;
  std::string x_out;
};

int cmd_pca_denoise(DenoiseArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.tau > 0.0)) throw ValidationError("--tau must be positive");
  const Loaded l = load_input(a.common, "");
  if (!l.data.observed.is_full()) throw ValidationError("pca-denoise needs a fully observed matrix");
  const Stopwatch clock;
  const auto [x, spectrum] = svt_with_spectrum(l.data.values, a.tau);
  const double wall = clock.elapsed_ms();

  RunReport r = new_report("pca-denoise", a.common);
  r.parameters["tau"] = format_double(a.tau);
  r.metrics["rank"] = numerical_rank(spectrum);
  r.metrics["nuclear_norm"] = spectrum.sum();
  r.metrics["wall_time_ms"] = wall;
  if (l.truth_x) r.metrics["relative_error"] = relative_error(x, *l.truth_x);
  write_matrix_if(a.x_out, x, a.common.header);
  return finish(r, a.common, out, err);
}

struct RecoveryArgs {
  Common common;
  SolverFlags solver;
  std::string mask_path;
  std::string x_out;
  std::string a_out;
};

int cmd_rpca(RecoveryArgs& a, std::ostream& out, std::ostream& err) {
  const Loaded l = load_input(a.common, "");
  if (!l.data.observed.is_full() || (l.mask_file && !l.mask_file->is_full())) {
    throw ValidationError("rpca needs a fully observed matrix; use 'complete' for missing entries");
  }
  const RecoveryProblem p = make_problem(a.solver, l.data.values);
  const Stopwatch clock;
  const RecoveryResult res = rpca(p);
  const double wall = clock.elapsed_ms();

  RunReport r = new_report("rpca", a.common);
  record_solver_flags(r, a.solver);
  add_recovery_metrics(r, res, wall);
  if (l.truth_x) r.metrics["relative_error"] = relative_error(res.x, *l.truth_x);
  if (l.truth_a) r.metrics["anomaly_f1"] = anomaly_f1(res.a, *l.truth_a);
  write_matrix_if(a.x_out, res.x, a.common.header);
  write_matrix_if(a.a_out, res.a, a.common.header);
  return finish(r, a.common, out, err);
}

int cmd_complete(RecoveryArgs& a, std::ostream& out, std::ostream& err) {
  const Loaded l = load_input(a.common, a.mask_path);
  RecoveryProblem p = make_problem(a.solver, l.data.values);
  const Mask mask = effective_mask(l);
  p.mask = mask;
  const Stopwatch clock;
  const RecoveryResult res = masked_rpca(p);
  const double wall = clock.elapsed_ms();

  RunReport r = new_report("complete", a.common);
  if (!a.mask_path.empty()) r.parameters["mask"] = a.mask_path;
  record_solver_flags(r, a.solver);
  add_recovery_metrics(r, res, wall);
  r.metrics["observed_count"] = static_cast<double>(mask.observed_count());
  if (l.truth_x) r.metrics["relative_error"] = relative_error(res.x, *l.truth_x);
  // Anomalies on dropped entries are invisible, so score against the observed part.
  if (l.truth_a) r.metrics["anomaly_f1"] = anomaly_f1(res.a, project_mask(*l.truth_a, mask));
  write_matrix_if(a.x_out, res.x, a.common.header);
  write_matrix_if(a.a_out, res.a, a.common.header);
  return finish(r, a.common, out, err);
}

struct FuseArgs {
  Common common;
  FusionExperimentSpec spec;
};

int cmd_fuse(FuseArgs& a, std::ostream& out, std::ostream& err) {
  a.spec.seed = a.common.seed;
  const Stopwatch clock;
  const FusionExperimentResult res = run_fusion_experiment(a.spec);
  const double wall = clock.elapsed_ms();

  RunReport r = new_report("fuse", a.common);
  r.parameters["trials"] = std::to_string(a.spec.trials);
  r.parameters["training"] = std::to_string(a.spec.training);
  r.parameters["rho"] = format_double(a.spec.rho);
  r.parameters["shift"] = format_double(a.spec.shift);
  r.metrics["auc_copula"] = res.auc_copula;
  r.metrics["auc_product"] = res.auc_product;
  r.metrics["auc_margin"] = res.auc_copula - res.auc_product;
  r.metrics["fitted_rho"] = res.fitted_rho;
  r.metrics["trials"] = static_cast<double>(res.trials);
  r.metrics["wall_time_ms"] = wall;
  return finish(r, a.common, out, err);
}

struct KernelArgs {
  Common common;
  std::size_t points = 200;
  std::string kernel = "gaussian";
  double bandwidth = 1.0;
  CLI::Option* bandwidth_opt = nullptr;
  int degree = 2;
  double offset = 0.0;
  double ridge = 1e-3;
};

int cmd_kernel(KernelArgs& a, std::ostream& out, std::ostream& err) {
  KernelSpec spec = KernelSpec::linear();
  if (a.kernel == "gaussian") {
    spec = a.bandwidth_opt->count() > 0 ? KernelSpec::gaussian(a.bandwidth)
                                        : KernelSpec::gaussian_auto();
  } else if (a.kernel == "polynomial") {
    spec = KernelSpec::polynomial(a.degree, a.offset);
  }
  spec.validate();

  const auto [train_x, train_y] = make_circle_annulus(a.points, a.common.seed);
  const auto [test_x, test_y] = make_circle_annulus(a.points, a.common.seed + 1);
  const Stopwatch clock;
  const KernelModel model = krr_train(spec, train_x, train_y, a.ridge);
  const double wall = clock.elapsed_ms();
  const Matrix g = gram(model.spec, train_x);

  RunReport r = new_report("kernel", a.common);
  r.parameters["points"] = std::to_string(a.points);
  r.parameters["kernel"] = a.kernel;
  r.parameters["ridge"] = format_double(a.ridge);
  if (spec.kind == KernelKind::kPolynomial) {
    r.parameters["degree"] = std::to_string(a.degree);
    r.parameters["offset"] = format_double(a.offset);
  }
  if (model.spec.bandwidth) r.metrics["bandwidth"] = *model.spec.bandwidth;
  r.metrics["train_accuracy"] = krr_accuracy(model, train_x, train_y);
  r.metrics["test_accuracy"] = krr_accuracy(model, test_x, test_y);
  r.metrics["best_line_accuracy"] = best_line_accuracy(train_x, train_y);
  r.metrics["gram_min_eigenvalue"] = min_eigenvalue(g);
  r.metrics["gram_trace"] = g.trace();
  r.metrics["fallback_solver"] = model.used_fallback_solver ? 1.0 : 0.0;
  r.metrics["wall_time_ms"] = wall;
  return finish(r, a.common, out, err);
}

struct ConsensusArgs {
  Common common;
  std::string topology;
  std::string mode;
  std::string objective = "quadratic";
  std::vector<double> targets;
  std::size_t agents = 0;
  std::size_t dim = 1;
  ConsensusConfig config;
};

int cmd_consensus(ConsensusArgs& a, std::ostream& out, std::ostream& err) {
  if (a.dim == 0) throw ValidationError("--dim must be positive");
  std::optional<Topology> topo;
  if (!a.topology.empty()) {
    topo = read_edge_list(a.topology, a.agents > 0 ? std::optional(a.agents) : std::nullopt);
  }
  std::size_t agents = a.agents;
  if (topo) agents = topo->agent_count();
  if (!a.targets.empty()) {
    if (a.dim != 1) throw ValidationError("--targets gives scalar targets; drop --dim");
    if (agents != 0 && agents != a.targets.size()) {
      throw DimensionError("--targets length does not match the agent count");
    }
    agents = a.targets.size();
  }
  if (agents == 0) agents = 8;
  std::string mode = a.mode.empty() ? (topo ? "decentralized" : "central") : a.mode;

  std::vector<LocalObjective> objectives;
  Vector optimum = Vector::Zero(static_cast<Eigen::Index>(a.dim));
  Rng rng(a.common.seed, "consensus-objectives");
  const auto d = static_cast<Eigen::Index>(a.dim);
  if (a.objective == "quadratic") {
    for (std::size_t i = 0; i < agents; ++i) {
      Vector t(d);
      if (!a.targets.empty()) {
        t[0] = a.targets[i];
      } else {
        for (Eigen::Index k = 0; k < d; ++k) t[k] = rng.normal(0.0, 3.0);
      }
      optimum += t;
      objectives.push_back(quadratic_objective(t));
    }
    optimum /= static_cast<double>(agents);
  } else {
    if (!a.targets.empty()) throw ValidationError("--targets applies to quadratic objectives");
    Matrix normal = Matrix::Zero(d, d);
    Vector rhs = Vector::Zero(d);
    for (std::size_t i = 0; i < agents; ++i) {
      Matrix m(d + 2, d);
      Vector b(d + 2);
      for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = rng.normal();
      for (Eigen::Index k = 0; k < b.size(); ++k) b[k] = rng.normal();
      normal += m.transpose() * m;
      rhs += m.transpose() * b;
      objectives.push_back(least_squares_objective(m, b));
    }
    optimum = normal.ldlt().solve(rhs);
  }

  const Stopwatch clock;
  ConsensusResult res;
  if (mode == "central") {
    res = admm_central(objectives, a.dim, a.config);
  } else {
    if (!topo) topo = Topology::complete(agents);
    res = admm_decentralized(objectives, *topo, a.dim, a.config);
  }
  const double wall = clock.elapsed_ms();

  RunReport r = new_report("consensus", a.common);
  if (!a.topology.empty()) r.parameters["topology"] = a.topology;
  r.parameters["mode"] = mode;
  r.parameters["objective"] = a.objective;
  r.parameters["agents"] = std::to_string(agents);
  r.parameters["dim"] = std::to_string(a.dim);
  r.parameters["mu"] = format_double(a.config.mu);
  r.parameters["max_rounds"] = std::to_string(a.config.max_rounds);
  r.parameters["tol"] = format_double(a.config.tol);
  r.converged = res.converged;
  r.metrics["rounds"] = res.rounds;
  r.metrics["primal_residual"] = res.primal_residual_history.back();
  r.metrics["dual_residual"] = res.dual_residual_history.back();
  r.metrics["optimum_deviation"] =
      max_deviation(res.local_z.empty() ? std::vector<Vector>{res.z} : res.local_z, optimum);
  r.metrics["z0"] = res.z[0];
  r.metrics["wall_time_ms"] = wall;
  r.histories["primal_residual"] = res.primal_residual_history;
  r.histories["dual_residual"] = res.dual_residual_history;
  return finish(r, a.common, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensing-data analytics: low-rank recovery, copula fusion, kernels, consensus",
               "crowdsense"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic traffic scenario to a directory");
  add_common(gen_cmd, gen.common, false);
  gen_cmd->add_option("--rows", gen.spec.rows)->capture_default_str();
  gen_cmd->add_option("--cols", gen.spec.cols)->capture_default_str();
  gen_cmd->add_option("--rank", gen.spec.rank)->capture_default_str();
  gen_cmd->add_option("--anomaly-frac", gen.spec.anomaly_frac)->capture_default_str();
  gen_cmd->add_option("--noise-sigma", gen.spec.noise_sigma)->capture_default_str();
  gen_cmd->add_option("--missing-frac", gen.spec.missing_frac)->capture_default_str();
  gen_cmd->add_option("--anomaly-scale", gen.spec.anomaly_scale)->capture_default_str();

  DenoiseArgs den;
  auto* den_cmd = app.add_subcommand("pca-denoise", "Singular value thresholding");
  add_common(den_cmd, den.common, true);
  den_cmd->add_option("--tau", den.tau, "Threshold")->required();
  den_cmd->add_option("--x-out", den.x_out, "Write the denoised matrix here");

  RecoveryArgs rp;
  auto* rp_cmd = app.add_subcommand("rpca", "Low-rank plus sparse decomposition");
  add_common(rp_cmd, rp.common, true);
  add_solver_flags(rp_cmd, rp.solver);
  rp_cmd->add_option("--x-out", rp.x_out, "Write the low-rank part here");
  rp_cmd->add_option("--a-out", rp.a_out, "Write the sparse part here");

  RecoveryArgs co;
  auto* co_cmd = app.add_subcommand("complete", "Decomposition with missing entries");
  add_common(co_cmd, co.common, true);
  add_solver_flags(co_cmd, co.solver);
  co_cmd->add_option("--mask", co.mask_path, "0/1 mask CSV (default: mask.csv or empty cells)");
  co_cmd->add_option("--x-out", co.x_out, "Write the low-rank part here");
  co_cmd->add_option("--a-out", co.a_out, "Write the sparse part here");

  FuseArgs fu;
  auto* fu_cmd = app.add_subcommand("fuse", "Copula versus product-model detection experiment");
  add_common(fu_cmd, fu.common, false);
  fu_cmd->add_option("--trials", fu.spec.trials)->capture_default_str();
  fu_cmd->add_option("--training", fu.spec.training)->capture_default_str();
  fu_cmd->add_option("--rho", fu.spec.rho, "Latent correlation")->capture_default_str();
  fu_cmd->add_option("--shift", fu.spec.shift, "Mean shift of sensor 1 under H1")->capture_default_str();

  KernelArgs ke;
  auto* ke_cmd = app.add_subcommand("kernel", "Kernel ridge classifier on circle-vs-annulus data");
  add_common(ke_cmd, ke.common, false);
  ke_cmd->add_option("--points", ke.points)->capture_default_str();
  ke_cmd->add_option("--kernel", ke.kernel)
      ->check(CLI::IsMember({"linear", "polynomial", "gaussian"}))
      ->capture_default_str();
  ke.bandwidth_opt = ke_cmd->add_option("--bandwidth", ke.bandwidth,
                                        "Gaussian bandwidth (default: median pairwise distance)");
  ke_cmd->add_option("--degree", ke.degree)->capture_default_str();
  ke_cmd->add_option("--offset", ke.offset)->capture_default_str();
  ke_cmd->add_option("--ridge", ke.ridge)->capture_default_str();

  ConsensusArgs cs;
  auto* cs_cmd = app.add_subcommand("consensus", "Consensus ADMM over agents");
  add_common(cs_cmd, cs.common, false);
  cs_cmd->add_option("--topology", cs.topology, "Edge list file ('i j' per line)");
  cs_cmd->add_option("--mode", cs.mode, "central or decentralized")
      ->check(CLI::IsMember({"central", "decentralized"}));
  cs_cmd->add_option("--objective", cs.objective)
      ->check(CLI::IsMember({"quadratic", "least-squares"}))
      ->capture_default_str();
  cs_cmd->add_option("--targets", cs.targets, "Scalar quadratic targets, one per agent")
      ->delimiter(',');
  cs_cmd->add_option("--agents", cs.agents, "Agent count (default: from topology or 8)");
  cs_cmd->add_option("--dim", cs.dim)->capture_default_str();
  cs_cmd->add_option("--mu", cs.config.mu)->capture_default_str();
  cs_cmd->add_option("--max-rounds", cs.config.max_rounds)->capture_default_str();
  cs_cmd->add_option("--tol", cs.config.tol)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "crowdsense: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitInvalid;
  }

  try {
    if (gen_cmd->parsed()) return cmd_generate(gen, out);
    if (den_cmd->parsed()) return cmd_pca_denoise(den, out, err);
    if (rp_cmd->parsed()) return cmd_rpca(rp, out, err);
    if (co_cmd->parsed()) return cmd_complete(co, out, err);
    if (fu_cmd->parsed()) return cmd_fuse(fu, out, err);
    if (ke_cmd->parsed()) return cmd_kernel(ke, out, err);
    if (cs_cmd->parsed()) return cmd_consensus(cs, out, err);
  } catch (const Error& e) {
    err << "crowdsense: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "crowdsense: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace crowdsense::cli
