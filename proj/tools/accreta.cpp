#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "accreta/config.hpp"
#include "accreta/log.hpp"
#include "accreta/report.hpp"

using namespace accreta;

namespace {

enum Exit { ok = 0, validation_failure = 1, solver_error = 2, max_iter = 3 };

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

RunConfig load_checked(const std::string& path) {
  RunConfig c = load_config(path);
  const auto issues = validate(c);
  if (!issues.empty()) {
    std::string msg = "config validation failed:";
    for (const Issue& i : issues) msg += "\n  [" + i.assumption + "] " + i.message;
    throw ValidationError(msg);
  }
  for (const Issue& i : warnings(c)) log_warning("[" + i.assumption + "] " + i.message);
  return c;
}

fs::path out_dir(const RunConfig& c, const std::string& flag) {
  return flag.empty() ? fs::path(c.output) : fs::path(flag);
}

Eigen::VectorXd read_activation(const std::string& path, const Grid& g) {
  if (path.empty()) return Eigen::VectorXd::Zero(g.size());
  const ScalarField f = read_field(path, g);
  return f.extended(0.0);
}

void write_iteration(const fs::path& dir, const CoupledState& s) {
  write_dense_field(dir / "activation.csv", s.v.grid(), s.activation, "activation");
  write_attachment(dir / "v.csv", s.v);
  write_time_field(dir / "u", s.u.u);
  write_trace(dir / "ku", s.ku);
}

json regularity(const RunConfig& c, const AttachmentField& v) {
  return to_json(regularity_report(c.domain, v, c.model.sigma_lower, c.model.sigma_upper, c.diagnostics));
}

int cmd_validate(const std::string& config) {
  RunConfig c = load_config(config);
  const auto issues = validate(c);
  for (const Issue& i : issues) std::cout << "error [" << i.assumption << "] " << i.message << "\n";
  for (const Issue& i : warnings(c)) std::cout << "warning [" << i.assumption << "] " << i.message << "\n";
  if (issues.empty()) std::cout << "ok\n";
  return issues.empty() ? ok : validation_failure;
}

int cmd_hj(const std::string& config, const std::string& activation, const std::string& out, int curves) {
  Clock clock;
  const RunConfig c = load_checked(config);
  const fs::path dir = out_dir(c, out);
  const MetricField metric(c.grid, c.support(), read_activation(activation, c.grid));
  const AttachmentField a = solve_attachment(c.domain, metric, c.coupling.stencil_radius);
  const double solve_s = clock.seconds();
  write_attachment(dir / "v.csv", a);
  json report{{"stencil_radius", a.stencil_radius}, {"stencil_length_excess", stencil_length_excess(c.grid.dim(), a.stencil_radius)}};
  double vmax = 0.0;
  NodeId reached = 0;
  for (NodeId n = 0; n < c.grid.size(); ++n)
    if (a.v.has(n)) {
      vmax = std::max(vmax, a.v[n]);
      ++reached;
    }
  report["max_v"] = vmax;
  report["reached_nodes"] = reached;
  report["unreached_omega_nodes"] = c.domain.omega.count() - reached;
  if (curves > 0) {
    std::vector<Curve> list;
    const auto members = a.v.support().members();
    for (int k = 0; k < curves && !members.empty(); ++k)
      list.push_back(backtrack_curve(a, members[members.size() * static_cast<std::size_t>(k) / static_cast<std::size_t>(curves)]));
    write_curve_csv(dir / "curves.csv", list);
  }
  write_json(dir / "report.json", report);
  write_json(dir / "manifest.json", manifest(c, "hj", {{"solve", solve_s}, {"total", clock.seconds()}},
                                             {{"activation", activation}}));
  std::cout << "hj: max v = " << vmax << ", wrote " << (dir / "v.csv").string() << "\n";
  return ok;
}

int cmd_elliptic(const std::string& config, const std::string& vfile, const std::string& out) {
  Clock clock;
  const RunConfig c = load_checked(config);
  const fs::path dir = out_dir(c, out);
  const ScalarField v = read_field(vfile, c.grid);
  const GrowthSolution g = solve_on_growth(v, c.domain, c.coupling.T, c.coupling.M, c.coupling.cg_tol, c.coupling.threads);
  const double solve_s = clock.seconds();
  write_time_field(dir / "u", g.u);
  write_json(dir / "report.json", json{{"slices", to_json(g.reports)}, {"checks", elliptic_summary(g.u, c.coupling.cg_tol)}});
  write_json(dir / "manifest.json", manifest(c, "elliptic", {{"solve", solve_s}, {"total", clock.seconds()}}, {{"v", vfile}}));
  std::cout << "elliptic: " << g.u.slices.size() << " slices, wrote " << (dir / "u").string() << "\n";
  return ok;
}

int cmd_convolve(const std::string& config, const std::string& udir, const std::string& out) {
  Clock clock;
  const RunConfig c = load_checked(config);
  const fs::path dir = out_dir(c, out);
  const TimeField u = read_time_field(udir);
  if (u.grid != c.grid) throw ValidationError("time field grid differs from the config grid");
  const ActivationTrace ku = convolve(u, c.kernels, c.coupling.threads);
  const double solve_s = clock.seconds();
  write_trace(dir / "ku", ku);
  write_json(dir / "report.json", convolution_summary(u, ku, c.kernels));
  write_json(dir / "manifest.json", manifest(c, "convolve", {{"solve", solve_s}, {"total", clock.seconds()}}, {{"u", udir}}));
  std::cout << "convolve: wrote " << (dir / "ku").string() << "\n";
  return ok;
}

int cmd_couple(const std::string& config, const std::string& out, bool keep) {
  Clock clock;
  const RunConfig c = load_checked(config);
  const fs::path dir = out_dir(c, out);
  fs::create_directories(dir);
  const CouplingProblem p = c.problem();
  const CouplingResult r = run(p, [&](const CoupledState& s) {
    const IterationRecord& h = s.history.back();
    std::printf("j=%d delta=%.6g max_v=%.6g cg=%d\n", h.j, h.delta, h.v_max, h.cg_iterations);
    std::fflush(stdout);
    if (keep) {
      char name[32];
      std::snprintf(name, sizeof name, "iter_%04d", s.j);
      write_iteration(dir / name, s);
    }
  });
  const double solve_s = clock.seconds();
  write_attachment(dir / "v_final.csv", r.state.v);
  write_time_field(dir / "u", r.state.u.u);
  write_trace(dir / "ku", r.state.ku);
  write_json(dir / "history.json", history_json(r.state.history, r.verdict, r.representation_residual, c.coupling));
  json diag = regularity(c, r.state.v);
  diag["verdict"] = to_string(r.verdict);
  diag["representation_residual"] = r.verdict == Verdict::converged ? json(r.representation_residual) : json(nullptr);
  diag["elliptic"] = elliptic_summary(r.state.u.u, c.coupling.cg_tol);
  diag["convolution"] = convolution_summary(r.state.u.u, r.state.ku, c.kernels);
  write_json(dir / "diagnostics.json", diag);
  write_json(dir / "manifest.json",
             manifest(c, "couple", {{"solve", solve_s}, {"total", clock.seconds()}},
                      {{"verdict", to_string(r.verdict)}, {"iterations", r.state.j}}));
  std::cout << "couple: " << to_string(r.verdict) << " after " << r.state.j << " sweeps; regularity checks "
            << (diag["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
  return r.verdict == Verdict::converged ? ok : max_iter;
}

int cmd_diagnose(const std::string& run_dir, const std::string& config, const std::string& out) {
  Clock clock;
  const fs::path rd = run_dir;
  const RunConfig c = load_checked(config.empty() ? (rd / "manifest.json").string() : config);
  const fs::path vfile = fs::exists(rd / "v_final.csv") ? rd / "v_final.csv" : rd / "v.csv";
  const AttachmentField v = read_attachment(vfile);
  if (v.grid() != c.grid) throw ValidationError("run grid differs from the config grid");
  json diag = regularity(c, v);
  if (fs::exists(rd / "history.json")) {
    const json h = read_json(rd / "history.json");
    diag["verdict"] = h.at("verdict");
    diag["representation_residual"] = h.at("representation_residual");
  }
  if (fs::exists(rd / "u" / "index.json")) {
    const TimeField u = read_time_field(rd / "u");
    diag["elliptic"] = elliptic_summary(u, c.coupling.cg_tol);
    if (fs::exists(rd / "ku" / "index.json")) diag["convolution"] = convolution_summary(u, read_trace(rd / "ku"), c.kernels);
  }
  const fs::path dir = out.empty() ? rd : fs::path(out);
  write_json(dir / "diagnostics.json", diag);
  const json timings{{"total", clock.seconds()}};
  if (dir == rd && fs::exists(rd / "manifest.json")) {
    json m = read_json(rd / "manifest.json");
    m["diagnose"] = {{"timings", timings}};
    write_json(rd / "manifest.json", m);
  } else {
    write_json(dir / "manifest.json", manifest(c, "diagnose", timings, {{"run", run_dir}}));
  }
  for (const auto& ch : diag["checks"])
    std::cout << (ch["pass"].get<bool>() ? "pass " : "FAIL ") << ch["name"].get<std::string>() << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accreta: solvers and diagnostics for accretive growth"};
  app.require_subcommand(1);
  std::string config, activation, out, vfile, udir, run_dir;
  int curves = 0;
  bool keep = false, verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print informational log messages");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config against the model assumptions");
  validate_cmd->add_option("-c,--config", config, "Config or manifest JSON")->required();

  auto* hj = app.add_subcommand("hj", "Solve for the time of attachment v");
  hj->add_option("-c,--config", config, "Config or manifest JSON")->required();
  hj->add_option("--activation", activation, "Frozen activation field CSV (default: zero)");
  hj->add_option("-o,--out", out, "Output directory");
  hj->add_option("--curves", curves, "Number of backtracked curves to export");

  auto* ell = app.add_subcommand("elliptic", "Solve -Lap u = 1 on the sublevels of v");
  ell->add_option("-c,--config", config, "Config or manifest JSON")->required();
  ell->add_option("--v", vfile, "Field CSV of v")->required();
  ell->add_option("-o,--out", out, "Output directory");

  auto* conv = app.add_subcommand("convolve", "Space-time convolution Ku of a time field");
  conv->add_option("-c,--config", config, "Config or manifest JSON")->required();
  conv->add_option("--u", udir, "Time field directory")->required();
  conv->add_option("-o,--out", out, "Output directory");

  auto* couple = app.add_subcommand("couple", "Run the coupled iteration");
  couple->add_option("-c,--config", config, "Config or manifest JSON")->required();
  couple->add_option("-o,--out", out, "Output directory");
  couple->add_flag("--keep-iterations", keep, "Write every iterate to iter_####/");

  auto* diag = app.add_subcommand("diagnose", "Regularity checks on a run directory");
  diag->add_option("--run", run_dir, "Run directory")->required();
  diag->add_option("-c,--config", config, "Config (default: the run manifest)");
  diag->add_option("-o,--out", out, "Output directory (default: the run directory)");

  CLI11_PARSE(app, argc, argv);
  set_log_sink([verbose](LogLevel level, const std::string& msg) {
    if (level == LogLevel::warning) std::cerr << "warning: " << msg << "\n";
    else if (verbose && level == LogLevel::info) std::cerr << "info: " << msg << "\n";
  });

  try {
    if (*validate_cmd) return cmd_validate(config);
    if (*hj) return cmd_hj(config, activation, out, curves);
    if (*ell) return cmd_elliptic(config, vfile, out);
    if (*conv) return cmd_convolve(config, udir, out);
    if (*couple) return cmd_couple(config, out, keep);
    if (*diag) return cmd_diagnose(run_dir, config, out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return validation_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return solver_error;
  }
  return ok;
}
