// Command-line driver: run solvers, certify traces against the theoretical
// rate inequalities, simulate the restarted continuous-time trajectory, and
// emit comparison reports.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <vector>

#include "mr/analysis.hpp"
#include "mr/bessel.hpp"
#include "mr/config.hpp"
#include "mr/errors.hpp"
#include "mr/instances.hpp"
#include "mr/ode.hpp"
#include "mr/problems.hpp"
#include "mr/prox.hpp"
#include "mr/solver.hpp"
#include "mr/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fp17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string output_dir(const json& config) {
  if (const char* env = std::getenv("MR_OUTPUT_DIR")) return env;
  if (config.contains("output") && config["output"].contains("dir"))
    return config["output"]["dir"].get<std::string>();
  return ".";
}

Eigen::VectorXd vec_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

mr::CompositeProblem build_problem(const json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "file") {
    std::ifstream in(spec.at("path").get<std::string>());
    if (!in) throw mr::Error("missing problem file " + spec.at("path").get<std::string>());
    json j;
    in >> j;
    return mr::problem_from_json(j);
  }
  if (kind == "random_diag_quadratic") {
    if (!spec.contains("seed")) throw mr::Error("random generators require a seed");
    mr::Rng rng(spec.at("seed").get<std::uint64_t>());
    return mr::random_diagonal_quadratic(spec.at("n").get<int>(), spec.at("cond").get<double>(),
                                         spec.value("scale", 1.0), rng);
  }
  if (kind == "random_lasso") {
    if (!spec.contains("seed")) throw mr::Error("random generators require a seed");
    mr::Rng rng(spec.at("seed").get<std::uint64_t>());
    return mr::random_lasso(spec.at("m").get<int>(), spec.at("n").get<int>(),
                            spec.at("cond").get<double>(), spec.value("gamma", 0.5), rng);
  }
  return mr::problem_from_json(spec);
}

struct RunSetup {
  mr::CompositeProblem problem;
  Eigen::VectorXd x0;
  double s = 0.0;
  mr::ScheduleConfig schedule;
  mr::RestartScheme scheme;
  mr::StoppingRule stop;
};

RunSetup parse_run(const json& config) {
  RunSetup setup;
  setup.problem = build_problem(config.at("problem"));
  const json run = config.value("run", json::object());

  const double frac = run.value("step_fraction", 0.9);
  if (!(frac > 0.0) || !(frac < 1.0))
    throw mr::Error("step must satisfy s < 1/L: step_fraction has to lie strictly in (0,1)");
  setup.s = frac / setup.problem.lipschitz;

  setup.schedule = mr::ScheduleConfig::parse(run.value("schedule", std::string("classic")));
  if (setup.schedule.kind == mr::ScheduleKind::StronglyConvexConstant) {
    setup.schedule.mu = setup.problem.mu;
    setup.schedule.lipschitz = setup.problem.lipschitz;
  }

  const std::string algo = run.value("algorithm", std::string("apg"));
  if (algo == "apg") {
    setup.scheme = mr::RestartScheme{mr::RestartKind::None, 0};
  } else if (algo.rfind("restarted:", 0) == 0) {
    setup.scheme = mr::RestartScheme::parse(algo.substr(10));
  } else {
    throw mr::Error("algorithm must be apg or restarted:<gradient|function|speed|fixed:K>");
  }

  if (run.contains("tol")) setup.stop.tol = run.at("tol").get<double>();
  setup.stop.max_iter = run.value("max_iter", 100000L);

  if (run.contains("x0"))
    setup.x0 = vec_from(run.at("x0"));
  else
    setup.x0 = Eigen::VectorXd::Ones(setup.problem.n);
  if (setup.x0.size() != setup.problem.n) throw mr::Error("x0 dimension mismatch");
  return setup;
}

int cmd_solve(const std::string& config_path) {
  const json config = mr::load_config_file(config_path);
  RunSetup setup = parse_run(config);
  const mr::SolverTrace trace =
      setup.scheme.kind == mr::RestartKind::None
          ? mr::run_apg(setup.problem, setup.x0, setup.s, setup.schedule, setup.stop)
          : mr::run_restarted(setup.problem, setup.x0, setup.s, setup.schedule, setup.scheme,
                              setup.stop);

  const fs::path dir = output_dir(config);
  fs::create_directories(dir);
  mr::write_trace_csv(trace, setup.problem, (dir / "trace.csv").string());
  std::ofstream side(dir / "trace.json");
  side << mr::trace_to_json(trace).dump(2) << '\n';

  std::cout << "iterations: " << trace.iterations() << "\n"
            << "restarts:   " << trace.restart_flags().size() << "\n"
            << "residual:   " << fp17(trace.records.back().grad_map_norm) << "\n"
            << (trace.converged ? "converged" : "iteration cap reached") << "\n"
            << "wrote " << (dir / "trace.csv").string() << ", " << (dir / "trace.json").string()
            << "\n";
  return trace.converged ? 0 : 2;
}

int cmd_certify(const std::string& trace_path, const std::string& problem_path) {
  fs::path tp = trace_path;
  if (tp.extension() == ".csv") tp.replace_extension(".json");
  std::ifstream tin(tp);
  if (!tin) throw mr::Error("cannot open trace sidecar " + tp.string());
  json tj;
  tin >> tj;
  mr::SolverTrace trace = mr::trace_from_json(tj);

  std::ifstream pin(problem_path);
  if (!pin) throw mr::Error("cannot open problem file " + problem_path);
  json pj;
  pin >> pj;
  if (pj != trace.problem_json)
    throw mr::Error("trace was produced for a different problem than " + problem_path);
  mr::CompositeProblem problem = mr::problem_from_json(pj);

  mr::RateCertificate cert = mr::check_certificates(trace, problem, trace.s);
  if (mr::is_zero_g(problem.nonsmooth)) {
    const mr::RateCertificate smooth =
        mr::smooth_certificates(trace, problem, trace.s, trace.schedule);
    cert.eta = smooth.eta;
    for (const auto& v : smooth.violations) cert.violations.push_back(v);
  }

  const char* env = std::getenv("MR_OUTPUT_DIR");
  const fs::path dir = env ? fs::path(env) : tp.parent_path();
  fs::create_directories(dir.empty() ? "." : dir);
  {
    std::ofstream out(dir / "certificate.json");
    out << mr::certificate_to_json(cert).dump(2) << '\n';
  }
  {
    const auto series = mr::lyapunov_series(trace, problem, trace.s, trace.schedule);
    std::ofstream out(dir / "certificate.txt");
    out << "k\tE_k\trho*E_{k-1}\tslack\n";
    for (std::size_t k = 0; k < series.E.size(); ++k) {
      double prev_scaled = std::numeric_limits<double>::quiet_NaN();
      double slack = std::numeric_limits<double>::quiet_NaN();
      if (k > 0 && series.local_k[k] > 0) {
        prev_scaled = cert.rho * series.E[k - 1];
        slack = prev_scaled - series.E[k];
      }
      out << k << '\t' << fp17(series.E[k]) << '\t' << fp17(prev_scaled) << '\t' << fp17(slack)
          << '\n';
    }
  }

  std::cout << "rho = " << cert.rho;
  if (cert.rho_hat) std::cout << ", rho_hat = " << *cert.rho_hat;
  std::cout << ", violations = " << cert.violations.size() << "\n";
  for (std::size_t i = 0; i < cert.violations.size() && i < 20; ++i)
    std::cout << "  k=" << cert.violations[i].k << "  " << cert.violations[i].id
              << "  slack=" << cert.violations[i].slack << "\n";
  return cert.violations.empty() ? 0 : 3;
}

int cmd_ode(const std::string& config_path) {
  const json config = mr::load_config_file(config_path);
  const mr::CompositeProblem problem = build_problem(config.at("problem"));
  if (!problem.quadratic || !mr::is_zero_g(problem.nonsmooth))
    throw mr::Error("ode requires a quadratic problem (diag_quadratic or general_quadratic)");

  const json run = config.value("run", json::object());
  const json ode = config.value("ode", json::object());
  Eigen::VectorXd x0 = run.contains("x0") ? vec_from(run.at("x0"))
                                          : Eigen::VectorXd::Ones(problem.n);
  const double horizon = ode.value("horizon", 20.0);
  const double sample_dt = ode.value("sample_dt", 0.01);

  // Reduce to eigencoordinates. Zero modes stay constant along the flow, so
  // f(X) - f* only involves the positive ones.
  Eigen::VectorXd lams, y0;
  if (const auto* d = std::get_if<mr::DiagonalQuadratic>(&*problem.quadratic)) {
    lams = d->lambdas;
    y0 = x0;
  } else {
    const auto& gq = std::get<mr::GeneralQuadratic>(*problem.quadratic);
    const mr::SpectralReduction red = mr::reduce_general_quadratic(gq.A, gq.b, x0);
    std::vector<double> lv, yv;
    for (Eigen::Index i = 0; i < red.lambdas.size(); ++i) {
      if (red.lambdas[i] > 1e-12 * red.lambdas.maxCoeff()) {
        lv.push_back(red.lambdas[i]);
        yv.push_back(red.y0[i]);
      }
    }
    lams = Eigen::Map<Eigen::VectorXd>(lv.data(), static_cast<Eigen::Index>(lv.size()));
    y0 = Eigen::Map<Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
  }

  auto f_gap = [&](const Eigen::VectorXd& y) { return 0.5 * y.dot(lams.cwiseProduct(y)); };

  const mr::RestartedTrajectory traj = mr::restarted_trajectory(lams, y0, horizon, sample_dt);

  const fs::path dir = output_dir(config);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "trajectory.csv");
    out << "t,f_minus_fstar,S,restart_flag\n";
    std::size_t next_epoch = 1;
    std::size_t seg = 0;
    for (const auto& st : traj.samples) {
      bool flag = false;
      if (next_epoch < traj.epochs.size() && st.t >= traj.epochs[next_epoch]) {
        flag = true;
        ++next_epoch;
      }
      while (seg + 1 < traj.epochs.size() && st.t > traj.epochs[seg + 1]) ++seg;
      const double t_local = st.t - traj.epochs[seg];
      const double s_val =
          t_local > 0.0 ? mr::s_value(lams, traj.restart_points[seg], t_local) : 0.0;
      out << fp17(st.t) << ',' << fp17(f_gap(st.X)) << ',' << fp17(s_val) << ','
          << (flag ? 1 : 0) << '\n';
    }
  }
  {
    json epochs = json::array(), lens = json::array(), points = json::array();
    for (double e : traj.epochs) epochs.push_back(e);
    for (double e : traj.interval_lengths) lens.push_back(e);
    for (const auto& r : traj.restart_points) {
      json p = json::array();
      for (Eigen::Index i = 0; i < r.size(); ++i) p.push_back(r[i]);
      points.push_back(p);
    }
    std::ofstream out(dir / "epochs.json");
    out << json{{"epochs", epochs}, {"interval_lengths", lens}, {"restart_points", points}}
               .dump(2)
        << '\n';
  }
  {
    mr::SvgSeries restarted{"gradient restarted", "#d62728", {}, {}};
    mr::SvgSeries plain{"no restart", "#1f77b4", {}, {}};
    for (const auto& st : traj.samples) {
      const double gap = f_gap(st.X);
      restarted.x.push_back(st.t);
      restarted.y.push_back(gap > 0.0 ? std::log(gap) : std::numeric_limits<double>::quiet_NaN());
    }
    const long n_samples = static_cast<long>(std::floor(horizon / sample_dt + 1e-12));
    for (long j = 0; j <= n_samples; ++j) {
      const double t = static_cast<double>(j) * sample_dt;
      const double gap = f_gap(mr::closed_form_state(lams, y0, t).X);
      plain.x.push_back(t);
      plain.y.push_back(gap > 0.0 ? std::log(gap) : std::numeric_limits<double>::quiet_NaN());
    }
    mr::write_svg_plot((dir / "plot.svg").string(), "ln(f - f*) along the trajectory", "t",
                       "ln(f - f*)", {restarted, plain});
  }
  std::size_t within = 0;
  for (std::size_t i = 1; i < traj.epochs.size(); ++i)
    if (traj.epochs[i] <= horizon) ++within;
  std::cout << "restart epochs within horizon: " << within << "\n"
            << "wrote " << (dir / "trajectory.csv").string() << ", "
            << (dir / "epochs.json").string() << ", " << (dir / "plot.svg").string() << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& trace_paths) {
  if (trace_paths.empty()) throw mr::Error("report needs at least one trace");
  struct Row {
    std::string path;
    double slope, r2, ln_rho;
    std::optional<double> ln_rho_hat;
    std::vector<double> gaps;
  };
  std::vector<Row> rows;
  json first_problem;
  bool warned = false;
  for (const auto& path : trace_paths) {
    fs::path tp = path;
    if (tp.extension() == ".csv") tp.replace_extension(".json");
    std::ifstream in(tp);
    if (!in) throw mr::Error("cannot open " + tp.string());
    json tj;
    in >> tj;
    mr::SolverTrace trace = mr::trace_from_json(tj);
    mr::CompositeProblem problem = mr::problem_from_json(trace.problem_json);
    if (first_problem.is_null()) {
      first_problem = trace.problem_json;
    } else if (first_problem != trace.problem_json && !warned) {
      std::cerr << "warning: traces come from different problems; comparison table mixes them\n";
      warned = true;
    }

    Row row;
    row.path = path;
    const double f_star = problem.reference->F_star;
    std::vector<double> series;
    for (const auto& rec : trace.records) {
      const double gap = rec.F - f_star;
      row.gaps.push_back(gap);
      if (gap > 0.0 && series.size() == row.gaps.size() - 1) series.push_back(gap);
    }
    if (series.size() >= 10) {
      const auto fit = mr::empirical_rate(series);
      row.slope = fit.slope;
      row.r2 = fit.r2;
    } else {
      row.slope = row.r2 = std::numeric_limits<double>::quiet_NaN();
    }
    row.ln_rho = std::log(mr::theoretical_rho(problem.mu, problem.lipschitz, trace.s));
    const mr::RestartStatistics stats = mr::restart_statistics(trace);
    if (!stats.K.empty()) {
      long k_bar = 2;
      for (long K : stats.K) k_bar = std::max(k_bar, K);
      k_bar = std::max(k_bar, trace.iterations() - stats.S.back());
      row.ln_rho_hat = std::log(
          mr::bounded_interval_rate(problem.mu, problem.lipschitz, trace.s, trace.schedule, k_bar)
              .second);
    }
    rows.push_back(std::move(row));
  }

  std::printf("%-36s %14s %8s %12s %12s\n", "trace", "slope", "r2", "ln rho", "ln rho_hat");
  for (const auto& row : rows) {
    std::printf("%-36s %14.6g %8.4f %12.6g ", row.path.c_str(), row.slope, row.r2, row.ln_rho);
    if (row.ln_rho_hat)
      std::printf("%12.6g\n", *row.ln_rho_hat);
    else
      std::printf("%12s\n", "-");
  }

  const char* env = std::getenv("MR_OUTPUT_DIR");
  const fs::path dir = env ? fs::path(env) : fs::path(".");
  fs::create_directories(dir);
  std::vector<mr::SvgSeries> series;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    mr::SvgSeries s{fs::path(rows[i].path).filename().string(), palette[i % 6], {}, {}};
    for (std::size_t k = 0; k < rows[i].gaps.size(); ++k) {
      s.x.push_back(static_cast<double>(k));
      s.y.push_back(rows[i].gaps[k] > 0.0 ? std::log10(rows[i].gaps[k])
                                          : std::numeric_limits<double>::quiet_NaN());
    }
    series.push_back(std::move(s));
  }
  mr::write_svg_plot((dir / "report.svg").string(), "F(x_k) - F* (log10)", "k",
                     "log10(F - F*)", series);
  std::cout << "wrote " << (dir / "report.svg").string() << "\n";
  return 0;
}

int cmd_bessel_table(double u_min, double u_max, double step, const std::string& out_path) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw mr::Error("cannot open " + out_path);
    out = &file;
  }
  *out << "u,J1,J2,G\n";
  const long n = static_cast<long>(std::floor((u_max - u_min) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double u = u_min + static_cast<double>(i) * step;
    *out << fp17(u) << ',' << fp17(mr::bessel_j(1, u)) << ',' << fp17(mr::bessel_j(2, u)) << ','
         << fp17(mr::g_kernel(u)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accelerated proximal gradient solvers with restart-rate certificates"};
  app.require_subcommand(1);

  std::string config_path, trace_path, problem_path, table_out;
  std::vector<std::string> trace_paths;
  double u_min = 0.0, u_max = 50.0, u_step = 0.01;

  auto* solve = app.add_subcommand("solve", "run a solver and write the trace");
  solve->add_option("config", config_path, "TOML or JSON config")->required();

  auto* certify = app.add_subcommand("certify", "check rate certificates for a stored trace");
  certify->add_option("trace", trace_path, "trace.json (or .csv with sidecar)")->required();
  certify->add_option("problem", problem_path, "problem JSON the trace was produced from")
      ->required();

  auto* ode = app.add_subcommand("ode", "restarted ODE trajectory for a quadratic problem");
  ode->add_option("config", config_path, "TOML or JSON config")->required();

  auto* report = app.add_subcommand("report", "comparison table and combined decay plot");
  report->add_option("traces", trace_paths, "trace.json files")->required();

  auto* btable = app.add_subcommand("bessel-table", "CSV table of J1, J2 and G");
  btable->add_option("--min", u_min, "lower bound");
  btable->add_option("--max", u_max, "upper bound");
  btable->add_option("--step", u_step, "spacing");
  btable->add_option("--out", table_out, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path);
    if (certify->parsed()) return cmd_certify(trace_path, problem_path);
    if (ode->parsed()) return cmd_ode(config_path);
    if (report->parsed()) return cmd_report(trace_paths);
    if (btable->parsed()) return cmd_bessel_table(u_min, u_max, u_step, table_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
