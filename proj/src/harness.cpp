#include "shadowgpe/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shadowgpe/groundstate.hpp"
#include "shadowgpe/io.hpp"
#include "shadowgpe/observables.hpp"

namespace shadowgpe {

using nlohmann::json;

// ---- study specification ------------------------------------------------

void StudySpec::validate() const {
  if (taus.empty()) throw std::invalid_argument("study: empty tau list");
  if (schemes.empty()) throw std::invalid_argument("study: no schemes");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (!(taus[i] < taus[i - 1])) throw std::invalid_argument("study: tau list must be strictly descending");
  if (!(tau_ref > 0.0) || !(tau_ref < taus.back() / 4.0))
    throw std::invalid_argument("study: tau_ref must be below min(tau)/4");
  const ProblemConfig p = effective_problem();
  p.validate();
  for (double t : taus) (void)step_count(p.final_time, t);
  (void)step_count(p.final_time, tau_ref);
}

ProblemConfig StudySpec::effective_problem() const {
  ProblemConfig p = problem;
  if (resolution) p.grid.nodes.assign(p.grid.bounds.size(), *resolution);
  return p;
}

namespace {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemConfig problem_from_reference(const json& j, const fs::path& base_dir) {
  if (j.is_object()) return problem_from_json(j);
  const std::string s = j.get<std::string>();
  if (s == "mp1" || s == "mp2" || s == "desk") return build_problem(s);
  const fs::path p = base_dir.empty() ? fs::path(s) : base_dir / s;
  return problem_from_json(json::parse(read_text_file(p)));
}

}  // namespace

StudySpec study_from_json(const json& j, const fs::path& base_dir) {
  StudySpec s;
  s.problem = problem_from_reference(j.at("problem"), base_dir);
  if (j.contains("schemes")) {
    s.schemes.clear();
    for (const auto& name : j.at("schemes")) s.schemes.push_back(SchemeId::parse(name.get<std::string>()));
  }
  if (j.contains("taus")) s.taus = j.at("taus").get<std::vector<double>>();
  s.tau_ref = j.value("tau_ref", s.taus.back() / 8.0);
  s.out = j.value("out", s.out.string());
  s.cadence = j.value("cadence", s.cadence);
  if (j.contains("resolution")) s.resolution = j.at("resolution").get<std::size_t>();
  s.validate();
  return s;
}

// ---- rates --------------------------------------------------------------

std::optional<double> adjacent_rate(double tau_prev, double err_prev, double tau, double err) {
  if (!(err_prev > 0.0) || !(err > 0.0) || !std::isfinite(err_prev) || !std::isfinite(err)) return {};
  return std::log2(err_prev / err) / std::log2(tau_prev / tau);
}

double fitted_slope(std::span<const double> taus, std::span<const double> errs) {
  if (taus.size() != errs.size() || taus.size() < 2) throw std::invalid_argument("fitted_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double x = std::log(taus[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_convergence_table(const fs::path& path, std::span<const ConvergenceRow> rows) {
  std::string csv = kConvergenceHeader;
  csv += '\n';
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  for (const auto& r : rows) {
    csv += r.scheme.name() + ',' + format_double(r.tau) + ',' + std::to_string(r.steps);
    for (double v : {r.l2_error, r.h1_error, r.eta, r.consistency_l2, r.consistency_h1}) csv += ',' + format_double(v);
    csv += ',' + opt(r.l2_rate) + ',' + opt(r.h1_rate) + ',' + to_string(r.status) + '\n';
  }
  write_file_atomic(path, csv);
}

// ---- initial state and reference cache ----------------------------------

std::string field_hash(std::span<const cplx> f) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& z : f) {
    const double parts[2] = {z.real(), z.imag()};
    unsigned char bytes[sizeof parts];
    std::memcpy(bytes, parts, sizeof parts);
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

InitialStateInfo prepare_initial_state(const ProblemConfig& problem, const fs::path& cache_dir) {
  const Grid grid = problem.grid.build();
  InitialStateInfo info;
  if (problem.initial.kind == InitialState::Kind::Snapshot) {
    auto loaded = read_snapshot(problem.initial.snapshot_path);
    if (!(grid_of(loaded.snapshot.header) == grid))
      throw std::invalid_argument("initial snapshot grid does not match the problem grid");
    info.u0 = std::move(loaded.snapshot.values);
    info.hash = loaded.snapshot.header.config_hash;
    return info;
  }

  const auto& gs = problem.initial.ground_state;
  info.hash = content_hash({{"grid", to_json(problem.grid)}, {"ground_state", to_json(gs)}});
  const fs::path base = cache_dir / ("groundstate_" + info.hash);
  const GroundStateProblem solver(grid, gs);
  if (!cache_dir.empty() && snapshot_exists(base)) {
    auto loaded = read_snapshot(base, info.hash);
    if (loaded.hash_matches && grid_of(loaded.snapshot.header) == grid) {
      info.u0 = std::move(loaded.snapshot.values);
      info.cache_hit = true;
      info.energy0 = solver.energy(info.u0);
      return info;
    }
  }
  GroundStateResult res = solver.solve();
  info.u0 = std::move(res.u);
  info.energy0 = res.energy;
  info.converged = res.converged;
  info.iterations = res.iterations;
  if (!cache_dir.empty()) write_snapshot(base, make_snapshot(grid, info.u0, 0.0, "u0", info.hash));
  return info;
}

ComplexField reference_solution(const ProblemConfig& problem, const GpeOperators& ops, const ComplexField& u0,
                                double tau_ref, const RunOptions& run, const fs::path& cache_dir, bool* cache_hit) {
  const std::string hash = content_hash({{"grid", to_json(problem.grid)},
                                         {"potential", to_json(problem.potential)},
                                         {"kappa", problem.kappa},
                                         {"final_time", problem.final_time},
                                         {"u0", field_hash(u0)},
                                         {"tau_ref", tau_ref},
                                         {"fp_tol", run.cn.fp_tol},
                                         {"lin_tol", run.lin_tol}});
  const fs::path base = cache_dir / ("reference_" + hash);
  if (cache_hit) *cache_hit = false;
  if (!cache_dir.empty() && snapshot_exists(base)) {
    auto loaded = read_snapshot(base, hash);
    if (loaded.hash_matches && loaded.snapshot.values.size() == u0.size()) {
      if (cache_hit) *cache_hit = true;
      return std::move(loaded.snapshot.values);
    }
  }
  RunOptions opts = run;
  opts.cadence = 0;
  opts.on_snapshot = nullptr;
  RunResult ref = cn_run(ops, u0, problem.final_time, tau_ref, opts);
  if (!ref.ok()) throw std::runtime_error("reference run failed: " + ref.diagnostic);
  if (!cache_dir.empty()) write_snapshot(base, make_snapshot(ops.grid, ref.psi, ref.time, "psi", hash));
  return std::move(ref.psi);
}

// ---- commands -----------------------------------------------------------

GroundStateReport cmd_groundstate(const ProblemConfig& problem, const fs::path& out, const fs::path& cache_dir) {
  if (problem.initial.kind != InitialState::Kind::GroundState)
    throw std::invalid_argument("groundstate: problem has no ground-state stage");
  GroundStateReport rep;
  rep.info = prepare_initial_state(problem, cache_dir);
  const Grid grid = problem.grid.build();
  rep.vortices = count_vortices(grid, rep.info.u0);
  rep.mass = mass(grid, rep.info.u0);
  const RealField v0 = eval_real_on_grid(grid, problem.potential.function());
  rep.evolution_energy = energy(grid, rep.info.u0, v0, problem.kappa);

  write_snapshot(out / "groundstate", make_snapshot(grid, rep.info.u0, 0.0, "u0", rep.info.hash));
  write_density(out / "groundstate_density.csv", grid, rep.info.u0, 0.0);
  const json report = {{"problem", problem.name},           {"config_hash", rep.info.hash},
                       {"energy0", rep.info.energy0},       {"evolution_energy", rep.evolution_energy},
                       {"mass", rep.mass},                  {"vortices", rep.vortices},
                       {"converged", rep.info.converged},   {"iterations", rep.info.iterations},
                       {"cache_hit", rep.info.cache_hit}};
  write_file_atomic(out / "groundstate_report.json", report.dump(2) + "\n");
  return rep;
}

namespace {

std::string step_tag(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%07zu", n);
  return buf;
}

std::string tau_tag(double tau) { return "tau_" + format_double(tau); }

}  // namespace

EvolveReport cmd_evolve(const ProblemConfig& problem, const fs::path& out, const fs::path& cache_dir,
                        std::size_t cadence, std::size_t snapshot_cadence, const RunOptions& run) {
  problem.validate();
  EvolveReport rep;
  rep.initial = prepare_initial_state(problem, cache_dir);
  const Grid grid = problem.grid.build();
  const GpeOperators ops = GpeOperators::build(grid, problem.potential.function(), problem.kappa);

  RunOptions opts = run;
  opts.cadence = cadence;
  opts.mu = problem.mu;
  opts.snapshot_cadence = snapshot_cadence;
  const std::string hash = content_hash(to_json(problem));
  if (snapshot_cadence > 0) {
    opts.on_snapshot = [&](std::size_t n, double t, std::span<const cplx> psi, std::span<const cplx> phi) {
      const fs::path dir = out / "snapshots";
      write_snapshot(dir / ("psi_" + step_tag(n)), make_snapshot(grid, psi, t, "psi", hash));
      if (problem.scheme.kind == SchemeId::Kind::DissipativeShadow)
        write_snapshot(dir / ("phi_" + step_tag(n)), make_snapshot(grid, phi, t, "phi", hash));
      write_density(dir / ("density_" + step_tag(n) + ".csv"), grid, psi, t);
    };
  }
  rep.run = run_scheme(ops, rep.initial.u0, problem.final_time, problem.tau, problem.scheme, opts);

  write_series(out / "series.csv", rep.run.series);
  write_snapshot(out / "final_psi", make_snapshot(grid, rep.run.psi, rep.run.time, "psi", hash));
  const json report = {{"problem", problem.name},
                       {"scheme", problem.scheme.name()},
                       {"tau", problem.tau},
                       {"final_time", problem.final_time},
                       {"steps", rep.run.steps},
                       {"time", rep.run.time},
                       {"status", to_string(rep.run.status)},
                       {"diagnostic", rep.run.diagnostic},
                       {"linear_solves", rep.run.stats.linear_solves},
                       {"linear_iterations", rep.run.stats.linear_iterations},
                       {"config", to_json(problem)}};
  write_file_atomic(out / "evolve_report.json", report.dump(2) + "\n");
  return rep;
}

std::vector<ConvergenceRow> cmd_converge(const StudySpec& study, const fs::path& cache_dir) {
  study.validate();
  const ProblemConfig problem = study.effective_problem();
  const Grid grid = problem.grid.build();
  const GpeOperators ops = GpeOperators::build(grid, problem.potential.function(), problem.kappa);
  const InitialStateInfo init = prepare_initial_state(problem, cache_dir);
  const ComplexField ref = reference_solution(problem, ops, init.u0, study.tau_ref, study.run, cache_dir);

  struct Job {
    SchemeId scheme;
    double tau;
  };
  std::vector<Job> jobs;
  for (const auto& s : study.schemes)
    for (double t : study.taus) jobs.push_back({s, t});
  std::vector<ConvergenceRow> rows(jobs.size());
  std::vector<std::vector<ObservableRecord>> series(jobs.size());

  // Independent trajectories; kernels inside a run fall back to one thread.
  const auto njobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < njobs; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    ConvergenceRow& row = rows[static_cast<std::size_t>(j)];
    row.scheme = job.scheme;
    row.tau = job.tau;
    RunOptions opts = study.run;
    opts.cadence = study.cadence;
    opts.mu = problem.mu;
    try {
      RunResult r = run_scheme(ops, init.u0, problem.final_time, job.tau, job.scheme, opts);
      row.steps = r.steps;
      row.status = r.status;
      row.diagnostic = r.diagnostic;
      if (r.ok()) {
        const auto e = error_norms(grid, r.psi, ref);
        const auto c = error_norms(grid, r.psi, r.phi);
        row.l2_error = e.l2;
        row.h1_error = e.h1;
        row.eta = eta(grid, r.psi, r.phi, ops.potential, ops.kappa);
        row.consistency_l2 = c.l2;
        row.consistency_h1 = c.h1;
      } else {
        row.l2_error = row.h1_error = row.eta = row.consistency_l2 = row.consistency_h1 = std::nan("");
      }
      series[static_cast<std::size_t>(j)] = std::move(r.series);
    } catch (const std::exception& e) {
      row.status = RunStatus::SolverFailure;
      row.diagnostic = e.what();
      row.l2_error = row.h1_error = row.eta = row.consistency_l2 = row.consistency_h1 = std::nan("");
    }
  }

  for (std::size_t j = 1; j < rows.size(); ++j) {
    if (!(rows[j].scheme == rows[j - 1].scheme)) continue;
    rows[j].l2_rate = adjacent_rate(rows[j - 1].tau, rows[j - 1].l2_error, rows[j].tau, rows[j].l2_error);
    rows[j].h1_rate = adjacent_rate(rows[j - 1].tau, rows[j - 1].h1_error, rows[j].tau, rows[j].h1_error);
  }
  if (!study.out.empty()) {
    write_convergence_table(study.out / "convergence.csv", rows);
    if (study.cadence > 0)
      for (std::size_t j = 0; j < rows.size(); ++j)
        write_series(study.out / "series" / (rows[j].scheme.name() + "_" + tau_tag(rows[j].tau) + ".csv"),
                     series[j]);
  }
  return rows;
}

// ---- CLI ----------------------------------------------------------------

namespace {

void print_table(std::ostream& os) {
  os << "K,beta,alpha,c0,c1,c2,c3,c4,c5,c6,c7\n";
  for (const auto& r : DissipationTable::standard().rows()) {
    os << r.K << ',' << format_double(r.beta) << ',' << format_double(r.alpha);
    for (std::size_t i = 0; i < 8; ++i) {
      os << ',';
      if (i < r.c.size()) os << r.c[i];
    }
    os << '\n';
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Shadow-Lagrangian Gross-Pitaevskii solver and experiment harness"};
  app.require_subcommand(1);

  std::string config_path, problem_name = "mp1", out_dir = "out", cache_dir, scheme_name;
  std::vector<std::string> scheme_names;
  std::vector<double> taus;
  double tau_ref = 0.0;
  int k_order = -1;
  std::size_t resolution = 0, cadence = 1, snapshot_cadence = 0;
  std::optional<bool> seed_phase;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON problem or study document");
    sub->add_option("--problem", problem_name, "built-in problem: mp1, mp2, desk")->check(CLI::IsMember({"mp1", "mp2", "desk"}));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--cache", cache_dir, "cache directory (default <out>/cache)");
    sub->add_option("--resolution", resolution, "nodes per dimension, boundary included");
    sub->add_option("--seed-phase", seed_phase, "vortex phase seeding for the ground state (true/false)");
  };

  auto* gs = app.add_subcommand("groundstate", "compute and store the initial ground state");
  common(gs);
  auto* ev = app.add_subcommand("evolve", "run one scheme and write observable series and snapshots");
  common(ev);
  ev->add_option("--tau", taus, "time step")->expected(1);
  ev->add_option("--scheme", scheme_name, "ds-k0, ds-k2..ds-k6, cn, besse");
  ev->add_option("--k", k_order, "dissipation order for the ds scheme");
  ev->add_option("--cadence", cadence, "observable cadence in steps");
  ev->add_option("--snapshot-cadence", snapshot_cadence, "snapshot cadence in steps (0: none)");
  auto* cv = app.add_subcommand("converge", "convergence sweep against a Crank-Nicolson reference");
  common(cv);
  cv->add_option("--tau", taus, "time steps, descending");
  cv->add_option("--tau-ref", tau_ref, "reference time step (default min tau / 8)");
  cv->add_option("--scheme", scheme_names, "schemes to sweep");
  cv->add_option("--k", k_order, "dissipation order for ds schemes given as 'ds'");
  cv->add_option("--cadence", cadence, "observable cadence in steps (0: no series)")->default_val(0);
  auto* tb = app.add_subcommand("tables", "print the dissipation coefficient table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (tb->parsed()) {
      print_table(std::cout);
      return 0;
    }
    const fs::path out = out_dir;
    const fs::path cache = cache_dir.empty() ? out / "cache" : fs::path(cache_dir);

    json doc;
    fs::path base_dir;
    if (!config_path.empty()) {
      doc = json::parse(read_text_file(config_path));
      base_dir = fs::path(config_path).parent_path();
    }
    const bool doc_is_study = doc.is_object() && doc.contains("problem");

    const auto resolve_scheme = [&](const std::string& name) {
      if (name == "ds") return SchemeId::ds(k_order < 0 ? 5 : k_order);
      SchemeId s = SchemeId::parse(name);
      if (s.kind == SchemeId::Kind::DissipativeShadow && k_order >= 0 && k_order != s.K)
        throw std::invalid_argument("--scheme and --k disagree");
      return s;
    };
    const auto finish_problem = [&](ProblemConfig p) {
      if (resolution > 0) p.grid.nodes.assign(p.grid.bounds.size(), resolution);
      if (seed_phase) p.initial.ground_state.seed_phase = *seed_phase;
      return p;
    };

    if (cv->parsed()) {
      StudySpec study;
      if (doc_is_study) {
        study = study_from_json(doc, base_dir);
      } else {
        study.problem = doc.is_object() ? problem_from_json(doc) : build_problem(problem_name);
      }
      study.problem = finish_problem(study.problem);
      if (!taus.empty()) study.taus = taus;
      if (tau_ref > 0.0) study.tau_ref = tau_ref;
      else if (!taus.empty() || !doc_is_study) study.tau_ref = study.taus.back() / 8.0;
      if (!scheme_names.empty()) {
        study.schemes.clear();
        for (const auto& s : scheme_names) study.schemes.push_back(resolve_scheme(s));
      }
      study.out = out;
      study.cadence = cadence;
      const auto rows = cmd_converge(study, cache);
      std::cout << read_text_file(out / "convergence.csv");
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.status != RunStatus::Completed;
      return failed == 0 ? 0 : 3;
    }

    ProblemConfig problem = doc.is_object() ? problem_from_json(doc) : build_problem(problem_name);
    problem = finish_problem(problem);

    if (gs->parsed()) {
      const auto rep = cmd_groundstate(problem, out, cache);
      std::cout << "energy0 " << format_double(rep.info.energy0) << "\n"
                << "evolution_energy " << format_double(rep.evolution_energy) << "\n"
                << "vortices " << rep.vortices << "\n"
                << "converged " << (rep.info.converged ? "true" : "false") << "\n"
                << "cache_hit " << (rep.info.cache_hit ? "true" : "false") << "\n";
      return 0;
    }
    if (ev->parsed()) {
      if (!taus.empty()) problem.tau = taus.front();
      if (!scheme_name.empty()) problem.scheme = resolve_scheme(scheme_name);
      else if (k_order >= 0) problem.scheme = SchemeId::ds(k_order);
      const auto rep = cmd_evolve(problem, out, cache, cadence, snapshot_cadence);
      std::cout << "status " << to_string(rep.run.status) << "\n"
                << "steps " << rep.run.steps << "\n";
      if (!rep.run.diagnostic.empty()) std::cout << "diagnostic " << rep.run.diagnostic << "\n";
      return rep.run.ok() ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace shadowgpe
