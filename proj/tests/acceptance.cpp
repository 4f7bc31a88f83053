// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance            all fast criteria
//   acceptance --slow     fast criteria plus the long MP2 H1-rate study
//   acceptance --slow-only
//   acceptance --only <name>[,<name>...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shadowgpe/groundstate.hpp"
#include "shadowgpe/harness.hpp"
#include "shadowgpe/io.hpp"
#include "shadowgpe/observables.hpp"
#include "shadowgpe/spatialop.hpp"
#include "support/dense.hpp"

using namespace shadowgpe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

double rel_l2(std::span<const cplx> a, std::span<const cplx> b) {
  return testsupport::rel_diff(std::vector<cplx>(a.begin(), a.end()), std::vector<cplx>(b.begin(), b.end()));
}

const std::vector<double> kSweepTaus{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};

// Shared state: the desk-scale problem, its initial state and the convergence sweep.
struct Context {
  fs::path work;
  ProblemConfig desk = build_problem("desk");
  Grid desk_grid = desk.grid.build();
  GpeOperators desk_ops = GpeOperators::build(desk_grid, desk.potential.function(), desk.kappa);
  std::optional<ComplexField> desk_u0_;
  std::optional<std::vector<ConvergenceRow>> sweep_;

  const ComplexField& desk_u0() {
    if (!desk_u0_) desk_u0_ = prepare_initial_state(desk, work / "cache").u0;
    return *desk_u0_;
  }

  const std::vector<ConvergenceRow>& sweep() {
    if (!sweep_) {
      StudySpec s;
      s.problem = desk;
      s.schemes = {SchemeId::ds(5), SchemeId::cn(), SchemeId::besse(), SchemeId::ds(3), SchemeId::ds(4),
                   SchemeId::ds(6)};
      s.taus = kSweepTaus;
      s.tau_ref = kSweepTaus.back() / 8;
      s.out = work / "desk_sweep";
      sweep_ = cmd_converge(s, work / "cache");
      std::cout << "  sweep table: " << (s.out / "convergence.csv").string() << "\n";
    }
    return *sweep_;
  }

  std::vector<ConvergenceRow> rows_of(SchemeId scheme) {
    std::vector<ConvergenceRow> out;
    for (const auto& r : sweep())
      if (r.scheme == scheme) out.push_back(r);
    return out;
  }
};

double slope_of(const std::vector<ConvergenceRow>& rows, double ConvergenceRow::*field) {
  std::vector<double> t, e;
  for (const auto& r : rows) {
    t.push_back(r.tau);
    e.push_back(r.*field);
  }
  return fitted_slope(t, e);
}

bool all_completed(const std::vector<ConvergenceRow>& rows, std::string& why) {
  for (const auto& r : rows)
    if (r.status != RunStatus::Completed) {
      why = r.scheme.name() + " tau=" + fmt(r.tau) + " " + to_string(r.status) + ": " + r.diagnostic;
      return false;
    }
  return true;
}

// ---- criteria -------------------------------------------------------------

Outcome coefficient_table(Context&) {
  struct Ref {
    int K;
    double beta, alpha;
    std::vector<int> c;
  };
  const std::vector<Ref> ref{{0, 1.3, 0.0, {}},
                             {2, 1.69, 150e-3, {-2, 3, 0, -1}},
                             {3, 1.75, 57e-3, {-3, 6, -2, -2, 1}},
                             {4, 1.82, 18e-3, {-6, 14, -8, -3, 4, -1}},
                             {5, 1.84, 5.5e-3, {-14, 36, -27, -2, 12, -6, 1}},
                             {6, 1.86, 1.6e-3, {-36, 99, -88, 11, 32, -25, 8, -1}}};
  const auto& table = DissipationTable::standard();
  if (table.rows().size() != ref.size()) return {false, "table has " + std::to_string(table.rows().size()) + " rows"};
  for (const auto& r : ref) {
    const auto& row = table.row(r.K);
    if (row.beta != r.beta || row.alpha != r.alpha || row.c != r.c)
      return {false, "row K=" + std::to_string(r.K) + " differs"};
    if (r.K >= 2) {
      int s0 = 0, s1 = 0;
      for (std::size_t k = 0; k < row.c.size(); ++k) {
        s0 += row.c[k];
        s1 += static_cast<int>(k) * row.c[k];
      }
      if (s0 != 0 || s1 != 0) return {false, "moment sums nonzero for K=" + std::to_string(r.K)};
    }
  }
  return {true, "6 rows exact; sum c_k = sum k c_k = 0 for K>=2"};
}

Outcome oracle_equivalence(Context& ctx) {
  double worst_dense = 0;
  for (unsigned seed = 0; seed < 16; ++seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    const std::size_t nodes = 3 + seed % 9;  // 1..9 interior nodes
    const Grid g = build_grid({{-2, 1}}, {nodes});
    const auto vfun = [](const Point& p) { return 0.5 + p[0] * p[0]; };
    const double kappa = 1.0 + seed, tau = 1.0 / (8 << (seed % 4));
    const auto ops = GpeOperators::build(g, vfun, kappa);
    const std::size_t m = g.size();
    ComplexField psi(m), phi(m), phin(m);
    for (auto* f : {&psi, &phi, &phin})
      for (auto& z : *f) z = {d(gen), d(gen)};

    auto H = testsupport::to_dense(laplacian(g));
    const auto V = eval_real_on_grid(g, vfun);
    testsupport::Dense A(m, std::vector<cplx>(m));
    std::vector<cplx> b(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (auto& x : H[i]) x *= -0.5;
      H[i][i] += V[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double rho = 0.5 * (std::norm(phi[i]) + std::norm(phin[i]));
      const cplx half = 0.5 * (phi[i] + phin[i]);
      cplx hpsi = 0;
      for (std::size_t j = 0; j < m; ++j) {
        A[i][j] = -0.5 * tau * H[i][j];
        hpsi += H[i][j] * psi[j];
      }
      A[i][i] += cplx(0, 1) - tau * kappa * rho;
      b[i] = cplx(0, 1) * psi[i] + 0.5 * tau * hpsi + tau * kappa * rho * (psi[i] - half);
    }
    const auto ref = testsupport::dense_solve(A, b);
    const auto got = ds_psi_step(psi, phi, phin, ops, tau, 1e-15);
    worst_dense = std::max(worst_dense, testsupport::rel_diff(got, ref));
  }

  const double tau = 1.0 / 64;
  RunOptions opt;
  opt.force_phi_equals_psi = true;
  const auto& u0 = ctx.desk_u0();
  const auto forced = ds_run(ctx.desk_ops, u0, tau, tau, 5, opt);
  const auto cn = cn_step(u0, ctx.desk_ops, tau, opt.cn);
  const double forced_diff = forced.ok() ? rel_l2(forced.psi, cn) : INFINITY;

  const bool pass = worst_dense <= 1e-12 && forced_diff <= 1e-10;
  return {pass, "dense oracle max rel diff " + fmt(worst_dense) + " (<=1e-12); forced phi=psi vs CN " +
                    fmt(forced_diff) + " (<=1e-10)"};
}

Outcome temporal_rates(Context& ctx) {
  std::string detail, why;
  bool pass = true;
  for (const auto s : {SchemeId::ds(5), SchemeId::cn(), SchemeId::besse()}) {
    const auto rows = ctx.rows_of(s);
    if (!all_completed(rows, why)) return {false, why};
    const double k = slope_of(rows, &ConvergenceRow::l2_error);
    pass = pass && std::abs(k - 2.0) <= 0.15;
    detail += s.name() + " " + fmt(k) + "  ";
  }
  return {pass, "fitted L2 slopes: " + detail + "(2.0 +- 0.15)"};
}

Outcome consistency_scaling(Context& ctx) {
  const auto rows = ctx.rows_of(SchemeId::ds(5));
  std::string why;
  if (!all_completed(rows, why)) return {false, why};
  const double kc = slope_of(rows, &ConvergenceRow::consistency_l2);
  const double ke = slope_of(rows, &ConvergenceRow::eta);
  double lo = INFINITY, hi = 0;
  std::string ratios;
  for (const auto& r : rows) {
    const double q = r.eta / r.h1_error;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    ratios += fmt(q, 3) + " ";
  }
  const bool pass = std::abs(kc - 2.0) <= 0.2 && std::abs(ke - 2.0) <= 0.2 && lo >= 0.2 && hi <= 5.0;
  return {pass, "slope |psi-phi|_L2 " + fmt(kc) + ", slope eta " + fmt(ke) + " (2.0 +- 0.2); eta/H1 per tau: " +
                    ratios + "(within [1/5, 5])"};
}

Outcome cn_conservation(Context& ctx) {
  RunOptions opt;
  opt.cadence = 1;
  opt.cn.fp_tol = 1e-12;
  const auto r = cn_run(ctx.desk_ops, ctx.desk_u0(), ctx.desk.final_time, 1.0 / 64, opt);
  if (!r.ok()) return {false, "run failed: " + r.diagnostic};
  const double m0 = r.series.front().mass, e0 = r.series.front().energy;
  double dm = 0, de = 0;
  for (const auto& rec : r.series) {
    dm = std::max(dm, std::abs(rec.mass - m0) / m0);
    de = std::max(de, std::abs(rec.energy - e0) / std::abs(e0));
  }
  return {dm <= 1e-8 && de <= 1e-8, "tau=2^-6, " + std::to_string(r.steps) + " steps: max rel mass drift " + fmt(dm) +
                                        ", energy drift " + fmt(de) + " (<=1e-8)"};
}

Outcome oscillation_damping(Context& ctx) {
  std::vector<double> pm, pe;
  for (double tau : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    RunOptions opt;
    opt.cadence = 1;
    const auto r = ds_run(ctx.desk_ops, ctx.desk_u0(), ctx.desk.final_time, tau, 5, opt);
    if (!r.ok()) return {false, "run failed at tau=" + fmt(tau) + ": " + r.diagnostic};
    auto [mlo, mhi] = std::minmax_element(r.series.begin(), r.series.end(),
                                          [](const auto& a, const auto& b) { return a.mass < b.mass; });
    auto [elo, ehi] = std::minmax_element(r.series.begin(), r.series.end(),
                                          [](const auto& a, const auto& b) { return a.energy < b.energy; });
    pm.push_back(mhi->mass - mlo->mass);
    pe.push_back(ehi->energy - elo->energy);
  }
  const bool pass = pm[0] > pm[1] && pm[1] > pm[2] && pe[0] > pe[1] && pe[1] > pe[2];
  return {pass, "DS-K5 peak-to-peak mass " + fmt(pm[0]) + " > " + fmt(pm[1]) + " > " + fmt(pm[2]) + ", energy " +
                    fmt(pe[0]) + " > " + fmt(pe[1]) + " > " + fmt(pe[2])};
}

Outcome k0_degradation(Context& ctx) {
  // Model problem 1 at the default resolution, where the undamped leapfrog is
  // expected to deteriorate at fine tau.
  const ProblemConfig mp1 = build_problem("mp1");
  const Grid g = mp1.grid.build();
  const auto ops = GpeOperators::build(g, mp1.potential.function(), mp1.kappa);
  const auto u0 = prepare_initial_state(mp1, ctx.work / "cache").u0;
  const double finest = kSweepTaus.back();
  const ComplexField ref = reference_solution(mp1, ops, u0, finest / 16, {}, ctx.work / "cache");

  struct Err {
    bool ok;
    double l2;
    std::string status;
  };
  const auto run = [&](double tau, int K) {
    const auto r = ds_run(ops, u0, mp1.final_time, tau, K);
    if (!r.ok()) return Err{false, INFINITY, to_string(r.status)};
    return Err{true, error_norms(g, r.psi, ref).l2, "completed"};
  };

  // Finest stable tau of the sweep for DS-K0.
  double tf = 0;
  Err k0{};
  for (auto it = kSweepTaus.rbegin(); it != kSweepTaus.rend(); ++it) {
    k0 = run(*it, 0);
    if (k0.ok) {
      tf = *it;
      break;
    }
  }
  if (tf == 0) return {false, "DS-K0 unstable at every sweep tau"};
  const Err k5 = run(tf, 5);
  const Err k0h = run(tf / 2, 0);
  const Err k5h = run(tf / 2, 5);
  const bool worse = k0.l2 > k5.l2;
  const bool breaks = !k0h.ok || (k0h.l2 > k0.l2 && k5h.l2 < k5.l2);
  std::ostringstream d;
  d << "mp1 L2 at tau=" << fmt(tf) << ": K0 " << fmt(k0.l2) << " vs K5 " << fmt(k5.l2) << "; at tau=" << fmt(tf / 2)
    << ": K0 " << (k0h.ok ? fmt(k0h.l2) : k0h.status) << " vs K5 " << fmt(k5h.l2)
    << " (need K0 > K5, then K0 unstable or K0 grows while K5 shrinks)";
  return {worse && breaks, d.str()};
}

Outcome k_insensitivity(Context& ctx) {
  const double tau = 1.0 / 64;
  std::vector<double> errs;
  std::string detail;
  for (int K : {3, 4, 5, 6})
    for (const auto& r : ctx.rows_of(SchemeId::ds(K)))
      if (r.tau == tau) {
        if (r.status != RunStatus::Completed) return {false, r.scheme.name() + " " + to_string(r.status)};
        errs.push_back(r.l2_error);
        detail += "K" + std::to_string(K) + " " + fmt(r.l2_error) + "  ";
      }
  if (errs.size() != 4) return {false, "missing sweep rows"};
  const auto [lo, hi] = std::minmax_element(errs.begin(), errs.end());
  const double spread = *hi / *lo - 1.0;
  return {spread <= 0.10, "L2 errors at tau=2^-6: " + detail + "spread " + fmt(spread) + " (<=0.10)"};
}

Outcome ground_state_energies(Context& ctx) {
  GroundStateParams h;
  h.potential = PotentialSpec::harmonic(1, 1);
  const auto res = ground_state(ctx.desk_grid, h);

  const ProblemConfig mp2 = build_problem("mp2");
  const Grid g2 = mp2.grid.build();
  const auto u0 = prepare_initial_state(mp2, ctx.work / "cache").u0;
  const RealField v0 = eval_real_on_grid(g2, mp2.potential.function());
  const double e2 = energy(g2, u0, v0, mp2.kappa);
  const double paper = 5.2996;
  const double rel = std::abs(e2 - paper) / paper;
  const bool pass = res.converged && std::abs(res.energy - 1.0) <= 0.01 && rel <= 0.05;
  return {pass, "harmonic E0 " + fmt(res.energy, 8) + " (1 +- 0.01); mp2 E(u0) " + fmt(e2, 8) + " vs 5.2996, rel " +
                    fmt(rel) + " (<=0.05)"};
}

Outcome mp2_h1_rate(Context& ctx) {
  StudySpec s;
  s.problem = build_problem("mp2", 241);
  s.schemes = {SchemeId::ds(5)};
  s.taus = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512, 1.0 / 1024};
  s.tau_ref = 1e-4;
  s.out = ctx.work / "mp2_sweep";
  const auto rows = cmd_converge(s, ctx.work / "cache");
  std::string why;
  if (!all_completed(rows, why)) return {false, why};
  std::string rates;
  for (const auto& r : rows)
    if (r.h1_rate) rates += fmt(*r.h1_rate, 3) + " ";
  const auto& a = rows[rows.size() - 2];
  const auto& b = rows.back();
  const double tail = 0.5 * (*a.h1_rate + *b.h1_rate);
  return {tail >= 1.25 && tail <= 1.85,
          "DS-K5 adjacent H1 rates " + rates + "; mean of last two " + fmt(tail) + " (in [1.25, 1.85])"};
}

struct Criterion {
  std::string name;
  std::function<Outcome(Context&)> check;
  bool slow = false;
};

}  // namespace

int main(int argc, char** argv) {
  bool slow = false, slow_only = false;
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--slow") slow = true;
    else if (a == "--slow-only") slow = slow_only = true;
    else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string item; std::getline(ss, item, ',');) only.push_back(item);
    } else {
      std::cerr << "usage: acceptance [--slow | --slow-only] [--only name,...]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {"coefficient_table", coefficient_table},
      {"oracle_equivalence", oracle_equivalence},
      {"temporal_rates", temporal_rates},
      {"consistency_scaling", consistency_scaling},
      {"cn_conservation", cn_conservation},
      {"oscillation_damping", oscillation_damping},
      {"k0_degradation", k0_degradation},
      {"k_insensitivity", k_insensitivity},
      {"ground_state", ground_state_energies},
      {"mp2_h1_rate", mp2_h1_rate, true},
  };

  Context ctx;
  ctx.work = fs::temp_directory_path() / "shadowgpe_acceptance";
  fs::remove_all(ctx.work);
  fs::create_directories(ctx.work);

  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    if (only.empty() && (c.slow ? !slow : slow_only)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt(secs, 3) << " s]"
              << std::endl;
    failures += !o.pass;
    ++ran;
  }
  std::cout << (failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failures)) << " (" << ran
            << " criteria)" << std::endl;
  return failures == 0 ? 0 : 1;
}
