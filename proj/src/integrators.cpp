#include "shadowgpe/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shadowgpe/kernels.hpp"
#include "shadowgpe/spatialop.hpp"

namespace shadowgpe {

namespace k = kernels::omp;

// ---- coefficient table --------------------------------------------------

DissipationTable::DissipationTable(std::vector<DissipationRow> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (r.K != 0 && r.c.size() != static_cast<std::size_t>(r.K) + 2)
      throw std::invalid_argument("dissipation row K=" + std::to_string(r.K) + " needs K+2 coefficients");
  }
}

const DissipationTable& DissipationTable::standard() {
  // alpha is tabulated as alpha * 10^3 in the literature; stored multiplied out.
  static const DissipationTable table({
      {0, 1.30, 0.0, {}},
      {2, 1.69, 150e-3, {-2, 3, 0, -1}},
      {3, 1.75, 57e-3, {-3, 6, -2, -2, 1}},
      {4, 1.82, 18e-3, {-6, 14, -8, -3, 4, -1}},
      {5, 1.84, 5.5e-3, {-14, 36, -27, -2, 12, -6, 1}},
      {6, 1.86, 1.6e-3, {-36, 99, -88, 11, 32, -25, 8, -1}},
  });
  return table;
}

const DissipationRow& DissipationTable::row(int K) const {
  for (const auto& r : rows_)
    if (r.K == K) return r;
  throw std::invalid_argument("no dissipation coefficients for K=" + std::to_string(K));
}

// ---- operators and state ------------------------------------------------

GpeOperators GpeOperators::build(const Grid& grid, const PotentialFn& v0, double kappa) {
  GpeOperators ops{grid, shadowgpe::laplacian(grid), eval_real_on_grid(grid, v0), {}, kappa};
  for (double v : ops.potential)
    if (!std::isfinite(v)) throw std::invalid_argument("potential: non-finite value on grid");
  ops.hamiltonian = linear_combination(-0.5, ops.laplacian, 1.0,
                                       SparseOperator::diagonal(std::span<const double>(ops.potential)));
  return ops;
}

ShadowState ShadowState::initial(const ComplexField& u0, double tau, int K, const DissipationTable& table) {
  if (!(tau > 0.0)) throw std::invalid_argument("shadow state: tau must be positive");
  const auto& row = table.row(K);
  ShadowState s;
  s.psi = u0;
  s.tau = tau;
  s.omega_sq = row.beta / (tau * tau);
  s.K = K;
  s.ring_.assign(static_cast<std::size_t>(K) + 2, u0);
  return s;
}

const ComplexField& ShadowState::phi(std::size_t lag) const {
  if (lag >= ring_.size()) throw std::out_of_range("shadow state: phi history too short");
  return ring_[(head_ + lag) % ring_.size()];
}

void ShadowState::advance(ComplexField psi_next, ComplexField phi_next) {
  head_ = (head_ + ring_.size() - 1) % ring_.size();
  ring_[head_] = std::move(phi_next);
  psi = std::move(psi_next);
  ++n;
}

// ---- single steps -------------------------------------------------------

ComplexField shadow_rhs(std::span<const cplx> psi, std::span<const cplx> phi, const GpeOperators& ops) {
  ComplexField out = ops.hamiltonian.apply(psi);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += ops.kappa * std::norm(phi[i]) * (2.0 * psi[i] - phi[i]);
  return out;
}

ComplexField ds_phi_step(const ShadowState& state, const DissipationTable& table, int K) {
  const auto& row = table.row(K);
  const std::size_t taps = static_cast<std::size_t>(K) + 2;
  if (state.history_size() < taps) throw std::invalid_argument("ds_phi_step: phi history too short");

  // Collect the recursion as one linear combination of psi^n and the history.
  std::vector<double> coeff{row.beta, 2.0 - row.beta, -1.0};
  std::vector<std::span<const cplx>> fields{state.psi, state.phi(0), state.phi(1)};
  if (!row.c.empty()) {
    coeff[1] += row.alpha * row.c[0];
    coeff[2] += row.alpha * row.c[1];
    for (std::size_t lag = 2; lag < taps; ++lag) {
      if (row.c[lag] == 0) continue;
      coeff.push_back(row.alpha * row.c[lag]);
      fields.emplace_back(state.phi(lag));
    }
  }
  ComplexField next(state.psi.size());
  k::combine(coeff, fields, next);
  return next;
}

LinearSystem assemble_ds_system(std::span<const cplx> psi_n, std::span<const cplx> phi_n,
                                std::span<const cplx> phi_next, const GpeOperators& ops, double tau) {
  const std::size_t m = ops.grid.size();
  if (psi_n.size() != m || phi_n.size() != m || phi_next.size() != m)
    throw std::invalid_argument("ds_psi_step: field size mismatch");
  const cplx i{0.0, 1.0};
  const double kappa = ops.kappa;

  // i psi' - tau/2 (H + 2 kappa rho) psi' = i psi + tau/2 (H + 2 kappa rho) psi - tau kappa rho phi_half
  ComplexField shift(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double rho = 0.5 * (std::norm(phi_next[j]) + std::norm(phi_n[j]));
    shift[j] = i - tau * kappa * rho;
  }
  LinearSystem sys{ops.hamiltonian.scaled_plus_diagonal(-0.5 * tau, shift), ops.hamiltonian.apply(psi_n)};
  for (std::size_t j = 0; j < m; ++j) {
    const double rho = 0.5 * (std::norm(phi_next[j]) + std::norm(phi_n[j]));
    const cplx phi_half = 0.5 * (phi_next[j] + phi_n[j]);
    sys.rhs[j] = i * psi_n[j] + 0.5 * tau * sys.rhs[j] + tau * kappa * rho * (psi_n[j] - phi_half);
  }
  return sys;
}

namespace {

ComplexField checked_solve(const SparseOperator& a, std::span<const cplx> b, double tol,
                           std::span<const cplx> guess, StepStats* stats, const char* what) {
  auto [x, report] = solve(a, b, tol, 0, guess);
  if (stats) {
    ++stats->linear_solves;
    stats->linear_iterations += report.iterations;
  }
  if (!report.converged) {
    std::ostringstream msg;
    msg << what << ": linear solve did not converge (" << report.iterations
        << " iterations, relative residual " << report.relative_residual << ")";
    throw SolverFailure(msg.str());
  }
  return std::move(x);
}

// A = i I - tau/2 (H + diag(d)), b = i psi + tau/2 (H + diag(d)) psi
LinearSystem assemble_cn_system(std::span<const cplx> psi_n, std::span<const double> density,
                                const GpeOperators& ops, double tau) {
  const std::size_t m = ops.grid.size();
  const cplx i{0.0, 1.0};
  ComplexField shift(m);
  for (std::size_t j = 0; j < m; ++j) shift[j] = i - 0.5 * tau * ops.kappa * density[j];
  LinearSystem sys{ops.hamiltonian.scaled_plus_diagonal(-0.5 * tau, shift), ops.hamiltonian.apply(psi_n)};
  for (std::size_t j = 0; j < m; ++j)
    sys.rhs[j] = i * psi_n[j] + 0.5 * tau * (sys.rhs[j] + ops.kappa * density[j] * psi_n[j]);
  return sys;
}

}  // namespace

ComplexField ds_psi_step(std::span<const cplx> psi_n, std::span<const cplx> phi_n,
                         std::span<const cplx> phi_next, const GpeOperators& ops, double tau, double tol,
                         StepStats* stats) {
  const LinearSystem sys = assemble_ds_system(psi_n, phi_n, phi_next, ops, tau);
  return checked_solve(sys.matrix, sys.rhs, tol, psi_n, stats, "ds_psi_step");
}

ComplexField cn_step(std::span<const cplx> psi_n, const GpeOperators& ops, double tau,
                     const CnOptions& options, StepStats* stats) {
  const std::size_t m = ops.grid.size();
  if (psi_n.size() != m) throw std::invalid_argument("cn_step: field size mismatch");
  const double lin_tol = std::max(1e-14, std::min(options.lin_tol, 0.1 * options.fp_tol));

  RealField density(m);
  ComplexField iterate(psi_n.begin(), psi_n.end());
  for (std::size_t it = 1; it <= options.fp_max_iter; ++it) {
    for (std::size_t j = 0; j < m; ++j) density[j] = 0.5 * (std::norm(iterate[j]) + std::norm(psi_n[j]));
    const LinearSystem sys = assemble_cn_system(psi_n, density, ops, tau);
    ComplexField next = checked_solve(sys.matrix, sys.rhs, lin_tol, iterate, stats, "cn_step");
    if (stats) ++stats->fixed_point_iterations;
    if (ops.kappa == 0.0) return next;  // linear problem: one solve is exact

    ComplexField diff = next;
    k::axpy(-1.0, iterate, diff);
    const double change = mass(ops.grid, diff);
    iterate = std::move(next);
    if (change <= options.fp_tol) return iterate;
    if (!std::isfinite(change)) break;
  }
  throw SolverFailure("cn_step: fixed-point iteration did not converge within " +
                      std::to_string(options.fp_max_iter) + " iterations");
}

BesseStep besse_step(std::span<const cplx> psi_n, std::span<const double> density_prev_half,
                     const GpeOperators& ops, double tau, double tol, StepStats* stats) {
  const std::size_t m = ops.grid.size();
  if (psi_n.size() != m || density_prev_half.size() != m)
    throw std::invalid_argument("besse_step: field size mismatch");
  BesseStep out;
  out.density_half.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.density_half[j] = 2.0 * std::norm(psi_n[j]) - density_prev_half[j];
  const LinearSystem sys = assemble_cn_system(psi_n, out.density_half, ops, tau);
  out.psi = checked_solve(sys.matrix, sys.rhs, tol, psi_n, stats, "besse_step");
  return out;
}

// ---- trajectories -------------------------------------------------------

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::Unstable:
      return "unstable";
    case RunStatus::SolverFailure:
      return "solver_failure";
  }
  return "?";
}

std::size_t step_count(double final_time, double tau) {
  if (!(tau > 0.0) || !(final_time >= tau)) throw std::invalid_argument("step_count: need 0 < tau <= T");
  const double ratio = final_time / tau;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * ratio)
    throw std::invalid_argument("step_count: tau does not divide the final time");
  return static_cast<std::size_t>(steps);
}

namespace {

bool all_finite(std::span<const cplx> f) {
  return std::all_of(f.begin(), f.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ObservableRecord plain_record(const GpeOperators& ops, std::size_t n, double tau, std::span<const cplx> psi) {
  ObservableRecord r;
  r.n = n;
  r.t = static_cast<double>(n) * tau;
  r.mass = mass(ops.grid, psi);
  r.energy = energy(ops.grid, psi, ops.potential, ops.kappa);
  return r;
}

ObservableRecord shadow_record(const GpeOperators& ops, const ShadowState& s, double beta, double mu) {
  ObservableRecord r = plain_record(ops, s.n, s.tau, s.psi);
  const double e_phi = energy(ops.grid, s.phi(0), ops.potential, ops.kappa);
  r.eta = std::abs(r.energy - e_phi);
  const auto c = error_norms(ops.grid, s.psi, s.phi(0));
  r.consistency_l2 = c.l2;
  r.consistency_h1 = c.h1;
  r.extended_energy = extended_energy(ops.grid, s.psi, s.phi(0), s.phi(1), s.tau,
                                      {mu, std::sqrt(beta) / s.tau}, ops.potential, ops.kappa);
  return r;
}

// Steppers propose a step, the driver checks it, then accepts it. On failure
// the stepper still holds the last healthy state.
class DsStepper {
 public:
  DsStepper(const GpeOperators& ops, const ComplexField& u0, double tau, int K, const RunOptions& opt)
      : ops_(ops), table_(DissipationTable::standard()), beta_(table_.row(K).beta), K_(K), opt_(opt),
        state_(ShadowState::initial(u0, tau, K, table_)) {}

  void propose(StepStats& stats) {
    const double tau = state_.tau;
    if (opt_.force_phi_equals_psi) {
      // phi^n := psi^n and phi^{n+1} := psi^{n+1}, resolved by fixed point.
      const double tol = std::max(1e-14, std::min(opt_.lin_tol, 0.1 * opt_.cn.fp_tol));
      ComplexField guess = state_.psi;
      for (std::size_t it = 1;; ++it) {
        ComplexField next = ds_psi_step(state_.psi, state_.psi, guess, ops_, tau, tol, &stats);
        ++stats.fixed_point_iterations;
        ComplexField diff = next;
        k::axpy(-1.0, guess, diff);
        guess = std::move(next);
        if (mass(ops_.grid, diff) <= opt_.cn.fp_tol) break;
        if (it >= opt_.cn.fp_max_iter) throw SolverFailure("forced phi=psi fixed point did not converge");
      }
      psi_next_ = guess;
      phi_next_ = std::move(guess);
    } else {
      phi_next_ = ds_phi_step(state_, table_, K_);
      psi_next_ = ds_psi_step(state_.psi, state_.phi(0), phi_next_, ops_, tau, opt_.lin_tol, &stats);
    }
  }
  std::span<const cplx> proposed_psi() const { return psi_next_; }
  std::span<const cplx> proposed_phi() const { return phi_next_; }
  void accept() { state_.advance(std::move(psi_next_), std::move(phi_next_)); }

  ObservableRecord record() const { return shadow_record(ops_, state_, beta_, opt_.mu); }
  std::span<const cplx> psi() const { return state_.psi; }
  std::span<const cplx> phi() const { return state_.phi(0); }

 private:
  const GpeOperators& ops_;
  const DissipationTable& table_;
  double beta_;
  int K_;
  const RunOptions& opt_;
  ShadowState state_;
  ComplexField psi_next_, phi_next_;
};

class CnStepper {
 public:
  CnStepper(const GpeOperators& ops, const ComplexField& u0, double tau, const RunOptions& opt)
      : ops_(ops), tau_(tau), opt_(opt), psi_(u0) {}

  void propose(StepStats& stats) { next_ = cn_step(psi_, ops_, tau_, opt_.cn, &stats); }
  std::span<const cplx> proposed_psi() const { return next_; }
  std::span<const cplx> proposed_phi() const { return next_; }
  void accept() {
    psi_ = std::move(next_);
    ++n_;
  }
  ObservableRecord record() const { return plain_record(ops_, n_, tau_, psi_); }
  std::span<const cplx> psi() const { return psi_; }
  std::span<const cplx> phi() const { return psi_; }

 private:
  const GpeOperators& ops_;
  double tau_;
  const RunOptions& opt_;
  ComplexField psi_, next_;
  std::size_t n_ = 0;
};

class BesseStepper {
 public:
  BesseStepper(const GpeOperators& ops, const ComplexField& u0, double tau, const RunOptions& opt)
      : ops_(ops), tau_(tau), opt_(opt), psi_(u0), density_half_(u0.size()) {
    for (std::size_t j = 0; j < u0.size(); ++j) density_half_[j] = std::norm(u0[j]);
  }

  void propose(StepStats& stats) { next_ = besse_step(psi_, density_half_, ops_, tau_, opt_.lin_tol, &stats); }
  std::span<const cplx> proposed_psi() const { return next_.psi; }
  std::span<const cplx> proposed_phi() const { return next_.psi; }
  void accept() {
    psi_ = std::move(next_.psi);
    density_half_ = std::move(next_.density_half);
    ++n_;
  }
  ObservableRecord record() const { return plain_record(ops_, n_, tau_, psi_); }
  std::span<const cplx> psi() const { return psi_; }
  std::span<const cplx> phi() const { return psi_; }

 private:
  const GpeOperators& ops_;
  double tau_;
  const RunOptions& opt_;
  ComplexField psi_;
  RealField density_half_;
  BesseStep next_;
  std::size_t n_ = 0;
};

template <class Stepper>
RunResult drive(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                const RunOptions& opt, Stepper& stepper) {
  if (u0.size() != ops.grid.size()) throw std::invalid_argument("run: initial field does not match grid");
  RunResult res;
  const std::size_t steps = step_count(final_time, tau);
  const double mass0 = mass(ops.grid, u0);
  const auto emit = [&](std::size_t n) {
    if (opt.cadence > 0 && n % opt.cadence == 0) res.series.push_back(stepper.record());
    if (opt.on_snapshot && opt.snapshot_cadence > 0 && n % opt.snapshot_cadence == 0)
      opt.on_snapshot(n, static_cast<double>(n) * tau, stepper.psi(), stepper.phi());
  };

  emit(0);
  for (std::size_t n = 0; n < steps; ++n) {
    const std::string where = "step " + std::to_string(n + 1) + ": ";
    try {
      stepper.propose(res.stats);
    } catch (const SolverFailure& e) {
      res.status = RunStatus::SolverFailure;
      res.diagnostic = where + e.what();
      break;
    }
    if (!all_finite(stepper.proposed_psi()) || !all_finite(stepper.proposed_phi())) {
      res.status = RunStatus::Unstable;
      res.diagnostic = where + "non-finite field values";
      break;
    }
    const double m = mass(ops.grid, stepper.proposed_psi());
    if (m > opt.blowup_mass_factor * mass0) {
      res.status = RunStatus::Unstable;
      res.diagnostic = where + "mass grew to " + std::to_string(m);
      break;
    }
    stepper.accept();
    res.steps = n + 1;
    emit(n + 1);
  }
  res.time = static_cast<double>(res.steps) * tau;
  if (!res.ok() && opt.cadence > 0 && (res.series.empty() || res.series.back().n != res.steps))
    res.series.push_back(stepper.record());  // last healthy state
  res.psi.assign(stepper.psi().begin(), stepper.psi().end());
  res.phi.assign(stepper.phi().begin(), stepper.phi().end());
  return res;
}

}  // namespace

RunResult ds_run(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau, int K,
                 const RunOptions& options) {
  DsStepper stepper(ops, u0, tau, K, options);
  return drive(ops, u0, final_time, tau, options, stepper);
}

RunResult cn_run(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                 const RunOptions& options) {
  CnStepper stepper(ops, u0, tau, options);
  return drive(ops, u0, final_time, tau, options, stepper);
}

RunResult besse_run(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                    const RunOptions& options) {
  BesseStepper stepper(ops, u0, tau, options);
  return drive(ops, u0, final_time, tau, options, stepper);
}

RunResult run_scheme(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                     SchemeId scheme, const RunOptions& options) {
  switch (scheme.kind) {
    case SchemeId::Kind::DissipativeShadow:
      return ds_run(ops, u0, final_time, tau, scheme.K, options);
    case SchemeId::Kind::CrankNicolson:
      return cn_run(ops, u0, final_time, tau, options);
    case SchemeId::Kind::Besse:
      return besse_run(ops, u0, final_time, tau, options);
  }
  throw std::logic_error("unreachable scheme kind");
}

}  // namespace shadowgpe
