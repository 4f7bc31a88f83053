#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/linsolve.hpp"
#include "shadowgpe/model.hpp"
#include "shadowgpe/observables.hpp"
#include "shadowgpe/sparse.hpp"

namespace shadowgpe {

/// One row of the dissipative leapfrog coefficients: beta = (tau omega)^2,
/// alpha scales the tail sum_k c_k phi^{n-k}, k = 0..K+1.
struct DissipationRow {
  int K;
  double beta;
  double alpha;
  std::vector<int> c;
};

class DissipationTable {
 public:
  explicit DissipationTable(std::vector<DissipationRow> rows);

  static const DissipationTable& standard();

  /// Throws std::invalid_argument for orders not in the table.
  const DissipationRow& row(int K) const;
  std::span<const DissipationRow> rows() const noexcept { return rows_; }

 private:
  std::vector<DissipationRow> rows_;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spatial operators of one evolution problem.
struct GpeOperators {
  Grid grid;
  SparseOperator laplacian;
  RealField potential;
  SparseOperator hamiltonian;  // -1/2 Lap + V0
  double kappa = 0.0;

  static GpeOperators build(const Grid& grid, const PotentialFn& v0, double kappa);
};

/// psi^n plus the phi history phi^n, ..., phi^{n-K-1} of the dissipative leapfrog.
class ShadowState {
 public:
  /// psi^0 = phi^0 = u0 with ghost values phi^{-k} = phi^0 (phi-dot(0) = 0).
  static ShadowState initial(const ComplexField& u0, double tau, int K,
                             const DissipationTable& table = DissipationTable::standard());

  std::size_t n = 0;
  ComplexField psi;
  double tau = 0.0;
  double omega_sq = 0.0;  // beta_K / tau^2
  int K = 0;

  /// phi^{n-lag}, 0 <= lag <= K+1.
  const ComplexField& phi(std::size_t lag = 0) const;
  std::size_t history_size() const noexcept { return ring_.size(); }

  /// Shift the history by one step.
  void advance(ComplexField psi_next, ComplexField phi_next);

 private:
  std::vector<ComplexField> ring_;
  std::size_t head_ = 0;  // slot of phi^n
};

struct StepStats {
  std::size_t linear_solves = 0;
  std::size_t linear_iterations = 0;
  std::size_t fixed_point_iterations = 0;

  StepStats& operator+=(const StepStats& o) {
    linear_solves += o.linear_solves;
    linear_iterations += o.linear_iterations;
    fixed_point_iterations += o.fixed_point_iterations;
    return *this;
  }
};

/// Cubic fast path of the reduced shadow right-hand side:
/// -1/2 Lap psi + V0 psi + kappa |phi|^2 (2 psi - phi).
ComplexField shadow_rhs(std::span<const cplx> psi, std::span<const cplx> phi, const GpeOperators& ops);

/// Explicit dissipative leapfrog:
/// phi^{n+1} = 2 phi^n - phi^{n-1} + beta (psi^n - phi^n) + alpha sum_k c_k phi^{n-k}.
ComplexField ds_phi_step(const ShadowState& state, const DissipationTable& table, int K);

/// Linear system A psi^{n+1} = b of the shadow Crank-Nicolson update.
struct LinearSystem {
  SparseOperator matrix;
  ComplexField rhs;
};

LinearSystem assemble_ds_system(std::span<const cplx> psi_n, std::span<const cplx> phi_n,
                                std::span<const cplx> phi_next, const GpeOperators& ops, double tau);

/// One linear solve of the shadow Crank-Nicolson equation. Throws SolverFailure.
ComplexField ds_psi_step(std::span<const cplx> psi_n, std::span<const cplx> phi_n,
                         std::span<const cplx> phi_next, const GpeOperators& ops, double tau,
                         double tol = kDefaultSolveTol, StepStats* stats = nullptr);

struct CnOptions {
  double fp_tol = 1e-12;
  std::size_t fp_max_iter = 100;
  double lin_tol = kDefaultSolveTol;
};

/// Nonlinear Crank-Nicolson step solved by fixed-point iteration on the
/// density factor. The linear tolerance is tightened to fp_tol / 10 when
/// needed. Throws SolverFailure when the iteration does not settle.
ComplexField cn_step(std::span<const cplx> psi_n, const GpeOperators& ops, double tau,
                     const CnOptions& options = {}, StepStats* stats = nullptr);

struct BesseStep {
  ComplexField psi;
  RealField density_half;  // Phi^{n+1/2}
};

/// Relaxation step: Phi^{n+1/2} = 2|psi^n|^2 - Phi^{n-1/2}, then one linear
/// Crank-Nicolson solve with the density frozen at Phi^{n+1/2}.
BesseStep besse_step(std::span<const cplx> psi_n, std::span<const double> density_prev_half,
                     const GpeOperators& ops, double tau, double tol = kDefaultSolveTol,
                     StepStats* stats = nullptr);

enum class RunStatus { Completed, Unstable, SolverFailure };
std::string to_string(RunStatus s);

struct RunOptions {
  std::size_t cadence = 0;  // observable record every `cadence` steps, 0 disables
  double lin_tol = kDefaultSolveTol;
  CnOptions cn{};
  double mu = 0.0;  // fictitious mass for the extended-energy diagnostic
  /// Replace phi by psi in every shadow step (phi^{n+1} found by fixed point);
  /// reduces the method to Crank-Nicolson.
  bool force_phi_equals_psi = false;
  /// A run whose mass exceeds this multiple of the initial mass is unstable.
  double blowup_mass_factor = 1e3;
  std::size_t snapshot_cadence = 0;
  std::function<void(std::size_t n, double t, std::span<const cplx> psi, std::span<const cplx> phi)>
      on_snapshot;
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;
  std::size_t steps = 0;  // completed steps
  double time = 0.0;
  ComplexField psi;
  ComplexField phi;  // equals psi for Crank-Nicolson and Besse
  std::vector<ObservableRecord> series;
  StepStats stats;

  bool ok() const noexcept { return status == RunStatus::Completed; }
};

/// round(T / tau); throws if tau does not divide T within rounding.
std::size_t step_count(double final_time, double tau);

RunResult ds_run(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau, int K,
                 const RunOptions& options = {});
RunResult cn_run(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                 const RunOptions& options = {});
RunResult besse_run(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                    const RunOptions& options = {});
RunResult run_scheme(const GpeOperators& ops, const ComplexField& u0, double final_time, double tau,
                     SchemeId scheme, const RunOptions& options = {});

}  // namespace shadowgpe
