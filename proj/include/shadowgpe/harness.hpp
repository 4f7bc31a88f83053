#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowgpe/integrators.hpp"
#include "shadowgpe/model.hpp"

namespace shadowgpe {

namespace fs = std::filesystem;

/// A convergence sweep: every scheme at every tau, measured against one
/// Crank-Nicolson reference at tau_ref.
struct StudySpec {
  ProblemConfig problem;
  std::vector<SchemeId> schemes{SchemeId::ds(5), SchemeId::cn(), SchemeId::besse()};
  std::vector<double> taus{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  double tau_ref = 1.0 / 2048;
  fs::path out = "out";
  std::size_t cadence = 0;
  std::optional<std::size_t> resolution;  // nodes per dimension override
  RunOptions run;

  /// tau list sorted descending, tau_ref < min(tau)/4, every tau divides T.
  void validate() const;
  /// Problem with the resolution override applied.
  ProblemConfig effective_problem() const;
};

StudySpec study_from_json(const nlohmann::json& j, const fs::path& base_dir = {});

struct ConvergenceRow {
  SchemeId scheme;
  double tau = 0.0;
  std::size_t steps = 0;
  double l2_error = 0.0;
  double h1_error = 0.0;
  double eta = 0.0;
  double consistency_l2 = 0.0;
  double consistency_h1 = 0.0;
  std::optional<double> l2_rate;  // against the previous (coarser) tau of the same scheme
  std::optional<double> h1_rate;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;
};

inline constexpr const char* kConvergenceHeader =
    "scheme,tau,steps,l2_error,h1_error,eta,consistency_l2,consistency_h1,fitted_rate,h1_rate,status";

void write_convergence_table(const fs::path& path, std::span<const ConvergenceRow> rows);

/// log2(e_prev / e) / log2(tau_prev / tau) when both errors are finite and positive.
std::optional<double> adjacent_rate(double tau_prev, double err_prev, double tau, double err);
/// Least-squares slope of log(err) against log(tau).
double fitted_slope(std::span<const double> taus, std::span<const double> errs);

struct InitialStateInfo {
  ComplexField u0;
  std::string hash;
  bool cache_hit = false;
  double energy0 = 0.0;  // E0 of the ground-state stage (0 for snapshots)
  bool converged = true;
  std::size_t iterations = 0;
};

/// Ground state (cached under cache_dir by content hash) or snapshot load.
InitialStateInfo prepare_initial_state(const ProblemConfig& problem, const fs::path& cache_dir);

/// Crank-Nicolson solution at T with step tau_ref, cached by content hash.
ComplexField reference_solution(const ProblemConfig& problem, const GpeOperators& ops,
                                const ComplexField& u0, double tau_ref, const RunOptions& run,
                                const fs::path& cache_dir, bool* cache_hit = nullptr);

std::string field_hash(std::span<const cplx> f);

struct GroundStateReport {
  InitialStateInfo info;
  int vortices = 0;
  double mass = 0.0;
  double evolution_energy = 0.0;  // E of u0 under the evolution energy
};

GroundStateReport cmd_groundstate(const ProblemConfig& problem, const fs::path& out,
                                  const fs::path& cache_dir);

struct EvolveReport {
  RunResult run;
  InitialStateInfo initial;
};

EvolveReport cmd_evolve(const ProblemConfig& problem, const fs::path& out, const fs::path& cache_dir,
                        std::size_t cadence, std::size_t snapshot_cadence, const RunOptions& run = {});

std::vector<ConvergenceRow> cmd_converge(const StudySpec& study, const fs::path& cache_dir);

/// Command-line entry point: groundstate | evolve | converge | tables.
int run_cli(int argc, const char* const* argv);

}  // namespace shadowgpe
