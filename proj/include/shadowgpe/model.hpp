#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/sparse.hpp"
#include "shadowgpe/spatialop.hpp"

namespace shadowgpe {

/// Density nonlinearity V[rho] and its derivative. For the cubic case only the
/// rho-dependent part kappa * rho is carried here; the spatial part 2 V0 is a
/// potential diagonal, so that 1/2 V[rho] psi = V0 psi + 1/2 eval(rho) psi.
struct Nonlinearity {
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  std::string label;

  static Nonlinearity cubic(double kappa);
};

struct PotentialSpec {
  enum class Kind { None, Harmonic, Checkerboard, Sum };
  Kind kind = Kind::None;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  std::vector<PotentialSpec> terms;  // Kind::Sum

  static PotentialSpec none() { return {}; }
  static PotentialSpec harmonic(double g1, double g2) { return {Kind::Harmonic, g1, g2, {}}; }
  static PotentialSpec checkerboard() { return {Kind::Checkerboard, 1.0, 1.0, {}}; }
  static PotentialSpec sum(std::vector<PotentialSpec> terms) {
    return {Kind::Sum, 1.0, 1.0, std::move(terms)};
  }

  PotentialFn function() const;
};

struct GroundStateParams {
  PotentialSpec potential = PotentialSpec::harmonic(1.0, 1.0);
  double kappa0 = 0.0;
  double omega = 0.0;         // angular velocity of the stirring term
  double sigma = 0.01;        // pseudo-time step
  double energy_tol = 1e-10;  // stop once the energy drop per iteration is below this
  std::size_t max_iter = 200000;
  bool seed_phase = true;     // imprint a single-vortex phase on the seed when omega != 0

  void validate() const;
};

struct InitialState {
  enum class Kind { GroundState, Snapshot };
  Kind kind = Kind::GroundState;
  GroundStateParams ground_state;
  std::string snapshot_path;
};

struct GridSpec {
  std::vector<Interval> bounds;
  std::vector<std::size_t> nodes;

  Grid build() const { return build_grid(bounds, nodes); }
};

struct SchemeId {
  enum class Kind { DissipativeShadow, CrankNicolson, Besse };
  Kind kind = Kind::DissipativeShadow;
  int K = 5;

  static SchemeId ds(int k) { return {Kind::DissipativeShadow, k}; }
  static SchemeId cn() { return {Kind::CrankNicolson, 0}; }
  static SchemeId besse() { return {Kind::Besse, 0}; }
  /// "ds-k5", "cn", "besse"
  static SchemeId parse(std::string_view text);
  std::string name() const;
  bool operator==(const SchemeId&) const = default;
};

struct ProblemConfig {
  std::string name = "custom";
  GridSpec grid;
  PotentialSpec potential;  // evolution potential V0
  double kappa = 0.0;
  InitialState initial;
  double final_time = 1.0;
  double tau = 1.0 / 64.0;
  SchemeId scheme;
  double mu = 0.0;  // fictitious mass, extended-energy diagnostic only

  /// Throws std::invalid_argument on tau <= 0, T < tau, unknown K.
  void validate() const;
};

/// "mp1", "mp2", or "desk" (reduced problem used by the acceptance suite).
ProblemConfig build_problem(std::string_view name, std::size_t nodes_per_dim = 121);

/// Right-hand side of the reduced shadow system for a general nonlinearity:
/// -1/2 Lap psi + V0 psi + 1/2 N(rho) psi + 1/2 rho N'(rho) (3 psi - 2 phi), rho = |phi|^2.
ComplexField shadow_rhs_general(std::span<const cplx> psi, std::span<const cplx> phi,
                                const Nonlinearity& nonlinearity,
                                const SparseOperator& potential_op,
                                const SparseOperator& laplacian_op);

bool is_valid_dissipation_order(int k);

nlohmann::json to_json(const PotentialSpec& p);
PotentialSpec potential_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroundStateParams& p);
GroundStateParams ground_state_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridSpec& g);
GridSpec grid_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemConfig& c);
ProblemConfig problem_from_json(const nlohmann::json& j);

}  // namespace shadowgpe
