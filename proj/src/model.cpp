#include "shadowgpe/model.hpp"

#include <cmath>
#include <stdexcept>

namespace shadowgpe {

using nlohmann::json;

Nonlinearity Nonlinearity::cubic(double kappa) {
  return {[kappa](double rho) { return kappa * rho; }, [kappa](double) { return kappa; },
          "cubic(kappa=" + std::to_string(kappa) + ")"};
}

PotentialFn PotentialSpec::function() const {
  switch (kind) {
    case Kind::None:
      return [](const Point&) { return 0.0; };
    case Kind::Harmonic:
      return harmonic_trap(gamma1, gamma2);
    case Kind::Checkerboard:
      return checkerboard_trap();
    case Kind::Sum: {
      std::vector<PotentialFn> fns;
      for (const auto& t : terms) fns.push_back(t.function());
      return [fns = std::move(fns)](const Point& p) {
        double v = 0.0;
        for (const auto& f : fns) v += f(p);
        return v;
      };
    }
  }
  throw std::logic_error("unreachable potential kind");
}

void GroundStateParams::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("ground state: sigma must be positive");
  if (!(energy_tol > 0.0)) throw std::invalid_argument("ground state: energy_tol must be positive");
  if (max_iter == 0) throw std::invalid_argument("ground state: max_iter must be positive");
}

SchemeId SchemeId::parse(std::string_view text) {
  if (text == "cn") return cn();
  if (text == "besse") return besse();
  if (text.starts_with("ds-k")) {
    const std::string digits(text.substr(4));
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
      const int k = std::stoi(digits);
      if (is_valid_dissipation_order(k)) return ds(k);
    }
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) +
                              "' (expected ds-k0, ds-k2..ds-k6, cn, besse)");
}

std::string SchemeId::name() const {
  switch (kind) {
    case Kind::DissipativeShadow:
      return "ds-k" + std::to_string(K);
    case Kind::CrankNicolson:
      return "cn";
    case Kind::Besse:
      return "besse";
  }
  return "?";
}

bool is_valid_dissipation_order(int k) { return k == 0 || (k >= 2 && k <= 6); }

void ProblemConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("problem: tau must be positive");
  if (!(final_time >= tau)) throw std::invalid_argument("problem: final time must be >= tau");
  if (scheme.kind == SchemeId::Kind::DissipativeShadow && !is_valid_dissipation_order(scheme.K))
    throw std::invalid_argument("problem: dissipation order must be one of 0,2,3,4,5,6");
  if (mu < 0.0) throw std::invalid_argument("problem: mu must be non-negative");
  if (initial.kind == InitialState::Kind::GroundState) initial.ground_state.validate();
  (void)grid.build();
}

ProblemConfig build_problem(std::string_view name, std::size_t nodes_per_dim) {
  ProblemConfig c;
  c.grid = {{{-6.0, 6.0}, {-6.0, 6.0}}, {nodes_per_dim, nodes_per_dim}};
  c.scheme = SchemeId::ds(5);
  c.tau = 1.0 / 64.0;
  auto& gs = c.initial.ground_state;
  if (name == "mp1") {
    c.name = "mp1";
    c.kappa = 100.0;
    c.potential = PotentialSpec::harmonic(2.0, 1.0);
    c.final_time = 4.0;
    gs.potential = PotentialSpec::harmonic(1.0, 1.0);
    gs.kappa0 = 100.0;
    gs.omega = 0.8;
  } else if (name == "mp2") {
    c.name = "mp2";
    c.kappa = 20.0;
    c.potential = PotentialSpec::checkerboard();
    c.final_time = 1.0;
    gs.potential = PotentialSpec::sum({PotentialSpec::checkerboard(), PotentialSpec::harmonic(1.0, 1.0)});
    gs.kappa0 = 10.0;
    gs.omega = 0.0;
  } else if (name == "desk") {
    c.name = "desk";
    c.kappa = 10.0;
    c.potential = PotentialSpec::harmonic(2.0, 1.0);
    c.final_time = 1.0;
    gs.potential = PotentialSpec::harmonic(1.0, 1.0);
    gs.kappa0 = 10.0;
    gs.omega = 0.0;
  } else {
    throw std::invalid_argument("unknown problem '" + std::string(name) + "' (expected mp1, mp2, desk)");
  }
  return c;
}

ComplexField shadow_rhs_general(std::span<const cplx> psi, std::span<const cplx> phi,
                                const Nonlinearity& nonlinearity,
                                const SparseOperator& potential_op,
                                const SparseOperator& laplacian_op) {
  if (psi.size() != phi.size() || psi.size() != laplacian_op.size() ||
      psi.size() != potential_op.size())
    throw std::invalid_argument("shadow_rhs_general: dimension mismatch");
  ComplexField lap = laplacian_op.apply(psi);
  ComplexField pot = potential_op.apply(psi);
  ComplexField out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(phi[i]);
    out[i] = -0.5 * lap[i] + pot[i] + 0.5 * nonlinearity.eval(rho) * psi[i] +
             0.5 * rho * nonlinearity.deriv(rho) * (3.0 * psi[i] - 2.0 * phi[i]);
  }
  return out;
}

// ---- JSON mapping -------------------------------------------------------

json to_json(const PotentialSpec& p) {
  switch (p.kind) {
    case PotentialSpec::Kind::None:
      return {{"type", "none"}};
    case PotentialSpec::Kind::Harmonic:
      return {{"type", "harmonic"}, {"gamma", {p.gamma1, p.gamma2}}};
    case PotentialSpec::Kind::Checkerboard:
      return {{"type", "checkerboard"}};
    case PotentialSpec::Kind::Sum: {
      json terms = json::array();
      for (const auto& t : p.terms) terms.push_back(to_json(t));
      return {{"type", "sum"}, {"terms", terms}};
    }
  }
  return {};
}

PotentialSpec potential_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "none") return PotentialSpec::none();
  if (type == "checkerboard") return PotentialSpec::checkerboard();
  if (type == "harmonic") {
    const auto g = j.value("gamma", std::vector<double>{1.0, 1.0});
    if (g.size() != 2) throw std::invalid_argument("harmonic potential needs gamma: [g1, g2]");
    return PotentialSpec::harmonic(g[0], g[1]);
  }
  if (type == "sum") {
    std::vector<PotentialSpec> terms;
    for (const auto& t : j.at("terms")) terms.push_back(potential_from_json(t));
    return PotentialSpec::sum(std::move(terms));
  }
  throw std::invalid_argument("unknown potential type '" + type + "'");
}

json to_json(const GroundStateParams& p) {
  return {{"potential", to_json(p.potential)}, {"kappa0", p.kappa0},
          {"omega", p.omega},                  {"sigma", p.sigma},
          {"energy_tol", p.energy_tol},        {"max_iter", p.max_iter},
          {"seed_phase", p.seed_phase}};
}

GroundStateParams ground_state_params_from_json(const json& j) {
  GroundStateParams p;
  if (j.contains("potential")) p.potential = potential_from_json(j.at("potential"));
  p.kappa0 = j.value("kappa0", p.kappa0);
  p.omega = j.value("omega", p.omega);
  p.sigma = j.value("sigma", p.sigma);
  p.energy_tol = j.value("energy_tol", p.energy_tol);
  p.max_iter = j.value("max_iter", p.max_iter);
  p.seed_phase = j.value("seed_phase", p.seed_phase);
  p.validate();
  return p;
}

json to_json(const GridSpec& g) {
  json bounds = json::array();
  for (const auto& b : g.bounds) bounds.push_back({b.lo, b.hi});
  return {{"bounds", bounds}, {"nodes", g.nodes}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec g;
  for (const auto& b : j.at("bounds")) {
    const auto v = b.get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument("grid bounds must be [lo, hi] pairs");
    g.bounds.push_back({v[0], v[1]});
  }
  g.nodes = j.at("nodes").get<std::vector<std::size_t>>();
  return g;
}

json to_json(const ProblemConfig& c) {
  json initial;
  if (c.initial.kind == InitialState::Kind::GroundState) {
    initial = to_json(c.initial.ground_state);
    initial["type"] = "ground_state";
  } else {
    initial = {{"type", "snapshot"}, {"path", c.initial.snapshot_path}};
  }
  return {{"name", c.name},        {"grid", to_json(c.grid)},     {"potential", to_json(c.potential)},
          {"kappa", c.kappa},      {"initial", initial},          {"final_time", c.final_time},
          {"tau", c.tau},          {"scheme", c.scheme.name()},   {"K", c.scheme.K},
          {"mu", c.mu}};
}

ProblemConfig problem_from_json(const json& j) {
  ProblemConfig c;
  if (j.contains("base")) c = build_problem(j.at("base").get<std::string>());
  c.name = j.value("name", c.name);
  if (j.contains("grid")) c.grid = grid_spec_from_json(j.at("grid"));
  if (j.contains("potential")) c.potential = potential_from_json(j.at("potential"));
  c.kappa = j.value("kappa", c.kappa);
  if (j.contains("initial")) {
    const auto& ji = j.at("initial");
    const std::string type = ji.value("type", std::string("ground_state"));
    if (type == "ground_state") {
      c.initial.kind = InitialState::Kind::GroundState;
      c.initial.ground_state = ground_state_params_from_json(ji);
    } else if (type == "snapshot") {
      c.initial.kind = InitialState::Kind::Snapshot;
      c.initial.snapshot_path = ji.at("path").get<std::string>();
    } else {
      throw std::invalid_argument("unknown initial state type '" + type + "'");
    }
  }
  c.final_time = j.value("final_time", c.final_time);
  c.tau = j.value("tau", c.tau);
  if (j.contains("scheme")) {
    const std::string s = j.at("scheme").get<std::string>();
    if (s == "ds") {
      c.scheme = SchemeId::ds(j.value("K", 5));
      if (!is_valid_dissipation_order(c.scheme.K))
        throw std::invalid_argument("problem: dissipation order must be one of 0,2,3,4,5,6");
    } else {
      c.scheme = SchemeId::parse(s);
      if (c.scheme.kind == SchemeId::Kind::DissipativeShadow && j.contains("K") &&
          j.at("K").get<int>() != c.scheme.K)
        throw std::invalid_argument("problem: scheme and K disagree");
    }
  }
  c.mu = j.value("mu", c.mu);
  c.validate();
  return c;
}

}  // namespace shadowgpe
