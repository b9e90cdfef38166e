#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zeno/operator_algebra.hpp"

namespace zeno {

enum class ModelKind { two_level, three_level_chain, four_level_chain, custom };

std::string_view to_string(ModelKind kind);
/// Accepts "two_level", "three_level_chain", "four_level_chain".
/// Throws std::invalid_argument for anything else.
ModelKind model_kind_from_string(std::string_view name);

/// Rates in units of xi (hbar = 1).
struct ModelParams {
  double xi = 1.0;     // coupling |0> <-> |1>
  double omega = 0.0;  // couplings inside the outside space
  double gamma = 0.0;  // spontaneous decay rate
  /// Optional per-channel decay rates; empty means every channel decays at gamma.
  std::vector<double> gamma_channels;
  /// Free energies omega_i, used only by interaction_picture checks.
  std::vector<double> free_energies;

  /// Throws std::invalid_argument if any rate is negative or non-finite.
  void validate() const;
  /// max(xi, omega, gamma, gamma_channels...)
  double max_rate() const;
};

/// A level scheme: interaction Hamiltonian, collapse operators and the
/// projector onto the controlled subspace.
struct LevelScheme {
  ModelKind kind = ModelKind::custom;
  int dim = 0;
  Operator h_int;
  std::vector<Operator> collapse_ops;
  Operator p_cs;
  ModelParams params;

  std::string name() const { return std::string(to_string(kind)); }
  bool dissipative() const { return !collapse_ops.empty(); }
};

/// Coherent schemes for gamma = 0, dissipative variants otherwise:
///   two_level:          xi(|0><1| + h.c.),                    C = {sqrt(G)|0><1|}
///   three_level_chain:  + omega(|1><2| + h.c.),               C = {sqrt(G)|1><2|}
///   four_level_chain:   + omega(|1><2| + |2><3| + h.c.),      C = {sqrt(G)|1><2|, sqrt(G)|2><3|}
/// The controlled subspace is span{|0>} in every case.
LevelScheme build_model(ModelKind kind, const ModelParams& params);
LevelScheme build_model(std::string_view name, const ModelParams& params);

/// Generic scheme. Validates hermiticity of h, dimensions of the collapse
/// operators and that p_cs is a Hermitian projector.
LevelScheme make_scheme(Operator h_int, std::vector<Operator> collapse_ops, Operator p_cs,
                        ModelParams params = {});

/// Hamiltonian split into the weak leakage coupling and the strong outside-space part.
struct HamiltonianSplit {
  Operator h_slow;
  Operator h_fast;
};

/// xi-terms vs omega-terms of a named model.
HamiltonianSplit coupling_split(const LevelScheme& scheme);

/// amplitude * exp(i frequency t) |row><col| + h.c.
struct CouplingTerm {
  int row = 0;
  int col = 1;
  Complex amplitude{1.0, 0.0};
  double frequency = 0.0;
};

/// H(t) = sum_i omega_i |i><i| + sum_terms (...)
struct DrivenHamiltonian {
  std::vector<double> level_energies;
  std::vector<CouplingTerm> couplings;

  int dim() const { return static_cast<int>(level_energies.size()); }
  Operator at(double t) const;
  Operator free_part() const;
};

/// Evaluates exp(i H0 t)(H(t) - H0)exp(-i H0 t) at every sample time and
/// returns the common value. Throws std::invalid_argument naming the offending
/// coupling term when the result drifts by more than tol between samples.
Operator interaction_picture(const DrivenHamiltonian& h, std::span<const double> sample_times,
                             double tol = 1e-10);

/// The resonant Schrödinger-picture Hamiltonian behind a named model, with
/// every coupling oscillating at its level-energy difference.
DrivenHamiltonian resonant_drive(ModelKind kind, const ModelParams& params);

}  // namespace zeno
