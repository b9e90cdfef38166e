#pragma once

#include "zeno/models.hpp"

namespace zeno {

/// cos^2(xi t): unprotected Rabi oscillation out of |0>.
double p0_two_level(double xi, double t);

/// Exact P0 of the coherent three-level chain started in |0>, mu^2 = omega^2 + xi^2.
/// Throws std::invalid_argument when xi = omega = 0.
double p0_three_level_exact(double xi, double omega, double t);

/// 1 - (2 xi^2/omega^2)(1 - cos(omega t)), valid to first order in xi^2/omega^2.
/// Throws std::invalid_argument when omega <= 0.
double p0_three_level_first_order(double xi, double omega, double t);

/// Fixed point (G^2 + 4 xi^2)/(G^2 + 8 xi^2) of the dissipative two-level
/// rate system. Throws std::invalid_argument when gamma <= 0.
double steady_state_two_level(double xi, double gamma);

struct AnalyticSolution {
  enum class Kind { two_level_rabi, three_level_exact, three_level_first_order };

  Kind kind = Kind::two_level_rabi;
  ModelParams params;
  /// sqrt(omega^2 + xi^2); only meaningful for the three-level kinds.
  double mu = 0.0;

  static AnalyticSolution make(Kind kind, const ModelParams& params);
  double p0(double t) const;
};

}  // namespace zeno
