#include "zeno/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno {

double p0_two_level(double xi, double t) {
  const double c = std::cos(xi * t);
  return c * c;
}

double p0_three_level_exact(double xi, double omega, double t) {
  const double mu2 = omega * omega + xi * xi;
  if (mu2 == 0.0) throw std::invalid_argument("p0_three_level_exact: xi and omega are both zero");
  const double mu = std::sqrt(mu2);
  const double mu4 = mu2 * mu2;
  const double xi2 = xi * xi;
  const double om2 = omega * omega;
  return (2.0 * om2 * om2 + xi2 * xi2) / (2.0 * mu4) + (2.0 * om2 * xi2 / mu4) * std::cos(mu * t) +
         (xi2 * xi2 / (2.0 * mu4)) * std::cos(2.0 * mu * t);
}

double p0_three_level_first_order(double xi, double omega, double t) {
  if (!(omega > 0.0)) throw std::invalid_argument("p0_three_level_first_order: omega must be positive");
  return 1.0 - (2.0 * xi * xi / (omega * omega)) * (1.0 - std::cos(omega * t));
}

double steady_state_two_level(double xi, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("steady_state_two_level: needs gamma > 0");
  const double g2 = gamma * gamma;
  const double x2 = xi * xi;
  return (g2 + 4.0 * x2) / (g2 + 8.0 * x2);
}

AnalyticSolution AnalyticSolution::make(Kind kind, const ModelParams& params) {
  params.validate();
  AnalyticSolution s;
  s.kind = kind;
  s.params = params;
  if (kind != Kind::two_level_rabi) {
    s.mu = std::hypot(params.omega, params.xi);
    if (!(s.mu > 0.0)) throw std::invalid_argument("three-level solutions need mu > 0");
  }
  return s;
}

double AnalyticSolution::p0(double t) const {
  switch (kind) {
    case Kind::two_level_rabi:
      return p0_two_level(params.xi, t);
    case Kind::three_level_exact:
      return p0_three_level_exact(params.xi, params.omega, t);
    case Kind::three_level_first_order:
      return p0_three_level_first_order(params.xi, params.omega, t);
  }
  return 0.0;
}

}  // namespace zeno
