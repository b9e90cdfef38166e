#pragma once

#include <optional>
#include <span>
#include <vector>

#include "zeno/models.hpp"
#include "zeno/operator_algebra.hpp"
#include "zeno/rate_closure.hpp"

namespace zeno {

struct SolverTolerances {
  double rtol = 1e-9;
  double atol = 1e-12;
};

/// Largest Omega/xi or Gamma/xi the explicit integrator accepts.
inline constexpr double kMaxStiffnessRatio = 1e4;

/// Hermitian, unit-trace, positive semidefinite state.
class DensityMatrix {
 public:
  /// Validates hermiticity and trace to tol and eigenvalues >= -1e-8.
  explicit DensityMatrix(Operator rho, double tol = 1e-10);

  static DensityMatrix pure(int dim, int level);
  static DensityMatrix from_state(const StateVector& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Operator& matrix() const { return rho_; }
  double purity() const { return (rho_ * rho_).trace().real(); }

 private:
  Operator rho_;
};

/// Times with P0 and level populations. has_population[i] is false when
/// p_i cannot be recovered from the representation that produced the series.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> p0;
  Eigen::MatrixXd populations;  // times.size() x dim
  std::vector<bool> has_population;
};

/// n_points uniform points on [0, t_max].
std::vector<double> uniform_grid(double t_max, int n_points);

/// Throws NumericalError when omega or gamma exceed kMaxStiffnessRatio * xi.
void check_stiffness(const ModelParams& params);

/// Tr(rho s_i) for every retained label.
Eigen::VectorXd expectations_of(const DensityMatrix& state, const RateSystem& rs);

/// Expectation vectors of the rate system at every grid time.
std::vector<Eigen::VectorXd> evolve_rate_system(const RateSystem& rs, const Eigen::VectorXd& init,
                                                std::span<const double> t_grid,
                                                const SolverTolerances& tol = {});

TimeSeries integrate_rate_system(const RateSystem& rs, const Eigen::VectorXd& init,
                                 std::span<const double> t_grid, const SolverTolerances& tol = {});

/// rho(t) at every grid time under
///   d rho/dt = -i[H, rho] + sum_k (C_k rho C_k^dagger - 1/2 {C_k^dagger C_k, rho}).
/// Throws NumericalError when positivity is violated by more than 1e-6.
std::vector<Operator> evolve_master_equation(const LevelScheme& scheme, const DensityMatrix& rho0,
                                             std::span<const double> t_grid,
                                             const SolverTolerances& tol = {});

TimeSeries integrate_master_equation(const LevelScheme& scheme, const DensityMatrix& rho0,
                                     std::span<const double> t_grid,
                                     const SolverTolerances& tol = {});

/// Unique stationary state of the full-basis rate system.
struct SteadyState {
  double p0 = 0.0;
  Eigen::VectorXd populations;
};

/// Solves M x + b = 0 over the full basis; nothing when M is singular
/// (coherent dynamics have no unique attractor).
std::optional<SteadyState> steady_state(const LevelScheme& scheme);

}  // namespace zeno
