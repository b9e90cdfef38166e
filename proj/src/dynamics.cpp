#include "zeno/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "ode.hpp"
#include "zeno/errors.hpp"

namespace zeno {

namespace {

constexpr double kPositivityTol = 1e-6;

using CMap = Eigen::Map<Eigen::MatrixXcd>;
using ConstCMap = Eigen::Map<const Eigen::MatrixXcd>;

ConstCMap as_matrix(const detail::OdeState& x, int dim) {
  return ConstCMap(reinterpret_cast<const Complex*>(x.data()), dim, dim);
}

double min_eigenvalue(const Operator& rho) {
  const Operator herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

DensityMatrix::DensityMatrix(Operator rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() < 1 || rho_.rows() != rho_.cols()) {
    throw std::invalid_argument("density matrix must be square and non-empty");
  }
  if (hermiticity_residual(rho_) > tol) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > tol) {
    throw std::invalid_argument(fmt::format("density matrix trace is {}, expected 1", rho_.trace().real()));
  }
  if (min_eigenvalue(rho_) < -1e-8) throw std::invalid_argument("density matrix is not positive");
}

DensityMatrix DensityMatrix::pure(int dim, int level) { return DensityMatrix(projector(dim, level)); }

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw std::invalid_argument("zero state vector");
  const StateVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return DensityMatrix(Operator::Identity(dim, dim) / static_cast<double>(dim));
}

std::vector<double> uniform_grid(double t_max, int n_points) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be positive");
  if (n_points < 2) throw std::invalid_argument("a time grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) grid[static_cast<std::size_t>(i)] = t_max * i / (n_points - 1);
  return grid;
}

void check_stiffness(const ModelParams& params) {
  const double unit = params.xi > 0.0 ? params.xi : 1.0;
  double fast = std::max(params.omega, params.gamma);
  for (double g : params.gamma_channels) fast = std::max(fast, g);
  if (fast > kMaxStiffnessRatio * unit) {
    throw NumericalError(fmt::format(
        "rates up to {} exceed the explicit-integrator limit of {} x xi (xi = {})", fast,
        kMaxStiffnessRatio, params.xi));
  }
}

Eigen::VectorXd expectations_of(const DensityMatrix& state, const RateSystem& rs) {
  if (state.dim() != rs.dim) {
    throw std::invalid_argument(fmt::format("expectations_of: state has d = {}, rate system d = {}",
                                            state.dim(), rs.dim));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(rs.size()));
  for (std::size_t i = 0; i < rs.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = (state.matrix() * rs.operators[i]).trace().real();
  }
  return out;
}

std::vector<Eigen::VectorXd> evolve_rate_system(const RateSystem& rs, const Eigen::VectorXd& init,
                                                std::span<const double> t_grid,
                                                const SolverTolerances& tol) {
  const auto n = static_cast<Eigen::Index>(rs.size());
  if (init.size() != n) {
    throw std::invalid_argument(fmt::format("initial vector has length {}, rate system has {}",
                                            init.size(), n));
  }
  const Eigen::MatrixXd m = rs.m;
  const Eigen::VectorXd b = rs.b;
  detail::OdeRhs rhs = [m, b, n](const detail::OdeState& x, detail::OdeState& dxdt, double) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::Map<Eigen::VectorXd> dv(dxdt.data(), n);
    dv.noalias() = m * xv;
    dv += b;
  };
  const double scale = n > 0 ? std::max(1.0, m.cwiseAbs().maxCoeff()) : 1.0;

  std::vector<Eigen::VectorXd> out(t_grid.size());
  detail::OdeState x0(init.data(), init.data() + n);
  detail::integrate_on_grid(rhs, std::move(x0), t_grid, tol, scale,
                            [&](std::size_t i, const detail::OdeState& x, double) {
                              out[i] = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
                            });
  return out;
}

TimeSeries integrate_rate_system(const RateSystem& rs, const Eigen::VectorXd& init,
                                 std::span<const double> t_grid, const SolverTolerances& tol) {
  const auto states = evolve_rate_system(rs, init, t_grid, tol);

  std::vector<std::optional<BasisExpansion>> level_maps;
  for (int i = 0; i < rs.dim; ++i) level_maps.push_back(expand_in_retained(projector(rs.dim, i), rs));

  TimeSeries ts;
  ts.times.assign(t_grid.begin(), t_grid.end());
  ts.p0.resize(states.size());
  ts.populations = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(states.size()), rs.dim,
                                             std::numeric_limits<double>::quiet_NaN());
  for (const auto& lm : level_maps) ts.has_population.push_back(lm.has_value());
  for (std::size_t k = 0; k < states.size(); ++k) {
    ts.p0[k] = rs.p0_identity + rs.p0_coeffs.dot(states[k]);
    for (int i = 0; i < rs.dim; ++i) {
      const auto& lm = level_maps[static_cast<std::size_t>(i)];
      if (lm) ts.populations(static_cast<Eigen::Index>(k), i) = lm->identity_coeff + lm->coeffs.dot(states[k]);
    }
  }
  return ts;
}

std::vector<Operator> evolve_master_equation(const LevelScheme& scheme, const DensityMatrix& rho0,
                                             std::span<const double> t_grid,
                                             const SolverTolerances& tol) {
  if (rho0.dim() != scheme.dim) {
    throw std::invalid_argument(fmt::format("initial state has d = {}, scheme d = {}", rho0.dim(), scheme.dim));
  }
  check_stiffness(scheme.params);
  const int d = scheme.dim;

  Operator h_eff = scheme.h_int;
  for (const auto& c : scheme.collapse_ops) h_eff -= Complex(0.0, 0.5) * (c.adjoint() * c);
  const Operator h_eff_dag = h_eff.adjoint();
  const std::vector<Operator> jumps = scheme.collapse_ops;
  std::vector<Operator> jumps_dag;
  for (const auto& c : jumps) jumps_dag.push_back(c.adjoint());

  detail::OdeRhs rhs = [=, tmp = Operator(d, d)](const detail::OdeState& x, detail::OdeState& dxdt,
                                                 double) mutable {
    const ConstCMap rho = as_matrix(x, d);
    CMap out(reinterpret_cast<Complex*>(dxdt.data()), d, d);
    out.noalias() = h_eff * rho;
    out.noalias() -= rho * h_eff_dag;
    out *= Complex(0.0, -1.0);
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      tmp.noalias() = jumps[k] * rho;
      out.noalias() += tmp * jumps_dag[k];
    }
  };

  double scale = std::max(1.0, scheme.params.max_rate());
  scale = std::max(scale, h_eff.cwiseAbs().maxCoeff());

  const Operator& r0 = rho0.matrix();
  detail::OdeState x0(reinterpret_cast<const double*>(r0.data()),
                      reinterpret_cast<const double*>(r0.data()) + 2 * d * d);
  std::vector<Operator> out(t_grid.size());
  detail::integrate_on_grid(rhs, std::move(x0), t_grid, tol, scale,
                            [&](std::size_t i, const detail::OdeState& x, double t) {
                              out[i] = as_matrix(x, d);
                              const double lam = min_eigenvalue(out[i]);
                              if (lam < -kPositivityTol) {
                                throw NumericalError(fmt::format(
                                    "density matrix lost positivity at t = {} (eigenvalue {:.3e}); "
                                    "tighten the solver tolerances",
                                    t, lam));
                              }
                            });
  return out;
}

TimeSeries integrate_master_equation(const LevelScheme& scheme, const DensityMatrix& rho0,
                                     std::span<const double> t_grid, const SolverTolerances& tol) {
  const auto states = evolve_master_equation(scheme, rho0, t_grid, tol);
  TimeSeries ts;
  ts.times.assign(t_grid.begin(), t_grid.end());
  ts.p0.resize(states.size());
  ts.populations.resize(static_cast<Eigen::Index>(states.size()), scheme.dim);
  ts.has_population.assign(static_cast<std::size_t>(scheme.dim), true);
  for (std::size_t k = 0; k < states.size(); ++k) {
    ts.p0[k] = (scheme.p_cs * states[k]).trace().real();
    for (int i = 0; i < scheme.dim; ++i) {
      ts.populations(static_cast<Eigen::Index>(k), i) = states[k](i, i).real();
    }
  }
  return ts;
}

std::optional<SteadyState> steady_state(const LevelScheme& scheme) {
  const RateSystem rs = derive_rate_system(scheme, false);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rs.m);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd x = lu.solve(-rs.b);

  SteadyState ss;
  ss.p0 = rs.p0_identity + rs.p0_coeffs.dot(x);
  ss.populations.resize(scheme.dim);
  for (int i = 0; i < scheme.dim; ++i) {
    const auto lm = expand_in_retained(projector(scheme.dim, i), rs);
    ss.populations(i) = lm->identity_coeff + lm->coeffs.dot(x);
  }
  return ss;
}

}  // namespace zeno
