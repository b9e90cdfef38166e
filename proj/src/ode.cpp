#include "ode.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "zeno/errors.hpp"

namespace zeno::detail {

namespace odeint = boost::numeric::odeint;

void integrate_on_grid(const OdeRhs& rhs, OdeState x0, std::span<const double> grid,
                       const SolverTolerances& tol, double rate_scale, const OdeObserver& observe) {
  if (grid.empty()) return;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }
  if (grid.size() == 1) {
    observe(0, x0, grid.front());
    return;
  }

  auto stepper = odeint::make_dense_output(tol.atol, tol.rtol, odeint::runge_kutta_dopri5<OdeState>());
  const double dt0 = std::min(1e-3 / std::max(rate_scale, 1e-12), (grid[1] - grid[0]) / 4.0);

  std::size_t index = 0;
  double last_t = grid.front();
  auto observer = [&](const OdeState& x, double t) {
    for (double v : x) {
      if (!std::isfinite(v)) {
        throw NumericalError(fmt::format("non-finite state at t = {}", t));
      }
    }
    last_t = t;
    observe(index++, x, t);
  };
  try {
    odeint::integrate_times(stepper, rhs, x0, grid.begin(), grid.end(), dt0, observer,
                            odeint::max_step_checker(10'000'000));
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(fmt::format("ODE step failure after t = {}: {}", last_t, e.what()));
  }
}

}  // namespace zeno::detail
