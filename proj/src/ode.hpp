#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "zeno/dynamics.hpp"

namespace zeno::detail {

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(const OdeState& x, OdeState& dxdt, double t)>;
using OdeObserver = std::function<void(std::size_t index, const OdeState& x, double t)>;

/// Adaptive Dormand-Prince 5(4) with dense output, observed exactly at every
/// grid point. Throws NumericalError (with the last reached time) on step
/// failure or a non-finite state.
void integrate_on_grid(const OdeRhs& rhs, OdeState x0, std::span<const double> grid,
                       const SolverTolerances& tol, double rate_scale, const OdeObserver& observe);

}  // namespace zeno::detail
