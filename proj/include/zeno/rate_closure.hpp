#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zeno/models.hpp"
#include "zeno/operator_algebra.hpp"

namespace zeno {

/// Closed linear system d<s>/dt = m <s> + b over a subset of the
/// generalized Gell-Mann basis, with P0 = p0_identity + p0_coeffs . <s>.
struct RateSystem {
  int dim = 0;
  /// Positions of the retained elements inside gellmann_basis(dim).
  std::vector<int> indices;
  std::vector<std::string> labels;
  std::vector<Operator> operators;
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  double p0_identity = 0.0;
  Eigen::VectorXd p0_coeffs;

  std::size_t size() const { return indices.size(); }
};

/// Heisenberg-picture generator: d<a>/dt = <L^dagger(a)> with
///   L^dagger(a) = i[H, a] + sum_k (C_k^dagger a C_k - 1/2 {C_k^dagger C_k, a}).
Operator adjoint_generator(const LevelScheme& scheme, const Operator& a);

/// M_ij = Tr(s_j L^dagger(s_i))/2, b_i = Tr(L^dagger(s_i))/d.
///
/// With prune, only the elements reachable from the support of the P0
/// expansion are kept (rows then couple only inside the subset and to I).
/// Throws NumericalError if the derivation leaves imaginary parts behind.
RateSystem derive_rate_system(const LevelScheme& scheme, bool prune = true);

/// max over retained i of the entrywise residual of
/// L^dagger(s_i) - sum_j M_ij s_j - b_i I.
double closure_residual(const LevelScheme& scheme, const RateSystem& rs);

/// Expansion coefficients of an operator restricted to the retained labels, or
/// nothing if the operator has support outside them (beyond tol).
std::optional<BasisExpansion> expand_in_retained(const Operator& a, const RateSystem& rs,
                                                 double tol = kStructuralTol);

}  // namespace zeno
