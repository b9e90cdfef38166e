#pragma once

#include <vector>

#include "zeno/models.hpp"
#include "zeno/operator_algebra.hpp"

namespace zeno {

struct DarkStateReport {
  /// Normalized vectors on the outside subspace annihilated by the fast
  /// generator. Phase fixed so the first largest component is real positive.
  std::vector<StateVector> kernel_vectors;
  /// couplings[v][m] = <v| h_slow |c_m>, c_m spanning the controlled subspace.
  std::vector<std::vector<Complex>> couplings;
  /// Orthonormal basis of the controlled subspace used for the couplings.
  std::vector<StateVector> controlled_basis;
  bool is_protected = true;
};

/// Kernel of G = h_fast - (i/2) sum_k C_k^dagger C_k restricted to the
/// complement of p_cs. Singular values below 1e-8 * max(xi, omega, gamma)
/// count as zero. The scheme is protected unless some kernel vector couples to
/// the controlled subspace through h_slow with |amplitude| > 1e-10.
/// Throws std::invalid_argument when h_slow + h_fast != h_int.
DarkStateReport find_dark_states(const LevelScheme& scheme, const HamiltonianSplit& split);

/// P H P. Throws std::invalid_argument when p_cs is not a Hermitian
/// idempotent (residual > 1e-10) or dimensions differ.
Operator effective_hamiltonian(const Operator& h, const Operator& p_cs);

/// Unitary whose columns are |0>, |l0> = (|1>-|3>)/sqrt2, |l1> = (|1>+|3>)/sqrt2, |2>.
Operator bright_dark_frame();

/// h_int of the four-level chain in the {|0>, |l0>, |l1>, |2>} frame. Checks
/// the result against (xi/sqrt2)(|0><l0| + |0><l1|) + sqrt2 omega |l1><2| + h.c.
/// Throws std::invalid_argument for any other scheme.
Operator bright_dark_rewrite(const LevelScheme& scheme);

}  // namespace zeno
