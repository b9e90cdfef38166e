#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace zeno {

using Complex = std::complex<double>;

/// Dense operator on a d-dimensional Hilbert space (hbar = 1).
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Tolerance for structural assertions (hermiticity, tracelessness, orthogonality).
inline constexpr double kStructuralTol = 1e-12;

/// |row><col| on a dim-dimensional space.
Operator ket_bra(int dim, int row, int col);
/// |level><level|.
Operator projector(int dim, int level);
/// Computational basis vector |level>.
StateVector basis_ket(int dim, int level);

/// max_ij |A_ij - conj(A_ji)|.
double hermiticity_residual(const Operator& a);
bool is_hermitian(const Operator& a, double tol = kStructuralTol);

/// ab - ba. Throws std::invalid_argument on dimension mismatch.
Operator commutator(const Operator& a, const Operator& b);
/// ab + ba. Throws std::invalid_argument on dimension mismatch.
Operator anticommutator(const Operator& a, const Operator& b);

/// Ordered set of d^2 - 1 Hermitian traceless operators with Tr(s_i s_j) = 2 delta_ij.
struct OperatorBasis {
  int dim = 0;
  std::vector<Operator> elements;
  /// "sigma_1" ... "sigma_{d^2-1}"
  std::vector<std::string> labels;

  std::size_t size() const { return elements.size(); }
  /// Position of a label, or -1 when absent.
  int index_of(std::string_view label) const;
};

/// Generalized Gell-Mann matrices in pair-major order.
///
/// For each pair (j,k), j<k, visited as (0,1),(0,2),(1,2),(0,3),..., the
/// symmetric element |j><k|+|k><j| is followed by -i(|j><k|-|k><j|). The
/// diagonal element for m levels, sqrt(2/(m(m-1))) diag(1,...,1,-(m-1),0,...),
/// follows the block that ends at pair (m-2,m-1), which places it at position
/// m^2-1. For d=2 this gives the Pauli matrices, for d=3 the usual Gell-Mann
/// labelling.
OperatorBasis gellmann_basis(int dim);

/// a = identity_coeff * I + sum_i coeffs[i] * basis[i]
struct BasisExpansion {
  Eigen::VectorXd coeffs;
  double identity_coeff = 0.0;
};

/// Real expansion of a Hermitian operator. Throws std::invalid_argument for
/// non-Hermitian input or a dimension mismatch.
BasisExpansion expand_in_basis(const Operator& a, const OperatorBasis& basis);
Operator reconstruct(const BasisExpansion& expansion, const OperatorBasis& basis);

}  // namespace zeno
