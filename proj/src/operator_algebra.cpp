#include "zeno/operator_algebra.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace zeno {

namespace {

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument(fmt::format("{}: operator dimensions differ ({}x{} vs {}x{})", what,
                                            a.rows(), a.cols(), b.rows(), b.cols()));
  }
}

void require_level(int dim, int level) {
  if (dim < 1 || level < 0 || level >= dim) {
    throw std::invalid_argument(fmt::format("level {} out of range for dimension {}", level, dim));
  }
}

}  // namespace

Operator ket_bra(int dim, int row, int col) {
  require_level(dim, row);
  require_level(dim, col);
  Operator out = Operator::Zero(dim, dim);
  out(row, col) = 1.0;
  return out;
}

Operator projector(int dim, int level) { return ket_bra(dim, level, level); }

StateVector basis_ket(int dim, int level) {
  require_level(dim, level);
  StateVector v = StateVector::Zero(dim);
  v(level) = 1.0;
  return v;
}

double hermiticity_residual(const Operator& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("hermiticity_residual: operator is not square");
  }
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& a, double tol) { return hermiticity_residual(a) <= tol; }

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

Operator anticommutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "anticommutator");
  return a * b + b * a;
}

int OperatorBasis::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

OperatorBasis gellmann_basis(int dim) {
  if (dim < 2) {
    throw std::invalid_argument(fmt::format("gellmann_basis: dimension must be >= 2, got {}", dim));
  }
  OperatorBasis basis;
  basis.dim = dim;
  const Complex i_unit(0.0, 1.0);
  auto push = [&basis](Operator op) {
    basis.elements.push_back(std::move(op));
    basis.labels.push_back(fmt::format("sigma_{}", basis.elements.size()));
  };
  for (int k = 1; k < dim; ++k) {
    for (int j = 0; j < k; ++j) {
      push(ket_bra(dim, j, k) + ket_bra(dim, k, j));
      push(-i_unit * (ket_bra(dim, j, k) - ket_bra(dim, k, j)));
    }
    const int m = k + 1;
    Operator diag = Operator::Zero(dim, dim);
    for (int l = 0; l < k; ++l) diag(l, l) = 1.0;
    diag(k, k) = -static_cast<double>(k);
    push(std::sqrt(2.0 / (m * (m - 1.0))) * diag);
  }
  return basis;
}

BasisExpansion expand_in_basis(const Operator& a, const OperatorBasis& basis) {
  if (a.rows() != basis.dim || a.cols() != basis.dim) {
    throw std::invalid_argument(fmt::format("expand_in_basis: operator is {}x{}, basis dimension {}",
                                            a.rows(), a.cols(), basis.dim));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermiticity_residual(a) > kStructuralTol * scale) {
    throw std::invalid_argument("expand_in_basis: operator is not Hermitian");
  }
  BasisExpansion out;
  out.coeffs.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out.coeffs(static_cast<Eigen::Index>(i)) = 0.5 * (a * basis.elements[i]).trace().real();
  }
  out.identity_coeff = a.trace().real() / basis.dim;
  return out;
}

Operator reconstruct(const BasisExpansion& expansion, const OperatorBasis& basis) {
  if (expansion.coeffs.size() != static_cast<Eigen::Index>(basis.size())) {
    throw std::invalid_argument("reconstruct: coefficient count does not match basis size");
  }
  Operator out = expansion.identity_coeff * Operator::Identity(basis.dim, basis.dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out += expansion.coeffs(static_cast<Eigen::Index>(i)) * basis.elements[i];
  }
  return out;
}

}  // namespace zeno
