#include "zeno/rate_closure.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

constexpr double kCouplingCutoff = 1e-12;

}  // namespace

Operator adjoint_generator(const LevelScheme& scheme, const Operator& a) {
  if (a.rows() != scheme.dim || a.cols() != scheme.dim) {
    throw std::invalid_argument(fmt::format("adjoint_generator: operator is {}x{}, scheme has d = {}",
                                            a.rows(), a.cols(), scheme.dim));
  }
  Operator out = Complex(0.0, 1.0) * commutator(scheme.h_int, a);
  for (const auto& c : scheme.collapse_ops) {
    const Operator cd = c.adjoint();
    out += cd * a * c - 0.5 * anticommutator(cd * c, a);
  }
  return out;
}

RateSystem derive_rate_system(const LevelScheme& scheme, bool prune) {
  const OperatorBasis basis = gellmann_basis(scheme.dim);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double d = scheme.dim;

  Eigen::MatrixXd m_full(n, n);
  Eigen::VectorXd b_full(n);
  const double imag_tol = kStructuralTol * std::max(1.0, scheme.params.max_rate());
  double worst_imag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Operator image = adjoint_generator(scheme, basis.elements[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex mij = 0.5 * (basis.elements[static_cast<std::size_t>(j)] * image).trace();
      m_full(i, j) = mij.real();
      worst_imag = std::max(worst_imag, std::abs(mij.imag()));
    }
    const Complex bi = image.trace() / d;
    b_full(i) = bi.real();
    worst_imag = std::max(worst_imag, std::abs(bi.imag()));
  }
  if (worst_imag > imag_tol) {
    throw NumericalError(fmt::format(
        "derive_rate_system: imaginary residual {:.3e} in the rate matrix (generator is not "
        "Hermiticity preserving)",
        worst_imag));
  }

  // Products of irrational basis normalisations leave ~1e-16 residue on exact zeros.
  const double chop = 1e-14 * std::max(1.0, scheme.params.max_rate());
  m_full = m_full.unaryExpr([chop](double x) { return std::abs(x) <= chop ? 0.0 : x; });
  b_full = b_full.unaryExpr([chop](double x) { return std::abs(x) <= chop ? 0.0 : x; });

  const BasisExpansion p0 = expand_in_basis(scheme.p_cs, basis);

  std::set<Eigen::Index> keep;
  if (prune) {
    std::vector<Eigen::Index> frontier;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(p0.coeffs(i)) > kCouplingCutoff) {
        keep.insert(i);
        frontier.push_back(i);
      }
    }
    while (!frontier.empty()) {
      const Eigen::Index i = frontier.back();
      frontier.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(m_full(i, j)) > kCouplingCutoff && keep.insert(j).second) {
          frontier.push_back(j);
        }
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) keep.insert(i);
  }

  RateSystem rs;
  rs.dim = scheme.dim;
  const auto k = static_cast<Eigen::Index>(keep.size());
  rs.m.resize(k, k);
  rs.b.resize(k);
  rs.p0_coeffs.resize(k);
  rs.p0_identity = p0.identity_coeff;
  Eigen::Index r = 0;
  for (Eigen::Index i : keep) {
    rs.indices.push_back(static_cast<int>(i));
    rs.labels.push_back(basis.labels[static_cast<std::size_t>(i)]);
    rs.operators.push_back(basis.elements[static_cast<std::size_t>(i)]);
    Eigen::Index c = 0;
    for (Eigen::Index j : keep) rs.m(r, c++) = m_full(i, j);
    rs.b(r) = b_full(i);
    rs.p0_coeffs(r) = p0.coeffs(i);
    ++r;
  }
  return rs;
}

double closure_residual(const LevelScheme& scheme, const RateSystem& rs) {
  double worst = 0.0;
  const auto k = static_cast<Eigen::Index>(rs.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    Operator resid = adjoint_generator(scheme, rs.operators[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) {
      resid -= rs.m(i, j) * rs.operators[static_cast<std::size_t>(j)];
    }
    resid -= rs.b(i) * Operator::Identity(rs.dim, rs.dim);
    worst = std::max(worst, resid.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::optional<BasisExpansion> expand_in_retained(const Operator& a, const RateSystem& rs,
                                                 double tol) {
  const OperatorBasis basis = gellmann_basis(rs.dim);
  const BasisExpansion full = expand_in_basis(a, basis);
  std::vector<bool> retained(basis.size(), false);
  for (int idx : rs.indices) retained[static_cast<std::size_t>(idx)] = true;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!retained[i] && std::abs(full.coeffs(static_cast<Eigen::Index>(i))) > tol) {
      return std::nullopt;
    }
  }
  BasisExpansion out;
  out.identity_coeff = full.identity_coeff;
  out.coeffs.resize(static_cast<Eigen::Index>(rs.size()));
  for (std::size_t r = 0; r < rs.size(); ++r) {
    out.coeffs(static_cast<Eigen::Index>(r)) = full.coeffs(rs.indices[r]);
  }
  return out;
}

}  // namespace zeno
