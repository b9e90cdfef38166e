#include "zeno/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

constexpr double kKernelRelTol = 1e-8;
constexpr double kCouplingTol = 1e-10;

// Orthonormal columns spanning the eigenvalue-1 (or 0) space of a projector.
Eigen::MatrixXcd projector_range(const Operator& p, bool complement) {
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (p + p.adjoint()));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const bool in_range = es.eigenvalues()(i) > 0.5;
    if (in_range != complement) cols.push_back(i);
  }
  Eigen::MatrixXcd out(p.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[c]);
  }
  return out;
}

void fix_phase(StateVector& v) {
  const double largest = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= largest * (1.0 - 1e-9)) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

}  // namespace

DarkStateReport find_dark_states(const LevelScheme& scheme, const HamiltonianSplit& split) {
  const int d = scheme.dim;
  if (split.h_slow.rows() != d || split.h_fast.rows() != d || split.h_slow.cols() != d ||
      split.h_fast.cols() != d) {
    throw std::invalid_argument("find_dark_states: split dimension differs from scheme");
  }
  if ((split.h_slow + split.h_fast - scheme.h_int).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::invalid_argument("find_dark_states: h_slow + h_fast does not reproduce h_int");
  }

  Operator g = split.h_fast;
  for (const auto& c : scheme.collapse_ops) g -= Complex(0.0, 0.5) * (c.adjoint() * c);

  const Eigen::MatrixXcd outside = projector_range(scheme.p_cs, true);
  const Eigen::MatrixXcd inside = projector_range(scheme.p_cs, false);

  DarkStateReport report;
  for (Eigen::Index m = 0; m < inside.cols(); ++m) report.controlled_basis.push_back(inside.col(m));
  if (outside.cols() == 0) return report;

  const Eigen::MatrixXcd g_out = outside.adjoint() * g * outside;
  double scale = std::max(scheme.params.max_rate(), g.cwiseAbs().maxCoeff());
  if (!(scale > 0.0)) scale = 1.0;
  const double tol = kKernelRelTol * scale;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g_out, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index n_out = g_out.cols();
  for (Eigen::Index k = 0; k < n_out; ++k) {
    // JacobiSVD sorts singular values in decreasing order; trailing columns of V
    // beyond the returned values (none here, square input) would also be null.
    if (sv(k) > tol) continue;
    StateVector v = outside * svd.matrixV().col(k);
    v.normalize();
    fix_phase(v);
    std::vector<Complex> amps;
    bool couples = false;
    for (const auto& c : report.controlled_basis) {
      const Complex a = v.dot(split.h_slow * c);
      amps.push_back(a);
      couples = couples || std::abs(a) > kCouplingTol;
    }
    if (couples) report.is_protected = false;
    report.kernel_vectors.push_back(std::move(v));
    report.couplings.push_back(std::move(amps));
  }
  return report;
}

Operator effective_hamiltonian(const Operator& h, const Operator& p_cs) {
  if (h.rows() != h.cols() || p_cs.rows() != h.rows() || p_cs.cols() != h.cols()) {
    throw std::invalid_argument("effective_hamiltonian: dimension mismatch");
  }
  if ((p_cs * p_cs - p_cs).cwiseAbs().maxCoeff() > 1e-10 || hermiticity_residual(p_cs) > 1e-10) {
    throw std::invalid_argument("effective_hamiltonian: p_cs is not a Hermitian projector");
  }
  return p_cs * h * p_cs;
}

Operator bright_dark_frame() {
  const double s = 1.0 / std::sqrt(2.0);
  Operator u = Operator::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = s;
  u(3, 1) = -s;
  u(1, 2) = s;
  u(3, 2) = s;
  u(2, 3) = 1.0;
  return u;
}

Operator bright_dark_rewrite(const LevelScheme& scheme) {
  if (scheme.kind != ModelKind::four_level_chain) {
    throw std::invalid_argument(
        fmt::format("bright_dark_rewrite applies to four_level_chain, got {}", scheme.name()));
  }
  const Operator u = bright_dark_frame();
  const Operator rotated = u.adjoint() * scheme.h_int * u;

  const double xi = scheme.params.xi;
  const double omega = scheme.params.omega;
  const double s = 1.0 / std::sqrt(2.0);
  Operator expected = Operator::Zero(4, 4);
  expected(0, 1) = expected(1, 0) = xi * s;
  expected(0, 2) = expected(2, 0) = xi * s;
  expected(2, 3) = expected(3, 2) = std::sqrt(2.0) * omega;
  const double scale = std::max(1.0, std::max(xi, omega));
  const double dev = (rotated - expected).cwiseAbs().maxCoeff();
  if (dev > kStructuralTol * scale) {
    throw NumericalError(fmt::format("bright/dark rewrite deviates from the expected form by {:.3e}", dev));
  }
  return rotated;
}

}  // namespace zeno
