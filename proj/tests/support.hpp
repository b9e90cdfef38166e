#pragma once

// Reference implementations used only by tests. They share no numerical code
// with the library beyond Eigen itself.

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "zeno/models.hpp"

namespace zeno::testing {

inline const double kSqrt2 = std::sqrt(2.0);
inline const double kSqrt3 = std::sqrt(3.0);
inline const double kSqrt6 = std::sqrt(6.0);

// Column-stacking vectorisation: vec(A X B) = (B^T kron A) vec(X).
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Eigen::MatrixXcd liouvillian(const Operator& h, const std::vector<Operator>& cs) {
  const auto d = h.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const Complex i1(0.0, 1.0);
  Eigen::MatrixXcd l = -i1 * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& c : cs) {
    const Eigen::MatrixXcd cdc = c.adjoint() * c;
    l += kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
  }
  return l;
}

// rho(t) = exp(L t) rho0, evaluated by dense matrix exponential.
class ExactPropagator {
 public:
  explicit ExactPropagator(const LevelScheme& s) : d_(s.dim), l_(liouvillian(s.h_int, s.collapse_ops)) {}

  Operator evolve(const Operator& rho0, double t) const {
    const Eigen::MatrixXcd prop = (l_ * Complex(t, 0.0)).exp();
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), d_ * d_);
    Eigen::VectorXcd w = prop * v;
    return Eigen::Map<Operator>(w.data(), d_, d_);
  }

  double p0(const Operator& rho0, double t) const { return evolve(rho0, t)(0, 0).real(); }

  // Stationary state from the null space of L with trace one.
  Operator stationary() const {
    const auto n = d_ * d_;
    Eigen::MatrixXcd a(n + 1, n);
    a.topRows(n) = l_;
    a.row(n).setZero();
    for (int k = 0; k < d_; ++k) a(n, k * d_ + k) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXcd v = a.colPivHouseholderQr().solve(rhs);
    return Eigen::Map<Operator>(v.data(), d_, d_);
  }

 private:
  int d_;
  Eigen::MatrixXcd l_;
};

inline Operator ground_state(int d) {
  Operator rho = Operator::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

// Reference closed rate systems, written out entry by entry.
struct ReferenceSystem {
  std::vector<std::string> labels;
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
};

inline ReferenceSystem reference_two_level(double xi) {
  ReferenceSystem p{{"sigma_2", "sigma_3"}, Eigen::MatrixXd(2, 2), Eigen::VectorXd::Zero(2)};
  p.m << 0, -2 * xi, 2 * xi, 0;
  return p;
}

inline ReferenceSystem reference_two_level_decay(double xi, double g) {
  ReferenceSystem p{{"sigma_2", "sigma_3"}, Eigen::MatrixXd(2, 2), Eigen::VectorXd(2)};
  p.m << -g / 2, -2 * xi, 2 * xi, -g;
  p.b << 0, g;
  return p;
}

inline ReferenceSystem reference_three_level(double xi, double om) {
  ReferenceSystem p{{"sigma_2", "sigma_3", "sigma_4", "sigma_7", "sigma_8"}, Eigen::MatrixXd(5, 5),
                  Eigen::VectorXd::Zero(5)};
  p.m << 0, -2 * xi, -om, 0, 0,
         2 * xi, 0, 0, -om, 0,
         om, 0, 0, -xi, 0,
         0, om, xi, 0, -kSqrt3 * om,
         0, 0, 0, kSqrt3 * om, 0;
  return p;
}

// Reference form, including the sigma_8 row entries -3 Gamma and sqrt3 Gamma.
inline ReferenceSystem reference_three_level_decay(double xi, double om, double g) {
  ReferenceSystem p{{"sigma_2", "sigma_3", "sigma_4", "sigma_7", "sigma_8"}, Eigen::MatrixXd(5, 5),
                  Eigen::VectorXd(5)};
  p.m << 0, -2 * xi, -om, 0, 0,
         2 * xi, 0, 0, -om, g / kSqrt3,
         om, 0, -g / 2, -xi, 0,
         0, om, xi, -g / 2, -kSqrt3 * om,
         0, 0, 0, kSqrt3 * om, -3 * g;
  p.b << 0, -g / 3, 0, 0, kSqrt3 * g;
  return p;
}

inline ReferenceSystem reference_four_level(double xi, double om) {
  ReferenceSystem p{{"sigma_2", "sigma_3", "sigma_4", "sigma_7", "sigma_8", "sigma_10", "sigma_11",
                   "sigma_14", "sigma_15"},
                  Eigen::MatrixXd(9, 9), Eigen::VectorXd::Zero(9)};
  const double a = 2 / kSqrt3 * om;
  const double c = 2 * kSqrt2 / kSqrt3 * om;
  p.m << 0, -2 * xi, -om, 0, 0, 0, 0, 0, 0,
         2 * xi, 0, 0, -om, 0, 0, 0, 0, 0,
         om, 0, 0, -xi, 0, om, 0, 0, 0,
         0, om, xi, 0, -kSqrt3 * om, 0, -om, 0, 0,
         0, 0, 0, kSqrt3 * om, 0, 0, 0, -a, 0,
         0, 0, -om, 0, 0, 0, xi, 0, 0,
         0, 0, 0, om, 0, -xi, 0, -om, 0,
         0, 0, 0, 0, a, 0, om, 0, -c,
         0, 0, 0, 0, 0, 0, 0, c, 0;
  return p;
}

inline ReferenceSystem reference_four_level_decay(double xi, double om, double g) {
  ReferenceSystem p = reference_four_level(xi, om);
  auto& m = p.m;
  m(1, 4) = g / kSqrt3;
  m(1, 8) = -g / (2 * kSqrt6);
  m(2, 2) = -g / 2;
  m(3, 3) = -g / 2;
  m(4, 4) = -g;
  m(4, 8) = 3 / (2 * kSqrt2) * g;
  m(5, 5) = -g / 2;
  m(6, 6) = -g / 2;
  m(7, 7) = -g;
  m(8, 8) = -g;
  p.b << 0, -g / 4, 0, 0, g / (4 * kSqrt3), 0, 0, 0, g / kSqrt6;
  return p;
}

}  // namespace zeno::testing
