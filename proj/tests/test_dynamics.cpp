#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "zeno/dynamics.hpp"
#include "zeno/errors.hpp"
#include "zeno/rate_closure.hpp"

using namespace zeno;
using namespace zeno::testing;
using std::numbers::pi;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TimeSeries rate_series(const LevelScheme& s, const DensityMatrix& rho0, std::span<const double> grid) {
  const auto rs = derive_rate_system(s);
  return integrate_rate_system(rs, expectations_of(rho0, rs), grid);
}

}  // namespace

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix::pure(3, 1));
  CHECK(DensityMatrix::maximally_mixed(4).purity() == doctest::Approx(0.25));
  CHECK_THROWS_AS(DensityMatrix(Operator::Identity(2, 2)), std::invalid_argument);
  Operator bad = projector(2, 0);
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix{bad}, std::invalid_argument);
  Operator neg = Operator::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, std::invalid_argument);
  StateVector psi(2);
  psi << Complex(3, 0), Complex(0, 4);
  CHECK(DensityMatrix::from_state(psi).matrix()(1, 1).real() == doctest::Approx(0.64));
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(20.0, 2000);
  CHECK(g.size() == 2000);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 20.0);
  CHECK_THROWS_AS(uniform_grid(-1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(1.0, 1), std::invalid_argument);
}

TEST_CASE("expectation vectors of simple states") {
  const auto rs2 = derive_rate_system(build_model(ModelKind::two_level, {.xi = 1}));
  const auto e2 = expectations_of(DensityMatrix::pure(2, 0), rs2);
  CHECK(e2(0) == doctest::Approx(0.0));
  CHECK(e2(1) == doctest::Approx(1.0));

  const auto rs3 = derive_rate_system(build_model(ModelKind::three_level_chain, {.xi = 1, .omega = 2}));
  Eigen::VectorXd expected(5);
  expected << 0, 1, 0, 0, 1 / kSqrt3;
  CHECK((expectations_of(DensityMatrix::pure(3, 0), rs3) - expected).cwiseAbs().maxCoeff() <= 1e-15);

  const auto rs4 = derive_rate_system(build_model(ModelKind::four_level_chain, {.xi = 1, .omega = 2}));
  CHECK(expectations_of(DensityMatrix::maximally_mixed(4), rs4).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(expectations_of(DensityMatrix::pure(3, 0), rs2), std::invalid_argument);
}

TEST_CASE("rate system reproduces Rabi oscillation at quarter and half period") {
  const auto s = build_model(ModelKind::two_level, {.xi = 1});
  const std::vector<double> grid{0.0, pi / 2, pi};
  const auto ts = rate_series(s, DensityMatrix::pure(2, 0), grid);
  CHECK(std::abs(ts.p0[1]) <= 1e-9);
  CHECK(std::abs(ts.p0[2] - 1.0) <= 1e-9);
  CHECK(ts.has_population[0]);
  CHECK(ts.has_population[1]);
}

TEST_CASE("no coupling out of |0> keeps P0 = 1") {
  for (auto k : {ModelKind::two_level, ModelKind::three_level_chain, ModelKind::four_level_chain}) {
    const auto s = build_model(k, {.xi = 0.0, .omega = 3.0, .gamma = 2.0});
    const auto grid = uniform_grid(10.0, 50);
    for (double p : rate_series(s, DensityMatrix::pure(s.dim, 0), grid).p0) CHECK(std::abs(p - 1.0) <= 1e-12);
    for (double p : integrate_master_equation(s, DensityMatrix::pure(s.dim, 0), grid).p0) {
      CHECK(std::abs(p - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("coherent three-level minimum at Omega = 10 xi") {
  const double mu = std::sqrt(101.0);
  const auto s = build_model(ModelKind::three_level_chain, {.xi = 1, .omega = 10});
  const std::vector<double> grid{0.0, pi / mu};
  const auto ts = rate_series(s, DensityMatrix::pure(3, 0), grid);
  CHECK(std::abs(ts.p0[1] - std::pow(99.0 / 101.0, 2)) <= 1e-8);
}

TEST_CASE("rate-system populations are omitted when not representable") {
  const auto s = build_model(ModelKind::three_level_chain, {.xi = 1, .omega = 2});
  const auto ts = rate_series(s, DensityMatrix::pure(3, 0), uniform_grid(1.0, 5));
  // p2 = 1/3 - <s8>/sqrt3 and p0, p1 follow from s3 and s8: all three are representable.
  CHECK(ts.has_population == std::vector<bool>{true, true, true});
  const auto s4 = build_model(ModelKind::two_level, {.xi = 1});
  const auto rs = derive_rate_system(s4);
  CHECK(rs.size() == 2);
}

TEST_CASE("decay towards the two-level steady state") {
  const auto s = build_model(ModelKind::two_level, {.xi = 1, .gamma = 10});
  const std::vector<double> grid{0.0, 10.0, 40.0};
  const auto ts = integrate_master_equation(s, DensityMatrix::pure(2, 0), grid);
  CHECK(std::abs(ts.p0[2] - 104.0 / 108.0) <= 1e-9);
  const auto ss = steady_state(s);
  REQUIRE(ss.has_value());
  CHECK(std::abs(ss->p0 - 104.0 / 108.0) <= 1e-12);
  CHECK(std::abs(ss->populations.sum() - 1.0) <= 1e-12);
}

TEST_CASE("steady state is absent without dissipation") {
  CHECK_FALSE(steady_state(build_model(ModelKind::three_level_chain, {.xi = 1, .omega = 2})).has_value());
}

TEST_CASE("steady states agree with the Liouvillian null space") {
  for (auto k : {ModelKind::two_level, ModelKind::three_level_chain, ModelKind::four_level_chain}) {
    const auto s = build_model(k, {.xi = 1.0, .omega = 3.0, .gamma = 2.0});
    const auto ss = steady_state(s);
    REQUIRE(ss.has_value());
    const Operator ref = ExactPropagator(s).stationary();
    CHECK(std::abs(ss->p0 - ref(0, 0).real()) <= 1e-10);
  }
}

TEST_CASE("frozen |1> in the four-level chain when xi = 0") {
  const auto s = build_model(ModelKind::four_level_chain, {.xi = 0.0, .omega = 0.0});
  const auto ts = integrate_master_equation(s, DensityMatrix::pure(4, 1), uniform_grid(5.0, 20));
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    CHECK(ts.p0[i] == 0.0);
    CHECK(ts.populations(static_cast<Eigen::Index>(i), 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("master equation matches the exact propagator") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (auto k : {ModelKind::two_level, ModelKind::three_level_chain, ModelKind::four_level_chain}) {
    const auto s = build_model(k, {.xi = 1.0 + u(rng) / 6, .omega = u(rng), .gamma = u(rng)});
    const ExactPropagator exact(s);
    const auto grid = uniform_grid(6.0, 13);
    const auto ts = integrate_master_equation(s, DensityMatrix::pure(s.dim, 0), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(ts.p0[i] - exact.p0(ground_state(s.dim), grid[i])) <= 1e-7);
    }
  }
}

TEST_CASE("trace, purity and population sums along a coherent run") {
  const auto s = build_model(ModelKind::four_level_chain, {.xi = 1, .omega = 7});
  const auto grid = uniform_grid(20.0, 101);
  const auto rhos = evolve_master_equation(s, DensityMatrix::pure(4, 0), grid);
  for (const auto& rho : rhos) {
    CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-8);
    CHECK(std::abs((rho * rho).trace().real() - 1.0) <= 1e-8);
  }
  const auto ts = integrate_master_equation(s, DensityMatrix::pure(4, 0), grid);
  for (Eigen::Index i = 0; i < ts.populations.rows(); ++i) {
    CHECK(std::abs(ts.populations.row(i).sum() - 1.0) <= 1e-8);
    CHECK(ts.p0[static_cast<std::size_t>(i)] <= 1.0 + 1e-8);
  }
}

TEST_CASE("two representations agree on the configurations") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Cfg {
    ModelKind kind;
    bool decay;
  };
  const Cfg cfgs[] = {{ModelKind::two_level, false},        {ModelKind::three_level_chain, false},
                      {ModelKind::four_level_chain, false}, {ModelKind::two_level, true},
                      {ModelKind::three_level_chain, true}, {ModelKind::four_level_chain, true}};
  for (const auto& c : cfgs) {
    const ModelParams p{.xi = 0.5 + 2 * u(rng), .omega = 20 * u(rng), .gamma = c.decay ? 20 * u(rng) : 0.0};
    const auto s = build_model(c.kind, p);
    const auto grid = uniform_grid(20.0 / p.xi, 200);
    const auto a = rate_series(s, DensityMatrix::pure(s.dim, 0), grid);
    const auto b = integrate_master_equation(s, DensityMatrix::pure(s.dim, 0), grid);
    CHECK(max_abs_diff(a.p0, b.p0) <= 1e-6);
  }
}

TEST_CASE("time reversal returns the initial expectation vector") {
  const auto s = build_model(ModelKind::three_level_chain, {.xi = 1.0, .omega = 4.0});
  const auto rs = derive_rate_system(s);
  const Eigen::VectorXd x0 = expectations_of(DensityMatrix::pure(3, 0), rs);
  const std::vector<double> grid{0.0, 7.3};
  const auto fwd = evolve_master_equation(s, DensityMatrix::pure(3, 0), grid);
  const auto rev_scheme = make_scheme(-s.h_int, {}, s.p_cs, s.params);
  const auto back = evolve_master_equation(rev_scheme, DensityMatrix(fwd.back(), 1e-8), grid);
  CHECK((expectations_of(DensityMatrix(back.back(), 1e-8), rs) - x0).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("stiffness guard and argument checks") {
  CHECK_THROWS_AS(check_stiffness({.xi = 1.0, .omega = 2e4}), NumericalError);
  CHECK_NOTHROW(check_stiffness({.xi = 1.0, .omega = 1e3, .gamma = 1e3}));
  const auto s = build_model(ModelKind::two_level, {.xi = 1});
  const std::vector<double> bad_grid{0.0, 2.0, 1.0};
  CHECK_THROWS(integrate_master_equation(s, DensityMatrix::pure(2, 0), bad_grid));
  CHECK_THROWS_AS(integrate_master_equation(s, DensityMatrix::pure(3, 0), uniform_grid(1, 3)), std::invalid_argument);
  const auto rs = derive_rate_system(s);
  CHECK_THROWS_AS(integrate_rate_system(rs, Eigen::VectorXd::Zero(5), uniform_grid(1, 3)), std::invalid_argument);
}
