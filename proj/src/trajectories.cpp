#include "zeno/trajectories.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "zeno/errors.hpp"
#include "zeno/parallel.hpp"

namespace zeno {

namespace {

constexpr int kMaxLiftLevels = 48;
constexpr std::size_t kEnsembleBlock = 512;

double gamma_max(const LevelScheme& scheme) {
  double g = 0.0;
  for (const auto& c : scheme.collapse_ops) {
    Eigen::JacobiSVD<Operator> svd(c);
    const double s = svd.singularValues()(0);
    g = std::max(g, s * s);
  }
  return g;
}

double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// exp(-i H_eff tau) on the lattice tau = 2^j * tick, j = 0..levels, plus the
// bookkeeping that maps integer ticks to time and sample points.
class NoJumpPropagator {
 public:
  NoJumpPropagator(const LevelScheme& scheme, double t_max, const TrajectoryOptions& options) {
    if (!scheme.dissipative()) {
      throw std::invalid_argument("quantum-jump unraveling needs at least one collapse operator (Gamma > 0)");
    }
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be positive");
    if (options.n_samples == 1 || options.n_samples < 0) {
      throw std::invalid_argument("n_samples must be 0 or >= 2");
    }
    collapse_ = scheme.collapse_ops;
    p_cs_ = scheme.p_cs;
    Operator h_eff = scheme.h_int;
    for (const auto& c : collapse_) h_eff -= Complex(0.0, 0.5) * (c.adjoint() * c);

    const double g_max = gamma_max(scheme);
    const double tol = options.jump_time_tol > 0.0 ? options.jump_time_tol : 1e-6 / g_max;
    const double h_max = 1.0 / std::max(h_eff.norm(), 1e-300);

    if (options.n_samples >= 2) {
      const double spacing = t_max / (options.n_samples - 1);
      steps_per_sample_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(spacing / h_max)));
      n_steps_ = steps_per_sample_ * (options.n_samples - 1);
    } else {
      n_steps_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t_max / h_max)));
      steps_per_sample_ = 0;
    }
    step_ = t_max / static_cast<double>(n_steps_);
    levels_ = std::clamp(static_cast<int>(std::ceil(std::log2(step_ / tol))), 0, kMaxLiftLevels);
    tick_ = std::ldexp(step_, -levels_);
    powers_.reserve(static_cast<std::size_t>(levels_) + 1);
    for (int j = 0; j <= levels_; ++j) {
      const Operator gen = Complex(0.0, -std::ldexp(tick_, j)) * h_eff;
      powers_.push_back(gen.exp());
    }
  }

  std::int64_t ticks_per_step() const { return std::int64_t{1} << levels_; }
  std::int64_t total_ticks() const { return n_steps_ << levels_; }
  int levels() const { return levels_; }
  std::int64_t steps_per_sample() const { return steps_per_sample_; }
  std::int64_t n_steps() const { return n_steps_; }
  double time_of(std::int64_t ticks) const {
    return static_cast<double>(ticks >> levels_) * step_ +
           static_cast<double>(ticks & (ticks_per_step() - 1)) * tick_;
  }
  const Operator& power(int j) const { return powers_[static_cast<std::size_t>(j)]; }
  const std::vector<Operator>& collapse() const { return collapse_; }
  const Operator& p_cs() const { return p_cs_; }

  // psi <- U(n ticks) psi for 0 <= n <= 2^levels.
  void apply(std::int64_t n, StateVector& psi, StateVector& scratch) const {
    if (n == ticks_per_step()) {
      scratch.noalias() = powers_.back() * psi;
      psi.swap(scratch);
      return;
    }
    for (int j = 0; n != 0; ++j, n >>= 1) {
      if (n & 1) {
        scratch.noalias() = powers_[static_cast<std::size_t>(j)] * psi;
        psi.swap(scratch);
      }
    }
  }

 private:
  std::vector<Operator> collapse_;
  Operator p_cs_;
  std::vector<Operator> powers_;
  std::int64_t n_steps_ = 1;
  std::int64_t steps_per_sample_ = 0;
  double step_ = 0.0;
  double tick_ = 0.0;
  int levels_ = 0;
};

Trajectory simulate(const NoJumpPropagator& prop, const StateVector& psi0, std::uint64_t seed) {
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10) {
    throw std::invalid_argument("initial state must be normalized");
  }
  std::mt19937_64 rng(seed);
  Trajectory out;
  StateVector psi = psi0;
  StateVector scratch(psi.size());
  StateVector trial(psi.size());
  double threshold = uniform_open(rng);

  auto record_sample = [&](std::int64_t tick) {
    out.sample_times.push_back(prop.time_of(tick));
    out.samples.push_back(psi / psi.norm());
  };
  if (prop.steps_per_sample() > 0) record_sample(0);

  const std::int64_t per_step = prop.ticks_per_step();
  std::int64_t now = 0;
  while (now < prop.total_ticks()) {
    const std::int64_t boundary = (now / per_step + 1) * per_step;
    const std::int64_t n = boundary - now;
    trial = psi;
    prop.apply(n, trial, scratch);
    if (trial.squaredNorm() > threshold) {
      psi.swap(trial);
      now = boundary;
    } else {
      // Largest a < n with |U(a) psi|^2 > threshold; the norm is monotone
      // between jumps, so the first crossing sits at tick a + 1.
      std::int64_t advanced = 0;
      for (int j = prop.levels(); j >= 0; --j) {
        const std::int64_t chunk = std::int64_t{1} << j;
        if (advanced + chunk > n - 1) continue;
        trial.noalias() = prop.power(j) * psi;
        if (trial.squaredNorm() > threshold) {
          psi.swap(trial);
          advanced += chunk;
        }
      }
      scratch.noalias() = prop.power(0) * psi;
      psi.swap(scratch);
      now += advanced + 1;

      const auto& ops = prop.collapse();
      std::vector<double> weights(ops.size());
      double total = 0.0;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        weights[k] = (ops[k] * psi).squaredNorm();
        total += weights[k];
      }
      if (!(total > 0.0)) {
        throw NumericalError(fmt::format("jump at t = {} has zero emission probability", prop.time_of(now)));
      }
      const double pick = uniform_open(rng) * total;
      std::size_t channel = 0;
      double acc = weights[0];
      while (channel + 1 < ops.size() && pick > acc) acc += weights[++channel];
      scratch.noalias() = ops[channel] * psi;
      psi = scratch / scratch.norm();
      out.jumps.push_back({prop.time_of(now), static_cast<int>(channel)});
      threshold = uniform_open(rng);
    }
    if (prop.steps_per_sample() > 0 && now % per_step == 0 &&
        (now / per_step) % prop.steps_per_sample() == 0) {
      record_sample(now);
    }
  }
  return out;
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master_seed ^ mix(index));
}

Trajectory run_trajectory(const LevelScheme& scheme, const StateVector& psi0, double t_max,
                          std::uint64_t seed, const TrajectoryOptions& options) {
  if (psi0.size() != scheme.dim) throw std::invalid_argument("psi0 dimension differs from scheme");
  const NoJumpPropagator prop(scheme, t_max, options);
  return simulate(prop, psi0, seed);
}

EnsembleResult run_ensemble(const LevelScheme& scheme, const StateVector& psi0, double t_max,
                            int n_traj, std::uint64_t master_seed, const TrajectoryOptions& options,
                            int threads) {
  if (n_traj < 1) throw std::invalid_argument("n_traj must be positive");
  if (psi0.size() != scheme.dim) throw std::invalid_argument("psi0 dimension differs from scheme");
  const NoJumpPropagator prop(scheme, t_max, options);

  EnsembleResult res;
  res.seed = master_seed;
  res.n_traj = n_traj;
  res.jumps.resize(static_cast<std::size_t>(n_traj));
  const auto n_samples = static_cast<Eigen::Index>(options.n_samples);
  const int d = scheme.dim;
  // Welford accumulators, populations in columns 0..d-1 and P0 in column d.
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n_samples, d + 1);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(n_samples, d + 1);

  std::vector<Trajectory> block(kEnsembleBlock);
  std::size_t done = 0;
  const auto total = static_cast<std::size_t>(n_traj);
  while (done < total) {
    const std::size_t count = std::min(kEnsembleBlock, total - done);
    parallel_for(count, threads, [&](std::size_t i) {
      block[i] = simulate(prop, psi0, trajectory_seed(master_seed, done + i));
    });
    for (std::size_t i = 0; i < count; ++i) {
      Trajectory& tr = block[i];
      if (res.sample_times.empty()) res.sample_times = tr.sample_times;
      const double k = static_cast<double>(done + i + 1);
      for (Eigen::Index s = 0; s < n_samples; ++s) {
        const StateVector& psi = tr.samples[static_cast<std::size_t>(s)];
        for (int c = 0; c <= d; ++c) {
          const double x = c < d ? std::norm(psi(c)) : psi.dot(prop.p_cs() * psi).real();
          const double delta = x - mean(s, c);
          mean(s, c) += delta / k;
          m2(s, c) += delta * (x - mean(s, c));
        }
      }
      res.jumps[done + i] = std::move(tr.jumps);
      tr = Trajectory{};
    }
    done += count;
  }

  const double n = n_traj;
  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(n_samples, d + 1);
  if (n_traj > 1) se = (m2 / (n - 1.0) / n).cwiseSqrt();
  res.mean_populations = mean.leftCols(d);
  res.standard_error = se.leftCols(d);
  res.mean_p0 = mean.col(d);
  res.standard_error_p0 = se.col(d);
  return res;
}

TrajectoryStats dark_period_stats(std::span<const std::vector<JumpRecord>> records,
                                  double dark_threshold, double t_max) {
  if (records.empty()) throw std::invalid_argument("dark_period_stats: no trajectories");
  if (!(dark_threshold > 0.0)) throw std::invalid_argument("dark_threshold must be positive");

  TrajectoryStats stats;
  stats.n_traj = static_cast<int>(records.size());
  stats.dark_threshold = dark_threshold;
  std::size_t light_gaps = 0;
  double light_time = 0.0;
  for (const auto& traj : records) {
    double prev = 0.0;
    for (const auto& jump : traj) {
      if (jump.time < prev || jump.time > t_max) {
        throw std::invalid_argument("jump times must be increasing and inside [0, t_max]");
      }
      const double gap = jump.time - prev;
      if (gap >= dark_threshold) {
        stats.dark_period_samples.push_back(gap);
      } else {
        ++light_gaps;
        light_time += gap;
      }
      prev = jump.time;
    }
    const double tail = t_max - prev;
    if (tail >= dark_threshold) stats.censored_dark_periods.push_back(tail);
  }
  if (!stats.dark_period_samples.empty()) {
    double sum = 0.0;
    for (double s : stats.dark_period_samples) sum += s;
    stats.mean_dark_period = sum / static_cast<double>(stats.dark_period_samples.size());
  }
  if (light_gaps > 0 && light_time > 0.0) {
    stats.emission_rate_light = static_cast<double>(light_gaps) / light_time;
  }
  return stats;
}

double default_dark_threshold(const LevelScheme& scheme) {
  const double g = gamma_max(scheme);
  if (!(g > 0.0)) throw std::invalid_argument("default_dark_threshold needs Gamma > 0");
  return 10.0 / g;
}

}  // namespace zeno
