#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zeno/models.hpp"
#include "zeno/operator_algebra.hpp"

namespace zeno {

/// A photon emission: time and index of the collapse operator that fired.
struct JumpRecord {
  double time = 0.0;
  int channel = 0;
};

struct TrajectoryOptions {
  /// Uniform sample points on [0, t_max] at which the normalized state is
  /// recorded; 0 records nothing, otherwise must be >= 2.
  int n_samples = 0;
  /// Resolution of jump times. 0 selects 1e-6/Gamma_max.
  double jump_time_tol = 0.0;
};

struct Trajectory {
  std::vector<JumpRecord> jumps;
  std::vector<double> sample_times;
  std::vector<StateVector> samples;
};

/// SplitMix64 finalizer applied to (master seed, trajectory index); gives each
/// trajectory an independent, order-free stream.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// Quantum-jump unraveling. Between jumps the state evolves under
/// H_int - (i/2) sum_k C_k^dagger C_k; a jump fires when the squared norm
/// reaches a uniform random threshold and picks channel k with probability
/// proportional to |C_k psi|^2.
///
/// The no-jump propagator is applied exactly on a dyadic time lattice of
/// spacing <= jump_time_tol, so the jump record is a deterministic function
/// of (scheme, psi0, t_max, seed, options). Throws std::invalid_argument for
/// a coherent scheme or an unnormalized psi0.
Trajectory run_trajectory(const LevelScheme& scheme, const StateVector& psi0, double t_max,
                          std::uint64_t seed, const TrajectoryOptions& options = {});

struct EnsembleResult {
  std::uint64_t seed = 0;
  int n_traj = 0;
  std::vector<std::vector<JumpRecord>> jumps;  // indexed by trajectory
  std::vector<double> sample_times;
  Eigen::MatrixXd mean_populations;      // samples x dim
  Eigen::MatrixXd standard_error;        // samples x dim, std/sqrt(n)
  Eigen::VectorXd mean_p0;               // <psi|p_cs|psi> averaged
  Eigen::VectorXd standard_error_p0;
};

/// n_traj trajectories with seeds trajectory_seed(master_seed, i). The
/// reduction runs in trajectory order, so results do not depend on `threads`.
EnsembleResult run_ensemble(const LevelScheme& scheme, const StateVector& psi0, double t_max,
                            int n_traj, std::uint64_t master_seed,
                            const TrajectoryOptions& options = {}, int threads = 1);

/// Dark/light period statistics of a set of jump records.
struct TrajectoryStats {
  int n_traj = 0;
  std::uint64_t seed = 0;
  double dark_threshold = 0.0;
  /// Mean of dark_period_samples; absent when there are none.
  std::optional<double> mean_dark_period;
  std::vector<double> dark_period_samples;
  /// Trajectory-final gaps >= threshold; excluded from the mean.
  std::vector<double> censored_dark_periods;
  /// Emissions per unit time inside light periods (gaps below threshold).
  std::optional<double> emission_rate_light;
};

/// Gaps between consecutive emissions, and the interval from t = 0 to the
/// first emission, that last at least dark_threshold are dark periods. The
/// gap after the last emission is censored by t_max and reported separately.
/// Throws std::invalid_argument for empty input or a non-positive threshold.
TrajectoryStats dark_period_stats(std::span<const std::vector<JumpRecord>> records,
                                  double dark_threshold, double t_max);

/// 10/Gamma_max, the default dark-period threshold.
double default_dark_threshold(const LevelScheme& scheme);

}  // namespace zeno
