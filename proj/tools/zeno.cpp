#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zeno/errors.hpp"
#include "zeno/parallel.hpp"
#include "zeno/scenario.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string out;
  std::string model;
  std::vector<double> omega;
  std::vector<double> gamma;
  std::optional<double> t_max;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_traj;
  std::optional<std::string> engine;
  int threads = 0;
};

zeno::ScenarioConfig resolve(const Overrides& o) {
  zeno::ScenarioConfig c = o.config_path.empty() ? zeno::ScenarioConfig{} : zeno::load_config(o.config_path);
  if (!o.model.empty()) c.model = o.model;
  if (!o.out.empty()) c.output = o.out;
  if (!o.omega.empty()) {
    c.omega = o.omega;
    c.omega_is_list = o.omega.size() > 1;
  }
  if (!o.gamma.empty()) {
    c.gamma = o.gamma;
    c.gamma_is_list = o.gamma.size() > 1;
  }
  if (o.t_max) c.t_max = *o.t_max;
  if (o.engine) c.engine = *o.engine;
  if (o.seed || o.n_traj) {
    if (!c.trajectories) c.trajectories = zeno::TrajectoryConfig{};
    if (o.seed) c.trajectories->seed = *o.seed;
    if (o.n_traj) c.trajectories->n_traj = *o.n_traj;
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage-protection simulator: coherent and dissipative level schemes"};
  app.require_subcommand(1);

  Overrides ov;
  struct Sub {
    const char* name;
    const char* help;
    zeno::Mode mode;
  };
  const Sub subs[] = {
      {"simulate", "integrate populations on a time grid (one CSV per sweep point)", zeno::Mode::simulate},
      {"derive", "derive the closed rate system d<A>/dt = M<A> + b", zeno::Mode::derive},
      {"steady", "solve for the stationary state of each sweep point", zeno::Mode::steady},
      {"analyze", "dark-state and effective-Hamiltonian analysis", zeno::Mode::analyze},
      {"traject", "quantum-jump trajectory ensemble and dark-period statistics", zeno::Mode::traject},
  };

  std::optional<zeno::Mode> chosen;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", ov.config_path, "JSON scenario file")->check(CLI::ExistingFile);
    sub->add_option("--out", ov.out, "output path prefix");
    sub->add_option("--model", ov.model, "two_level | three_level_chain | four_level_chain");
    sub->add_option("--omega", ov.omega, "Omega value(s), comma separated for a sweep")->delimiter(',');
    sub->add_option("--gamma", ov.gamma, "Gamma value(s), comma separated for a sweep")->delimiter(',');
    sub->add_option("--tmax", ov.t_max, "final time");
    sub->add_option("--engine", ov.engine, "master | rate");
    sub->add_option("--seed", ov.seed, "master seed for trajectories");
    sub->add_option("--ntraj", ov.n_traj, "number of trajectories");
    sub->add_option("--threads", ov.threads, "worker threads (0 = hardware concurrency)");
    sub->callback([&chosen, mode = s.mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const zeno::ScenarioConfig config = resolve(ov);
    const int threads = ov.threads > 0 ? ov.threads : zeno::default_thread_count();
    const auto result = zeno::run_scenario(config, *chosen, std::cout, threads);
    std::cout << "manifest: " << result.manifest.string() << '\n';
    return 0;
  } catch (const zeno::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const zeno::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
