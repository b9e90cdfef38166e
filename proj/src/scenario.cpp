#include "zeno/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <openssl/evp.h>

#include "zeno/analyzer.hpp"
#include "zeno/errors.hpp"
#include "zeno/models.hpp"
#include "zeno/parallel.hpp"
#include "zeno/rate_closure.hpp"
#include "zeno/trajectories.hpp"

namespace zeno {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Reads one JSON object, tracking consumed keys so leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& what) {
    throw ConfigError(fmt::format("field '{}': {}", field, what));
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
  }

  const json* get(std::string_view key) {
    const auto it = obj_.find(std::string(key));
    if (it == obj_.end()) return nullptr;
    seen_.emplace_back(key);
    return &*it;
  }

  double number(std::string_view key, const json& v) const {
    if (!v.is_number()) fail(field(key), fmt::format("expected a number, got {}", v.type_name()));
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field(key), "must be finite");
    return x;
  }

  std::optional<double> opt_number(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    return number(key, *v);
  }

  std::optional<std::int64_t> opt_integer(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(field(key), fmt::format("expected an integer, got {}", v->type_name()));
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::string> opt_string(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(field(key), fmt::format("expected a string, got {}", v->type_name()));
    return v->get<std::string>();
  }

  std::optional<bool> opt_bool(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) fail(field(key), fmt::format("expected a boolean, got {}", v->type_name()));
    return v->get<bool>();
  }

  // Scalar or list of numbers. Returns (values, was_list).
  std::optional<std::pair<std::vector<double>, bool>> opt_number_or_list(std::string_view key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (v->is_array()) {
      std::vector<double> out;
      for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(number(fmt::format("{}[{}]", key, i), (*v)[i]));
      }
      if (out.empty()) fail(field(key), "list must not be empty");
      return std::pair{out, true};
    }
    return std::pair{std::vector<double>{number(key, *v)}, false};
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        fail(field(key), "unknown key");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

InitialCondition parse_initial(const json& v) {
  constexpr std::string_view field = "initial";
  if (v.is_number_integer()) {
    return InitialCondition{false, v.get<int>()};
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "mixed") return InitialCondition{true, 0};
    if (s.rfind("ket", 0) == 0 && s.size() > 3) {
      const auto digits = s.substr(3);
      if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
          digits.size() < 6) {
        return InitialCondition{false, std::stoi(digits)};
      }
    }
    ObjectReader::fail(std::string(field),
                       fmt::format("expected \"mixed\" or \"ket<k>\", got \"{}\"", s));
  }
  if (v.is_object()) {
    ObjectReader r(v, std::string(field));
    const auto k = r.opt_integer("ket");
    if (!k) ObjectReader::fail("initial.ket", "missing");
    r.reject_unknown();
    return InitialCondition{false, static_cast<int>(*k)};
  }
  ObjectReader::fail(std::string(field), fmt::format("unsupported type {}", v.type_name()));
}

TrajectoryConfig parse_trajectories(const json& v) {
  ObjectReader r(v, "trajectories");
  TrajectoryConfig t;
  if (auto n = r.opt_integer("n_traj")) t.n_traj = static_cast<int>(std::clamp<std::int64_t>(*n, -1, 1 << 30));
  if (const json* s = r.get("seed")) {
    if (!s->is_number_unsigned()) {
      ObjectReader::fail("trajectories.seed", "expected a non-negative integer");
    }
    t.seed = s->get<std::uint64_t>();
  }
  if (const json* d = r.get("dark_threshold"); d && !d->is_null()) {
    t.dark_threshold = r.number("dark_threshold", *d);
  }
  if (auto n = r.opt_integer("n_samples")) t.n_samples = static_cast<int>(std::clamp<std::int64_t>(*n, -1, 1 << 24));
  r.reject_unknown();
  return t;
}

json number_or_list(const std::vector<double>& v, bool is_list) {
  if (is_list) return json(v);
  return json(v.front());
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.12g}", v);
}

class OutputSet {
 public:
  explicit OutputSet(std::string prefix) : prefix_(std::move(prefix)) {
    const fs::path parent = fs::path(prefix_).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }

  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (!manifest_.empty()) fs::remove(manifest_, ec);
  }

  fs::path write(const std::string& suffix, const std::string& content) {
    fs::path path = prefix_ + suffix;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    files_.push_back(path);
    out << content;
    out.close();
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
    return path;
  }

  RunResult finish(const ScenarioConfig& config, Mode mode) {
    json files = json::array();
    for (const auto& f : files_) {
      files.push_back({{"path", f.string()},
                       {"bytes", static_cast<std::uint64_t>(fs::file_size(f))},
                       {"sha256", sha256_file(f)}});
    }
    json manifest = {{"mode", std::string(to_string(mode))},
                     {"config", to_json(config)},
                     {"files", files}};
    manifest_ = prefix_ + fmt::format("_{}_manifest.json", to_string(mode));
    {
      std::ofstream out(manifest_, std::ios::binary | std::ios::trunc);
      out << manifest.dump(2) << '\n';
      if (!out) throw std::runtime_error("failed writing manifest");
    }
    committed_ = true;
    return RunResult{files_, manifest_};
  }

 private:
  std::string prefix_;
  std::vector<fs::path> files_;
  fs::path manifest_;
  bool committed_ = false;
};

std::string point_stem(double omega, double gamma) {
  return fmt::format("_omega{}_gamma{}", format_value(omega), format_value(gamma));
}

ModelParams params_for(const ScenarioConfig& c, double omega, double gamma) {
  ModelParams p;
  p.xi = c.xi;
  p.omega = omega;
  p.gamma = gamma;
  p.gamma_channels = c.gamma_channels;
  return p;
}

DensityMatrix initial_state(const ScenarioConfig& c, int dim) {
  return c.initial.mixed ? DensityMatrix::maximally_mixed(dim) : DensityMatrix::pure(dim, c.initial.level);
}

std::string time_series_csv(const TimeSeries& ts) {
  const auto d = ts.populations.cols();
  std::string out = "t,P0";
  for (Eigen::Index k = 0; k < d; ++k) out += fmt::format(",p{}", k);
  out += '\n';
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    out += csv_num(ts.times[i]);
    out += ',';
    out += csv_num(ts.p0[i]);
    for (Eigen::Index k = 0; k < d; ++k) {
      out += ',';
      out += csv_num(ts.populations(static_cast<Eigen::Index>(i), k));
    }
    out += '\n';
  }
  return out;
}

TimeSeries simulate_point(const ScenarioConfig& c, const LevelScheme& scheme) {
  check_stiffness(scheme.params);
  const auto grid = uniform_grid(c.effective_t_max(), c.n_points);
  const DensityMatrix rho0 = initial_state(c, scheme.dim);
  if (c.engine == "rate") {
    const RateSystem rs = derive_rate_system(scheme, c.prune);
    return integrate_rate_system(rs, expectations_of(rho0, rs), grid, c.solver);
  }
  return integrate_master_equation(scheme, rho0, grid, c.solver);
}

std::string rates_csv(const RateSystem& rs) {
  std::string out = "label";
  for (const auto& l : rs.labels) out += ',' + l;
  out += ",b\n";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    out += rs.labels[i];
    for (std::size_t j = 0; j < rs.size(); ++j) {
      out += ',' + csv_num(rs.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += ',' + csv_num(rs.b(static_cast<Eigen::Index>(i))) + '\n';
  }
  out += "P0_map";
  for (std::size_t j = 0; j < rs.size(); ++j) out += ',' + csv_num(rs.p0_coeffs(static_cast<Eigen::Index>(j)));
  out += ',' + csv_num(rs.p0_identity) + '\n';
  return out;
}

std::string rates_text(const RateSystem& rs) {
  std::ostringstream os;
  const int w = 13;
  os << fmt::format("{:>9}", "");
  for (const auto& l : rs.labels) os << fmt::format("{:>{}}", l, w);
  os << fmt::format("{:>{}}\n", "b", w);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    os << fmt::format("{:>9}", rs.labels[i]);
    for (std::size_t j = 0; j < rs.size(); ++j) {
      os << fmt::format("{:>{}.6g}", rs.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), w);
    }
    os << fmt::format("{:>{}.6g}\n", rs.b(static_cast<Eigen::Index>(i)), w);
  }
  os << fmt::format("{:>9}", "P0 =");
  for (std::size_t j = 0; j < rs.size(); ++j) {
    os << fmt::format("{:>{}.6g}", rs.p0_coeffs(static_cast<Eigen::Index>(j)), w);
  }
  os << fmt::format("{:>{}.6g}\n", rs.p0_identity, w);
  return os.str();
}

std::string complex_text(Complex z) { return fmt::format("{:.6g}{:+.6g}i", z.real(), z.imag()); }

struct AnalysisOutput {
  std::string csv;
  std::string text;
};

AnalysisOutput analyze_point(const LevelScheme& scheme) {
  const HamiltonianSplit split = coupling_split(scheme);
  const DarkStateReport rep = find_dark_states(scheme, split);
  const Operator h_eff = effective_hamiltonian(scheme.h_int, scheme.p_cs);

  AnalysisOutput out;
  out.csv = "record,i,j,re,im\n";
  std::ostringstream txt;
  txt << fmt::format("  dark states: {}\n", rep.kernel_vectors.size());
  for (std::size_t v = 0; v < rep.kernel_vectors.size(); ++v) {
    const auto& vec = rep.kernel_vectors[v];
    txt << fmt::format("    v{} =", v);
    for (Eigen::Index k = 0; k < vec.size(); ++k) {
      out.csv += fmt::format("kernel,{},{},{},{}\n", v, k, csv_num(vec(k).real()), csv_num(vec(k).imag()));
      txt << ' ' << complex_text(vec(k));
    }
    txt << '\n';
    for (std::size_t m = 0; m < rep.couplings[v].size(); ++m) {
      const Complex a = rep.couplings[v][m];
      out.csv += fmt::format("coupling,{},{},{},{}\n", v, m, csv_num(a.real()), csv_num(a.imag()));
      txt << fmt::format("      <v{}|H_slow|c{}> = {} (|.| = {:.6g})\n", v, m, complex_text(a), std::abs(a));
    }
  }
  txt << "  H_eff = P H P:\n";
  for (Eigen::Index i = 0; i < h_eff.rows(); ++i) {
    txt << "   ";
    for (Eigen::Index j = 0; j < h_eff.cols(); ++j) {
      out.csv += fmt::format("h_eff,{},{},{},{}\n", i, j, csv_num(h_eff(i, j).real()), csv_num(h_eff(i, j).imag()));
      txt << ' ' << complex_text(h_eff(i, j));
    }
    txt << '\n';
  }
  out.csv += fmt::format("protected,0,0,{},0\n", rep.is_protected ? 1 : 0);
  txt << fmt::format("  verdict: {}\n", rep.is_protected ? "protected" : "NOT protected");
  out.text = txt.str();
  return out;
}

std::string mode_name_upper(Mode m) {
  std::string s(to_string(m));
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

double ScenarioConfig::effective_t_max() const {
  if (t_max) return *t_max;
  return 20.0 / (xi > 0.0 ? xi : 1.0);
}

std::vector<std::pair<double, double>> ScenarioConfig::sweep_points() const {
  std::vector<std::pair<double, double>> pts;
  for (double o : omega) {
    for (double g : gamma) pts.emplace_back(o, g);
  }
  return pts;
}

void ScenarioConfig::validate() const {
  ModelKind kind{};
  try {
    kind = model_kind_from_string(model);
  } catch (const std::invalid_argument& e) {
    ObjectReader::fail("model", e.what());
  }
  if (kind == ModelKind::custom) ObjectReader::fail("model", "custom schemes are not available from configs");
  if (!(xi >= 0.0)) ObjectReader::fail("xi", "must be >= 0");
  if (omega.empty()) ObjectReader::fail("omega", "must not be empty");
  if (gamma.empty()) ObjectReader::fail("gamma", "must not be empty");
  for (double o : omega) {
    if (!(o >= 0.0) || !std::isfinite(o)) ObjectReader::fail("omega", "values must be finite and >= 0");
  }
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) ObjectReader::fail("gamma", "values must be finite and >= 0");
  }
  if (t_max && !(*t_max > 0.0)) ObjectReader::fail("t_max", "must be > 0");
  if (n_points < 2) ObjectReader::fail("n_points", "must be >= 2");
  if (!(solver.rtol > 0.0)) ObjectReader::fail("solver.rtol", "must be > 0");
  if (!(solver.atol > 0.0)) ObjectReader::fail("solver.atol", "must be > 0");
  if (engine != "master" && engine != "rate") {
    ObjectReader::fail("engine", fmt::format("expected \"master\" or \"rate\", got \"{}\"", engine));
  }
  if (output.empty()) ObjectReader::fail("output", "must not be empty");
  if (trajectories) {
    if (trajectories->n_traj < 1) ObjectReader::fail("trajectories.n_traj", "must be >= 1");
    if (trajectories->n_samples < 2) ObjectReader::fail("trajectories.n_samples", "must be >= 2");
    if (trajectories->dark_threshold && !(*trajectories->dark_threshold > 0.0)) {
      ObjectReader::fail("trajectories.dark_threshold", "must be > 0");
    }
  }
  for (const auto& [o, g] : sweep_points()) {
    LevelScheme scheme;
    try {
      scheme = build_model(kind, params_for(*this, o, g));
    } catch (const std::invalid_argument& e) {
      ObjectReader::fail(gamma_channels.empty() ? "model" : "gamma_channels", e.what());
    }
    if (!initial.mixed && (initial.level < 0 || initial.level >= scheme.dim)) {
      ObjectReader::fail("initial", fmt::format("level {} outside 0..{}", initial.level, scheme.dim - 1));
    }
  }
}

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(fmt::format("{}:{}:{}: invalid JSON ({})", source, line, col, e.what()));
  }

  try {
    ScenarioConfig c;
    ObjectReader r(doc, "");
    if (auto v = r.opt_string("model")) c.model = *v;
    if (auto v = r.opt_number("xi")) c.xi = *v;
    if (auto v = r.opt_number_or_list("omega")) std::tie(c.omega, c.omega_is_list) = *v;
    if (auto v = r.opt_number_or_list("gamma")) std::tie(c.gamma, c.gamma_is_list) = *v;
    if (const json* v = r.get("gamma_channels")) {
      if (!v->is_array()) ObjectReader::fail("gamma_channels", "expected a list of numbers");
      for (std::size_t i = 0; i < v->size(); ++i) {
        c.gamma_channels.push_back(r.number(fmt::format("gamma_channels[{}]", i), (*v)[i]));
      }
    }
    if (auto v = r.opt_number("t_max")) c.t_max = *v;
    if (auto v = r.opt_integer("n_points")) {
      c.n_points = static_cast<int>(std::clamp<std::int64_t>(*v, -1, 1 << 26));
    }
    if (const json* v = r.get("initial")) c.initial = parse_initial(*v);
    if (const json* v = r.get("solver")) {
      ObjectReader s(*v, "solver");
      if (auto x = s.opt_number("rtol")) c.solver.rtol = *x;
      if (auto x = s.opt_number("atol")) c.solver.atol = *x;
      s.reject_unknown();
    }
    if (auto v = r.opt_string("engine")) c.engine = *v;
    if (auto v = r.opt_bool("prune")) c.prune = *v;
    if (const json* v = r.get("trajectories"); v && !v->is_null()) c.trajectories = parse_trajectories(*v);
    if (auto v = r.opt_string("output")) c.output = *v;
    r.reject_unknown();
    c.validate();
    return c;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["model"] = c.model;
  j["xi"] = c.xi;
  j["omega"] = number_or_list(c.omega, c.omega_is_list);
  j["gamma"] = number_or_list(c.gamma, c.gamma_is_list);
  if (!c.gamma_channels.empty()) j["gamma_channels"] = c.gamma_channels;
  if (c.t_max) j["t_max"] = *c.t_max;
  j["n_points"] = c.n_points;
  j["initial"] = c.initial.mixed ? std::string("mixed") : fmt::format("ket{}", c.initial.level);
  j["solver"] = {{"rtol", c.solver.rtol}, {"atol", c.solver.atol}};
  j["engine"] = c.engine;
  j["prune"] = c.prune;
  if (c.trajectories) {
    json t = {{"n_traj", c.trajectories->n_traj},
              {"seed", c.trajectories->seed},
              {"n_samples", c.trajectories->n_samples}};
    if (c.trajectories->dark_threshold) t["dark_threshold"] = *c.trajectories->dark_threshold;
    j["trajectories"] = t;
  }
  j["output"] = c.output;
  return j;
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::simulate: return "simulate";
    case Mode::derive: return "derive";
    case Mode::steady: return "steady";
    case Mode::analyze: return "analyze";
    case Mode::traject: return "traject";
  }
  return "unknown";
}

std::string format_value(double v) { return fmt::format("{}", v); }

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

RunResult run_scenario(const ScenarioConfig& config, Mode mode, std::ostream& log, int threads) {
  config.validate();
  const ModelKind kind = model_kind_from_string(config.model);
  const auto points = config.sweep_points();
  std::vector<LevelScheme> schemes;
  for (const auto& [o, g] : points) schemes.push_back(build_model(kind, params_for(config, o, g)));

  OutputSet out(config.output);
  const double t_max = config.effective_t_max();

  try {
    switch (mode) {
      case Mode::simulate: {
        std::vector<TimeSeries> series(points.size());
        parallel_for(points.size(), threads, [&](std::size_t i) { series[i] = simulate_point(config, schemes[i]); });
        for (std::size_t i = 0; i < points.size(); ++i) {
          const auto path = out.write(point_stem(points[i].first, points[i].second) + ".csv", time_series_csv(series[i]));
          const auto& p0 = series[i].p0;
          log << fmt::format("omega={} gamma={}: min P0 = {:.10g}, final P0 = {:.10g} -> {}\n",
                             format_value(points[i].first), format_value(points[i].second),
                             *std::min_element(p0.begin(), p0.end()), p0.back(), path.string());
        }
        break;
      }
      case Mode::derive: {
        for (std::size_t i = 0; i < points.size(); ++i) {
          const RateSystem rs = derive_rate_system(schemes[i], config.prune);
          out.write(point_stem(points[i].first, points[i].second) + "_rates.csv", rates_csv(rs));
          log << fmt::format("{} omega={} gamma={} (d<A>/dt = M <A> + b):\n", config.model,
                             format_value(points[i].first), format_value(points[i].second));
          log << rates_text(rs);
        }
        break;
      }
      case Mode::steady: {
        const int d = schemes.front().dim;
        std::string csv = "omega,gamma,unique,P0";
        for (int k = 0; k < d; ++k) csv += fmt::format(",p{}", k);
        csv += '\n';
        for (std::size_t i = 0; i < points.size(); ++i) {
          const auto ss = steady_state(schemes[i]);
          csv += csv_num(points[i].first) + ',' + csv_num(points[i].second) + ',' + (ss ? "1" : "0") + ',';
          csv += ss ? csv_num(ss->p0) : std::string();
          for (int k = 0; k < d; ++k) csv += ',' + (ss ? csv_num(ss->populations(k)) : std::string());
          csv += '\n';
          if (ss) {
            log << fmt::format("omega={} gamma={}: steady P0 = {:.12g}\n", format_value(points[i].first),
                               format_value(points[i].second), ss->p0);
          } else {
            log << fmt::format("omega={} gamma={}: no unique steady state\n", format_value(points[i].first),
                               format_value(points[i].second));
          }
        }
        out.write("_steady.csv", csv);
        break;
      }
      case Mode::analyze: {
        for (std::size_t i = 0; i < points.size(); ++i) {
          const AnalysisOutput a = analyze_point(schemes[i]);
          out.write(point_stem(points[i].first, points[i].second) + "_analysis.csv", a.csv);
          log << fmt::format("{} omega={} gamma={}\n", config.model, format_value(points[i].first),
                             format_value(points[i].second));
          log << a.text;
        }
        break;
      }
      case Mode::traject: {
        if (config.initial.mixed) ObjectReader::fail("initial", "trajectories need a pure initial state");
        const TrajectoryConfig tc = config.trajectories.value_or(TrajectoryConfig{});
        for (std::size_t i = 0; i < points.size(); ++i) {
          const LevelScheme& scheme = schemes[i];
          if (!scheme.dissipative()) {
            ObjectReader::fail("gamma", fmt::format("trajectories need gamma > 0 (sweep point omega={})",
                                                    format_value(points[i].first)));
          }
          const StateVector psi0 = basis_ket(scheme.dim, config.initial.level);
          TrajectoryOptions opts;
          opts.n_samples = tc.n_samples;
          const EnsembleResult ens = run_ensemble(scheme, psi0, t_max, tc.n_traj, tc.seed, opts, threads);
          const double thr = tc.dark_threshold.value_or(default_dark_threshold(scheme));
          TrajectoryStats st = dark_period_stats(ens.jumps, thr, t_max);
          st.seed = ens.seed;
          const std::string stem = point_stem(points[i].first, points[i].second);

          std::string jumps = "traj_id,t,channel\n";
          for (std::size_t k = 0; k < ens.jumps.size(); ++k) {
            for (const auto& j : ens.jumps[k]) jumps += fmt::format("{},{},{}\n", k, csv_num(j.time), j.channel);
          }
          out.write(stem + "_jumps.csv", jumps);

          std::string stats = "n_traj,seed,threshold,mean_dark,n_samples,rate_light\n";
          stats += fmt::format("{},{},{},{},{},{}\n", st.n_traj, st.seed, csv_num(st.dark_threshold),
                               st.mean_dark_period ? csv_num(*st.mean_dark_period) : std::string(),
                               st.dark_period_samples.size(),
                               st.emission_rate_light ? csv_num(*st.emission_rate_light) : std::string());
          out.write(stem + "_stats.csv", stats);

          std::string ensemble = "t,P0,P0_se";
          for (int k = 0; k < scheme.dim; ++k) ensemble += fmt::format(",p{},p{}_se", k, k);
          ensemble += '\n';
          for (std::size_t s = 0; s < ens.sample_times.size(); ++s) {
            const auto r = static_cast<Eigen::Index>(s);
            ensemble += csv_num(ens.sample_times[s]) + ',' + csv_num(ens.mean_p0(r)) + ',' + csv_num(ens.standard_error_p0(r));
            for (int k = 0; k < scheme.dim; ++k) {
              ensemble += ',' + csv_num(ens.mean_populations(r, k)) + ',' + csv_num(ens.standard_error(r, k));
            }
            ensemble += '\n';
          }
          out.write(stem + "_ensemble.csv", ensemble);

          log << fmt::format("omega={} gamma={}: {} trajectories, {} jumps, mean dark period {}, light emission rate {}\n",
                             format_value(points[i].first), format_value(points[i].second), tc.n_traj,
                             std::accumulate(ens.jumps.begin(), ens.jumps.end(), std::size_t{0},
                                             [](std::size_t a, const auto& v) { return a + v.size(); }),
                             st.mean_dark_period ? fmt::format("{:.6g}", *st.mean_dark_period) : "n/a",
                             st.emission_rate_light ? fmt::format("{:.6g}", *st.emission_rate_light) : "n/a");
        }
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", mode_name_upper(mode), e.what()));
  }
  return out.finish(config, mode);
}

}  // namespace zeno
