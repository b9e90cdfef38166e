#include "zeno/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace zeno {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::two_level:
      return "two_level";
    case ModelKind::three_level_chain:
      return "three_level_chain";
    case ModelKind::four_level_chain:
      return "four_level_chain";
    case ModelKind::custom:
      return "custom";
  }
  return "custom";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "two_level") return ModelKind::two_level;
  if (name == "three_level_chain") return ModelKind::three_level_chain;
  if (name == "four_level_chain") return ModelKind::four_level_chain;
  throw std::invalid_argument(fmt::format(
      "unknown model '{}' (expected two_level, three_level_chain or four_level_chain)", name));
}

void ModelParams::validate() const {
  auto check = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(fmt::format("{} must be finite and non-negative, got {}", what, v));
    }
  };
  check(xi, "xi");
  check(omega, "omega");
  check(gamma, "gamma");
  for (double g : gamma_channels) check(g, "gamma_channels entry");
  for (double w : free_energies) {
    if (!std::isfinite(w)) throw std::invalid_argument("free energies must be finite");
  }
}

double ModelParams::max_rate() const {
  double m = std::max({xi, omega, gamma});
  for (double g : gamma_channels) m = std::max(m, g);
  return m;
}

namespace {

int dimension_of(ModelKind kind) {
  switch (kind) {
    case ModelKind::two_level:
      return 2;
    case ModelKind::three_level_chain:
      return 3;
    case ModelKind::four_level_chain:
      return 4;
    case ModelKind::custom:
      break;
  }
  throw std::invalid_argument("custom schemes have no fixed dimension; use make_scheme");
}

Operator hc_pair(int dim, int j, int k) { return ket_bra(dim, j, k) + ket_bra(dim, k, j); }

// (lower, upper) pairs of the decay channels |lower><upper|.
std::vector<std::pair<int, int>> decay_channels(ModelKind kind) {
  switch (kind) {
    case ModelKind::two_level:
      return {{0, 1}};
    case ModelKind::three_level_chain:
      return {{1, 2}};
    case ModelKind::four_level_chain:
      return {{1, 2}, {2, 3}};
    case ModelKind::custom:
      break;
  }
  return {};
}

}  // namespace

LevelScheme build_model(ModelKind kind, const ModelParams& params) {
  params.validate();
  const int dim = dimension_of(kind);
  const auto channels = decay_channels(kind);
  if (!params.gamma_channels.empty() && params.gamma_channels.size() != channels.size()) {
    throw std::invalid_argument(fmt::format("{} has {} decay channel(s), got {} gamma_channels",
                                            to_string(kind), channels.size(),
                                            params.gamma_channels.size()));
  }

  LevelScheme scheme;
  scheme.kind = kind;
  scheme.dim = dim;
  scheme.params = params;
  const HamiltonianSplit split = [&] {
    LevelScheme tmp;
    tmp.kind = kind;
    tmp.dim = dim;
    tmp.params = params;
    return coupling_split(tmp);
  }();
  scheme.h_int = split.h_slow + split.h_fast;
  scheme.p_cs = projector(dim, 0);

  for (std::size_t c = 0; c < channels.size(); ++c) {
    const double rate = params.gamma_channels.empty() ? params.gamma : params.gamma_channels[c];
    if (rate > 0.0) {
      scheme.collapse_ops.push_back(std::sqrt(rate) *
                                    ket_bra(dim, channels[c].first, channels[c].second));
    }
  }
  return scheme;
}

LevelScheme build_model(std::string_view name, const ModelParams& params) {
  return build_model(model_kind_from_string(name), params);
}

LevelScheme make_scheme(Operator h_int, std::vector<Operator> collapse_ops, Operator p_cs,
                        ModelParams params) {
  const auto dim = h_int.rows();
  if (dim < 1 || h_int.cols() != dim) throw std::invalid_argument("h_int must be square");
  const double scale = std::max(1.0, h_int.cwiseAbs().maxCoeff());
  if (hermiticity_residual(h_int) > kStructuralTol * scale) {
    throw std::invalid_argument("h_int is not Hermitian");
  }
  for (const auto& c : collapse_ops) {
    if (c.rows() != dim || c.cols() != dim) {
      throw std::invalid_argument("collapse operator dimension differs from h_int");
    }
  }
  if (p_cs.rows() != dim || p_cs.cols() != dim) {
    throw std::invalid_argument("p_cs dimension differs from h_int");
  }
  if (hermiticity_residual(p_cs) > kStructuralTol ||
      (p_cs * p_cs - p_cs).cwiseAbs().maxCoeff() > kStructuralTol) {
    throw std::invalid_argument("p_cs is not a Hermitian projector");
  }
  LevelScheme scheme;
  scheme.kind = ModelKind::custom;
  scheme.dim = static_cast<int>(dim);
  scheme.h_int = std::move(h_int);
  scheme.collapse_ops = std::move(collapse_ops);
  scheme.p_cs = std::move(p_cs);
  scheme.params = std::move(params);
  return scheme;
}

HamiltonianSplit coupling_split(const LevelScheme& scheme) {
  const int dim = scheme.dim;
  const auto& p = scheme.params;
  HamiltonianSplit split{Operator::Zero(dim, dim), Operator::Zero(dim, dim)};
  switch (scheme.kind) {
    case ModelKind::two_level:
      split.h_slow = p.xi * hc_pair(dim, 0, 1);
      break;
    case ModelKind::three_level_chain:
      split.h_slow = p.xi * hc_pair(dim, 0, 1);
      split.h_fast = p.omega * hc_pair(dim, 1, 2);
      break;
    case ModelKind::four_level_chain:
      split.h_slow = p.xi * hc_pair(dim, 0, 1);
      split.h_fast = p.omega * (hc_pair(dim, 1, 2) + hc_pair(dim, 2, 3));
      break;
    case ModelKind::custom:
      throw std::invalid_argument("coupling_split: custom schemes need a caller-supplied split");
  }
  return split;
}

Operator DrivenHamiltonian::free_part() const {
  const int d = dim();
  Operator h0 = Operator::Zero(d, d);
  for (int i = 0; i < d; ++i) h0(i, i) = level_energies[static_cast<std::size_t>(i)];
  return h0;
}

Operator DrivenHamiltonian::at(double t) const {
  const int d = dim();
  Operator h = free_part();
  for (const auto& term : couplings) {
    if (term.row == term.col) throw std::invalid_argument("coupling terms must be off-diagonal");
    const Complex value = term.amplitude * std::exp(Complex(0.0, term.frequency * t));
    h += value * ket_bra(d, term.row, term.col);
    h += std::conj(value) * ket_bra(d, term.col, term.row);
  }
  return h;
}

Operator interaction_picture(const DrivenHamiltonian& h, std::span<const double> sample_times,
                             double tol) {
  if (sample_times.empty()) throw std::invalid_argument("interaction_picture: no sample times");
  const int d = h.dim();
  if (d < 1) throw std::invalid_argument("interaction_picture: no levels");
  const Operator h0 = h.free_part();

  auto transformed = [&](double t) {
    Eigen::VectorXcd phase(d);
    for (int i = 0; i < d; ++i) phase(i) = std::exp(Complex(0.0, h0(i, i).real() * t));
    const Operator v = h.at(t) - h0;
    return Operator(phase.asDiagonal() * v * phase.conjugate().asDiagonal());
  };

  const Operator reference = transformed(sample_times.front());
  for (double t : sample_times.subspan(1)) {
    const Operator diff = (transformed(t) - reference).cwiseAbs();
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    const double dev = diff.real().maxCoeff(&r, &c);
    if (dev > tol) {
      std::size_t offending = 0;
      for (std::size_t i = 0; i < h.couplings.size(); ++i) {
        const auto& term = h.couplings[i];
        if ((term.row == r && term.col == c) || (term.row == c && term.col == r)) {
          offending = i;
          break;
        }
      }
      const auto& term = h.couplings.at(offending);
      throw std::invalid_argument(fmt::format(
          "interaction picture is time dependent (deviation {:.3e} at t = {}): coupling term #{} "
          "|{}><{}| oscillates at {} but the level splitting is {}",
          dev, t, offending, term.row, term.col, term.frequency,
          h.level_energies[static_cast<std::size_t>(term.col)] -
              h.level_energies[static_cast<std::size_t>(term.row)]));
    }
  }
  return reference;
}

DrivenHamiltonian resonant_drive(ModelKind kind, const ModelParams& params) {
  const int dim = dimension_of(kind);
  DrivenHamiltonian h;
  if (params.free_energies.empty()) {
    const std::vector<double> defaults{0.0, 10.0, 25.0, 45.0};
    h.level_energies.assign(defaults.begin(), defaults.begin() + dim);
  } else if (static_cast<int>(params.free_energies.size()) == dim) {
    h.level_energies = params.free_energies;
  } else {
    throw std::invalid_argument(
        fmt::format("expected {} free energies, got {}", dim, params.free_energies.size()));
  }
  auto add = [&](int row, int col, double amplitude) {
    const double splitting = h.level_energies[static_cast<std::size_t>(col)] -
                             h.level_energies[static_cast<std::size_t>(row)];
    h.couplings.push_back({row, col, Complex(amplitude, 0.0), splitting});
  };
  add(0, 1, params.xi);
  if (kind == ModelKind::three_level_chain || kind == ModelKind::four_level_chain) {
    add(1, 2, params.omega);
  }
  if (kind == ModelKind::four_level_chain) add(2, 3, params.omega);
  return h;
}

}  // namespace zeno
