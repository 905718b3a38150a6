#include "cmsgd/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cmsgd/metrics.hpp"

namespace cmsgd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  // Accepts "5000" and "5e3" style integers.
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && p == v.data() + v.size()) return out;
  const double d = to_double(key, v);
  if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d)))
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::uint64_t> to_uint_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_uint(key, item));
  }
  return out;
}

}  // namespace

std::size_t ExperimentConfig::dimension() const {
  return objective == ObjectiveKind::logistic ? logistic.dimension : quadratic.dimension;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n == 0) fail("n must be >= 1");
  if (dimension() == 0) fail("d must be >= 1");
  if (topology.kind == TopologyKind::erdos_renyi && !(topology.er_p > 0.0 && topology.er_p <= 1.0))
    fail("er_p must lie in (0, 1]");
  if ((compressor.kind == CompressorKind::rand_k || compressor.kind == CompressorKind::top_k) &&
      (compressor.k < 1 || compressor.k > dimension()))
    fail("k must satisfy 1 <= k <= d");
  if (compressor.kind == CompressorKind::quant2bit && (compressor.k2 < 1 || compressor.k2 > 30))
    fail("k2 must lie in [1, 30]");
  if (compressor.scalar_bits < 0) fail("scalar_bits must be >= 0");
  if (!(zo.gamma_g > 0.0)) fail("gamma_g must be > 0");
  if (!(zo.noise_var >= 0.0)) fail("noise_var must be >= 0");
  if (objective == ObjectiveKind::logistic) {
    if (logistic.samples == 0) fail("m_i must be >= 1");
    if (!(logistic.varpi >= 0.0) || !(logistic.kappa >= 0.0)) fail("varpi and kappa must be >= 0");
  } else {
    if (!(quadratic.eig_min >= 0.0 && quadratic.eig_max >= quadratic.eig_min))
      fail("need 0 <= quad_eig_min <= quad_eig_max");
    if (!(quadratic.noise_var >= 0.0)) fail("quad_noise_var must be >= 0");
  }
  if (!(gamma_x > 0.0)) fail("gamma_x must be > 0");
  if (eta_rule == EtaRule::fixed && !(eta > 0.0)) fail("eta must be > 0");
  if (!(beta >= 0.0 && beta < 1.0)) fail("beta must lie in [0, 1)");
  if (!(divergence_cap > 0.0)) fail("divergence_cap must be > 0");
  if (seeds.empty()) fail("seeds must not be empty");
  if (metric_eval_batch == 0) fail("metric_eval_batch must be >= 1");
  if (metric_every == 0) fail("metric_every must be >= 1");
  if (omega && !(*omega > 0.0 && *omega <= 1.0)) fail("omega must lie in (0, 1]");
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& v) {
  try {
    if (key == "topology") {
      if (v == "ring") c.topology.kind = TopologyKind::ring;
      else if (v == "complete") c.topology.kind = TopologyKind::complete;
      else if (v == "erdos_renyi") c.topology.kind = TopologyKind::erdos_renyi;
      else if (v == "explicit" || v == "edges") c.topology.kind = TopologyKind::explicit_edges;
      else throw ConfigError("topology: unknown kind '" + v + "'");
    } else if (key == "er_p") {
      c.topology.er_p = to_double(key, v);
    } else if (key == "n") {
      c.n = to_uint(key, v);
    } else if (key == "edges") {
      c.topology.kind = TopologyKind::explicit_edges;
      c.topology.edges = parse_edge_list(v);
    } else if (key == "compressor") {
      c.compressor.kind = parse_compressor_kind(v);
    } else if (key == "k") {
      c.compressor.k = to_uint(key, v);
    } else if (key == "k2") {
      c.compressor.k2 = static_cast<int>(to_uint(key, v));
    } else if (key == "scalar_bits") {
      c.compressor.scalar_bits = static_cast<int>(to_uint(key, v));
    } else if (key == "rand_k_unbiased") {
      c.compressor.rand_k_unbiased = to_bool(key, v);
    } else if (key == "gamma_g") {
      c.zo.gamma_g = to_double(key, v);
    } else if (key == "noise_var") {
      c.zo.noise_var = to_double(key, v);
    } else if (key == "perturbation") {
      c.zo.perturbation = parse_perturbation(v);
    } else if (key == "objective") {
      if (v == "logistic") c.objective = ObjectiveKind::logistic;
      else if (v == "quadratic") c.objective = ObjectiveKind::quadratic;
      else throw ConfigError("objective: unknown kind '" + v + "'");
    } else if (key == "m_i") {
      c.logistic.samples = to_uint(key, v);
    } else if (key == "loss") {
      if (v == "sum") c.logistic.mean_loss = false;
      else if (v == "mean") c.logistic.mean_loss = true;
      else throw ConfigError("loss: expected sum or mean, got '" + v + "'");
    } else if (key == "varpi") {
      c.logistic.varpi = to_double(key, v);
    } else if (key == "kappa") {
      c.logistic.kappa = to_double(key, v);
    } else if (key == "d") {
      c.logistic.dimension = c.quadratic.dimension = to_uint(key, v);
    } else if (key == "planted_seed") {
      c.planted_seed = to_uint(key, v);
    } else if (key == "quad_eig_min") {
      c.quadratic.eig_min = to_double(key, v);
    } else if (key == "quad_eig_max") {
      c.quadratic.eig_max = to_double(key, v);
    } else if (key == "quad_b_scale") {
      c.quadratic.b_scale = to_double(key, v);
    } else if (key == "quad_noise_var") {
      c.quadratic.noise_var = to_double(key, v);
    } else if (key == "gamma_x") {
      c.gamma_x = to_double(key, v);
    } else if (key == "eta") {
      c.eta = to_double(key, v);
    } else if (key == "eta_rule") {
      if (v == "fixed") c.eta_rule = EtaRule::fixed;
      else if (v == "horizon") c.eta_rule = EtaRule::horizon;
      else throw ConfigError("eta_rule: expected fixed or horizon, got '" + v + "'");
    } else if (key == "beta") {
      c.beta = to_double(key, v);
    } else if (key == "T") {
      c.T = to_uint(key, v);
    } else if (key == "divergence_cap") {
      c.divergence_cap = to_double(key, v);
    } else if (key == "x0") {
      if (v == "zero") c.x0_normal = false;
      else if (v == "normal") c.x0_normal = true;
      else throw ConfigError("x0: expected zero or normal, got '" + v + "'");
    } else if (key == "seed") {
      c.seed = to_uint(key, v);
      c.seeds = {c.seed};
    } else if (key == "seeds") {
      c.seeds = to_uint_list(key, v);
    } else if (key == "metric_eval_batch") {
      c.metric_eval_batch = to_uint(key, v);
    } else if (key == "metric_every") {
      c.metric_every = to_uint(key, v);
    } else if (key == "out") {
      c.out = v;
    } else if (key == "lf1") {
      c.lf1 = to_double(key, v);
    } else if (key == "lf2") {
      c.lf2 = to_double(key, v);
    } else if (key == "gamma1") {
      c.gamma1 = to_double(key, v);
    } else if (key == "omega") {
      c.omega = to_double(key, v);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool seeds_given = false;
  std::optional<std::string> seed_value;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (key == "seed") {
      seed_value = value;
      continue;
    }
    if (key == "seeds") seeds_given = true;
    set_config_value(cfg, key, value);
  }
  // `seed` alone means a single run; with `seeds` it only seeds the topology.
  if (seed_value) {
    const auto seeds = cfg.seeds;
    set_config_value(cfg, "seed", *seed_value);
    if (seeds_given) cfg.seeds = seeds;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto num = format_number;
  const char* topo = c.topology.kind == TopologyKind::ring         ? "ring"
                     : c.topology.kind == TopologyKind::complete   ? "complete"
                     : c.topology.kind == TopologyKind::erdos_renyi ? "erdos_renyi"
                                                                    : "explicit";
  os << "n = " << c.n << '\n' << "topology = " << topo << '\n';
  if (c.topology.kind == TopologyKind::erdos_renyi) os << "er_p = " << num(c.topology.er_p) << '\n';
  if (c.topology.kind == TopologyKind::explicit_edges) {
    os << "edges = \"";
    for (std::size_t i = 0; i < c.topology.edges.size(); ++i)
      os << (i ? "," : "") << c.topology.edges[i].first << '-' << c.topology.edges[i].second;
    os << "\"\n";
  }
  os << "compressor = " << c.compressor.name() << '\n'
     << "k = " << c.compressor.k << '\n'
     << "k2 = " << c.compressor.k2 << '\n'
     << "scalar_bits = " << c.compressor.scalar_bits << '\n'
     << "rand_k_unbiased = " << (c.compressor.rand_k_unbiased ? "true" : "false") << '\n'
     << "gamma_g = " << num(c.zo.gamma_g) << '\n'
     << "noise_var = " << num(c.zo.noise_var) << '\n'
     << "perturbation = "
     << (c.zo.perturbation == Perturbation::bernoulli_scaled ? "bernoulli" : "uniform") << '\n'
     << "objective = " << (c.objective == ObjectiveKind::logistic ? "logistic" : "quadratic")
     << '\n'
     << "d = " << c.dimension() << '\n'
     << "m_i = " << c.logistic.samples << '\n'
     << "loss = " << (c.logistic.mean_loss ? "mean" : "sum") << '\n'
     << "varpi = " << num(c.logistic.varpi) << '\n'
     << "kappa = " << num(c.logistic.kappa) << '\n'
     << "planted_seed = " << c.planted_seed << '\n'
     << "quad_eig_min = " << num(c.quadratic.eig_min) << '\n'
     << "quad_eig_max = " << num(c.quadratic.eig_max) << '\n'
     << "quad_b_scale = " << num(c.quadratic.b_scale) << '\n'
     << "quad_noise_var = " << num(c.quadratic.noise_var) << '\n'
     << "gamma_x = " << num(c.gamma_x) << '\n'
     << "eta = " << num(c.eta) << '\n'
     << "eta_rule = " << (c.eta_rule == EtaRule::fixed ? "fixed" : "horizon") << '\n'
     << "beta = " << num(c.beta) << '\n'
     << "T = " << c.T << '\n'
     << "divergence_cap = " << num(c.divergence_cap) << '\n'
     << "x0 = " << (c.x0_normal ? "normal" : "zero") << '\n'
     << "seed = " << c.seed << '\n'
     << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << '\n'
     << "metric_eval_batch = " << c.metric_eval_batch << '\n'
     << "metric_every = " << c.metric_every << '\n'
     << "out = \"" << c.out << "\"\n";
  if (c.lf1) os << "lf1 = " << num(*c.lf1) << '\n';
  if (c.lf2) os << "lf2 = " << num(*c.lf2) << '\n';
  if (c.gamma1) os << "gamma1 = " << num(*c.gamma1) << '\n';
  if (c.omega) os << "omega = " << num(*c.omega) << '\n';
  return os.str();
}

Topology topology_for(const ExperimentConfig& cfg) {
  return build_topology(cfg.topology, cfg.n, cfg.seed);
}

MixingMatrix mixing_for(const ExperimentConfig& cfg) {
  return metropolis_weights(topology_for(cfg));
}

ObjectiveSet objectives_for(const ExperimentConfig& cfg) {
  if (cfg.objective == ObjectiveKind::quadratic)
    return make_quadratic_network(cfg.n, cfg.quadratic, cfg.planted_seed);
  auto shared = std::make_shared<LogisticBenchmark>(
      cfg.logistic, planted_separator(cfg.logistic.dimension, cfg.planted_seed));
  return ObjectiveSet(cfg.n, shared);
}

AlgorithmConfig algorithm_for(const ExperimentConfig& cfg, const MixingMatrix& mixing) {
  AlgorithmConfig a;
  a.gamma_x = cfg.gamma_x;
  a.eta = cfg.eta;
  a.eta_rule = cfg.eta_rule;
  a.beta = cfg.beta;
  a.zo = cfg.zo;
  a.compressor = cfg.compressor;
  a.mixing = mixing;
  a.horizon = cfg.T;
  a.divergence_cap = cfg.divergence_cap;
  a.validate();
  return a;
}

double omega_for(const ExperimentConfig& cfg) {
  if (cfg.omega) return *cfg.omega;
  const std::size_t d = cfg.dimension();
  if (const auto nominal = cfg.compressor.omega_nominal(d)) return *nominal;
  Rng rng = make_stream(cfg.seed, StreamKind::estimate);
  const double est = contraction_estimate(cfg.compressor, d, 10000, rng).omega;
  return std::clamp(est, 1e-12, 1.0);
}

TheoremInputs theorem_inputs_for(const ExperimentConfig& cfg) {
  const MixingMatrix mixing = mixing_for(cfg);
  const ObjectiveSet objectives = objectives_for(cfg);
  ObjectiveConstants oc{0.0, 0.0, 0.0};
  for (const auto& obj : objectives) {
    const ObjectiveConstants k = obj->constants();
    oc.lipschitz = std::max(oc.lipschitz, k.lipschitz);
    oc.hessian_bound = std::max(oc.hessian_bound, k.hessian_bound);
    oc.value_bound = std::max(oc.value_bound, k.value_bound);
  }
  const std::size_t d = cfg.dimension();
  TheoremInputs in;
  in.delta = mixing.spectral_gap;
  in.lambda = mixing.lambda_dev;
  in.omega = omega_for(cfg);
  in.beta = cfg.beta;
  in.eta = algorithm_for(cfg, mixing).step_size();
  in.gamma_g = cfg.zo.gamma_g;
  in.gamma_x = cfg.gamma_x;
  in.d = static_cast<double>(d);
  in.sigma1 = cfg.zo.sigma1(d);
  in.sigma2 = cfg.zo.sigma2(d);
  in.lf1 = cfg.lf1.value_or(oc.lipschitz);
  in.lf2 = cfg.lf2.value_or(oc.hessian_bound);
  in.gamma1 = cfg.gamma1.value_or(oc.value_bound);
  in.noise_var = cfg.zo.noise_var;
  in.n = static_cast<double>(cfg.n);
  in.T = static_cast<double>(cfg.T);
  in.horizon_rule = true;
  return in;
}

}  // namespace cmsgd
