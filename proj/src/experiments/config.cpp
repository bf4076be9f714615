#include "ncs/errors.hpp"
#include "ncs/experiments.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>

namespace ncs {

namespace pt = boost::property_tree;

namespace {

const std::array<const char*, 6> kPolicies{"threshold",      "clock",      "periodic",
                                           "self_threshold", "self_clock", "naive_threshold"};

const std::map<std::string, std::set<std::string>> kKeys{
    {"experiment", {"name", "system", "x0", "e0"}},
    {"policy",
     {"name", "protocol", "rr_norm_certificate", "gamma_tilde_scale", "eta0", "period",
      "sigma_eta", "sigma_lyap", "sigma_clock", "t_star", "epsilon", "clock_a"}},
    {"integrator",
     {"rel_tol", "abs_tol", "max_step", "event_time_tol", "horizon", "max_jumps",
      "max_consecutive_jumps", "record_steps"}},
    {"ensemble", {"count", "radius", "seed"}},
    {"monitor", {"rel_tol", "abs_tol", "enabled"}},
    {"iss", {"samples", "radius", "seed", "gamma_scale"}},
    {"ugas", {"samples", "radius", "seed", "protocol"}},
    {"outputs", {"dir"}},
};

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream in(item);
    double v;
    if (!(in >> v)) throw ConfigError("'" + key + "': cannot parse '" + item + "' as a number");
    std::string rest;
    if (in >> rest) throw ConfigError("'" + key + "': trailing text '" + rest + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("'" + key + "' is empty");
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename T>
void read(const pt::ptree& tree, const std::string& path, T& target) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) return;
  try {
    target = tree.get<T>(path);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("'" + path + "': cannot parse '" + *node + "'");
  }
}

template <typename T>
void read(const pt::ptree& tree, const std::string& path, std::optional<T>& target) {
  T v{};
  if (!tree.get_optional<std::string>(path)) return;
  read(tree, path, v);
  target = v;
}

}  // namespace

ExperimentConfig default_config(const std::string& system) {
  ExperimentConfig c;
  c.system = system;
  if (system == "jet_engine") {
    c.x0 = Vector(2);
    c.x0 << 0.95, -0.14;
    c.integrator.horizon = 1.0;
  } else if (system == "scalar_clock_fixture") {
    c.x0 = Vector::Constant(1, 1.0);
    c.policy.name = "clock";
    c.integrator.horizon = 2.0;
  } else {
    throw ConfigError("unknown system '" + system +
                      "' (expected jet_engine or scalar_clock_fixture)");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigError(path.string() + ": " + err.message() + " (line " +
                      std::to_string(err.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end())
      throw ConfigError(path.string() + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!known->second.count(key))
        throw ConfigError(path.string() + ": unknown key '" + key + "' in [" + section + "]");
  }

  ExperimentConfig c = default_config(tree.get("experiment.system", std::string("jet_engine")));
  read(tree, "experiment.name", c.name);
  if (auto v = tree.get_optional<std::string>("experiment.x0")) c.x0 = to_vector(parse_list("x0", *v));
  if (auto v = tree.get_optional<std::string>("experiment.e0")) c.e0 = to_vector(parse_list("e0", *v));

  PolicyConfig& p = c.policy;
  read(tree, "policy.name", p.name);
  read(tree, "policy.protocol", p.protocol);
  read(tree, "policy.rr_norm_certificate", p.rr_norm_certificate);
  read(tree, "policy.gamma_tilde_scale", p.gamma_tilde_scale);
  read(tree, "policy.eta0", p.eta0);
  read(tree, "policy.period", p.period);
  if (auto v = tree.get_optional<std::string>("policy.sigma_eta")) p.sigma_eta = parse_list("sigma_eta", *v);
  if (auto v = tree.get_optional<std::string>("policy.sigma_lyap")) p.sigma_lyap = parse_list("sigma_lyap", *v);
  if (auto v = tree.get_optional<std::string>("policy.sigma_clock")) p.sigma_clock = parse_list("sigma_clock", *v);
  read(tree, "policy.t_star", p.t_star);
  read(tree, "policy.epsilon", p.epsilon);
  read(tree, "policy.clock_a", p.clock_a);

  IntegratorConfig& i = c.integrator;
  read(tree, "integrator.rel_tol", i.rel_tol);
  read(tree, "integrator.abs_tol", i.abs_tol);
  read(tree, "integrator.max_step", i.max_step);
  read(tree, "integrator.event_time_tol", i.event_time_tol);
  read(tree, "integrator.horizon", i.horizon);
  read(tree, "integrator.max_jumps", i.max_jumps);
  read(tree, "integrator.max_consecutive_jumps", i.max_consecutive_jumps);
  read(tree, "integrator.record_steps", i.record_steps);

  read(tree, "ensemble.count", c.ensemble.count);
  read(tree, "ensemble.radius", c.ensemble.radius);
  read(tree, "ensemble.seed", c.ensemble.seed);

  read(tree, "monitor.rel_tol", c.monitor.tol.rel);
  read(tree, "monitor.abs_tol", c.monitor.tol.abs);
  read(tree, "monitor.enabled", c.monitor.enabled);

  read(tree, "iss.samples", c.iss.samples);
  read(tree, "iss.radius", c.iss.radius);
  read(tree, "iss.seed", c.iss.seed);
  read(tree, "iss.gamma_scale", c.iss.gamma_scale);

  read(tree, "ugas.samples", c.ugas.samples);
  read(tree, "ugas.radius", c.ugas.radius);
  read(tree, "ugas.seed", c.ugas.seed);
  read(tree, "ugas.protocol", c.ugas.protocol);

  std::string dir;
  read(tree, "outputs.dir", dir);
  if (!dir.empty()) c.out_dir = dir;

  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (system != "jet_engine" && system != "scalar_clock_fixture")
    throw ConfigError("unknown system '" + system + "'");
  if (std::find(kPolicies.begin(), kPolicies.end(), policy.name) == kPolicies.end())
    throw ConfigError("unknown policy '" + policy.name + "'");
  if (policy.protocol != "tod" && policy.protocol != "rr")
    throw ConfigError("unknown protocol '" + policy.protocol + "'");
  if (ugas.protocol != "tod" && ugas.protocol != "rr")
    throw ConfigError("unknown ugas protocol '" + ugas.protocol + "'");
  if (!(policy.period > 0.0)) throw ConfigError("policy.period must be positive");
  if (!(policy.gamma_tilde_scale > 0.0)) throw ConfigError("policy.gamma_tilde_scale must be positive");
  if (ensemble.count < 1) throw ConfigError("ensemble.count must be at least 1");
  if (!(ensemble.radius > 0.0)) throw ConfigError("ensemble.radius must be positive");
  if (!(monitor.tol.rel >= 0.0) || !(monitor.tol.abs >= 0.0))
    throw ConfigError("monitor tolerances must be non-negative");
  integrator.validate();
}

}  // namespace ncs
