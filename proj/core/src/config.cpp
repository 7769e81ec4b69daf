#include "dualgrad/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dualgrad {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

ExperimentId to_id(const std::string& v) {
  if (v == "ex1") return ExperimentId::ex1;
  if (v == "ex2") return ExperimentId::ex2;
  if (v == "ex3") return ExperimentId::ex3;
  if (v == "ex4") return ExperimentId::ex4;
  if (v == "custom") return ExperimentId::custom;
  throw ConfigError("config: unknown experiment '" + v + "'");
}

// "elastic_net(300)" / "tv(100)" / bare names.
void set_penalty(ExperimentSpec& spec, const std::string& v) {
  const auto open = v.find('(');
  if (open == std::string::npos) {
    spec.penalty = v;
    return;
  }
  if (v.back() != ')') throw ConfigError("config: malformed penalty '" + v + "'");
  spec.penalty = trim(v.substr(0, open));
  spec.beta = to_double("penalty", trim(v.substr(open + 1, v.size() - open - 2)));
}

}  // namespace

std::vector<long> parse_n_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: empty entry in n_list");
    out.push_back(to_long("n_list", item));
  }
  if (out.empty()) throw ConfigError("config: n_list must be nonempty");
  return out;
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    const ExperimentId id = to_id(value);
    const auto keep_out = spec.out_dir;
    spec = builtin_spec(id);
    spec.out_dir = keep_out;
  } else if (key == "kernel") spec.kernel = value;
  else if (key == "solution") spec.solution = value;
  else if (key == "m") spec.m = static_cast<int>(to_long(key, value));
  else if (key == "N") spec.N = static_cast<int>(to_long(key, value));
  else if (key == "alpha") spec.alpha = to_double(key, value);
  else if (key == "T") spec.T = to_double(key, value);
  else if (key == "penalty") set_penalty(spec, value);
  else if (key == "beta") spec.beta = to_double(key, value);
  else if (key == "noise.sigma") { spec.noise.sigma = to_double(key, value); spec.noise.sigma_rel = 0.0; }
  else if (key == "noise.sigma_rel") { spec.noise.sigma_rel = to_double(key, value); spec.noise.sigma = 0.0; }
  else if (key == "rule") spec.rule = value;
  else if (key == "beta0") spec.beta0 = to_double(key, value);
  else if (key == "tau0") spec.tau0 = to_double(key, value);
  else if (key == "q") spec.q = to_double(key, value);
  else if (key == "c_scale") spec.c_scale = to_double(key, value);
  else if (key == "t_star") spec.t_star = to_long(key, value);
  else if (key == "n_list") spec.n_list = parse_n_list(value);
  else if (key == "n_sims") spec.n_sims = static_cast<int>(to_long(key, value));
  else if (key == "seed") spec.seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "step_scale") spec.step_scale = to_double(key, value);
  else if (key == "strict_theory") spec.strict_theory = to_bool(key, value);
  else if (key == "inner_product") {
    if (value == "weighted") spec.euclidean = false;
    else if (value == "euclidean") spec.euclidean = true;
    else throw ConfigError("config: inner_product must be weighted or euclidean");
  }
  else if (key == "max_iters") spec.max_iters = to_long(key, value);
  else if (key == "jobs") spec.jobs = static_cast<int>(to_long(key, value));
  else if (key == "error") {
    if (value == "L2") spec.error_mode = ErrorMode::L2;
    else if (value == "L1") spec.error_mode = ErrorMode::L1;
    else throw ConfigError("config: error must be L2 or L1");
  }
  else if (key == "landweber") spec.with_landweber = to_bool(key, value);
  else if (key == "out") spec.out_dir = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentSpec parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> settings;
  std::string experiment;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not a 'key = value' setting");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
    if (key == "experiment") {
      if (!experiment.empty()) throw ConfigError("config: duplicate experiment key");
      experiment = value;
    } else {
      settings.emplace_back(key, value);
    }
  }
  // The experiment id picks the base defaults; the remaining keys override.
  ExperimentSpec spec = builtin_spec(experiment.empty() ? ExperimentId::custom
                                                        : to_id(experiment));
  if (!experiment.empty()) spec.id = to_id(experiment);
  for (const auto& [key, value] : settings) apply_setting(spec, key, value);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ExperimentSpec load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

}  // namespace dualgrad
