#include "mea/config.hpp"

#include "mea/losses.hpp"

#include <fstream>
#include <sstream>

namespace mea {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + value + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config: integer expected for " + key + ": '" + value + "'");
  return i;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw std::invalid_argument("config: boolean expected for " + key + ": '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mode") {
    if (value != "run" && value != "stability" && value != "sweep" && value != "oracles")
      throw std::invalid_argument("config: unknown mode '" + value + "'");
    cfg.mode = value;
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(to_int(key, value));
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "json_out") {
    cfg.json_out = value;
  } else if (key == "timing") {
    cfg.timing = to_bool(key, value);
  } else if (key == "data.d") {
    cfg.d = to_int(key, value);
  } else if (key == "data.n") {
    cfg.n_list.clear();
    for (const auto& item : split_list(value))
      cfg.n_list.push_back(static_cast<std::size_t>(to_int(key, item)));
  } else if (key == "data.distribution") {
    if (value != "gaussian_std")
      throw std::invalid_argument("config: unsupported distribution '" + value + "'");
    cfg.distribution = value;
  } else if (key == "loss.name") {
    if (value != "l1" && value != "adv_linear" && value != "max_quad")
      throw std::invalid_argument("config: unknown loss '" + value + "'");
    cfg.loss_name = value;
  } else if (key == "loss.epsilon") {
    cfg.loss_epsilon = to_double(key, value);
  } else if (key == "loss.data_bound") {
    cfg.loss_data_bound = to_double(key, value);
  } else if (key == "loss.weak_convexity") {
    cfg.loss_weak_convexity = to_double(key, value);
  } else if (key == "loss.pieces") {
    cfg.loss_pieces = static_cast<int>(to_int(key, value));
  } else if (key == "loss.seed") {
    cfg.loss_seed = static_cast<std::uint64_t>(to_int(key, value));
  } else if (key == "domain.radius") {
    cfg.radius = to_double(key, value);
  } else if (key == "algo.list") {
    cfg.algos.clear();
    for (const auto& item : split_list(value)) cfg.algos.push_back(parse_algo(item));
  } else if (key == "algo.p") {
    cfg.p = to_double(key, value);
  } else if (key == "algo.T") {
    cfg.T = static_cast<int>(to_int(key, value));
  } else if (key == "algo.outer") {
    if (value == "fixed")
      cfg.outer.kind = OuterSchedule::Kind::fixed;
    else if (value == "inverse_t")
      cfg.outer.kind = OuterSchedule::Kind::inverse_t;
    else
      throw std::invalid_argument("config: unknown outer schedule '" + value + "'");
  } else if (key == "algo.alpha") {
    cfg.outer.alpha = to_double(key, value);
    cfg.outer.kind = OuterSchedule::Kind::fixed;
  } else if (key == "algo.outer_c") {
    cfg.outer.c = to_double(key, value);
  } else if (key == "algo.inner") {
    cfg.inner_kind = parse_inner_kind(value);
  } else if (key == "algo.inner_N") {
    if (value == "epoch")
      cfg.inner_n = 0;
    else
      cfg.inner_n = to_int(key, value);
  } else if (key == "algo.inner_c0") {
    cfg.inner_c0 = to_double(key, value);
  } else if (key == "algo.inner_schedule") {
    if (value == "decay")
      cfg.inner_schedule = InnerScheduleKind::strongly_convex_decay;
    else if (value == "fixed")
      cfg.inner_schedule = InnerScheduleKind::fixed_step;
    else
      throw std::invalid_argument("config: unknown inner schedule '" + value + "'");
  } else if (key == "algo.accuracy_eps") {
    cfg.accuracy_eps = to_double(key, value);
  } else if (key == "algo.sgd_step") {
    cfg.sgd.c = to_double(key, value);
  } else if (key == "algo.sgd_schedule") {
    if (value == "fixed")
      cfg.sgd.kind = StepSchedule::Kind::fixed;
    else if (value == "inv_sqrt")
      cfg.sgd.kind = StepSchedule::Kind::inv_sqrt;
    else
      throw std::invalid_argument("config: unknown sgd schedule '" + value + "'");
  } else if (key == "algo.swa_tau") {
    if (value == "running_mean") {
      cfg.swa_tau.running_mean = true;
    } else {
      cfg.swa_tau.running_mean = false;
      cfg.swa_tau.tau = to_double(key, value);
    }
  } else if (key == "algo.final") {
    if (value == "last_u")
      cfg.final_mode = FinalMode::last_u;
    else if (value == "prox_of_last_u")
      cfg.final_mode = FinalMode::prox_of_last_u;
    else
      throw std::invalid_argument("config: unknown final mode '" + value + "'");
  } else if (key == "stability.probe_count") {
    cfg.probe_count = static_cast<int>(to_int(key, value));
  } else if (key == "stability.neighbor_index") {
    cfg.neighbor_index = to_int(key, value);
  } else if (key == "gengap.mc_samples") {
    cfg.mc_samples = to_int(key, value);
  } else if (key == "gengap.mc_ci") {
    cfg.mc_ci = to_double(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    apply_config_entry(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (d < 1) throw std::invalid_argument("config: data.d >= 1 required");
  if (n_list.empty()) throw std::invalid_argument("config: at least one n required");
  for (std::size_t n : n_list)
    if (n < 1) throw std::invalid_argument("config: n >= 1 required");
  if (trials < 1) throw std::invalid_argument("config: trials >= 1 required");
  if (algos.empty()) throw std::invalid_argument("config: at least one algorithm required");
  if (!(radius > 0.0)) throw std::invalid_argument("config: domain.radius > 0 required");
  if (T < 0) throw std::invalid_argument("config: algo.T >= 0 required");
  if (probe_count < 1) throw std::invalid_argument("config: stability.probe_count >= 1 required");

  const double l = loss_name == "max_quad" ? loss_weak_convexity : 0.0;
  for (AlgoKind algo : algos) {
    if (algo == AlgoKind::me_a || algo == AlgoKind::ppm) {
      if (!(p > l))
        throw std::invalid_argument("config: p > l required for " + to_string(algo));
      if (algo == AlgoKind::me_a) outer.validate(p, stability_beta(p, l));
    }
  }
  for (std::size_t n : n_list) {
    if (neighbor_index >= 0 && static_cast<std::size_t>(neighbor_index) >= n)
      throw std::invalid_argument("config: stability.neighbor_index out of range");
  }
}

}  // namespace mea
