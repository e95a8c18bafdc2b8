#include "ocdeepiv/config.hpp"

#include <fstream>
#include <sstream>

#include "ocdeepiv/csv.hpp"

namespace ocdeepiv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& origin, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(origin, line, "bad number '" + v + "'");
  }
}

std::int64_t to_int(const std::string& origin, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::int64_t i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    fail(origin, line, "bad integer '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& origin, std::size_t line, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    fail(origin, line, "bad unsigned integer '" + v + "'");
  }
}

bool to_bool(const std::string& origin, std::size_t line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(origin, line, "bad bool '" + v + "' (use true/false)");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text,
                                              const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, lineno, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "dgp" && section != "train" && section != "run")
        fail(origin, lineno, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "dgp.kind") {
      if (val == "code_faithful")
        cfg.dgp_kind = DgpKind::CodeFaithful;
      else if (val == "logistic_confounded")
        cfg.dgp_kind = DgpKind::LogisticConfounded;
      else
        fail(origin, lineno, "dgp.kind must be code_faithful or logistic_confounded");
    } else if (full == "dgp.n") {
      const auto n = to_int(origin, lineno, val);
      if (n < 2) fail(origin, lineno, "dgp.n must be >= 2");
      cfg.dgp.n = static_cast<std::size_t>(n);
    } else if (full == "dgp.seed") {
      cfg.dgp.seed = to_u64(origin, lineno, val);
    } else if (full == "dgp.gamma1") {
      cfg.dgp.gamma[0] = to_double(origin, lineno, val);
    } else if (full == "dgp.gamma2") {
      cfg.dgp.gamma[1] = to_double(origin, lineno, val);
    } else if (full == "dgp.gamma3") {
      cfg.dgp.gamma[2] = to_double(origin, lineno, val);
    } else if (full == "dgp.beta1") {
      cfg.dgp.beta[0] = to_double(origin, lineno, val);
    } else if (full == "dgp.beta2") {
      cfg.dgp.beta[1] = to_double(origin, lineno, val);
    } else if (full == "dgp.kappa_t") {
      cfg.dgp.kappa_t = to_double(origin, lineno, val);
    } else if (full == "dgp.kappa_y") {
      cfg.dgp.kappa_y = to_double(origin, lineno, val);
    } else if (full == "dgp.delta1") {
      cfg.dgp.delta[0] = to_double(origin, lineno, val);
    } else if (full == "dgp.delta2") {
      cfg.dgp.delta[1] = to_double(origin, lineno, val);
    } else if (full == "dgp.noise_t") {
      cfg.dgp.noise_t = to_double(origin, lineno, val);
    } else if (full == "dgp.noise_y") {
      cfg.dgp.noise_y = to_double(origin, lineno, val);
    } else if (full == "dgp.constant_effect") {
      cfg.dgp.constant_effect = to_double(origin, lineno, val);
    } else if (full == "train.epochs") {
      cfg.train.epochs = static_cast<int>(to_int(origin, lineno, val));
    } else if (full == "train.switch_epoch") {
      cfg.train.switch_epoch = static_cast<int>(to_int(origin, lineno, val));
    } else if (full == "train.lr") {
      cfg.train.lr = to_double(origin, lineno, val);
    } else if (full == "train.weight_decay") {
      cfg.train.weight_decay = to_double(origin, lineno, val);
    } else if (full == "train.lambda") {
      cfg.train.lambda_reg = to_double(origin, lineno, val);
    } else if (full == "train.dropout") {
      cfg.train.dropout_p = to_double(origin, lineno, val);
    } else if (full == "train.seed") {
      cfg.train.seed = to_u64(origin, lineno, val);
    } else if (full == "train.lr_decay") {
      cfg.train.lr_decay = to_double(origin, lineno, val);
    } else if (full == "run.estimators") {
      cfg.estimators.clear();
      std::stringstream names(val);
      std::string name;
      while (std::getline(names, name, ',')) {
        name = trim(name);
        if (name.empty()) continue;
        try {
          cfg.estimators.push_back(parse_estimator(name));
        } catch (const ConfigError& e) {
          fail(origin, lineno, e.what());
        }
      }
      if (cfg.estimators.empty()) fail(origin, lineno, "run.estimators is empty");
    } else if (full == "run.smoothing_window") {
      const auto w = to_int(origin, lineno, val);
      if (w < 1) fail(origin, lineno, "run.smoothing_window must be >= 1");
      cfg.smoothing_window = static_cast<int>(w);
    } else if (full == "run.output_dir") {
      cfg.output_dir = val;
    } else if (full == "run.plot") {
      cfg.plot = to_bool(origin, lineno, val);
    } else if (full == "run.replications") {
      const auto r = to_int(origin, lineno, val);
      if (r < 1) fail(origin, lineno, "run.replications must be >= 1");
      cfg.replications = static_cast<int>(r);
    } else if (full == "run.theta_mode") {
      if (val == "code_faithful")
        cfg.theta_mode = ThetaMode::CodeFaithful;
      else if (val == "two_stage")
        cfg.theta_mode = ThetaMode::TwoStage;
      else
        fail(origin, lineno, "run.theta_mode must be code_faithful or two_stage");
    } else {
      fail(origin, lineno, "unknown key '" + full + "'");
    }
  }
  try {
    cfg.train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

Dataset ExperimentConfig::generate_dataset(std::uint64_t seed) const {
  if (dgp_kind == DgpKind::CodeFaithful) return gen_code_faithful(dgp.n, seed);
  ConfoundedSpec spec = dgp;
  spec.seed = seed;
  return gen_confounded(spec);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("dgp.kind", dgp_kind == DgpKind::CodeFaithful ? "code_faithful"
                                                                : "logistic_confounded");
  kv.emplace_back("dgp.n", std::to_string(dgp.n));
  kv.emplace_back("dgp.seed", std::to_string(dgp.seed));
  kv.emplace_back("dgp.gamma1", format_double(dgp.gamma[0]));
  kv.emplace_back("dgp.gamma2", format_double(dgp.gamma[1]));
  kv.emplace_back("dgp.gamma3", format_double(dgp.gamma[2]));
  kv.emplace_back("dgp.beta1", format_double(dgp.beta[0]));
  kv.emplace_back("dgp.beta2", format_double(dgp.beta[1]));
  kv.emplace_back("dgp.kappa_t", format_double(dgp.kappa_t));
  kv.emplace_back("dgp.kappa_y", format_double(dgp.kappa_y));
  kv.emplace_back("dgp.delta1", format_double(dgp.delta[0]));
  kv.emplace_back("dgp.delta2", format_double(dgp.delta[1]));
  kv.emplace_back("dgp.noise_t", format_double(dgp.noise_t));
  kv.emplace_back("dgp.noise_y", format_double(dgp.noise_y));
  if (dgp.constant_effect)
    kv.emplace_back("dgp.constant_effect", format_double(*dgp.constant_effect));
  kv.emplace_back("train.epochs", std::to_string(train.epochs));
  kv.emplace_back("train.switch_epoch", std::to_string(train.switch_epoch));
  kv.emplace_back("train.lr", format_double(train.lr));
  kv.emplace_back("train.weight_decay", format_double(train.weight_decay));
  kv.emplace_back("train.lambda", format_double(train.lambda_reg));
  kv.emplace_back("train.dropout", format_double(train.dropout_p));
  kv.emplace_back("train.seed", std::to_string(train.seed));
  kv.emplace_back("train.lr_decay", format_double(train.lr_decay));
  std::string est;
  for (const auto& k : estimators) {
    if (!est.empty()) est += ",";
    est += to_string(k);
  }
  kv.emplace_back("run.estimators", est);
  kv.emplace_back("run.smoothing_window", std::to_string(smoothing_window));
  kv.emplace_back("run.output_dir", output_dir);
  kv.emplace_back("run.plot", plot ? "true" : "false");
  kv.emplace_back("run.replications", std::to_string(replications));
  kv.emplace_back("run.theta_mode",
                  theta_mode == ThetaMode::CodeFaithful ? "code_faithful" : "two_stage");
  return kv;
}

}  // namespace ocdeepiv
