#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace bregret::cli {
namespace {

// Tracks where each node came from so errors can point at a file line or an override.
class Reader {
 public:
  explicit Reader(std::set<std::string> overridden) : overridden_(std::move(overridden)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& what) const {
    if (overridden_.count(path) != 0) throw ConfigError("--set " + path + ": " + what);
    const YAML::Mark mark = node.Mark();
    if (mark.is_null()) throw ConfigError(path + ": " + what);
    throw ConfigError("config line " + std::to_string(mark.line + 1) + " (" + path + "): " + what);
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& path, const char* expected) const {
    if (!node.IsScalar()) fail(node, path, std::string("expected ") + expected);
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, path, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
    }
  }

  double real(const YAML::Node& node, const std::string& path) const {
    return scalar<double>(node, path, "a number");
  }
  int integer(const YAML::Node& node, const std::string& path) const {
    return scalar<int>(node, path, "an integer");
  }
  std::string text(const YAML::Node& node, const std::string& path) const {
    return scalar<std::string>(node, path, "a string");
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& path) const {
    if (node.IsScalar()) return {real(node, path)};
    if (!node.IsSequence()) fail(node, path, "expected a number or a list of numbers");
    std::vector<double> out;
    for (const YAML::Node& item : node) out.push_back(real(item, path));
    return out;
  }
  std::vector<int> integers(const YAML::Node& node, const std::string& path) const {
    if (node.IsScalar()) return {integer(node, path)};
    if (!node.IsSequence()) fail(node, path, "expected an integer or a list of integers");
    std::vector<int> out;
    for (const YAML::Node& item : node) out.push_back(integer(item, path));
    return out;
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

 private:
  std::set<std::string> overridden_;
};

void set_path(YAML::Node node, const std::vector<std::string>& parts, std::size_t i, const YAML::Node& value) {
  if (i + 1 == parts.size()) {
    node[parts[i]] = value;
    return;
  }
  if (!node[parts[i]] || !node[parts[i]].IsMap()) node[parts[i]] = YAML::Node(YAML::NodeType::Map);
  set_path(node[parts[i]], parts, i + 1, value);
}

std::set<std::string> apply_overrides(YAML::Node& root, const std::vector<std::string>& overrides) {
  std::set<std::string> paths;
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set " + item + ": expected key.path=value");
    const std::string path = item.substr(0, eq);
    std::vector<std::string> parts;
    std::stringstream stream(path);
    for (std::string part; std::getline(stream, part, '.');) {
      if (part.empty()) throw ConfigError("--set " + item + ": empty key segment");
      parts.push_back(part);
    }
    YAML::Node value;
    try {
      value = YAML::Load(item.substr(eq + 1));
    } catch (const YAML::Exception& e) {
      throw ConfigError("--set " + path + ": " + e.msg);
    }
    if (!root.IsMap()) root = YAML::Node(YAML::NodeType::Map);
    set_path(root, parts, 0, value);
    // Any key below an overridden section also originates from the override.
    paths.insert(path);
    if (value.IsMap()) {
      for (const auto& kv : value) paths.insert(path + "." + kv.first.as<std::string>());
    }
  }
  return paths;
}

void parse_grid(const Reader& r, const YAML::Node& node, GridConfig& grid) {
  r.require_map(node, "grid");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string path = "grid." + key;
    if (key == "kind") {
      grid.kind = r.text(kv.second, path);
      if (grid.kind != "sweep" && grid.kind != "uniform" && grid.kind != "explicit") {
        r.fail(kv.second, path, "unknown grid kind '" + grid.kind + "' (sweep | uniform | explicit)");
      }
    } else if (key == "step") {
      grid.step = r.real(kv.second, path);
      if (!(grid.step > 0.0)) r.fail(kv.second, path, "step must be positive");
    } else if (key == "points") {
      grid.points = r.integer(kv.second, path);
      if (grid.points < 1) r.fail(kv.second, path, "points must be >= 1");
    } else if (key == "lo") {
      grid.lo = r.real(kv.second, path);
    } else if (key == "hi") {
      grid.hi = r.real(kv.second, path);
    } else if (key == "values") {
      if (!kv.second.IsSequence() || kv.second.size() == 0) r.fail(kv.second, path, "expected a non-empty list");
      grid.values.clear();
      for (const YAML::Node& item : kv.second) {
        // Scalars are binary points given by their probability of a one.
        if (item.IsScalar()) {
          const double theta = r.real(item, path);
          grid.values.push_back({1.0 - theta, theta});
        } else {
          grid.values.push_back(r.reals(item, path));
        }
      }
    } else {
      r.fail(kv.first, path, "unknown key");
    }
  }
}

void parse_prior(const Reader& r, const YAML::Node& node, PriorConfig& prior) {
  r.require_map(node, "prior");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string path = "prior." + key;
    if (key == "kind") {
      prior.kind = r.text(kv.second, path);
      if (prior.kind != "uniform" && prior.kind != "dirichlet" && prior.kind != "explicit" && prior.kind != "point") {
        r.fail(kv.second, path, "unknown prior kind '" + prior.kind + "' (uniform | dirichlet | explicit | point)");
      }
    } else if (key == "beta") {
      prior.beta = r.real(kv.second, path);
      if (!(prior.beta > 0.0)) r.fail(kv.second, path, "beta must be positive");
    } else if (key == "size") {
      prior.size = r.integer(kv.second, path);
      if (prior.size < 8) r.fail(kv.second, path, "quadrature size must be >= 8");
    } else if (key == "index") {
      prior.index = r.integer(kv.second, path);
      if (prior.index < 0) r.fail(kv.second, path, "index must be >= 0");
    } else if (key == "weights") {
      prior.weights = r.reals(kv.second, path);
    } else {
      r.fail(kv.first, path, "unknown key");
    }
  }
}

void parse_predictor(const Reader& r, const YAML::Node& node, PredictorConfig& predictor) {
  r.require_map(node, "predictor");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string path = "predictor." + key;
    if (key == "kind") {
      predictor.kind = r.text(kv.second, path);
      if (predictor.kind != "add_beta" && predictor.kind != "mixture" && predictor.kind != "alpha_nml") {
        r.fail(kv.second, path, "unknown predictor kind '" + predictor.kind + "' (add_beta | mixture | alpha_nml)");
      }
    } else if (key == "beta") {
      predictor.beta = r.real(kv.second, path);
      if (!(predictor.beta > 0.0)) r.fail(kv.second, path, "beta must be positive");
    } else if (key == "alpha") {
      predictor.alpha = r.real(kv.second, path);
      if (!(predictor.alpha >= 1.0) || std::isinf(predictor.alpha)) {
        r.fail(kv.second, path, "alpha must be finite and >= 1");
      }
    } else {
      r.fail(kv.first, path, "unknown key");
    }
  }
}

ExperimentConfig parse(const YAML::Node& root, const Reader& r) {
  ExperimentConfig c;
  if (!root || root.IsNull()) return c;
  r.require_map(root, "config");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "n") {
      c.n = r.integer(v, key);
      if (c.n < 0) r.fail(v, key, "n must be >= 0");
    } else if (key == "ell") {
      c.ell = r.integer(v, key);
      if (c.ell < 1) r.fail(v, key, "ell must be >= 1");
    } else if (key == "ell_rule") {
      r.require_map(v, key);
      for (const auto& rule : v) {
        const std::string sub = key + "." + rule.first.as<std::string>();
        if (rule.first.as<std::string>() != "gamma") r.fail(rule.first, sub, "unknown key");
        c.gamma = r.real(rule.second, sub);
        if (!(*c.gamma > 0.0)) r.fail(rule.second, sub, "gamma must be > 0");
      }
    } else if (key == "alphabet_size") {
      c.alphabet_size = r.integer(v, key);
      if (c.alphabet_size < 2) r.fail(v, key, "alphabet_size must be >= 2");
    } else if (key == "delta") {
      c.delta = r.real(v, key);
      if (!(c.delta > 0.0 && c.delta < 0.5)) r.fail(v, key, "delta must lie in (0, 1/2)");
    } else if (key == "grid") {
      parse_grid(r, v, c.grid);
    } else if (key == "prior") {
      parse_prior(r, v, c.prior);
    } else if (key == "predictor") {
      parse_predictor(r, v, c.predictor);
    } else if (key == "alpha") {
      c.alpha = r.real(v, key);
      if (!(c.alpha >= 1.0) || std::isinf(c.alpha)) r.fail(v, key, "alpha must be finite and >= 1");
    } else if (key == "alphas") {
      c.alphas = r.reals(v, key);
      for (double a : c.alphas) {
        if (!(a >= 1.0)) r.fail(v, key, "every alpha must be >= 1");
      }
    } else if (key == "theta") {
      c.theta = r.reals(v, key);
      if (c.theta.size() == 1) c.theta = {1.0 - c.theta[0], c.theta[0]};
    } else if (key == "tol") {
      c.tol = r.real(v, key);
      if (!(c.tol > 0.0)) r.fail(v, key, "tol must be positive");
    } else if (key == "max_iter") {
      c.max_iter = r.integer(v, key);
      if (c.max_iter < 1) r.fail(v, key, "max_iter must be >= 1");
    } else if (key == "n_values") {
      c.n_values = r.integers(v, key);
      for (int n : c.n_values) {
        if (n < 1) r.fail(v, key, "n values must be >= 1");
      }
    } else if (key == "audit") {
      c.audit_n = r.integers(v, key);
      for (int n : c.audit_n) {
        if (n < 1) r.fail(v, key, "audit n values must be >= 1");
      }
    } else if (key == "refine") {
      c.refine = r.reals(v, key);
      for (double step : c.refine) {
        if (!(step > 0.0 && step < 1.0)) r.fail(v, key, "refinement steps must lie in (0, 1)");
      }
    } else if (key == "output") {
      c.output = r.text(v, key);
    } else if (key == "unit") {
      try {
        c.unit = parse_unit(r.text(v, key));
      } catch (const ConfigError& e) {
        r.fail(v, key, e.what());
      }
    } else if (key == "workers") {
      const int w = r.integer(v, key);
      if (w < 1) r.fail(v, key, "workers must be >= 1");
      c.workers = static_cast<unsigned>(w);
    } else {
      r.fail(kv.first, key, "unknown key");
    }
  }
  return c;
}

}  // namespace

int ExperimentConfig::ell_for(int n_value) const {
  if (!gamma) return ell;
  return std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(n_value), *gamma))));
}

Unit parse_unit(const std::string& text) {
  if (text == "nats") return Unit::Nats;
  if (text == "bits") return Unit::Bits;
  throw ConfigError("unit must be 'nats' or 'bits', got '" + text + "'");
}

ExperimentConfig load_config(const std::string& yaml_text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const std::set<std::string> overridden = apply_overrides(root, overrides);
  return parse(root, Reader(overridden));
}

ExperimentConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str(), overrides);
}

namespace {

// Shortest text that round-trips, so headers read 0.1 rather than 0.10000000000000001.
std::string num(double v) { return fmt::format("{}", v); }

std::vector<std::string> nums(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(num(x));
  return out;
}

}  // namespace

std::vector<std::string> describe(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << c.n;
  if (c.gamma) {
    out << YAML::Key << "ell_rule" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "gamma"
        << YAML::Value << num(*c.gamma) << YAML::EndMap;
  } else {
    out << YAML::Key << "ell" << YAML::Value << c.ell;
  }
  out << YAML::Key << "alphabet_size" << YAML::Value << c.alphabet_size;
  out << YAML::Key << "delta" << YAML::Value << num(c.delta);

  out << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << c.grid.kind;
  if (c.grid.kind == "sweep") out << YAML::Key << "step" << YAML::Value << num(c.grid.step);
  if (c.grid.kind == "uniform") {
    out << YAML::Key << "points" << YAML::Value << c.grid.points << YAML::Key << "lo" << YAML::Value << num(c.grid.lo)
        << YAML::Key << "hi" << YAML::Value << num(c.grid.hi);
  }
  if (c.grid.kind == "explicit") {
    out << YAML::Key << "values" << YAML::Value << YAML::BeginSeq;
    for (const auto& point : c.grid.values) out << nums(point);
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "prior" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << c.prior.kind;
  if (c.prior.kind == "dirichlet") {
    out << YAML::Key << "beta" << YAML::Value << num(c.prior.beta) << YAML::Key << "size" << YAML::Value << c.prior.size;
  }
  if (c.prior.kind == "point") out << YAML::Key << "index" << YAML::Value << c.prior.index;
  if (c.prior.kind == "explicit") out << YAML::Key << "weights" << YAML::Value << nums(c.prior.weights);
  out << YAML::EndMap;

  out << YAML::Key << "predictor" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << c.predictor.kind;
  if (c.predictor.kind == "add_beta") out << YAML::Key << "beta" << YAML::Value << num(c.predictor.beta);
  if (c.predictor.kind == "alpha_nml") out << YAML::Key << "alpha" << YAML::Value << num(c.predictor.alpha);
  out << YAML::EndMap;

  out << YAML::Key << "alpha" << YAML::Value << num(c.alpha);
  out << YAML::Key << "alphas" << YAML::Value << YAML::Flow << nums(c.alphas);
  out << YAML::Key << "theta" << YAML::Value << YAML::Flow << nums(c.theta);
  out << YAML::Key << "tol" << YAML::Value << num(c.tol);
  out << YAML::Key << "max_iter" << YAML::Value << c.max_iter;
  out << YAML::Key << "n_values" << YAML::Value << YAML::Flow << c.n_values;
  out << YAML::Key << "audit" << YAML::Value << YAML::Flow << c.audit_n;
  out << YAML::Key << "refine" << YAML::Value << YAML::Flow << nums(c.refine);
  out << YAML::Key << "unit" << YAML::Value << (c.unit == Unit::Bits ? "bits" : "nats");
  out << YAML::EndMap;

  std::vector<std::string> lines;
  std::stringstream stream(out.c_str());
  for (std::string line; std::getline(stream, line);) lines.push_back(line);
  return lines;
}

}  // namespace bregret::cli
