#include "bregret/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace bregret {
namespace {

nlohmann::json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_regret_csv(std::ostream& out, const RegretReport& report, const ParamGrid& grid,
                      std::span<const std::string> comments) {
  for (const std::string& line : comments) out << "# " << line << '\n';
  out << "theta_index,theta_repr,alpha,n,ell,regret_nats,regret_bits\n";
  for (const RegretEntry& e : report.per_theta) {
    out << e.theta_index << ',' << grid.repr(e.theta_index) << ',' << format_real(report.alpha)
        << ',' << report.setup.n << ',' << report.setup.ell << ',' << format_real(e.value) << ','
        << format_real(e.value / std::numbers::ln2) << '\n';
  }
}

nlohmann::json capacity_to_json(const CapacityResult& result, const SaddleReport* saddle) {
  nlohmann::json prior = nlohmann::json::array();
  const ParamGrid& grid = result.prior_star.grid();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    prior.push_back({{"theta_repr", grid.repr(j)}, {"weight", result.prior_star[j]}});
  }
  nlohmann::json trace = nlohmann::json::array();
  for (double v : result.trace) trace.push_back(json_real(v));
  nlohmann::json upper = nlohmann::json::array();
  for (double v : result.upper_trace) upper.push_back(json_real(v));
  nlohmann::json divergences = nlohmann::json::array();
  for (double v : result.divergences) divergences.push_back(json_real(v));

  nlohmann::json out = {
      {"capacity_nats", json_real(result.capacity)},
      {"equalizer_gap", json_real(result.equalizer_gap)},
      {"support_gap", json_real(result.support_gap)},
      {"iterations", result.iterations},
      {"prior", prior},
      {"trace", trace},
      {"upper_trace", upper},
      {"divergences", divergences},
      {"alpha", result.alpha},
      {"tolerance", result.tolerance},
      {"converged", result.converged},
      {"n", result.setup.n},
      {"ell", result.setup.ell},
  };
  if (saddle != nullptr) {
    out["saddle"] = saddle->pass ? "PASS" : "FAIL";
    out["saddle_max_overshoot"] = json_real(saddle->max_overshoot);
    out["saddle_max_support_shortfall"] = json_real(saddle->max_support_shortfall);
  }
  return out;
}

}  // namespace bregret
