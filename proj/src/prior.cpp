#include "bregret/prior.hpp"

#include <cmath>
#include <string>

#include "bregret/error.hpp"
#include "bregret/log_math.hpp"

namespace bregret {

Prior::Prior(GridPtr grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (!grid_) throw DomainError("Prior: null grid");
  if (weights_.size() != grid_->size()) {
    throw DomainError("Prior: " + std::to_string(weights_.size()) + " weights for " +
                      std::to_string(grid_->size()) + " grid points");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("Prior: negative or NaN weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw DomainError("Prior: weights sum to " + std::to_string(sum));
  }
}

Prior Prior::uniform(GridPtr grid) {
  const std::size_t size = grid ? grid->size() : 0;
  return Prior(std::move(grid), std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Prior Prior::point_mass(GridPtr grid, std::size_t index) {
  if (!grid || index >= grid->size()) throw DomainError("Prior::point_mass: index out of range");
  std::vector<double> weights(grid->size(), 0.0);
  weights[index] = 1.0;
  return Prior(std::move(grid), std::move(weights));
}

Prior Prior::normalized(GridPtr grid, std::vector<double> mass) {
  double sum = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0) || std::isinf(m)) throw DomainError("Prior::normalized: invalid mass");
    sum += m;
  }
  if (!(sum > 0.0)) throw DomainError("Prior::normalized: zero total mass");
  for (double& m : mass) m /= sum;
  return Prior(std::move(grid), std::move(mass));
}

Prior Prior::from_log_mass(GridPtr grid, std::span<const double> log_mass) {
  const LogWeight total = log_sum_exp(log_mass);
  if (total.is_zero()) throw DomainError("Prior::from_log_mass: zero total mass");
  std::vector<double> weights(log_mass.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    weights[j] = std::exp(log_mass[j] - total.value());
    sum += weights[j];
  }
  // One more rescale absorbs the last ulps of the log-sum-exp.
  for (double& w : weights) w /= sum;
  return Prior(std::move(grid), std::move(weights));
}

std::vector<double> Prior::log_weights() const {
  std::vector<double> out(weights_.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = weights_[j] > 0.0 ? std::log(weights_[j]) : kNegInf;
  }
  return out;
}

}  // namespace bregret
