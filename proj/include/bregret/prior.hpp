#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bregret/source_model.hpp"

namespace bregret {

// A probability vector on a ParamGrid.
class Prior {
 public:
  // weights must be nonnegative, match the grid size, and sum to 1 within 1e-12.
  Prior(GridPtr grid, std::vector<double> weights);

  static Prior uniform(GridPtr grid);
  static Prior point_mass(GridPtr grid, std::size_t index);
  // Rescales arbitrary nonnegative mass onto the simplex.
  static Prior normalized(GridPtr grid, std::vector<double> mass);
  // exp(log_mass) normalized; computed with a single log-sum-exp.
  static Prior from_log_mass(GridPtr grid, std::span<const double> log_mass);

  const ParamGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t j) const { return weights_[j]; }
  std::size_t size() const { return weights_.size(); }

  std::vector<double> log_weights() const;

 private:
  GridPtr grid_;
  std::vector<double> weights_;
};

}  // namespace bregret
