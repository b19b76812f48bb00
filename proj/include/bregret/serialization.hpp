#pragma once

// Wire formats: RegretReport as CSV, CapacityResult as JSON.

#include <json.hpp>
#include <ostream>
#include <span>
#include <string>

#include "bregret/capacity.hpp"
#include "bregret/regret.hpp"

namespace bregret {

// 17 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_real(double value);

// '#'-prefixed comment lines, then columns
// theta_index,theta_repr,alpha,n,ell,regret_nats,regret_bits.
void write_regret_csv(std::ostream& out, const RegretReport& report, const ParamGrid& grid,
                      std::span<const std::string> comments = {});

// {capacity_nats, equalizer_gap, support_gap, iterations, prior, trace, ...}.
// Non-finite numbers are emitted as strings ("inf"), since JSON has no literal for them.
nlohmann::json capacity_to_json(const CapacityResult& result, const SaddleReport* saddle = nullptr);

}  // namespace bregret
