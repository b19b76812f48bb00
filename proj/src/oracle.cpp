#include "bregret/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bregret/error.hpp"

namespace bregret::oracle {
namespace {

using Real = long double;

constexpr double kStationarityTarget = 1e-9;
constexpr long kMaxGradientIterations = 5'000'000;

std::uint64_t power(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    out *= base;
    if (out > (std::uint64_t{1} << 40)) return out;
  }
  return out;
}

std::size_t sequence_count(int length, int alphabet_size) {
  return static_cast<std::size_t>(power(static_cast<std::uint64_t>(alphabet_size), length));
}

Real sequence_probability(std::span<const double> theta, std::uint64_t index, int length,
                          int alphabet_size) {
  Real p = 1.0L;
  for (int i = 0; i < length; ++i) {
    p *= static_cast<Real>(theta[index % static_cast<std::uint64_t>(alphabet_size)]);
    index /= static_cast<std::uint64_t>(alphabet_size);
  }
  return p;
}

std::vector<Real> probabilities(std::span<const double> theta, int length, int alphabet_size) {
  std::vector<Real> out(sequence_count(length, alphabet_size));
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s] = sequence_probability(theta, s, length, alphabet_size);
  }
  return out;
}

void check_theta(std::span<const double> theta, const BatchSetup& setup) {
  if (theta.size() != static_cast<std::size_t>(setup.alphabet_size)) {
    throw DomainError("oracle: theta has the wrong alphabet size");
  }
}

struct GradientOutcome {
  std::vector<double> q;
  double stationarity;
};

// Projected descent on G(q) = sum_y a_y q_y^(1 - alpha) over the simplex, started
// at the uniform point. G is separable, so its Hessian is diagonal; steps follow
// the gradient projected onto the simplex tangent space in that diagonal metric,
// with Armijo backtracking and a fraction-to-boundary cap. The plain Euclidean
// projection stalls near 1e-8 relative stationarity on these ill-conditioned
// objectives. Near the optimum the Armijo decrease drops below the resolution of
// G; there a step is accepted when G is unchanged to round-off and stationarity
// improves.
GradientOutcome minimize_power_objective(const std::vector<double>& a, double alpha) {
  const std::size_t size = a.size();
  const Real exponent = 1.0L - static_cast<Real>(alpha);
  std::vector<double> q(size, 0.0);
  std::size_t live = 0;
  for (double v : a) live += v > 0.0 ? 1 : 0;
  // Coordinates with a_y = 0 carry no cost; their mass moves to the live ones.
  for (std::size_t y = 0; y < size; ++y) q[y] = a[y] > 0.0 ? 1.0 / static_cast<double>(live) : 0.0;

  auto objective = [&](const std::vector<double>& p) {
    Real sum = 0.0L;
    for (std::size_t y = 0; y < size; ++y) {
      if (a[y] == 0.0) continue;
      if (p[y] <= 0.0) return std::numeric_limits<Real>::infinity();
      sum += static_cast<Real>(a[y]) * std::pow(static_cast<Real>(p[y]), exponent);
    }
    return sum;
  };
  auto gradient = [&](const std::vector<double>& p) {
    std::vector<double> g(size, 0.0);
    for (std::size_t y = 0; y < size; ++y) {
      if (a[y] > 0.0) g[y] = (1.0 - alpha) * a[y] * std::pow(p[y], -alpha);
    }
    return g;
  };
  // Relative spread of the gradient over the support; zero at the optimum.
  auto stationarity = [&](const std::vector<double>& g) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (std::size_t y = 0; y < size; ++y) {
      if (a[y] == 0.0) continue;
      lo = std::min(lo, g[y]);
      hi = std::max(hi, g[y]);
      mean += g[y];
    }
    if (live == 0) return 0.0;
    mean /= static_cast<double>(live);
    return (hi - lo) / std::abs(mean);
  };

  Real value = objective(q);
  std::vector<double> g = gradient(q);
  double measure = stationarity(g);
  const Real roundoff = 64.0L * std::numeric_limits<Real>::epsilon();
  std::vector<double> direction(size, 0.0);
  std::vector<double> trial(size);
  for (long iter = 0; iter < kMaxGradientIterations && measure > 0.1 * kStationarityTarget; ++iter) {
    // Inverse diagonal curvature and the multiplier keeping sum(direction) = 0.
    double inv_sum = 0.0;
    double weighted = 0.0;
    std::vector<double> inv_curvature(size, 0.0);
    for (std::size_t y = 0; y < size; ++y) {
      if (a[y] == 0.0) continue;
      inv_curvature[y] = 1.0 / (alpha * (alpha - 1.0) * a[y] * std::pow(q[y], -alpha - 1.0));
      inv_sum += inv_curvature[y];
      weighted += inv_curvature[y] * g[y];
    }
    const double multiplier = weighted / inv_sum;
    double max_step = std::numeric_limits<double>::infinity();
    Real slope = 0.0L;
    for (std::size_t y = 0; y < size; ++y) {
      direction[y] = a[y] == 0.0 ? 0.0 : -(g[y] - multiplier) * inv_curvature[y];
      if (direction[y] < 0.0) max_step = std::min(max_step, -q[y] / direction[y]);
      slope += static_cast<Real>(g[y]) * direction[y];
    }
    double step = std::min(1.0, 0.99 * max_step);

    bool accepted = false;
    std::vector<double> trial_gradient;
    for (int tries = 0; tries < 80 && !accepted; ++tries) {
      for (std::size_t y = 0; y < size; ++y) trial[y] = q[y] + step * direction[y];
      const Real trial_value = objective(trial);
      if (trial_value <= value + 1e-4L * step * slope) {
        accepted = true;
      } else if (std::isfinite(trial_value) && std::abs(trial_value - value) <= roundoff * value) {
        trial_gradient = gradient(trial);
        accepted = stationarity(trial_gradient) < measure;
      }
      if (!accepted) step *= 0.5;
    }
    if (!accepted || trial == q) break;
    q = trial;
    value = objective(q);
    g = trial_gradient.empty() ? gradient(q) : std::move(trial_gradient);
    measure = stationarity(g);
  }
  return {q, measure};
}

}  // namespace

void check_size_guard(const BatchSetup& setup) {
  validate(setup);
  const int length = setup.training_length() + setup.ell;
  const std::uint64_t pairs = power(static_cast<std::uint64_t>(setup.alphabet_size), length);
  if (pairs > kSequenceLimit) {
    throw SizeGuardError("oracle: " + std::to_string(setup.alphabet_size) + "^" +
                         std::to_string(length) + " sequence pairs exceed the limit of " +
                         std::to_string(kSequenceLimit));
  }
}

std::vector<int> decode_sequence(std::uint64_t index, int length, int alphabet_size) {
  std::vector<int> symbols(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    symbols[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(alphabet_size));
    index /= static_cast<std::uint64_t>(alphabet_size);
  }
  return symbols;
}

// --- JointTable ------------------------------------------------------------

JointTable::JointTable(const Prior& prior, const BatchSetup& setup) {
  check_size_guard(setup);
  if (prior.grid().alphabet_size() != static_cast<std::size_t>(setup.alphabet_size)) {
    throw DomainError("JointTable: grid alphabet does not match the setup");
  }
  const int m = setup.alphabet_size;
  grid_size_ = prior.size();
  training_sequences_ = sequence_count(setup.training_length(), m);
  test_sequences_ = sequence_count(setup.ell, m);
  entries_.resize(grid_size_ * training_sequences_ * test_sequences_);
  test_prob_.resize(grid_size_ * test_sequences_);
  for (std::size_t j = 0; j < grid_size_; ++j) {
    const std::span<const double> theta = prior.grid().point(j);
    const std::vector<Real> px = probabilities(theta, setup.training_length(), m);
    const std::vector<Real> py = probabilities(theta, setup.ell, m);
    std::copy(py.begin(), py.end(), test_prob_.begin() + static_cast<std::ptrdiff_t>(j * test_sequences_));
    for (std::size_t x = 0; x < training_sequences_; ++x) {
      for (std::size_t y = 0; y < test_sequences_; ++y) {
        entries_[(j * training_sequences_ + x) * test_sequences_ + y] =
            static_cast<Real>(prior[j]) * px[x] * py[y];
      }
    }
  }
}

long double JointTable::total() const {
  Real sum = 0.0L;
  for (Real v : entries_) sum += v;
  return sum;
}

// --- predictors on sequences -----------------------------------------------

std::vector<long double> conditional_table(const Predictor& pred) {
  const BatchSetup& setup = pred.setup();
  check_size_guard(setup);
  const int m = setup.alphabet_size;
  const int t = setup.training_length();
  const std::size_t nx = sequence_count(t, m);
  const std::size_t ny = sequence_count(setup.ell, m);
  std::vector<Real> out(nx * ny, 0.0L);

  auto mixture_like = [&](const Prior& prior, double alpha) {
    const std::size_t g = prior.size();
    std::vector<std::vector<Real>> px(g), py(g);
    for (std::size_t j = 0; j < g; ++j) {
      px[j] = probabilities(prior.grid().point(j), t, m);
      py[j] = probabilities(prior.grid().point(j), setup.ell, m);
    }
    for (std::size_t x = 0; x < nx; ++x) {
      Real evidence = 0.0L;
      for (std::size_t j = 0; j < g; ++j) evidence += static_cast<Real>(prior[j]) * px[j][x];
      if (evidence == 0.0L) {
        for (std::size_t y = 0; y < ny; ++y) out[x * ny + y] = std::numeric_limits<Real>::quiet_NaN();
        continue;
      }
      Real normalizer = 0.0L;
      for (std::size_t y = 0; y < ny; ++y) {
        Real mean = 0.0L;
        for (std::size_t j = 0; j < g; ++j) {
          mean += static_cast<Real>(prior[j]) * px[j][x] / evidence *
                  std::pow(py[j][y], static_cast<Real>(alpha));
        }
        out[x * ny + y] = alpha == 1.0 ? mean : std::pow(mean, 1.0L / static_cast<Real>(alpha));
        normalizer += out[x * ny + y];
      }
      if (alpha != 1.0) {
        for (std::size_t y = 0; y < ny; ++y) out[x * ny + y] /= normalizer;
      }
    }
  };

  if (const auto* mix = std::get_if<MixtureSpec>(&pred.spec())) {
    mixture_like(mix->prior, 1.0);
  } else if (const auto* nml = std::get_if<AlphaNmlSpec>(&pred.spec())) {
    mixture_like(nml->prior, nml->alpha);
  } else {
    const double beta = std::get<AddBetaSpec>(pred.spec()).beta;
    for (std::size_t x = 0; x < nx; ++x) {
      const std::vector<int> train = decode_sequence(x, t, m);
      const Real t1 = static_cast<Real>(std::count(train.begin(), train.end(), 1));
      for (std::size_t y = 0; y < ny; ++y) {
        const std::vector<int> test = decode_sequence(y, setup.ell, m);
        Real p = 1.0L;
        Real ones = 0.0L;
        for (std::size_t i = 0; i < test.size(); ++i) {
          const Real p_one = (t1 + ones + static_cast<Real>(beta)) /
                             (static_cast<Real>(t) + static_cast<Real>(i) + 2.0L * static_cast<Real>(beta));
          p *= test[i] == 1 ? p_one : 1.0L - p_one;
          ones += test[i] == 1 ? 1.0L : 0.0L;
        }
        out[x * ny + y] = p;
      }
    }
  }
  return out;
}

namespace {

// Calls body(px, py, phat) for every sequence pair with positive source mass;
// stops early and returns false if phat is zero or undefined there.
template <typename Body>
bool for_each_live_pair(const Predictor& pred, std::span<const double> theta, Body body) {
  const BatchSetup& setup = pred.setup();
  check_theta(theta, setup);
  const std::vector<Real> table = conditional_table(pred);
  const std::vector<Real> px = probabilities(theta, setup.training_length(), setup.alphabet_size);
  const std::vector<Real> py = probabilities(theta, setup.ell, setup.alphabet_size);
  for (std::size_t x = 0; x < px.size(); ++x) {
    if (px[x] == 0.0L) continue;
    for (std::size_t y = 0; y < py.size(); ++y) {
      if (py[y] == 0.0L) continue;
      const Real phat = table[x * py.size() + y];
      if (!(phat > 0.0L)) return false;
      body(px[x], py[y], phat);
    }
  }
  return true;
}

}  // namespace

double oracle_batch_regret(const Predictor& pred, std::span<const double> theta) {
  Real sum = 0.0L;
  const bool finite = for_each_live_pair(pred, theta, [&](Real px, Real py, Real phat) {
    sum += px * py * std::log(py / phat);
  });
  return finite ? static_cast<double>(sum) : std::numeric_limits<double>::infinity();
}

double oracle_alpha_batch_regret(const Predictor& pred, std::span<const double> theta,
                                 double alpha) {
  if (!(alpha > 1.0)) return oracle_batch_regret(pred, theta);
  Real sum = 0.0L;
  const Real a = static_cast<Real>(alpha);
  const bool finite = for_each_live_pair(pred, theta, [&](Real px, Real py, Real phat) {
    sum += px * py * std::pow(py / phat, a - 1.0L);
  });
  if (!finite) return std::numeric_limits<double>::infinity();
  return static_cast<double>(std::log(sum) / (a - 1.0L));
}

double oracle_worst_case_regret(const Predictor& pred, std::span<const double> theta) {
  Real worst = -std::numeric_limits<Real>::infinity();
  const bool finite = for_each_live_pair(pred, theta, [&](Real, Real py, Real phat) {
    worst = std::max(worst, std::log(py / phat));
  });
  return finite ? static_cast<double>(worst) : std::numeric_limits<double>::infinity();
}

double oracle_cond_mi(const Prior& prior, const BatchSetup& setup) {
  const JointTable joint(prior, setup);
  const std::size_t nx = joint.training_sequences();
  const std::size_t ny = joint.test_sequences();
  // p(x, y) and p(x) marginals over theta.
  std::vector<Real> pxy(nx * ny, 0.0L);
  std::vector<Real> px(nx, 0.0L);
  for (std::size_t j = 0; j < joint.grid_size(); ++j) {
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        pxy[x * ny + y] += joint(j, x, y);
        px[x] += joint(j, x, y);
      }
    }
  }
  Real sum = 0.0L;
  for (std::size_t j = 0; j < joint.grid_size(); ++j) {
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) {
        const Real p = joint(j, x, y);
        if (p == 0.0L) continue;
        // log p(y | theta, x) / p(y | x), with p(y | theta, x) = p_theta(y).
        sum += p * std::log(joint.test_probability(j, y) * px[x] / pxy[x * ny + y]);
      }
    }
  }
  return static_cast<double>(sum);
}

SibsonMinResult oracle_sibson_min(const Prior& prior, double alpha, const BatchSetup& setup) {
  if (!(alpha > 1.0) || std::isinf(alpha)) {
    throw DomainError("oracle_sibson_min: alpha must be finite and > 1");
  }
  const JointTable joint(prior, setup);
  const std::size_t nx = joint.training_sequences();
  const std::size_t ny = joint.test_sequences();
  const Real a = static_cast<Real>(alpha);

  SibsonMinResult result{0.0, 0.0, {}, {}, 0.0, 0.0, true};
  result.minimizers.assign(nx, std::vector<double>(ny, 1.0 / static_cast<double>(ny)));
  result.gradient_minimizers = result.minimizers;
  Real closed_sum = 0.0L;
  Real gradient_sum = 0.0L;
  for (std::size_t x = 0; x < nx; ++x) {
    // A(x, y) = sum_theta w(theta) p_theta(x) p_theta(y)^alpha.
    std::vector<Real> coeff(ny, 0.0L);
    Real scale = 0.0L;
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t j = 0; j < joint.grid_size(); ++j) {
        const Real py = joint.test_probability(j, y);
        if (py == 0.0L || joint(j, x, y) == 0.0L) continue;
        // joint = w p(x) p(y), so joint * p(y)^(alpha - 1) = w p(x) p(y)^alpha.
        coeff[y] += joint(j, x, y) * std::pow(py, a - 1.0L);
      }
      scale += coeff[y];
    }
    if (scale == 0.0L) continue;

    // Closed form: q(y) proportional to A(x, y)^(1 / alpha).
    Real root_sum = 0.0L;
    for (std::size_t y = 0; y < ny; ++y) root_sum += std::pow(coeff[y], 1.0L / a);
    Real closed_value = 0.0L;
    for (std::size_t y = 0; y < ny; ++y) {
      const Real q = std::pow(coeff[y], 1.0L / a) / root_sum;
      result.minimizers[x][y] = static_cast<double>(q);
      if (coeff[y] > 0.0L) closed_value += coeff[y] * std::pow(q, 1.0L - a);
    }
    closed_sum += closed_value;

    // Gradient route on the scale-free objective.
    std::vector<double> normalized(ny);
    for (std::size_t y = 0; y < ny; ++y) normalized[y] = static_cast<double>(coeff[y] / scale);
    const GradientOutcome g = minimize_power_objective(normalized, alpha);
    result.gradient_minimizers[x] = g.q;
    result.max_stationarity = std::max(result.max_stationarity, g.stationarity);
    Real gradient_value = 0.0L;
    for (std::size_t y = 0; y < ny; ++y) {
      if (coeff[y] > 0.0L) gradient_value += coeff[y] * std::pow(static_cast<Real>(g.q[y]), 1.0L - a);
      result.max_minimizer_gap =
          std::max(result.max_minimizer_gap, std::abs(g.q[y] - result.minimizers[x][y]));
    }
    gradient_sum += gradient_value;
  }
  result.value = static_cast<double>(std::log(closed_sum) / (a - 1.0L));
  result.gradient_value = static_cast<double>(std::log(gradient_sum) / (a - 1.0L));
  result.stationary = result.max_stationarity <= kStationarityTarget;
  return result;
}

// --- simplex search ----------------------------------------------------------

namespace {

// Count-class objective evaluated with raw probabilities.
class RawObjective {
 public:
  RawObjective(const ParamGrid& grid, const BatchSetup& setup, double alpha)
      : alpha_(alpha), grid_size_(grid.size()) {
    const CountSpace training(setup.training_length(), grid.alphabet_size());
    const CountSpace test(setup.ell, grid.alphabet_size());
    auto per_sequence = [&](const CountStat& stat, std::span<const double> theta) {
      Real p = 1.0L;
      for (std::size_t s = 0; s < theta.size(); ++s) {
        for (int c = 0; c < stat[s]; ++c) p *= static_cast<Real>(theta[s]);
      }
      return p;
    };
    auto multiplicity = [](const CountStat& stat) {
      Real out = 1.0L;
      int placed = 0;
      for (int c : stat.counts()) {
        for (int k = 1; k <= c; ++k) {
          ++placed;
          out = out * static_cast<Real>(placed) / static_cast<Real>(k);
        }
      }
      return out;
    };
    for (const CountStat& x : training.classes()) mult_x_.push_back(multiplicity(x));
    for (const CountStat& y : test.classes()) mult_y_.push_back(multiplicity(y));
    for (std::size_t j = 0; j < grid_size_; ++j) {
      std::vector<Real> px, py;
      for (const CountStat& x : training.classes()) px.push_back(per_sequence(x, grid.point(j)));
      for (const CountStat& y : test.classes()) py.push_back(per_sequence(y, grid.point(j)));
      std::vector<Real> py_alpha;
      for (Real v : py) py_alpha.push_back(std::pow(v, static_cast<Real>(alpha)));
      px_.push_back(std::move(px));
      py_.push_back(std::move(py));
      py_alpha_.push_back(std::move(py_alpha));
      Real entropy = 0.0L;
      for (std::size_t y = 0; y < mult_y_.size(); ++y) {
        const Real p = py_.back()[y];
        if (p > 0.0L) entropy -= mult_y_[y] * p * std::log(p);
      }
      test_entropy_.push_back(entropy);
    }
  }

  Real operator()(std::span<const Real> w) const {
    const std::size_t nx = mult_x_.size();
    const std::size_t ny = mult_y_.size();
    const Real a = static_cast<Real>(alpha_);
    if (alpha_ == 1.0) {
      // I(theta; Y | X) = H(Y | X) - H(Y | theta); the second term is linear in w.
      Real conditional_entropy = 0.0L;
      for (std::size_t x = 0; x < nx; ++x) {
        Real evidence = 0.0L;
        for (std::size_t j = 0; j < grid_size_; ++j) evidence += w[j] * px_[j][x];
        if (evidence == 0.0L) continue;
        for (std::size_t y = 0; y < ny; ++y) {
          Real joint_xy = 0.0L;
          for (std::size_t j = 0; j < grid_size_; ++j) joint_xy += w[j] * px_[j][x] * py_[j][y];
          if (joint_xy == 0.0L) continue;
          conditional_entropy -= mult_x_[x] * mult_y_[y] * joint_xy * std::log(joint_xy / evidence);
        }
      }
      Real source_entropy = 0.0L;
      for (std::size_t j = 0; j < grid_size_; ++j) source_entropy += w[j] * test_entropy_[j];
      return conditional_entropy - source_entropy;
    }
    Real outer = 0.0L;
    for (std::size_t x = 0; x < nx; ++x) {
      Real inner = 0.0L;
      for (std::size_t y = 0; y < ny; ++y) {
        Real mean = 0.0L;
        for (std::size_t j = 0; j < grid_size_; ++j) mean += w[j] * px_[j][x] * py_alpha_[j][y];
        inner += mult_y_[y] * std::pow(mean, 1.0L / a);
      }
      outer += mult_x_[x] * std::pow(inner, a);
    }
    return std::log(outer) / (a - 1.0L);
  }

 private:
  double alpha_;
  std::size_t grid_size_;
  std::vector<Real> mult_x_;
  std::vector<Real> mult_y_;
  std::vector<std::vector<Real>> px_;
  std::vector<std::vector<Real>> py_;
  std::vector<std::vector<Real>> py_alpha_;
  std::vector<Real> test_entropy_;
};

}  // namespace

CapacitySearchResult oracle_capacity(const ParamGrid& grid, const BatchSetup& setup, double alpha,
                                     double step) {
  if (grid.size() > 3) throw SizeGuardError("oracle_capacity: at most 3 grid points");
  if (!(step > 0.0) || step > 1e-2) throw DomainError("oracle_capacity: need 0 < step <= 1e-2");
  if (!(alpha >= 1.0) || std::isinf(alpha)) throw DomainError("oracle_capacity: alpha must be >= 1");
  validate(setup);
  const RawObjective objective(grid, setup, alpha);
  const long lattice = std::lround(1.0 / step);

  CapacitySearchResult best{-std::numeric_limits<double>::infinity(), {}};
  std::vector<Real> w(grid.size());
  auto consider = [&] {
    const double value = static_cast<double>(objective(w));
    if (value > best.value) {
      best.value = value;
      best.weights.assign(w.begin(), w.end());
    }
  };
  if (grid.size() == 1) {
    w[0] = 1.0L;
    consider();
  } else if (grid.size() == 2) {
    for (long a = 0; a <= lattice; ++a) {
      w[0] = static_cast<Real>(a) / lattice;
      w[1] = 1.0L - w[0];
      consider();
    }
  } else {
    for (long a = 0; a <= lattice; ++a) {
      for (long b = 0; a + b <= lattice; ++b) {
        w[0] = static_cast<Real>(a) / lattice;
        w[1] = static_cast<Real>(b) / lattice;
        w[2] = static_cast<Real>(lattice - a - b) / lattice;
        consider();
      }
    }
  }
  return best;
}

}  // namespace bregret::oracle
