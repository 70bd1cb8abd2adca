#include "bandalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bandalloc/errors.hpp"

namespace bandalloc {
namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void require_probability(double p, const std::string& what) {
  if (!is_probability(p)) throw ConfigError(what + " must lie in [0, 1], got " + std::to_string(p));
}

void require_link(const LinkParams& link, const std::string& what) {
  if (!(link.gamma > 0.0) || !std::isfinite(link.gamma))
    throw ConfigError(what + ": gamma must be positive");
  if (!(link.sigma2 > 0.0) || !std::isfinite(link.sigma2))
    throw ConfigError(what + ": sigma2 must be positive");
}

double outage_complement(double exponent, double gamma, double sigma2) {
  // exp(-(2^x - 1) / (gamma sigma2)); 2^x overflows to inf for huge x, giving 0.
  return std::exp(-std::expm1(exponent * std::log(2.0)) / (gamma * sigma2));
}

void check_link_args(double bandwidth_hz, double gamma, double sigma2) {
  if (!(bandwidth_hz >= 0.0)) throw ConfigError("bandwidth must be non-negative");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
}

// Effective PU arrival rate of an abstract band: explicit if given, otherwise
// the rate that makes a PU with service rate mu_p idle a fraction pi of slots.
double abstract_primary_arrival(const PrimaryBand& band) {
  if (band.arrival_rate) return *band.arrival_rate;
  const double mu_p = band.out_complement_p.value_or(1.0);
  const double pi = *band.availability;
  return pi > 0.0 ? (1.0 - pi) * mu_p : 1.0;
}

}  // namespace

void SlotConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("slot: T must be positive");
  if (!(tau >= 0.0) || !(tau < T)) throw ConfigError("slot: tau must satisfy 0 <= tau < T");
  if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("slot: b must be positive");
}

void Scenario::validate() const {
  slot.validate();
  if (bands.empty()) throw ConfigError("scenario needs at least one band");
  if (users.empty()) throw ConfigError("scenario needs at least one secondary user");

  for (std::size_t j = 0; j < bands.size(); ++j) {
    const PrimaryBand& band = bands[j];
    const std::string where = "band " + std::to_string(j + 1);
    if (band.bandwidth_hz && !(*band.bandwidth_hz >= 0.0))
      throw ConfigError(where + ": bandwidth must be non-negative");
    if (band.arrival_rate) require_probability(*band.arrival_rate, where + ": arrival_rate");

    if (mode == InputMode::physical) {
      if (band.out_complement_p || band.availability)
        throw ConfigError(where + ": abstract fields in a physical scenario");
      if (!band.bandwidth_hz) throw ConfigError(where + ": bandwidth is required");
      if (!band.arrival_rate) throw ConfigError(where + ": arrival_rate is required");
      if (!band.link) throw ConfigError(where + ": gamma/sigma2 are required");
      require_link(*band.link, where);
    } else {
      if (band.link) throw ConfigError(where + ": physical link fields in an abstract scenario");
      if (!band.availability) throw ConfigError(where + ": availability is required");
      require_probability(*band.availability, where + ": availability");
      if (band.out_complement_p) require_probability(*band.out_complement_p, where + ": out_complement_p");
      const double lambda_p = abstract_primary_arrival(band);
      const double implied = band_availability(lambda_p, band.out_complement_p.value_or(1.0));
      if (std::abs(implied - *band.availability) > 1e-9)
        throw ConfigError(where + ": availability " + std::to_string(*band.availability) +
                          " is inconsistent with arrival_rate/out_complement_p (implies " +
                          std::to_string(implied) + ")");
    }
  }

  for (std::size_t k = 0; k < users.size(); ++k) {
    const SecondaryUser& user = users[k];
    const std::string where = "user " + std::to_string(k + 1);
    require_probability(user.arrival_rate, where + ": arrival_rate");
    if (mode == InputMode::physical) {
      if (user.out_complement) throw ConfigError(where + ": abstract fields in a physical scenario");
      if (!user.link) throw ConfigError(where + ": gamma/sigma2 are required");
      require_link(*user.link, where);
    } else {
      if (user.link) throw ConfigError(where + ": physical link fields in an abstract scenario");
      if (!user.out_complement) throw ConfigError(where + ": out_complement is required");
      if (user.out_complement->size() != bands.size())
        throw ConfigError(where + ": out_complement needs one entry per band (" +
                          std::to_string(bands.size()) + ")");
      for (double p : *user.out_complement) require_probability(p, where + ": out_complement");
    }
  }
}

RateMatrix RateMatrix::from_mu(const Matrix& mu) {
  RateMatrix r;
  r.mu = mu;
  r.su_success = mu;
  r.mu_p.assign(mu.rows(), 1.0);
  r.pi.assign(mu.rows(), 1.0);
  r.lambda_p.assign(mu.rows(), 0.0);
  return r;
}

double secondary_outage_complement(const SlotConfig& slot, double bandwidth_hz, double gamma,
                                   double sigma2) {
  slot.validate();
  check_link_args(bandwidth_hz, gamma, sigma2);
  if (bandwidth_hz == 0.0) return 0.0;
  const double exponent = slot.b / (slot.T * bandwidth_hz * (1.0 - slot.tau / slot.T));
  return outage_complement(exponent, gamma, sigma2);
}

double primary_outage_complement(const SlotConfig& slot, double bandwidth_hz, double gamma,
                                 double sigma2) {
  slot.validate();
  check_link_args(bandwidth_hz, gamma, sigma2);
  if (bandwidth_hz == 0.0) return 0.0;
  return outage_complement(slot.b / (slot.T * bandwidth_hz), gamma, sigma2);
}

double band_availability(double lambda_p, double mu_p) {
  if (mu_p <= 0.0) return lambda_p > 0.0 ? 0.0 : 1.0;
  return 1.0 - std::min(lambda_p / mu_p, 1.0);
}

RateMatrix rate_matrix(const Scenario& scenario) {
  scenario.validate();
  const std::size_t bands = scenario.num_bands();
  const std::size_t users = scenario.num_users();

  RateMatrix r;
  r.mu = Matrix(bands, users);
  r.su_success = Matrix(bands, users);
  r.mu_p.resize(bands);
  r.pi.resize(bands);
  r.lambda_p.resize(bands);

  for (std::size_t j = 0; j < bands; ++j) {
    const PrimaryBand& band = scenario.bands[j];
    if (scenario.mode == InputMode::physical) {
      r.mu_p[j] = primary_outage_complement(scenario.slot, *band.bandwidth_hz, band.link->gamma,
                                            band.link->sigma2);
      r.lambda_p[j] = *band.arrival_rate;
      r.pi[j] = band_availability(r.lambda_p[j], r.mu_p[j]);
    } else {
      r.mu_p[j] = band.out_complement_p.value_or(1.0);
      r.lambda_p[j] = abstract_primary_arrival(band);
      r.pi[j] = *band.availability;
    }
    for (std::size_t k = 0; k < users; ++k) {
      const SecondaryUser& user = scenario.users[k];
      double success = 0.0;
      if (band.is_virtual()) {
        success = 0.0;
      } else if (scenario.mode == InputMode::physical) {
        success = secondary_outage_complement(scenario.slot, *band.bandwidth_hz, user.link->gamma,
                                              user.link->sigma2);
      } else {
        success = (*user.out_complement)[j];
      }
      r.su_success(j, k) = success;
      r.mu(j, k) = r.pi[j] * success;
    }
  }
  return r;
}

double secondary_service_rate(const Matrix& omega, const RateMatrix& rates, std::size_t k) {
  if (omega.rows() != rates.num_bands() || omega.cols() != rates.num_users())
    throw DimensionError("assignment matrix shape does not match the rate matrix");
  if (k >= rates.num_users()) throw DimensionError("user index out of range");
  double rate = 0.0;
  for (std::size_t j = 0; j < omega.rows(); ++j) rate += omega(j, k) * rates.mu(j, k);
  return rate;
}

std::uint64_t permutation_count(std::size_t bands, std::size_t users) {
  if (bands == 0 || users == 0) throw std::invalid_argument("permutation_count: empty network");
  const std::size_t n = std::max(bands, users);
  const std::size_t d = n - std::min(bands, users);
  std::uint64_t count = 1;
  for (std::size_t i = d + 1; i <= n; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / i)
      throw std::overflow_error("permutation_count: result exceeds 64 bits");
    count *= i;
  }
  return count;
}

}  // namespace bandalloc
