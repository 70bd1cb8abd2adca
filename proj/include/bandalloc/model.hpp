#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bandalloc/matrix.hpp"

namespace bandalloc {

struct SlotConfig {
  double T = 1.0;    // slot duration, seconds
  double tau = 0.0;  // sensing duration, seconds
  double b = 1.0;    // packet size, bits

  // Throws ConfigError unless T > 0, 0 <= tau < T and b > 0.
  void validate() const;

  bool operator==(const SlotConfig&) const = default;
};

// Mean SNR at unit gain and mean Rayleigh channel gain of a link.
struct LinkParams {
  double gamma = 1.0;
  double sigma2 = 1.0;

  bool operator==(const LinkParams&) const = default;
};

enum class InputMode { physical, abstract };

struct PrimaryBand {
  // Hz. Zero marks a virtual band. Required in physical mode; in abstract mode
  // an absent bandwidth means "a real band of unspecified width".
  std::optional<double> bandwidth_hz;
  // Packets/slot. Required in physical mode; derived from availability in
  // abstract mode when absent.
  std::optional<double> arrival_rate;

  // Physical mode.
  std::optional<LinkParams> link;

  // Abstract mode.
  std::optional<double> out_complement_p;  // P̄_out,p (defaults to 1)
  std::optional<double> availability;      // π

  bool is_virtual() const { return bandwidth_hz && *bandwidth_hz == 0.0; }

  bool operator==(const PrimaryBand&) const = default;
};

struct SecondaryUser {
  double arrival_rate = 0.0;  // packets/slot
  std::optional<LinkParams> link;                  // physical mode
  std::optional<std::vector<double>> out_complement;  // abstract mode, one entry per band

  bool operator==(const SecondaryUser&) const = default;
};

struct Scenario {
  SlotConfig slot;
  InputMode mode = InputMode::abstract;
  std::vector<PrimaryBand> bands;
  std::vector<SecondaryUser> users;

  std::size_t num_bands() const { return bands.size(); }
  std::size_t num_users() const { return users.size(); }

  // Checks every field-level invariant and input-mode consistency.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

// Long-run rates derived from a scenario.
struct RateMatrix {
  Matrix mu;           // M_p x M_s, mu(j,k) = pi[j] * su_success(j,k)
  Matrix su_success;   // M_p x M_s, P̄_out for SU k on band j
  std::vector<double> mu_p;       // PU service rates
  std::vector<double> pi;         // band availabilities
  std::vector<double> lambda_p;   // effective PU arrival rates

  std::size_t num_bands() const { return mu.rows(); }
  std::size_t num_users() const { return mu.cols(); }

  // Abstract rate matrix built straight from mu values (pi = 1, su_success = mu).
  static RateMatrix from_mu(const Matrix& mu);
};

// Correct-reception probability of a secondary link (sensing shortens the
// transmission window to T - tau). Returns 0 for a zero-bandwidth band.
double secondary_outage_complement(const SlotConfig& slot, double bandwidth_hz, double gamma,
                                   double sigma2);

// Same for a primary link, which transmits for the full slot.
double primary_outage_complement(const SlotConfig& slot, double bandwidth_hz, double gamma,
                                 double sigma2);

// 1 - min(lambda_p / mu_p, 1). mu_p = 0 gives 1 for an idle PU, 0 otherwise.
double band_availability(double lambda_p, double mu_p);

RateMatrix rate_matrix(const Scenario& scenario);

// sum_j omega(j,k) * mu(j,k)
double secondary_service_rate(const Matrix& omega, const RateMatrix& rates, std::size_t k);

// Number of orthogonal band-assignment patterns, max(M_p,M_s)! / |M_p - M_s|!.
// Throws std::overflow_error when the count does not fit in 64 bits.
std::uint64_t permutation_count(std::size_t bands, std::size_t users);

}  // namespace bandalloc
