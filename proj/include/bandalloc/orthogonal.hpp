#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bandalloc/matrix.hpp"
#include "bandalloc/model.hpp"
#include "bandalloc/status.hpp"

// Orthogonal probabilistic allocation: each slot the controller assigns
// distinct bands to users, band j going to user k a fraction omega(j,k) of slots.
namespace bandalloc::orthogonal {

struct EnvelopePoint {
  std::vector<double> fixed_rates;  // one entry per user; the free user's entry is ignored
  std::size_t free_user = 0;
  Status status = Status::infeasible;
  double max_rate = 0.0;
  Matrix omega_star;  // M_p x M_s

  bool feasible() const { return status == Status::ok; }
};

// Largest stable rate of user k with every other user l held at lambdas[l].
EnvelopePoint envelope_point(const Matrix& mu, std::span<const double> lambdas, std::size_t k);
EnvelopePoint envelope_point(const RateMatrix& rates, std::span<const double> lambdas,
                             std::size_t k);

// True when lambdas lies in the closure of the region (within tol).
bool in_closure(const Matrix& mu, std::span<const double> lambdas, double tol = 1e-9);

// Largest t with t * direction in the closure of the region, and the
// assignment achieving it. direction must be nonnegative and nonzero.
struct ScalingResult {
  Status status = Status::infeasible;
  double t = 0.0;
  Matrix omega;
};
ScalingResult max_scaling(const Matrix& mu, std::span<const double> direction);

struct TwoByTwo {
  Status status = Status::infeasible;
  double epsilon = 0.0;  // omega_12 = omega_21
  double lambda2_max = 0.0;
  bool via_lp = false;  // parameters fell outside the case list
};

// Two users on two bands. For mu12 == mu22 the smallest feasible epsilon is returned.
TwoByTwo two_by_two_closed_form(const Matrix& mu, double lambda1);

// Single available band with per-user rates mu_row.
EnvelopePoint one_band_envelope(std::span<const double> mu_row, std::span<const double> lambdas,
                                std::size_t k);

struct SymmetricSu {
  double lambda_max = 0.0;
  std::vector<double> theta;  // per band, in the order of g
};

// Identical users with per-band rate g: the best min(M_p, M_s) bands are shared equally.
SymmetricSu symmetric_su_max(std::span<const double> g, std::size_t num_users);

// Identical bands with per-user rate beta; strict membership.
bool symmetric_band_region_check(std::span<const double> beta, std::size_t num_bands,
                                 std::span<const double> lambdas);

// Envelope of user k for identical bands: beta_k * min(1, M_p - sum_{l != k} lambda_l / beta_l).
EnvelopePoint symmetric_band_envelope(std::span<const double> beta, std::size_t num_bands,
                                      std::span<const double> lambdas, std::size_t k);

double fully_symmetric_max(std::size_t num_bands, std::size_t num_users, double beta);

// One envelope point per grid value of user `axis`; user `free_user` is maximized and
// the rest are held at others[l].
std::vector<EnvelopePoint> sweep_envelope(const Matrix& mu, std::size_t axis,
                                          std::size_t free_user, std::span<const double> grid,
                                          std::span<const double> others);

}  // namespace bandalloc::orthogonal
