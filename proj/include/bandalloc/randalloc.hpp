#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bandalloc/matrix.hpp"
#include "bandalloc/status.hpp"

// Random band selection: every nonempty user independently picks band j with
// probability gamma(j,k); two users on the same band both fail.
namespace bandalloc::randalloc {

// sum_j mu(j,k) gamma(j,k) prod_{v in nonempty, v != k} (1 - gamma(j,v)).
double conditional_service_rate(const Matrix& gamma, const std::vector<bool>& nonempty,
                                 const Matrix& mu, std::size_t k);

enum class Dominant { first, second };

struct DominantEnvelopePoint {
  Status status = Status::infeasible;
  double fixed_lambda = 0.0;
  double max_lambda = 0.0;
  Matrix gamma_star;  // 2x2, columns sum to 1
  Dominant dominant = Dominant::first;

  bool feasible() const { return status == Status::ok; }
};

inline constexpr double kGammaStep = 1e-3;

// User 1 sends dummy packets when empty; largest lambda1 for a given lambda2.
DominantEnvelopePoint dominant1_envelope_2x2(const Matrix& mu, double lambda2);
// Mirror image: user 2 saturated, largest lambda2 for a given lambda1.
DominantEnvelopePoint dominant2_envelope_2x2(const Matrix& mu, double lambda1);

// lambda1 supported in the first dominant system at selection (gamma21, gamma22),
// or nullopt when lambda2 exceeds the service rate of user 2 there. Written in
// the unreduced service-rate form so it can serve as an independent oracle.
std::optional<double> dominant1_rate(const Matrix& mu, double lambda2, double gamma21,
                                     double gamma22);

// Envelope of the union of both dominant regions: largest rate of the other
// user when user `axis` (0 or 1) carries rate x.
DominantEnvelopePoint union_envelope_2x2(const Matrix& mu, std::size_t axis, double x);

// Interior of the union of the two dominant regions (1e-9 margin).
bool region_2x2_check(const Matrix& mu, double lambda1, double lambda2);

// Optimal selection for one available band (band 2 never idle), or nullopt
// when lambda2 > mu12. Rows are bands, columns users.
std::optional<Matrix> one_band_gamma_opt(double mu11, double mu12, double lambda2);

// sqrt(lambda1/mu11) + sqrt(lambda2/mu12) < 1 (1e-9 margin).
bool one_band_region_check(double mu11, double mu12, double lambda1, double lambda2);

// lambda1 on the boundary for a given lambda2: mu11 (1 - sqrt(lambda2/mu12))^2.
std::optional<double> one_band_boundary(double mu11, double mu12, double lambda2);

}  // namespace bandalloc::randalloc
