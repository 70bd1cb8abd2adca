#include "bandalloc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bandalloc/errors.hpp"
#include "bandalloc/fixedalloc.hpp"
#include "bandalloc/orthogonal.hpp"
#include "bandalloc/randalloc.hpp"
#include "bandalloc/schedule.hpp"

namespace bandalloc::boundary {
namespace {

constexpr int kBisectIters = 50;
constexpr double kReachTol = 1e-7;

}  // namespace

RayPoint orthogonal_ray(const Matrix& mu, std::span<const double> direction) {
  RayPoint out;
  const orthogonal::ScalingResult s = orthogonal::max_scaling(mu, direction);
  out.status = s.status;
  if (s.status != Status::ok) return out;
  out.t = s.t;
  out.policy = sim::OrthogonalPolicy{schedule::schedule_for(s.omega)};
  return out;
}

RayPoint fixed_ray(const Matrix& mu, std::span<const double> direction) {
  if (direction.size() != mu.cols()) throw DimensionError("direction length must equal M_s");
  RayPoint out;
  double best = -1.0;
  for (const fixedalloc::FixedMapping& m : fixedalloc::all_mappings(mu.rows(), mu.cols())) {
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mu.cols(); ++k)
      if (direction[k] > 0.0) t = std::min(t, mu(m.band_of_user[k], k) / direction[k]);
    if (t > best) {
      best = t;
      out.policy = sim::FixedPolicy{m};
    }
  }
  if (!std::isfinite(best)) throw std::invalid_argument("direction must be nonzero");
  out.status = Status::ok;
  out.t = best;
  return out;
}

RayPoint random_ray(const Matrix& mu, std::span<const double> direction) {
  if (mu.cols() != 2 || mu.rows() == 0 || mu.rows() > 2)
    throw UnsupportedError("analytic random-selection boundary needs 2 users and at most 2 bands");
  if (direction.size() != 2) throw DimensionError("direction length must equal M_s");
  Matrix mu2(2, 2);
  for (std::size_t j = 0; j < mu.rows(); ++j)
    for (std::size_t k = 0; k < 2; ++k) mu2(j, k) = mu(j, k);

  // The random region sits inside the orthogonal one, which bounds the search.
  const orthogonal::ScalingResult outer = orthogonal::max_scaling(mu2, direction);
  RayPoint out;
  if (outer.status != Status::ok) {
    out.status = outer.status;
    return out;
  }
  double lo = 0.0, hi = outer.t;
  for (int it = 0; it < kBisectIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (randalloc::region_2x2_check(mu2, mid * direction[0], mid * direction[1])) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  const double l1 = lo * direction[0], l2 = lo * direction[1];
  const randalloc::DominantEnvelopePoint d1 = randalloc::dominant1_envelope_2x2(mu2, l2);
  const randalloc::DominantEnvelopePoint d2 = randalloc::dominant2_envelope_2x2(mu2, l1);
  Matrix gamma;
  if (d1.feasible() && d1.max_lambda >= l1 - kReachTol) {
    gamma = d1.gamma_star;
  } else if (d2.feasible()) {
    gamma = d2.gamma_star;
  } else {
    return out;
  }
  Matrix trimmed(mu.rows(), 2);
  for (std::size_t j = 0; j < mu.rows(); ++j)
    for (std::size_t k = 0; k < 2; ++k) trimmed(j, k) = gamma(j, k);
  out.status = Status::ok;
  out.t = lo;
  out.policy = sim::RandomPolicy{trimmed};
  return out;
}

}  // namespace bandalloc::boundary
