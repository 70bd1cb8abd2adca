#pragma once

#include <span>

#include "bandalloc/matrix.hpp"
#include "bandalloc/sim.hpp"
#include "bandalloc/status.hpp"

// Where the ray t * direction leaves each system's region, together with a
// policy that supports every point of the ray up to that boundary.
namespace bandalloc::boundary {

struct RayPoint {
  Status status = Status::infeasible;
  double t = 0.0;
  sim::Policy policy;
};

RayPoint orthogonal_ray(const Matrix& mu, std::span<const double> direction);

// Best fixed mapping along the ray: max over mappings of min_k mu(m_k, k) / d_k.
RayPoint fixed_ray(const Matrix& mu, std::span<const double> direction);

// Two users, at most two bands. The boundary is located by bisection on the
// union of the dominant regions; the selection matrix comes from whichever
// dominant envelope reaches the boundary point.
RayPoint random_ray(const Matrix& mu, std::span<const double> direction);

}  // namespace bandalloc::boundary
