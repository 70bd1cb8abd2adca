#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bandalloc/matrix.hpp"
#include "bandalloc/status.hpp"

// Fixed allocation: every user keeps one band of its own for good.
namespace bandalloc::fixedalloc {

inline constexpr std::size_t kMaxUsers = 8;

struct FixedMapping {
  std::vector<std::size_t> band_of_user;  // distinct, zero based

  bool operator==(const FixedMapping&) const = default;
};

// All injective user -> band mappings in lexicographic order.
std::vector<FixedMapping> all_mappings(std::size_t bands, std::size_t users);

// Strict orthotope membership: lambda_k < mu(m_k, k) for every k.
// Throws UnsupportedError when M_p < M_s.
bool region_for_mapping(const FixedMapping& d, const Matrix& mu, std::span<const double> lambdas);

struct FixedMax {
  Status status = Status::infeasible;
  double max_rate = 0.0;
  FixedMapping mapping;

  bool feasible() const { return status == Status::ok; }
};

// Best rate of user k over mappings that carry every other user's rate
// (lambda_l <= mu(m_l, l)). Ties go to the lexicographically first mapping.
FixedMax best_fixed_max(const Matrix& mu, std::span<const double> lambdas, std::size_t k);

// Same search restricted to a single mapping.
FixedMax mapping_max(const FixedMapping& d, const Matrix& mu, std::span<const double> lambdas,
                     std::size_t k);

}  // namespace bandalloc::fixedalloc
