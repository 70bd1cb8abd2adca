#include "bandalloc/fixedalloc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bandalloc/errors.hpp"
#include "bandalloc/model.hpp"

namespace bandalloc::fixedalloc {
namespace {

constexpr double kClosureSlack = 1e-12;
constexpr std::uint64_t kMaxMappings = 10'000'000;

void check_shape(const Matrix& mu, std::span<const double> lambdas) {
  if (lambdas.size() != mu.cols()) throw DimensionError("rate vector length must equal M_s");
  if (mu.rows() < mu.cols())
    throw UnsupportedError("fixed allocation needs M_p >= M_s (got M_p=" +
                           std::to_string(mu.rows()) + ", M_s=" + std::to_string(mu.cols()) + ")");
}

void check_mapping(const FixedMapping& d, const Matrix& mu) {
  if (d.band_of_user.size() != mu.cols()) throw DimensionError("mapping length must equal M_s");
  std::vector<bool> used(mu.rows(), false);
  for (std::size_t b : d.band_of_user) {
    if (b >= mu.rows()) throw std::invalid_argument("mapping refers to a nonexistent band");
    if (used[b]) throw std::invalid_argument("mapping assigns a band twice");
    used[b] = true;
  }
}

void enumerate(std::size_t bands, std::size_t users, std::vector<std::size_t>& cur,
               std::vector<bool>& used, std::vector<FixedMapping>& out) {
  if (cur.size() == users) {
    out.push_back({cur});
    return;
  }
  for (std::size_t b = 0; b < bands; ++b) {
    if (used[b]) continue;
    used[b] = true;
    cur.push_back(b);
    enumerate(bands, users, cur, used, out);
    cur.pop_back();
    used[b] = false;
  }
}

}  // namespace

std::vector<FixedMapping> all_mappings(std::size_t bands, std::size_t users) {
  if (users > kMaxUsers) throw UnsupportedError("fixed-allocation enumeration limited to 8 users");
  if (bands < users) throw UnsupportedError("fixed allocation needs M_p >= M_s");
  if (permutation_count(bands, users) > kMaxMappings)
    throw UnsupportedError("too many fixed mappings to enumerate");
  std::vector<FixedMapping> out;
  std::vector<std::size_t> cur;
  std::vector<bool> used(bands, false);
  enumerate(bands, users, cur, used, out);
  return out;
}

bool region_for_mapping(const FixedMapping& d, const Matrix& mu, std::span<const double> lambdas) {
  check_shape(mu, lambdas);
  check_mapping(d, mu);
  for (std::size_t k = 0; k < mu.cols(); ++k)
    if (!(lambdas[k] < mu(d.band_of_user[k], k))) return false;
  return true;
}

FixedMax mapping_max(const FixedMapping& d, const Matrix& mu, std::span<const double> lambdas,
                     std::size_t k) {
  check_shape(mu, lambdas);
  check_mapping(d, mu);
  if (k >= mu.cols()) throw DimensionError("user index out of range");
  FixedMax out;
  out.mapping = d;
  for (std::size_t l = 0; l < mu.cols(); ++l) {
    if (l == k) continue;
    if (lambdas[l] > mu(d.band_of_user[l], l) + kClosureSlack) return out;
  }
  out.status = Status::ok;
  out.max_rate = mu(d.band_of_user[k], k);
  return out;
}

FixedMax best_fixed_max(const Matrix& mu, std::span<const double> lambdas, std::size_t k) {
  check_shape(mu, lambdas);
  if (k >= mu.cols()) throw DimensionError("user index out of range");
  FixedMax best;
  for (const FixedMapping& d : all_mappings(mu.rows(), mu.cols())) {
    const FixedMax cand = mapping_max(d, mu, lambdas, k);
    if (cand.feasible() && (!best.feasible() || cand.max_rate > best.max_rate)) best = cand;
  }
  return best;
}

}  // namespace bandalloc::fixedalloc
