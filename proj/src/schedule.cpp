#include "bandalloc/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bandalloc/errors.hpp"

namespace bandalloc::schedule {
namespace {

constexpr double kInputTol = 1e-9;
constexpr double kSupportTol = 1e-12;
constexpr double kResidualTol = 1e-9;
constexpr double kDropTol = 1e-9;

// Northwest-corner transport of `supply` into `demand`; put(i, j, q) records
// each shipment. Both vectors are decremented in place.
template <typename Put>
void northwest_fill(std::vector<double>& supply, std::vector<double>& demand, Put put) {
  std::size_t i = 0, j = 0;
  while (i < supply.size() && j < demand.size()) {
    const double q = std::min(supply[i], demand[j]);
    if (q > 0.0) put(i, j, q);
    supply[i] -= q;
    demand[j] -= q;
    if (supply[i] <= 0.0) {
      ++i;
    } else {
      ++j;
    }
  }
}

class Matcher {
 public:
  explicit Matcher(const Matrix& m) : n_(m.rows()), adj_(n_), row_of_col_(n_) {
    // Heavier entries first so the greedy matching prefers large weights.
    for (std::size_t c = 0; c < n_; ++c) {
      for (std::size_t r = 0; r < n_; ++r)
        if (m(r, c) > kSupportTol) adj_[c].push_back(r);
      std::stable_sort(adj_[c].begin(), adj_[c].end(),
                       [&](std::size_t a, std::size_t b) { return m(a, c) > m(b, c); });
    }
  }

  // Perfect matching column -> row, or empty when none exists.
  std::vector<std::size_t> perfect() {
    std::fill(row_of_col_.begin(), row_of_col_.end(), kNone);
    col_of_row_.assign(n_, kNone);
    for (std::size_t c = 0; c < n_; ++c) {
      seen_.assign(n_, false);
      if (!augment(c)) return {};
    }
    return row_of_col_;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool augment(std::size_t c) {
    for (std::size_t r : adj_[c]) {
      if (seen_[r]) continue;
      seen_[r] = true;
      if (col_of_row_[r] == kNone || augment(col_of_row_[r])) {
        col_of_row_[r] = c;
        row_of_col_[c] = r;
        return true;
      }
    }
    return false;
  }

  std::size_t n_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> row_of_col_;
  std::vector<std::size_t> col_of_row_;
  std::vector<bool> seen_;
};

void check_doubly_stochastic(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError("doubly stochastic matrix must be square and nonempty");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!(m(r, c) >= -kInputTol)) throw std::invalid_argument("negative entry in doubly stochastic matrix");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row_sum(i) - 1.0) > kInputTol || std::abs(m.col_sum(i) - 1.0) > kInputTol)
      throw std::invalid_argument("matrix is not doubly stochastic");
  }
}

}  // namespace

Padded pad_to_doubly_stochastic(const Matrix& omega) {
  const std::size_t bands = omega.rows();
  const std::size_t users = omega.cols();
  if (bands == 0 || users == 0) throw DimensionError("assignment matrix is empty");

  double total = 0.0;
  for (std::size_t j = 0; j < bands; ++j)
    for (std::size_t k = 0; k < users; ++k) {
      if (!(omega(j, k) >= -kInputTol) || !std::isfinite(omega(j, k)))
        throw std::invalid_argument("assignment fractions must be nonnegative");
      total += std::max(omega(j, k), 0.0);
    }

  std::vector<double> row_res(bands), col_res(users);
  for (std::size_t j = 0; j < bands; ++j) {
    const double s = omega.row_sum(j);
    if (s > 1.0 + kInputTol) throw std::invalid_argument("assignment row sum exceeds 1");
    row_res[j] = std::max(1.0 - s, 0.0);
  }
  for (std::size_t k = 0; k < users; ++k) {
    const double s = omega.col_sum(k);
    if (s > 1.0 + kInputTol) throw std::invalid_argument("assignment column sum exceeds 1");
    col_res[k] = std::max(1.0 - s, 0.0);
  }

  // Enough virtual rows/columns to absorb the residual mass of the real block.
  const double need = static_cast<double>(bands + users) - total;
  const std::size_t n =
      std::max({bands, users, static_cast<std::size_t>(std::ceil(need - kInputTol))});

  Padded out;
  out.bands = bands;
  out.users = users;
  out.matrix = Matrix(n, n);
  for (std::size_t j = 0; j < bands; ++j)
    for (std::size_t k = 0; k < users; ++k) out.matrix(j, k) = std::max(omega(j, k), 0.0);

  std::vector<double> virt_cols(n - users, 1.0);
  std::vector<double> virt_rows(n - bands, 1.0);
  Matrix& m = out.matrix;
  northwest_fill(row_res, virt_cols, [&](std::size_t i, std::size_t j, double q) { m(i, users + j) += q; });
  northwest_fill(col_res, virt_rows, [&](std::size_t i, std::size_t j, double q) { m(bands + j, i) += q; });
  for (double& v : virt_rows) v = std::max(v, 0.0);
  for (double& v : virt_cols) v = std::max(v, 0.0);
  northwest_fill(virt_rows, virt_cols,
                 [&](std::size_t i, std::size_t j, double q) { m(bands + i, users + j) += q; });
  return out;
}

int PermutationSchedule::band_of(std::size_t i, std::size_t k) const {
  const std::size_t row = entries.at(i).band_of_user.at(k);
  return row < bands ? static_cast<int>(row) : -1;
}

Matrix PermutationSchedule::reconstruct() const {
  Matrix m(n, n);
  for (const Entry& e : entries)
    for (std::size_t c = 0; c < n; ++c) m(e.band_of_user[c], c) += e.weight;
  return m;
}

Matrix PermutationSchedule::marginals() const {
  const Matrix full = reconstruct();
  Matrix m(bands, users);
  for (std::size_t j = 0; j < bands; ++j)
    for (std::size_t k = 0; k < users; ++k) m(j, k) = full(j, k);
  return m;
}

PermutationSchedule birkhoff_decompose(const Matrix& doubly_stochastic) {
  Padded p;
  p.matrix = doubly_stochastic;
  p.bands = doubly_stochastic.rows();
  p.users = doubly_stochastic.cols();
  return birkhoff_decompose(p);
}

PermutationSchedule birkhoff_decompose(const Padded& padded) {
  check_doubly_stochastic(padded.matrix);
  const std::size_t n = padded.size();

  Matrix residual = padded.matrix;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) residual(r, c) = std::max(residual(r, c), 0.0);

  PermutationSchedule out;
  out.n = n;
  out.bands = padded.bands;
  out.users = padded.users;

  auto max_entry = [&] {
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (double v : residual.row(r)) m = std::max(m, v);
    return m;
  };

  while (max_entry() > kResidualTol) {
    std::vector<std::size_t> perm = Matcher(residual).perfect();
    if (perm.empty()) throw DecompositionError("no perfect matching on the residual support");
    std::size_t argmin = 0;
    for (std::size_t c = 1; c < n; ++c)
      if (residual(perm[c], c) < residual(perm[argmin], argmin)) argmin = c;
    const double w = residual(perm[argmin], argmin);
    for (std::size_t c = 0; c < n; ++c) residual(perm[c], c) = std::max(residual(perm[c], c) - w, 0.0);
    residual(perm[argmin], argmin) = 0.0;
    if (w >= kDropTol) out.entries.push_back({std::move(perm), w});
  }

  double total = 0.0;
  for (const Entry& e : out.entries) total += e.weight;
  if (total <= 0.0) throw DecompositionError("decomposition produced no weight");
  for (Entry& e : out.entries) e.weight /= total;
  return out;
}

PermutationSchedule schedule_for(const Matrix& omega) {
  return birkhoff_decompose(pad_to_doubly_stochastic(omega));
}

std::size_t sample_permutation(const PermutationSchedule& schedule, Rng& rng) {
  if (schedule.entries.empty()) throw std::invalid_argument("empty schedule");
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    acc += schedule.entries[i].weight;
    if (u < acc) return i;
  }
  return schedule.entries.size() - 1;
}

}  // namespace bandalloc::schedule
