#pragma once

#include <cstddef>
#include <vector>

#include "bandalloc/matrix.hpp"
#include "bandalloc/rng.hpp"

namespace bandalloc::schedule {

// Square doubly stochastic embedding of an assignment matrix. Rows at index
// >= bands are virtual bands, columns at index >= users are virtual users.
struct Padded {
  Matrix matrix;
  std::size_t bands = 0;
  std::size_t users = 0;

  std::size_t size() const { return matrix.rows(); }
};

// Pads omega with virtual rows/columns and fills the residual mass by the
// northwest-corner rule. Throws std::invalid_argument when omega has negative
// entries or a row/column sum above 1 (tolerance 1e-9).
Padded pad_to_doubly_stochastic(const Matrix& omega);

struct Entry {
  std::vector<std::size_t> band_of_user;  // padded permutation: column -> row
  double weight = 0.0;
};

struct PermutationSchedule {
  std::size_t n = 0;
  std::size_t bands = 0;
  std::size_t users = 0;
  std::vector<Entry> entries;

  // Real band of real user k under entry i, or -1 when it is a virtual band.
  int band_of(std::size_t i, std::size_t k) const;

  // sum_i q_i P_i over the padded size.
  Matrix reconstruct() const;
  // Real bands x real users block of reconstruct().
  Matrix marginals() const;
};

// Greedy Birkhoff-von Neumann decomposition. Throws DecompositionError when
// the residual support has no perfect matching.
PermutationSchedule birkhoff_decompose(const Matrix& doubly_stochastic);
PermutationSchedule birkhoff_decompose(const Padded& padded);

// Convenience: pad then decompose.
PermutationSchedule schedule_for(const Matrix& omega);

// Index of the sampled entry; consumes exactly one uniform draw.
std::size_t sample_permutation(const PermutationSchedule& schedule, Rng& rng);

}  // namespace bandalloc::schedule
