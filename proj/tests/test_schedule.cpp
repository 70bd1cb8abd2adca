#include <doctest.h>

#include <map>

#include "bandalloc/errors.hpp"
#include "bandalloc/schedule.hpp"
#include "generators.hpp"

using namespace bandalloc;
using namespace bandalloc::schedule;
using doctest::Approx;

namespace {

std::vector<std::size_t> perm_of(const PermutationSchedule& s, std::size_t i) {
  return s.entries.at(i).band_of_user;
}

}  // namespace

TEST_CASE("padding") {
  const Matrix ds{{0.3, 0.7}, {0.7, 0.3}};
  CHECK(pad_to_doubly_stochastic(ds).matrix == ds);

  const Padded one = pad_to_doubly_stochastic(Matrix{{0.53, 0.47}});
  REQUIRE(one.size() == 2);
  CHECK(one.matrix.max_abs_diff(Matrix{{0.53, 0.47}, {0.47, 0.53}}) < 1e-15);

  // Zero assignment: virtual bands and users absorb everything.
  const Padded zero = pad_to_doubly_stochastic(Matrix(2, 2));
  REQUIRE(zero.size() == 4);
  CHECK(zero.matrix(0, 2) == 1.0);
  CHECK(zero.matrix(1, 3) == 1.0);
  CHECK(zero.matrix(2, 0) == 1.0);
  CHECK(zero.matrix(3, 1) == 1.0);

  CHECK_THROWS_AS(pad_to_doubly_stochastic(Matrix{{0.6, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(pad_to_doubly_stochastic(Matrix{{-0.1, 0.6}}), std::invalid_argument);
}

TEST_CASE("birkhoff examples") {
  const PermutationSchedule id = birkhoff_decompose(Matrix::identity(3));
  REQUIRE(id.entries.size() == 1);
  CHECK(perm_of(id, 0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(id.entries[0].weight == 1.0);

  const PermutationSchedule two = birkhoff_decompose(Matrix{{0.3, 0.7}, {0.7, 0.3}});
  REQUIRE(two.entries.size() == 2);
  std::map<std::vector<std::size_t>, double> w;
  for (const Entry& e : two.entries) w[e.band_of_user] = e.weight;
  CHECK(w[{0, 1}] == Approx(0.3));
  CHECK(w[{1, 0}] == Approx(0.7));

  const Matrix m3{{0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}};
  const PermutationSchedule three = birkhoff_decompose(m3);
  REQUIRE(three.entries.size() == 2);
  CHECK(three.reconstruct().max_abs_diff(m3) < 1e-12);
  for (const Entry& e : three.entries) CHECK(e.weight == Approx(0.5));

  CHECK_THROWS_AS(birkhoff_decompose(Matrix{{0.5, 0.5}, {0.6, 0.4}}), std::invalid_argument);
}

TEST_CASE("sampling") {
  Rng rng(5);
  const PermutationSchedule single = birkhoff_decompose(Matrix::identity(2));
  for (int i = 0; i < 100; ++i) CHECK(sample_permutation(single, rng) == 0);

  const PermutationSchedule two = birkhoff_decompose(Matrix{{0.3, 0.7}, {0.7, 0.3}});
  const std::size_t a = two.entries[0].weight < 0.5 ? 0 : 1;
  int hits = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) hits += sample_permutation(two, rng) == a;
  CHECK(static_cast<double>(hits) / draws == Approx(0.3).epsilon(0.01 / 0.3));
}

TEST_CASE("property: decomposition of random doubly stochastic matrices") {
  gen::Gen g(41);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + g.index(6);
    const Matrix m = g.doubly_stochastic(n, 1 + g.index(8));
    const PermutationSchedule s = birkhoff_decompose(m);
    CHECK(s.reconstruct().max_abs_diff(m) <= 1e-9);
    CHECK(s.entries.size() <= (n - 1) * (n - 1) + 1);
    double total = 0.0;
    for (const Entry& e : s.entries) total += e.weight;
    CHECK(total == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("property: a permutation matrix decomposes to itself") {
  gen::Gen g(42);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + g.index(6);
    const Matrix p = g.doubly_stochastic(n, 1);
    const PermutationSchedule s = birkhoff_decompose(p);
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].weight == 1.0);
    CHECK(s.reconstruct() == p);
  }
}

TEST_CASE("property: schedule marginals equal the assignment matrix") {
  gen::Gen g(43);
  for (int i = 0; i < 300; ++i) {
    const std::size_t bands = 1 + g.index(4), users = 1 + g.index(4);
    const Matrix omega = g.substochastic(bands, users);
    const PermutationSchedule s = schedule_for(omega);
    CHECK(s.marginals().max_abs_diff(omega) <= 1e-9);
    for (std::size_t e = 0; e < s.entries.size(); ++e)
      for (std::size_t k = 0; k < users; ++k) CHECK(s.band_of(e, k) < static_cast<int>(bands));
  }
}
