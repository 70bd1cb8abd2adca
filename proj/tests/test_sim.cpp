#include <doctest.h>

#include <sstream>

#include "bandalloc/errors.hpp"
#include "bandalloc/model.hpp"
#include "bandalloc/orthogonal.hpp"
#include "bandalloc/randalloc.hpp"
#include "bandalloc/schedule.hpp"
#include "bandalloc/sim.hpp"
#include "generators.hpp"

using namespace bandalloc;
using namespace bandalloc::sim;
using doctest::Approx;

namespace {

// Reference two-band rates with the primary queues that produce pi = (0.25, 0.875).
RateMatrix two_band_rates() {
  RateMatrix r;
  r.su_success = Matrix{{0.7, 0.85}, {0.8, 0.9}};
  r.mu_p = {1.0, 1.0};
  r.lambda_p = {0.75, 0.125};
  r.pi = {0.25, 0.875};
  r.mu = Matrix{{0.175, 0.2125}, {0.7, 0.7875}};
  return r;
}

SimConfig config(std::uint64_t seed, std::uint64_t slots = 100000, std::uint64_t warmup = 10000) {
  SimConfig c;
  c.seed = seed;
  c.n_slots = slots;
  c.warmup = warmup;
  return c;
}

Policy orthogonal_policy(const Matrix& omega) { return OrthogonalPolicy{schedule::schedule_for(omega)}; }

void check_conservation(const SimResult& r) {
  for (const QueueStats& q : r.primary) CHECK(q.arrivals == q.departures + q.final_length);
  for (const QueueStats& q : r.secondary) CHECK(q.arrivals == q.departures + q.final_length);
}

}  // namespace

TEST_CASE("zero arrivals keep every queue empty") {
  const RateMatrix r = RateMatrix::from_mu(Matrix{{0.5, 0.6}, {0.7, 0.8}});
  const SimResult res = run(r, {0.0, 0.0}, FixedPolicy{{{0, 1}}}, config(1, 20000, 0));
  for (const QueueStats& q : res.secondary) {
    CHECK(q.departures == 0);
    for (auto v : q.trace) CHECK(v == 0);
  }
  for (Verdict v : res.secondary_verdicts) CHECK(v == Verdict::stable);
}

TEST_CASE("single primary queue throughput") {
  RateMatrix r = RateMatrix::from_mu(Matrix{{0.5}});
  r.lambda_p = {0.5};
  const SimResult res = run(r, {0.0}, FixedPolicy{{{0}}}, config(2, 100000, 0));
  CHECK(static_cast<double>(res.primary[0].departures) / 1e5 == Approx(0.5).epsilon(0.02));
  CHECK(res.primary_verdicts[0] == Verdict::stable);
}

TEST_CASE("inside-region orthogonal point is stable") {
  const Matrix mu{{0.175, 0.2125}, {0.7, 0.7875}};
  const orthogonal::EnvelopePoint p = orthogonal::envelope_point(mu, std::vector<double>{0.4, 0.0}, 1);
  REQUIRE(p.feasible());
  const double l2 = 0.9 * p.max_rate;
  const SimResult res = run(two_band_rates(), {0.4 * 0.9, l2}, orthogonal_policy(p.omega_star), config(3));
  CHECK(res.secondary_verdicts[0] == Verdict::stable);
  CHECK(res.secondary_verdicts[1] == Verdict::stable);
  CHECK(empirical_throughput(res)[1] >= l2 - 0.01);
}

TEST_CASE("saturated arrivals are unstable") {
  const RateMatrix r = RateMatrix::from_mu(Matrix{{0.5, 0.6}, {0.7, 0.8}});
  const SimResult res = run(r, {1.0, 1.0}, FixedPolicy{{{0, 1}}}, config(4));
  CHECK(res.secondary_verdicts[0] == Verdict::unstable);
  CHECK(res.secondary_verdicts[1] == Verdict::unstable);
}

TEST_CASE("one-band random region: inside stable, outside unstable") {
  const double mu = 0.9;
  const RateMatrix r = RateMatrix::from_mu(Matrix{{mu, mu}});
  const double edge = mu / 4;  // symmetric boundary point
  const Matrix gamma = *randalloc::one_band_gamma_opt(mu, mu, edge);
  const Matrix g1{{gamma(0, 0), gamma(0, 1)}};
  const SimResult in = run(r, {0.9 * edge, 0.9 * edge}, RandomPolicy{g1}, config(5));
  CHECK(in.secondary_verdicts[0] == Verdict::stable);
  CHECK(in.secondary_verdicts[1] == Verdict::stable);
  const SimResult out = run(r, {1.1 * edge, 1.1 * edge}, RandomPolicy{g1}, config(5));
  CHECK((out.secondary_verdicts[0] == Verdict::unstable || out.secondary_verdicts[1] == Verdict::unstable));
}

TEST_CASE("saturated throughput") {
  const RateMatrix single = RateMatrix::from_mu(Matrix{{0.7}});
  CHECK(empirical_throughput(run(single, {1.0}, FixedPolicy{{{0}}}, config(6)))[0] == Approx(0.7).epsilon(0.01 / 0.7));

  const RateMatrix shared = RateMatrix::from_mu(Matrix{{0.7, 0.7}});
  const SimResult clash = run(shared, {1.0, 1.0}, RandomPolicy{Matrix{{1.0, 1.0}}}, config(6));
  CHECK(empirical_throughput(clash)[0] == 0.0);
  CHECK(empirical_throughput(clash)[1] == 0.0);
}

TEST_CASE("late arrivals are never served in their own slot") {
  const RateMatrix r = RateMatrix::from_mu(Matrix{{1.0}});
  const SimResult res = run(r, {1.0}, FixedPolicy{{{0}}}, config(7, 1000, 0));
  CHECK(res.secondary[0].final_length == 1);
  CHECK(res.secondary[0].departures == 999);
  for (auto v : res.secondary[0].trace) CHECK(v == 1);
}

TEST_CASE("invalid inputs") {
  const RateMatrix r = RateMatrix::from_mu(Matrix{{0.5, 0.6}});
  CHECK_THROWS_AS(run(r, {0.1}, FixedPolicy{{{0}}}, config(1)), DimensionError);
  CHECK_THROWS_AS(run(r, {0.1, 0.1}, FixedPolicy{{{0}}}, config(1)), DimensionError);
  CHECK_THROWS_AS(run(r, {0.1, 0.1}, RandomPolicy{Matrix{{0.7, 1.2}}}, config(1)), std::invalid_argument);
  CHECK_THROWS_AS(run(r, {0.1, 0.1}, RandomPolicy{Matrix{{0.5, 0.5}}}, config(1, 100, 100)), ConfigError);
}

TEST_CASE("trace csv") {
  const RateMatrix r = RateMatrix::from_mu(Matrix{{0.5, 0.6}, {0.7, 0.8}});
  const SimResult res = run(r, {0.1, 0.1}, FixedPolicy{{{0, 1}}}, config(8, 300, 0));
  std::ostringstream out;
  write_trace_csv(out, res);
  const std::string text = out.str();
  CHECK(text.rfind("slot,p1,p2,s1,s2\n100,", 0) == 0);
  CHECK(res.trace_slots == std::vector<std::uint64_t>{100, 200, 300});
}

TEST_CASE("property: conservation, PU independence and reproducibility") {
  gen::Gen g(71);
  for (int i = 0; i < 20; ++i) {
    RateMatrix r = RateMatrix::from_mu(g.rates(2, 2));
    r.lambda_p = {g.uniform(0, 0.5), g.uniform(0, 0.5)};
    const std::vector<double> lam{g.uniform(0, 0.6), g.uniform(0, 0.6)};
    const SimConfig c = config(100 + i, 20000, 2000);
    const std::vector<Policy> policies{orthogonal_policy(g.substochastic(2, 2)),
                                       RandomPolicy{Matrix{{0.5, 0.3}, {0.5, 0.6}}}, FixedPolicy{{{1, 0}}}};
    std::vector<SimResult> results;
    for (const Policy& p : policies) results.push_back(run(r, lam, p, c));
    for (const SimResult& res : results) {
      check_conservation(res);
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(res.primary[j].trace == results[0].primary[j].trace);
        CHECK(res.primary[j].departures == results[0].primary[j].departures);
      }
    }
    const SimResult again = run(r, lam, policies[1], c);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(again.secondary[k].trace == results[1].secondary[k].trace);
      CHECK(again.secondary[k].departures == results[1].secondary[k].departures);
    }
    CHECK(again.collisions == results[1].collisions);
  }
}

TEST_CASE("property: empirical availability and saturated service rates") {
  gen::Gen g(72);
  for (int i = 0; i < 5; ++i) {
    RateMatrix r = RateMatrix::from_mu(Matrix(2, 2));
    r.su_success = g.rates(2, 2);
    r.lambda_p = {g.uniform(0.05, 0.6), g.uniform(0.05, 0.6)};
    r.mu_p = {g.uniform(0.7, 1.0), g.uniform(0.7, 1.0)};
    for (std::size_t j = 0; j < 2; ++j) {
      r.pi[j] = band_availability(r.lambda_p[j], r.mu_p[j]);
      for (std::size_t k = 0; k < 2; ++k) r.mu(j, k) = r.pi[j] * r.su_success(j, k);
    }
    const Matrix omega = g.substochastic(2, 2);
    const SimResult o = run(r, {1.0, 1.0}, orthogonal_policy(omega), config(200 + i));
    const std::vector<double> avail = empirical_availability(o);
    const std::vector<double> thr = empirical_throughput(o);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(avail[j] - r.pi[j]) <= 0.01);
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(std::abs(thr[k] - secondary_service_rate(omega, r, k)) <= 0.01);

    const Matrix gamma{{0.4, 0.7}, {0.6, 0.3}};
    const SimResult rr = run(r, {1.0, 1.0}, RandomPolicy{gamma}, config(300 + i));
    const std::vector<double> rthr = empirical_throughput(rr);
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(std::abs(rthr[k] - randalloc::conditional_service_rate(gamma, {true, true}, r.mu, k)) <= 0.01);
  }
}
