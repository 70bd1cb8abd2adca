#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "bandalloc/fixedalloc.hpp"
#include "bandalloc/matrix.hpp"
#include "bandalloc/model.hpp"
#include "bandalloc/schedule.hpp"

// Slot-level Monte Carlo model of the primary and secondary queues.
//
// Each slot: the assignment is drawn, every nonempty primary queue transmits,
// every nonempty secondary user whose band was idle at the start of the slot
// (and, under random selection, not chosen by another nonempty user)
// transmits, and Bernoulli arrivals join the queues after service.
//
// Randomness comes from two streams seeded from the same value. Stream 0
// drives primary outcomes then primary arrivals, band by band. Stream 1 drives
// the assignment draw(s), then secondary outcomes in user order, then
// secondary arrivals. Primary queues therefore evolve identically whatever
// the secondary policy.
namespace bandalloc::sim {

struct OrthogonalPolicy {
  schedule::PermutationSchedule schedule;
};
struct RandomPolicy {
  Matrix gamma;  // M_p x M_s; a column summing below 1 leaves the user idle with the remainder
};
struct FixedPolicy {
  fixedalloc::FixedMapping mapping;
};
using Policy = std::variant<OrthogonalPolicy, RandomPolicy, FixedPolicy>;

const char* policy_name(const Policy& policy);

struct SimConfig {
  std::uint64_t n_slots = 100000;
  std::uint64_t warmup = 0;
  std::uint64_t seed = 0;
  std::uint64_t trace_stride = 100;

  void validate() const;
};

enum class Verdict { stable, unstable, inconclusive };
const char* to_string(Verdict v);

struct QueueStats {
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t final_length = 0;
  std::uint64_t window_departures = 0;   // departures after warmup
  std::uint64_t window_idle_slots = 0;   // slots after warmup that began with an empty queue
  std::vector<std::uint64_t> trace;      // length at the end of each sampled slot
};

struct SimResult {
  SimConfig config;
  std::vector<std::uint64_t> trace_slots;  // number of completed slots at each sample
  std::vector<QueueStats> primary;
  std::vector<QueueStats> secondary;
  std::vector<std::uint64_t> collisions;  // per secondary user
  std::vector<Verdict> primary_verdicts;
  std::vector<Verdict> secondary_verdicts;

  std::uint64_t window() const { return config.n_slots - config.warmup; }
};

// Engineering surrogate for queue stability, fitted on the post-warmup trace.
// A point 10% outside the region drifts at 0.1 times the binding service
// rate, which is 0.0175 packets/slot for a rate of 0.175; the unstable
// threshold sits below that.
struct StabilityThresholds {
  double stable_slope = 0.005;     // packets/slot
  double unstable_slope = 0.01;    // packets/slot
  double backlog_fraction = 0.05;  // of the post-warmup slot count
  std::uint64_t min_slots = 10000;
  std::size_t min_points = 10;
};

// Runs the simulation and fills in verdicts with the default thresholds.
SimResult run(const Scenario& scenario, const Policy& policy, const SimConfig& config);

// Same, from precomputed rates: lambda_s holds the secondary arrival rates.
SimResult run(const RateMatrix& rates, const std::vector<double>& lambda_s, const Policy& policy,
              const SimConfig& config);

Verdict assess_queue(const QueueStats& q, const SimResult& result,
                     const StabilityThresholds& t = {});
// Recomputes both verdict vectors in place.
void assess_stability(SimResult& result, const StabilityThresholds& t = {});

// Departures per slot after warmup, per secondary user.
std::vector<double> empirical_throughput(const SimResult& result);
// Fraction of post-warmup slots each band started idle.
std::vector<double> empirical_availability(const SimResult& result);

// CSV: slot, p1..pM, s1..sN.
void write_trace_csv(std::ostream& out, const SimResult& result);

}  // namespace bandalloc::sim
