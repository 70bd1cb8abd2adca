#include "bandalloc/sim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "bandalloc/errors.hpp"
#include "bandalloc/rng.hpp"

namespace bandalloc::sim {
namespace {

constexpr int kNoBand = -1;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_policy(const Policy& policy, std::size_t bands, std::size_t users) {
  std::visit(overloaded{
                 [&](const OrthogonalPolicy& p) {
                   if (p.schedule.bands != bands || p.schedule.users != users)
                     throw DimensionError("schedule dimensions do not match the scenario");
                   if (p.schedule.entries.empty()) throw std::invalid_argument("empty schedule");
                 },
                 [&](const RandomPolicy& p) {
                   if (p.gamma.rows() != bands || p.gamma.cols() != users)
                     throw DimensionError("selection matrix dimensions do not match the scenario");
                   for (std::size_t k = 0; k < users; ++k) {
                     for (std::size_t j = 0; j < bands; ++j)
                       if (!(p.gamma(j, k) >= 0.0)) throw std::invalid_argument("negative selection probability");
                     if (p.gamma.col_sum(k) > 1.0 + 1e-9)
                       throw std::invalid_argument("selection probabilities of a user exceed 1");
                   }
                 },
                 [&](const FixedPolicy& p) {
                   if (p.mapping.band_of_user.size() != users)
                     throw DimensionError("mapping length does not match the scenario");
                   std::vector<bool> used(bands, false);
                   for (std::size_t b : p.mapping.band_of_user) {
                     if (b >= bands || used[b]) throw std::invalid_argument("invalid fixed mapping");
                     used[b] = true;
                   }
                 },
             },
             policy);
}

// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

const char* policy_name(const Policy& policy) {
  return std::visit(overloaded{[](const OrthogonalPolicy&) { return "orthogonal"; },
                               [](const RandomPolicy&) { return "random"; },
                               [](const FixedPolicy&) { return "fixed"; }},
                    policy);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable:
      return "stable";
    case Verdict::unstable:
      return "unstable";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (n_slots == 0) throw ConfigError("n_slots must be positive");
  if (warmup >= n_slots) throw ConfigError("warmup must be smaller than n_slots");
  if (trace_stride == 0) throw ConfigError("trace_stride must be positive");
}

SimResult run(const Scenario& scenario, const Policy& policy, const SimConfig& config) {
  std::vector<double> lambda_s;
  for (const SecondaryUser& u : scenario.users) lambda_s.push_back(u.arrival_rate);
  return run(rate_matrix(scenario), lambda_s, policy, config);
}

SimResult run(const RateMatrix& rates, const std::vector<double>& lambda_s, const Policy& policy,
              const SimConfig& config) {
  config.validate();
  const std::size_t bands = rates.num_bands();
  const std::size_t users = rates.num_users();
  if (lambda_s.size() != users) throw DimensionError("one arrival rate per secondary user required");
  check_policy(policy, bands, users);

  SimResult result;
  result.config = config;
  result.primary.resize(bands);
  result.secondary.resize(users);
  result.collisions.assign(users, 0);
  const std::size_t samples = static_cast<std::size_t>(config.n_slots / config.trace_stride);
  result.trace_slots.reserve(samples);
  for (auto& q : result.primary) q.trace.reserve(samples);
  for (auto& q : result.secondary) q.trace.reserve(samples);

  Rng primary_rng(config.seed, 0);
  Rng secondary_rng(config.seed, 1);

  std::vector<std::uint64_t> pq(bands, 0), sq(users, 0);
  std::vector<bool> band_idle(bands);
  std::vector<int> band_of(users, kNoBand);
  std::vector<int> claims(bands);
  std::vector<bool> nonempty(users);

  const auto* fixed = std::get_if<FixedPolicy>(&policy);
  const auto* orth = std::get_if<OrthogonalPolicy>(&policy);
  const auto* rnd = std::get_if<RandomPolicy>(&policy);

  for (std::uint64_t t = 0; t < config.n_slots; ++t) {
    const bool in_window = t >= config.warmup;

    // Primary queues.
    for (std::size_t j = 0; j < bands; ++j) {
      band_idle[j] = pq[j] == 0;
      if (in_window && band_idle[j]) ++result.primary[j].window_idle_slots;
      if (!band_idle[j] && primary_rng.bernoulli(rates.mu_p[j])) {
        --pq[j];
        ++result.primary[j].departures;
        if (in_window) ++result.primary[j].window_departures;
      }
    }
    for (std::size_t j = 0; j < bands; ++j) {
      if (primary_rng.bernoulli(rates.lambda_p[j])) {
        ++pq[j];
        ++result.primary[j].arrivals;
      }
    }

    // Assignment.
    for (std::size_t k = 0; k < users; ++k) nonempty[k] = sq[k] > 0;
    if (fixed) {
      for (std::size_t k = 0; k < users; ++k) band_of[k] = static_cast<int>(fixed->mapping.band_of_user[k]);
    } else if (orth) {
      const std::size_t e = schedule::sample_permutation(orth->schedule, secondary_rng);
      for (std::size_t k = 0; k < users; ++k) band_of[k] = orth->schedule.band_of(e, k);
    } else {
      for (std::size_t k = 0; k < users; ++k) {
        band_of[k] = kNoBand;
        if (!nonempty[k]) continue;
        const double u = secondary_rng.uniform();
        double acc = 0.0;
        for (std::size_t j = 0; j < bands; ++j) {
          acc += rnd->gamma(j, k);
          if (u < acc) {
            band_of[k] = static_cast<int>(j);
            break;
          }
        }
      }
    }

    // Secondary transmissions.
    std::fill(claims.begin(), claims.end(), 0);
    for (std::size_t k = 0; k < users; ++k)
      if (nonempty[k] && band_of[k] != kNoBand) ++claims[band_of[k]];
    for (std::size_t k = 0; k < users; ++k) {
      if (!nonempty[k] || band_of[k] == kNoBand) continue;
      const std::size_t j = static_cast<std::size_t>(band_of[k]);
      if (!band_idle[j]) continue;
      if (claims[j] > 1) {
        ++result.collisions[k];
        continue;
      }
      if (secondary_rng.bernoulli(rates.su_success(j, k))) {
        --sq[k];
        ++result.secondary[k].departures;
        if (in_window) ++result.secondary[k].window_departures;
      }
    }
    for (std::size_t k = 0; k < users; ++k) {
      if (secondary_rng.bernoulli(lambda_s[k])) {
        ++sq[k];
        ++result.secondary[k].arrivals;
      }
    }

    if ((t + 1) % config.trace_stride == 0) {
      result.trace_slots.push_back(t + 1);
      for (std::size_t j = 0; j < bands; ++j) result.primary[j].trace.push_back(pq[j]);
      for (std::size_t k = 0; k < users; ++k) result.secondary[k].trace.push_back(sq[k]);
    }
  }

  for (std::size_t j = 0; j < bands; ++j) result.primary[j].final_length = pq[j];
  for (std::size_t k = 0; k < users; ++k) result.secondary[k].final_length = sq[k];
  assess_stability(result);
  return result;
}

Verdict assess_queue(const QueueStats& q, const SimResult& result, const StabilityThresholds& t) {
  if (result.config.n_slots < t.min_slots) return Verdict::inconclusive;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < result.trace_slots.size(); ++i) {
    if (result.trace_slots[i] <= result.config.warmup) continue;
    x.push_back(static_cast<double>(result.trace_slots[i]));
    y.push_back(static_cast<double>(q.trace[i]));
  }
  if (x.size() < t.min_points) return Verdict::inconclusive;
  const double slope = ols_slope(x, y);
  const double backlog_cap = t.backlog_fraction * static_cast<double>(result.window());
  if (slope < t.stable_slope && static_cast<double>(q.final_length) < backlog_cap)
    return Verdict::stable;
  if (slope > t.unstable_slope) return Verdict::unstable;
  return Verdict::inconclusive;
}

void assess_stability(SimResult& result, const StabilityThresholds& t) {
  result.primary_verdicts.clear();
  result.secondary_verdicts.clear();
  for (const QueueStats& q : result.primary) result.primary_verdicts.push_back(assess_queue(q, result, t));
  for (const QueueStats& q : result.secondary)
    result.secondary_verdicts.push_back(assess_queue(q, result, t));
}

std::vector<double> empirical_throughput(const SimResult& result) {
  std::vector<double> out;
  const double window = static_cast<double>(result.window());
  for (const QueueStats& q : result.secondary)
    out.push_back(static_cast<double>(q.window_departures) / window);
  return out;
}

std::vector<double> empirical_availability(const SimResult& result) {
  std::vector<double> out;
  const double window = static_cast<double>(result.window());
  for (const QueueStats& q : result.primary)
    out.push_back(static_cast<double>(q.window_idle_slots) / window);
  return out;
}

void write_trace_csv(std::ostream& out, const SimResult& result) {
  out << "slot";
  for (std::size_t j = 0; j < result.primary.size(); ++j) out << ",p" << j + 1;
  for (std::size_t k = 0; k < result.secondary.size(); ++k) out << ",s" << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < result.trace_slots.size(); ++i) {
    out << result.trace_slots[i];
    for (const QueueStats& q : result.primary) out << ',' << q.trace[i];
    for (const QueueStats& q : result.secondary) out << ',' << q.trace[i];
    out << '\n';
  }
}

}  // namespace bandalloc::sim
