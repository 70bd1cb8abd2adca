// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bandalloc/boundary.hpp"
#include "bandalloc/cli.hpp"
#include "bandalloc/fixedalloc.hpp"
#include "bandalloc/model.hpp"
#include "bandalloc/orthogonal.hpp"
#include "bandalloc/randalloc.hpp"
#include "bandalloc/scenario_io.hpp"
#include "bandalloc/schedule.hpp"
#include "bandalloc/sim.hpp"
#include "generators.hpp"

using namespace bandalloc;

namespace {

const std::string kScenarios = SCENARIO_DIR;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RateMatrix two_band() { return rate_matrix(io::load_scenario(kScenarios + "/two_band.yaml")); }

double s_value(const Matrix& mu, std::vector<double> lambdas, std::size_t k, bool* feasible = nullptr) {
  const orthogonal::EnvelopePoint p = orthogonal::envelope_point(mu, lambdas, k);
  if (feasible) *feasible = p.feasible();
  return p.max_rate;
}

// --- criteria ----------------------------------------------------------------

Check criterion1() {
  Check c;
  const auto t0 = Clock::now();
  const RateMatrix r = two_band();
  c.require(r.mu(0, 0) == 0.175, "mu11 != 0.175");
  c.require(r.mu(0, 1) == 0.2125, "mu12 != 0.2125");
  double worst = 0.0;
  for (int i = 0; i <= 70; ++i) {
    const double l1 = 0.0025 * i;
    const std::vector<double> lam{l1, 0.0};
    const fixedalloc::FixedMax f = fixedalloc::best_fixed_max(r.mu, lam, 1);
    bool ok = false;
    const double s = s_value(r.mu, lam, 1, &ok);
    c.require(f.feasible() && ok, "infeasible point below mu11");
    worst = std::max(worst, std::abs(f.max_rate - s));
  }
  c.require(worst <= 1e-9, fmt("fixed vs S gap %.3g", worst));
  const double secs = seconds_since(t0);
  c.require(secs < 1.0, fmt("runtime %.2fs", secs));
  if (c.ok) c.detail = fmt("mu11=0.175 mu12=0.2125, max |fixed-S| on [0,0.175] = %.2g, %.3fs", worst, secs);
  return c;
}

Check criterion2() {
  Check c;
  const auto t0 = Clock::now();
  gen::Gen g(2001);
  double worst = 0.0;
  auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };

  for (int i = 0; i < 1000; ++i) {
    const Matrix mu = g.rates(2, 2, 0.01, 0.99);
    const double l1 = g.uniform(0.0, std::max(mu(0, 0), mu(1, 0)));
    const orthogonal::TwoByTwo t = orthogonal::two_by_two_closed_form(mu, l1);
    c.require(t.status == Status::ok, "closed form infeasible at feasible rate");
    track(t.lambda2_max, s_value(mu, {l1, 0.0}, 1));
  }
  for (int i = 0; i < 300; ++i) {
    const std::size_t users = 2 + g.index(3), bands = 1 + g.index(3), live = g.index(bands);
    Matrix mu(bands, users);
    for (std::size_t k = 0; k < users; ++k) mu(live, k) = g.uniform(0.05, 0.95);
    std::vector<double> lam(users);
    for (double& l : lam) l = g.uniform(0.0, 0.3) / static_cast<double>(users);
    const std::size_t k = g.index(users);
    const auto closed = orthogonal::one_band_envelope(mu.row(live), lam, k);
    bool ok = false;
    const double lp = s_value(mu, lam, k, &ok);
    c.require(closed.feasible() == ok, "one-band feasibility mismatch");
    if (ok) track(closed.max_rate, lp);
  }
  for (int i = 0; i < 300; ++i) {
    const std::size_t bands = 1 + g.index(4), users = 1 + g.index(4);
    std::vector<double> gb(bands), beta(users);
    for (double& v : gb) v = g.uniform(0.05, 0.95);
    for (double& v : beta) v = g.uniform(0.05, 0.95);
    Matrix su(bands, users), sb(bands, users);
    for (std::size_t j = 0; j < bands; ++j)
      for (std::size_t k = 0; k < users; ++k) {
        su(j, k) = gb[j];
        sb(j, k) = beta[k];
      }
    const auto sym = orthogonal::symmetric_su_max(gb, users);
    track(sym.lambda_max, orthogonal::max_scaling(su, std::vector<double>(users, 1.0)).t);

    std::vector<double> lam(users);
    for (std::size_t k = 0; k < users; ++k) lam[k] = g.uniform(0.0, 0.6) * beta[k];
    const std::size_t k = g.index(users);
    const auto closed = orthogonal::symmetric_band_envelope(beta, bands, lam, k);
    bool ok = false;
    const double lp = s_value(sb, lam, k, &ok);
    c.require(closed.feasible() == ok, "symmetric-band feasibility mismatch");
    if (ok) track(closed.max_rate, lp);

    const double b = g.uniform(0.05, 0.95);
    const double lmax = orthogonal::fully_symmetric_max(bands, users, b);
    track(lmax, s_value(Matrix(bands, users, b), std::vector<double>(users, lmax), k));
  }
  c.require(worst <= 1e-9, fmt("max gap %.3g", worst));
  const double secs = seconds_since(t0);
  c.require(secs < 30.0, fmt("runtime %.1fs", secs));
  if (c.ok) c.detail = fmt("2x2, one-band, symmetric-SU, symmetric-band, fully symmetric families: max gap %.2g, %.2fs", worst, secs);
  return c;
}

// Brute force over omega on a 0.01 grid: max lambda2 subject to lambda1 service.
double omega_grid(const Matrix& mu, double l1) {
  double best = -1.0;
  for (int a = 0; a <= 100; ++a)          // omega11
    for (int b = 0; b <= 100 - a; ++b)    // omega12
      for (int c = 0; c <= 100 - a; ++c)  // omega21
        for (int d = 0; d <= 100 - std::max(b, c); ++d) {
          if (d > 100 - b) break;
          const double s1 = 0.01 * (a * mu(0, 0) + c * mu(1, 0));
          if (s1 < l1) continue;
          best = std::max(best, 0.01 * (b * mu(0, 1) + d * mu(1, 1)));
        }
  return best;
}

double gamma_grid(const Matrix& mu, double l2) {
  double best = -1.0;
  for (int i = 0; i <= 1000; ++i)
    for (int m = 0; m <= 1000; ++m) {
      const auto v = randalloc::dominant1_rate(mu, l2, i * 1e-3, m * 1e-3);
      if (v) best = std::max(best, *v);
    }
  return best;
}

Matrix swap_users(const Matrix& m) { return Matrix{{m(0, 1), m(0, 0)}, {m(1, 1), m(1, 0)}}; }

Check criterion3() {
  Check c;
  const auto t0 = Clock::now();
  gen::Gen g(3001);
  double worst_lp = 0.0, worst_dom = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix mu = g.rates(2, 2);
    const double l1 = g.uniform(0.0, 0.9) * std::max(mu(0, 0), mu(1, 0));
    const double lp = s_value(mu, {l1, 0.0}, 1);
    const double grid = omega_grid(mu, l1);
    c.require(grid >= 0.0 && grid <= lp + 1e-9, "grid point beats the LP");
    worst_lp = std::max(worst_lp, lp - grid);
  }
  for (int i = 0; i < 100; ++i) {
    const Matrix mu = g.rates(2, 2);
    const double l = g.uniform(0.0, 0.8) * std::max(mu(0, 1), mu(1, 1));
    const auto d1 = randalloc::dominant1_envelope_2x2(mu, l);
    const double o1 = gamma_grid(mu, l);
    c.require(d1.feasible() == (o1 >= 0.0), "dominant-1 feasibility mismatch");
    if (d1.feasible()) worst_dom = std::max(worst_dom, std::abs(d1.max_lambda - o1));

    const double l1 = g.uniform(0.0, 0.8) * std::max(mu(0, 0), mu(1, 0));
    const auto d2 = randalloc::dominant2_envelope_2x2(mu, l1);
    const double o2 = gamma_grid(swap_users(mu), l1);
    c.require(d2.feasible() == (o2 >= 0.0), "dominant-2 feasibility mismatch");
    if (d2.feasible()) worst_dom = std::max(worst_dom, std::abs(d2.max_lambda - o2));
  }
  c.require(worst_lp <= 2e-2, fmt("LP vs omega grid %.3g", worst_lp));
  c.require(worst_dom <= 2e-3, fmt("dominant vs gamma grid %.3g", worst_dom));
  if (c.ok)
    c.detail = fmt("LP vs omega grid max %.2g, dominant vs gamma grid max %.2g, %.1fs", worst_lp, worst_dom,
                   seconds_since(t0));
  return c;
}

Check criterion4() {
  Check c;
  const auto t0 = Clock::now();
  gen::Gen g(4001);
  Rng rng(4002);
  double worst_rec = 0.0, worst_marg = 0.0;
  std::size_t worst_count_slack = 0;
  const int draws = 100000;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + g.index(6);
    const Matrix m = g.doubly_stochastic(n, 1 + g.index(2 * n));
    const schedule::PermutationSchedule s = schedule::birkhoff_decompose(m);
    worst_rec = std::max(worst_rec, s.reconstruct().max_abs_diff(m));
    const std::size_t bound = (n - 1) * (n - 1) + 1;
    c.require(s.entries.size() <= bound, "too many permutations");
    worst_count_slack = std::max(worst_count_slack, s.entries.size());

    Matrix hits(n, n);
    for (int d = 0; d < draws; ++d) {
      const schedule::Entry& e = s.entries[schedule::sample_permutation(s, rng)];
      for (std::size_t col = 0; col < n; ++col) hits(e.band_of_user[col], col) += 1.0;
    }
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t col = 0; col < n; ++col) worst_marg = std::max(worst_marg, std::abs(hits(r, col) / draws - m(r, col)));
  }
  c.require(worst_rec <= 1e-9, fmt("reconstruction error %.3g", worst_rec));
  c.require(worst_marg <= 0.01, fmt("sampled marginal error %.3g", worst_marg));
  if (c.ok)
    c.detail = fmt("reconstruction %.2g, sampled marginals %.4f, %.1fs", worst_rec, worst_marg, seconds_since(t0));
  return c;
}

Check criterion5() {
  Check c;
  const auto t0 = Clock::now();
  gen::Gen g(5001);
  double worst_analytic = -1.0, worst_grid = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const Matrix mu = g.rates(2, 2);
    const std::size_t axis = g.index(2), free = 1 - axis;
    double top = 0.0;
    for (std::size_t j = 0; j < 2; ++j) top = std::max(top, mu(j, axis));
    const double x = g.uniform(0.0, 1.05) * top;
    std::vector<double> lam(2, 0.0);
    lam[axis] = x;
    bool s_ok = false;
    const double s = s_value(mu, lam, free, &s_ok);
    const auto r = randalloc::union_envelope_2x2(mu, axis, x);
    const auto f = fixedalloc::best_fixed_max(mu, lam, free);
    c.require(!f.feasible() || r.feasible(), "fixed feasible outside S_hat");
    c.require(!r.feasible() || s_ok, "S_hat feasible outside S");
    if (r.feasible() && s_ok) worst_analytic = std::max(worst_analytic, r.max_lambda - s);
    if (f.feasible() && s_ok) worst_analytic = std::max(worst_analytic, f.max_rate - s);
    if (f.feasible() && r.feasible()) worst_grid = std::max(worst_grid, f.max_rate - r.max_lambda);
  }
  c.require(worst_analytic <= 1e-9, fmt("S_hat or fixed above S by %.3g", worst_analytic));
  c.require(worst_grid <= 2e-3, fmt("fixed above S_hat by %.3g", worst_grid));
  if (c.ok)
    c.detail = fmt("max excess over S %.2g, fixed over S_hat %.2g, %.1fs", worst_analytic, worst_grid,
                   seconds_since(t0));
  return c;
}

Check criterion6() {
  Check c;
  gen::Gen g(6001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double m11 = g.uniform(0.05, 0.95), m12 = g.uniform(0.05, 0.95);
    const double l2 = g.uniform(0.0, m12);
    const double boundary = *randalloc::one_band_boundary(m11, m12, l2);
    // The selection matrix of the construction, on a second band that is never idle.
    const Matrix gamma = *randalloc::one_band_gamma_opt(m11, m12, l2);
    const Matrix mu{{m11, m12}, {0.0, 0.0}};
    const auto built = randalloc::dominant1_rate(mu, l2, gamma(1, 0), gamma(1, 1));
    c.require(built.has_value(), "construction infeasible");
    if (built) worst = std::max(worst, std::abs(*built - boundary));
    const double root = std::sqrt(boundary / m11) + std::sqrt(l2 / m12);
    worst = std::max(worst, std::abs(root - 1.0) * std::min(m11, m12));
  }
  c.require(worst <= 1e-6, fmt("boundary mismatch %.3g", worst));
  const double mu = 0.6;
  const bool witness = !randalloc::one_band_region_check(mu, mu, mu / 2, mu / 2) &&
                       *randalloc::one_band_boundary(mu, mu, mu / 2) < mu / 2 &&
                       randalloc::one_band_region_check(mu, mu, mu * (1 - 1e-6), 0.0) &&
                       randalloc::one_band_region_check(mu, mu, 0.0, mu * (1 - 1e-6));
  c.require(witness, "non-convexity witness failed");
  if (c.ok) c.detail = fmt("construction vs closed form max %.2g; midpoint of (mu,0),(0,mu) outside", worst);
  return c;
}

Check criterion7() {
  Check c;
  const auto t0 = Clock::now();
  const RateMatrix r = two_band();
  const char* names[3] = {"S", "S_hat", "fixed"};
  int bad[3] = {0, 0, 0}, inconclusive = 0;
  for (int i = 0; i < 20; ++i) {
    const double th = (i + 0.5) / 20 * std::numbers::pi / 2;
    const std::vector<double> d{std::cos(th), std::sin(th)};
    const boundary::RayPoint rays[3] = {boundary::orthogonal_ray(r.mu, d), boundary::random_ray(r.mu, d),
                                        boundary::fixed_ray(r.mu, d)};
    for (int s = 0; s < 3; ++s) {
      c.require(rays[s].status == Status::ok, "no boundary point");
      for (double f : {0.9, 1.1}) {
        sim::SimConfig cfg;
        cfg.n_slots = 100000;
        cfg.warmup = 10000;
        cfg.seed = 7000 + 100 * s + i;
        const std::vector<double> lam{f * rays[s].t * d[0], f * rays[s].t * d[1]};
        const sim::SimResult res = sim::run(r, lam, rays[s].policy, cfg);
        bool all_stable = true, any_unstable = false;
        for (sim::Verdict v : res.secondary_verdicts) {
          all_stable = all_stable && v == sim::Verdict::stable;
          any_unstable = any_unstable || v == sim::Verdict::unstable;
          inconclusive += v == sim::Verdict::inconclusive;
        }
        if (f < 1.0 ? !all_stable : !any_unstable) ++bad[s];
      }
    }
  }
  for (int s = 0; s < 3; ++s)
    c.require(bad[s] == 0, std::string(names[s]) + ": " + std::to_string(bad[s]) + " misclassified");
  const double secs = seconds_since(t0);
  c.require(secs < 120.0, fmt("runtime %.1fs", secs));
  if (c.ok)
    c.detail = fmt("3 systems x 20 rays x {0.9,1.1}: 0 misclassified (%g inconclusive queue verdicts), %.1fs",
                   inconclusive, secs);
  return c;
}

Check criterion8() {
  Check c;
  const RateMatrix r = two_band();
  sim::SimConfig cfg;
  cfg.n_slots = 100000;
  cfg.warmup = 10000;
  double worst = 0.0;
  const std::vector<double> saturated{1.0, 1.0};

  const auto p = orthogonal::envelope_point(r.mu, std::vector<double>{0.4, 0.0}, 1);
  const std::vector<Matrix> omegas{p.omega_star, Matrix{{1, 0}, {0, 1}}, Matrix{{0.2, 0.5}, {0.6, 0.3}}};
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    cfg.seed = 8000 + i;
    const auto res = sim::run(r, saturated, sim::OrthogonalPolicy{schedule::schedule_for(omegas[i])}, cfg);
    const auto thr = sim::empirical_throughput(res);
    for (std::size_t k = 0; k < 2; ++k)
      worst = std::max(worst, std::abs(thr[k] - secondary_service_rate(omegas[i], r, k)));
  }
  const std::vector<Matrix> gammas{Matrix{{0.4, 1.0}, {0.6, 0.0}}, Matrix{{0.5, 0.5}, {0.5, 0.5}},
                                   Matrix{{0.1, 0.7}, {0.9, 0.3}}};
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    cfg.seed = 8100 + i;
    const auto res = sim::run(r, saturated, sim::RandomPolicy{gammas[i]}, cfg);
    const auto thr = sim::empirical_throughput(res);
    for (std::size_t k = 0; k < 2; ++k)
      worst = std::max(worst, std::abs(thr[k] - randalloc::conditional_service_rate(gammas[i], {true, true}, r.mu, k)));
  }
  c.require(worst <= 0.01, fmt("max deviation %.4f", worst));
  if (c.ok) c.detail = fmt("3 orthogonal + 3 random policies, max |empirical - analytic| = %.4f", worst);
  return c;
}

Check criterion9() {
  Check c;
  gen::Gen g(9001);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t bands = 1 + g.index(4), users = 2 + g.index(3);
    const Matrix mu = g.rates(bands, users);
    auto point = [&] {
      const Matrix w = g.substochastic(bands, users);
      std::vector<double> l(users, 0.0);
      for (std::size_t k = 0; k < users; ++k)
        for (std::size_t j = 0; j < bands; ++j) l[k] += w(j, k) * mu(j, k);
      return l;
    };
    const std::vector<double> a = point(), b = point();
    std::vector<double> mid(users);
    for (std::size_t k = 0; k < users; ++k) mid[k] = 0.5 * (a[k] + b[k]);
    const std::size_t k = g.index(users);
    bool ok = false;
    const double v = s_value(mu, mid, k, &ok);
    c.require(ok && v >= mid[k] - 1e-9, "midpoint outside the region");
    ++checked;
  }

  // Determinism: simulation results and CLI output.
  const RateMatrix r = two_band();
  sim::SimConfig cfg;
  cfg.seed = 9100;
  cfg.n_slots = 50000;
  auto trace_text = [&](const sim::Policy& pol) {
    std::ostringstream out;
    const auto res = sim::run(r, {0.2, 0.2}, pol, cfg);
    sim::write_trace_csv(out, res);
    for (const auto& q : res.secondary) out << q.arrivals << ' ' << q.departures << '\n';
    return out.str();
  };
  const std::vector<sim::Policy> policies{sim::RandomPolicy{Matrix{{0.3, 0.6}, {0.7, 0.4}}},
                                          sim::OrthogonalPolicy{schedule::schedule_for(Matrix{{0.4, 0.6}, {0.6, 0.4}})},
                                          sim::FixedPolicy{{{1, 0}}}};
  for (const auto& pol : policies) c.require(trace_text(pol) == trace_text(pol), "simulation not reproducible");

  auto cli_text = [] {
    const std::string path = kScenarios + "/two_band.yaml";
    const char* argv[] = {"bandalloc", "simulate", "--scenario", path.c_str(), "--system", "S_hat", "--seed", "5", "--json"};
    std::ostringstream out, err;
    cli::run(9, argv, out, err);
    return out.str();
  };
  const std::string first = cli_text();
  c.require(!first.empty() && first == cli_text(), "CLI output not byte-identical");
  if (c.ok) c.detail = "500 midpoints feasible; simulation and CLI output byte-identical across runs";
  return c;
}

Check sweep_five_band() {
  Check c;
  const RateMatrix r = rate_matrix(io::load_scenario(kScenarios + "/five_band.yaml"));
  c.require(std::abs(r.mu(0, 0) - 0.27) <= 1e-15, "mu11 != 0.27");
  const std::vector<double> others{0.0, 0.0, 0.1, 0.1};
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back(0.009 * i);
  auto t0 = Clock::now();
  const auto pts = orthogonal::sweep_envelope(r.mu, 0, 1, grid, others);
  const double s_secs = seconds_since(t0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].feasible() && pts[i - 1].feasible())
      c.require(pts[i].max_rate <= pts[i - 1].max_rate + 1e-9, "envelope not monotone");
  t0 = Clock::now();
  std::vector<double> lam = others;
  for (double x : grid) {
    lam[0] = x;
    fixedalloc::best_fixed_max(r.mu, lam, 1);
  }
  const double f_secs = seconds_since(t0);
  c.require(s_secs < 10.0 && f_secs < 10.0, fmt("sweep took %.1fs / %.1fs", s_secs, f_secs));
  if (c.ok) c.detail = fmt("5 bands x 4 users, 100-point sweeps: S %.3fs, fixed %.3fs", s_secs, f_secs);
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> all{
      {"criterion 1", criterion1}, {"criterion 2", criterion2}, {"criterion 3", criterion3},
      {"criterion 4", criterion4}, {"criterion 5", criterion5}, {"criterion 6", criterion6},
      {"criterion 7", criterion7}, {"criterion 8", criterion8}, {"criterion 9", criterion9},
      {"five-band sweep", sweep_five_band}};
  int failures = 0;
  for (const auto& [name, fn] : all) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failures += !c.ok;
    std::printf("%s %s: %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
