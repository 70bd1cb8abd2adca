#include "bandalloc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bandalloc::optim {

LpProblem LpProblem::nonnegative(std::size_t n) {
  LpProblem p;
  p.objective.assign(n, 0.0);
  p.lower.assign(n, 0.0);
  p.upper.assign(n, kInf);
  return p;
}

void LpProblem::add_constraint(std::vector<double> coeffs, double bound) {
  if (coeffs.size() != num_vars()) throw std::invalid_argument("constraint width mismatch");
  rows.push_back(std::move(coeffs));
  rhs.push_back(bound);
}

double max_violation(const LpProblem& problem, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    double lhs = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) lhs += problem.rows[i][v] * x[v];
    worst = std::max(worst, lhs - problem.rhs[i]);
  }
  for (std::size_t v = 0; v < x.size(); ++v) {
    worst = std::max(worst, problem.lower[v] - x[v]);
    worst = std::max(worst, x[v] - problem.upper[v]);
  }
  return worst;
}

namespace {

// Dense simplex tableau in equality form with a nonnegative basic solution.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), cells_(rows * (cols + 1), 0.0), cost_(cols + 1, 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return cells_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double rhs(std::size_t i) const { return at(i, n_); }
  std::size_t& basic(std::size_t i) { return basis_[i]; }
  std::size_t basic(std::size_t i) const { return basis_[i]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  // Objective value of the current basis under the active costs (maximize).
  double value() const { return -cost_[n_]; }

  // Loads costs and prices out the basic columns so cost_ holds reduced costs.
  void set_costs(const std::vector<double>& c) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    std::copy(c.begin(), c.end(), cost_.begin());
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) cost_[j] -= cb * at(i, j);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = cost_[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= n_; ++j) cost_[j] -= f * at(r, j);
      cost_[c] = 0.0;
    }
    basis_[r] = c;
  }

  enum class Outcome { optimal, unbounded, iteration_limit };

  // Bland's rule: lowest-index improving column, lowest-index basic variable
  // among minimum-ratio rows.
  Outcome run(const std::vector<bool>& allowed, std::size_t max_iter) {
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (allowed[j] && cost_[j] > kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return Outcome::optimal;

      std::size_t leave = m_;
      double best = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(rhs(i), 0.0) / a;
        if (ratio < best - kPivotTol ||
            (ratio <= best + kPivotTol && leave != m_ && basis_[i] < basis_[leave])) {
          if (ratio < best - kPivotTol) best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return Outcome::unbounded;
      pivot(leave, enter);
    }
    return Outcome::iteration_limit;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> cells_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  const std::size_t n = problem.num_vars();
  if (problem.rows.size() != problem.rhs.size() || problem.lower.size() != n ||
      problem.upper.size() != n)
    throw std::invalid_argument("solve_lp: inconsistent problem dimensions");
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(problem.lower[v]) || problem.lower[v] > problem.upper[v])
      throw std::invalid_argument("solve_lp: bounds must satisfy finite lo <= hi");
  }
  for (const auto& row : problem.rows) {
    if (row.size() != n) throw std::invalid_argument("solve_lp: constraint width mismatch");
    for (double a : row)
      if (!std::isfinite(a)) throw std::invalid_argument("solve_lp: non-finite coefficient");
  }

  // Shift x = lower + y, y >= 0, and turn finite upper bounds into rows.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    double b = problem.rhs[i];
    for (std::size_t v = 0; v < n; ++v) b -= problem.rows[i][v] * problem.lower[v];
    rows.push_back(problem.rows[i]);
    rhs.push_back(b);
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(problem.upper[v])) continue;
    std::vector<double> row(n, 0.0);
    row[v] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(problem.upper[v] - problem.lower[v]);
  }

  const std::size_t m = rows.size();
  std::size_t artificials = 0;
  for (double b : rhs)
    if (b < 0.0) ++artificials;
  const std::size_t slack0 = n;
  const std::size_t art0 = n + m;
  const std::size_t total = n + m + artificials;

  Tableau t(m, total);
  std::size_t next_art = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t v = 0; v < n; ++v) t.at(i, v) = sign * rows[i][v];
    t.at(i, slack0 + i) = sign;
    t.rhs(i) = sign * rhs[i];
    if (sign < 0.0) {
      t.at(i, next_art) = 1.0;
      t.basic(i) = next_art++;
    } else {
      t.basic(i) = slack0 + i;
    }
  }

  const std::size_t max_iter = 10000 + 100 * (m + total);
  std::vector<bool> allowed(total, true);
  LpSolution out;

  if (artificials > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t j = art0; j < total; ++j) phase1[j] = -1.0;
    t.set_costs(phase1);
    if (t.run(allowed, max_iter) != Tableau::Outcome::optimal) return out;
    if (-t.value() > kFeasibilityTol) {
      out.status = LpStatus::infeasible;
      return out;
    }
    // Pivot zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep a frozen artificial.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basic(i) < art0) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(t.at(i, j)) > kPivotTol) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = art0; j < total; ++j) allowed[j] = false;
  }

  std::vector<double> phase2(total, 0.0);
  std::copy(problem.objective.begin(), problem.objective.end(), phase2.begin());
  t.set_costs(phase2);
  switch (t.run(allowed, max_iter)) {
    case Tableau::Outcome::optimal:
      break;
    case Tableau::Outcome::unbounded:
      out.status = LpStatus::unbounded;
      return out;
    case Tableau::Outcome::iteration_limit:
      return out;
  }

  out.point = problem.lower;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basic(i) < n) out.point[t.basic(i)] += std::max(t.rhs(i), 0.0);
  }
  out.value = 0.0;
  for (std::size_t v = 0; v < n; ++v) out.value += problem.objective[v] * out.point[v];
  out.status = max_violation(problem, out.point) <= kFeasibilityTol ? LpStatus::optimal
                                                                     : LpStatus::solver_failure;
  return out;
}

FractionalCoeffs FractionalCoeffs::from_rates(double mu11, double mu12, double mu21, double mu22,
                                              double lambda_s2, double gamma21) {
  FractionalCoeffs c;
  const double gamma11 = 1.0 - gamma21;
  c.C = gamma11 * mu22 - gamma21 * mu12;
  c.D = gamma21 * mu12;
  c.K1 = gamma11 * mu11 - gamma21 * mu21;
  c.K2 = gamma11 * mu11;
  c.lambda_s2 = lambda_s2;
  c.gamma21 = gamma21;
  return c;
}

// The feasible set is {g in [0,1] : offset <= g C}. The objective is monotone
// in g with the sign of K2 C + D K1, so the optimum sits at the upper end of
// the feasible interval when that sign is positive and at the lower end
// otherwise. The branches below follow that case split on (sign, C, offset);
// zero-valued signs and C = 0, which the case list leaves open, take the
// lower end of the feasible interval.
FractionalOptimum maximize_fractional_1d(const FractionalCoeffs& coeffs) {
  const double slope = coeffs.derivative_numerator();
  const double C = coeffs.C;
  const double offset = coeffs.slack_offset();
  constexpr FractionalOptimum infeasible{false, 0.0};

  if (C > 0.0) {
    const double ratio = offset / C;
    if (ratio > 1.0) return infeasible;
    if (slope > 0.0) return {true, 1.0};
    return {true, std::max(ratio, 0.0)};
  }
  if (C < 0.0) {
    if (offset > 0.0) return infeasible;
    if (slope > 0.0 && offset < 0.0) return {true, std::min(offset / C, 1.0)};
    return {true, 0.0};
  }
  // C == 0: the constraint does not involve gamma22.
  if (offset > 0.0) return infeasible;
  return {true, slope > 0.0 ? 1.0 : 0.0};
}

std::optional<GridOptimum> grid_search(const Objective& objective, const Box& box,
                                       const Predicate& constraint, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_search: step must be positive");
  const std::size_t dims = box.lo.size();
  if (box.hi.size() != dims) throw std::invalid_argument("grid_search: box dimension mismatch");

  std::vector<std::size_t> counts(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    if (!std::isfinite(box.lo[d]) || !std::isfinite(box.hi[d]) || box.lo[d] > box.hi[d])
      throw std::invalid_argument("grid_search: box must be finite with lo <= hi");
    counts[d] = static_cast<std::size_t>(std::floor((box.hi[d] - box.lo[d]) / step + 1e-9)) + 1;
  }

  std::optional<GridOptimum> best;
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> point(dims);
  while (true) {
    for (std::size_t d = 0; d < dims; ++d)
      point[d] = std::min(box.lo[d] + static_cast<double>(idx[d]) * step, box.hi[d]);
    if (!constraint || constraint(point)) {
      const double v = objective(point);
      if (!best || v > best->value) best = GridOptimum{point, v};
    }
    // Odometer with the first coordinate most significant.
    std::size_t d = dims;
    while (d > 0) {
      --d;
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
      if (d == 0) return best;
    }
    if (dims == 0) return best;
  }
}

}  // namespace bandalloc::optim
