#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace bandalloc::optim {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kPivotTol = 1e-12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// maximize objective . x
// subject to rows[i] . x <= rhs[i], lower[v] <= x[v] <= upper[v].
// Lower bounds must be finite; upper bounds may be +inf.
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }

  // Problem over n variables bounded to [0, +inf) with no constraints yet.
  static LpProblem nonnegative(std::size_t n);
  void add_constraint(std::vector<double> coeffs, double bound);
};

enum class LpStatus { optimal, infeasible, unbounded, solver_failure };

struct LpSolution {
  LpStatus status = LpStatus::solver_failure;
  double value = 0.0;
  std::vector<double> point;
};

// Two-phase dense tableau simplex with Bland's rule. An "optimal" result is
// re-checked against the original constraints; a point that violates them by
// more than kFeasibilityTol is reported as solver_failure.
LpSolution solve_lp(const LpProblem& problem);

// Largest constraint or bound violation of x (0 when feasible).
double max_violation(const LpProblem& problem, std::span<const double> x);

// Coefficients of the single-variable linear-fractional program
//   maximize (g K1 - K2) / (D + g C)  s.t.  lambda_s2 - gamma21 mu12 <= g C,  0 <= g <= 1
// obtained from the first dominant system of two users on two bands by fixing
// gamma21 (the probability that user 1 picks band 2). The variable g is gamma22.
struct FractionalCoeffs {
  double K1 = 0.0;
  double K2 = 0.0;
  double C = 0.0;
  double D = 0.0;
  double lambda_s2 = 0.0;
  double gamma21 = 0.0;

  // mu is indexed [band][user], zero based.
  static FractionalCoeffs from_rates(double mu11, double mu12, double mu21, double mu22,
                                     double lambda_s2, double gamma21);

  // K2 C + D K1, the numerator of d/dg of the objective.
  double derivative_numerator() const { return K2 * C + D * K1; }
  // lambda_s2 - gamma21 mu12 (D = gamma21 mu12), the left side of the service constraint.
  double slack_offset() const { return lambda_s2 - D; }
  double objective(double gamma22) const { return (gamma22 * K1 - K2) / (D + gamma22 * C); }
};

struct FractionalOptimum {
  bool feasible = false;
  double gamma22 = 0.0;
};

FractionalOptimum maximize_fractional_1d(const FractionalCoeffs& coeffs);

// Box-constrained brute-force search used as an oracle. Grid points are
// lo + i*step up to hi (inclusive within 1e-9 of a step). The first strictly
// better point in lexicographic order wins ties.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

using Objective = std::function<double(std::span<const double>)>;
using Predicate = std::function<bool(std::span<const double>)>;

struct GridOptimum {
  std::vector<double> point;
  double value = 0.0;
};

std::optional<GridOptimum> grid_search(const Objective& objective, const Box& box,
                                       const Predicate& constraint, double step);

}  // namespace bandalloc::optim
