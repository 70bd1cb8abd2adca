#include "bandalloc/orthogonal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bandalloc/errors.hpp"
#include "bandalloc/optim.hpp"

namespace bandalloc::orthogonal {
namespace {

void check_rates(std::span<const double> lambdas, std::size_t users, std::size_t k) {
  if (lambdas.size() != users) throw DimensionError("rate vector length must equal M_s");
  if (k >= users) throw DimensionError("user index out of range");
  for (std::size_t l = 0; l < users; ++l) {
    if (l == k) continue;
    if (!std::isfinite(lambdas[l]) || lambdas[l] < 0.0)
      throw std::invalid_argument("fixed arrival rates must be finite and nonnegative");
  }
}

// Row-sum and column-sum constraints over omega laid out as j * M_s + k,
// padded with `extra` trailing variables.
optim::LpProblem assignment_polytope(std::size_t bands, std::size_t users, std::size_t extra) {
  const std::size_t n = bands * users + extra;
  optim::LpProblem lp = optim::LpProblem::nonnegative(n);
  for (std::size_t j = 0; j < bands; ++j) {
    std::vector<double> row(n, 0.0);
    for (std::size_t k = 0; k < users; ++k) row[j * users + k] = 1.0;
    lp.add_constraint(std::move(row), 1.0);
  }
  for (std::size_t k = 0; k < users; ++k) {
    std::vector<double> row(n, 0.0);
    for (std::size_t j = 0; j < bands; ++j) row[j * users + k] = 1.0;
    lp.add_constraint(std::move(row), 1.0);
  }
  return lp;
}

Matrix unpack_omega(const std::vector<double>& x, std::size_t bands, std::size_t users) {
  Matrix omega(bands, users);
  for (std::size_t j = 0; j < bands; ++j)
    for (std::size_t k = 0; k < users; ++k) omega(j, k) = std::max(x[j * users + k], 0.0);
  return omega;
}

Status from_lp(optim::LpStatus s) {
  switch (s) {
    case optim::LpStatus::optimal:
      return Status::ok;
    case optim::LpStatus::infeasible:
      return Status::infeasible;
    default:
      return Status::solver_failure;
  }
}

}  // namespace

EnvelopePoint envelope_point(const Matrix& mu, std::span<const double> lambdas, std::size_t k) {
  const std::size_t bands = mu.rows();
  const std::size_t users = mu.cols();
  check_rates(lambdas, users, k);

  EnvelopePoint out;
  out.fixed_rates.assign(lambdas.begin(), lambdas.end());
  out.free_user = k;

  optim::LpProblem lp = assignment_polytope(bands, users, 0);
  for (std::size_t j = 0; j < bands; ++j) lp.objective[j * users + k] = mu(j, k);
  for (std::size_t l = 0; l < users; ++l) {
    if (l == k) continue;
    std::vector<double> row(lp.num_vars(), 0.0);
    for (std::size_t j = 0; j < bands; ++j) row[j * users + l] = -mu(j, l);
    lp.add_constraint(std::move(row), -lambdas[l]);
  }

  const optim::LpSolution sol = optim::solve_lp(lp);
  out.status = from_lp(sol.status);
  if (out.status != Status::ok) return out;
  out.omega_star = unpack_omega(sol.point, bands, users);
  out.max_rate = std::max(sol.value, 0.0);
  return out;
}

EnvelopePoint envelope_point(const RateMatrix& rates, std::span<const double> lambdas,
                             std::size_t k) {
  return envelope_point(rates.mu, lambdas, k);
}

bool in_closure(const Matrix& mu, std::span<const double> lambdas, double tol) {
  const EnvelopePoint p = envelope_point(mu, lambdas, 0);
  return p.feasible() && lambdas[0] <= p.max_rate + tol;
}

ScalingResult max_scaling(const Matrix& mu, std::span<const double> direction) {
  const std::size_t bands = mu.rows();
  const std::size_t users = mu.cols();
  if (direction.size() != users) throw DimensionError("direction length must equal M_s");
  bool any = false;
  for (double d : direction) {
    if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("direction must be nonnegative");
    any = any || d > 0.0;
  }
  if (!any) throw std::invalid_argument("direction must be nonzero");

  optim::LpProblem lp = assignment_polytope(bands, users, 1);
  const std::size_t t = bands * users;
  lp.objective[t] = 1.0;
  for (std::size_t k = 0; k < users; ++k) {
    std::vector<double> row(lp.num_vars(), 0.0);
    for (std::size_t j = 0; j < bands; ++j) row[j * users + k] = -mu(j, k);
    row[t] = direction[k];
    lp.add_constraint(std::move(row), 0.0);
  }

  ScalingResult out;
  const optim::LpSolution sol = optim::solve_lp(lp);
  out.status = from_lp(sol.status);
  if (out.status != Status::ok) return out;
  out.t = std::max(sol.point[t], 0.0);
  out.omega = unpack_omega(sol.point, bands, users);
  return out;
}

// max eps (mu12 - mu22)  s.t.  lambda1 - mu11 <= eps (mu21 - mu11),  0 <= eps <= 1.
TwoByTwo two_by_two_closed_form(const Matrix& mu, double lambda1) {
  if (mu.rows() != 2 || mu.cols() != 2) throw DimensionError("closed form needs a 2x2 rate matrix");
  if (!std::isfinite(lambda1) || lambda1 < 0.0)
    throw std::invalid_argument("lambda1 must be finite and nonnegative");

  const double mu11 = mu(0, 0), mu12 = mu(0, 1), mu21 = mu(1, 0), mu22 = mu(1, 1);
  const double kappa = (mu21 != mu11) ? (lambda1 - mu11) / (mu21 - mu11) : 0.0;

  TwoByTwo out;
  auto done = [&](double eps) {
    out.status = Status::ok;
    out.epsilon = eps;
    out.lambda2_max = eps * mu12 + (1.0 - eps) * mu22;
    return out;
  };

  if (mu12 > mu22 && mu21 < mu11 && lambda1 < mu11) return done(std::min(kappa, 1.0));
  if (mu12 > mu22 && mu21 >= mu11 && lambda1 <= mu21) return done(1.0);
  if (mu12 < mu22 && mu21 > mu11 && lambda1 <= mu21) return done(std::max(kappa, 0.0));
  if (mu12 < mu22 && mu21 < mu11 && lambda1 <= mu11) return done(0.0);
  if (mu12 == mu22) {
    if (mu21 > mu11 && lambda1 <= mu21) return done(std::max(kappa, 0.0));
    if (mu21 <= mu11 && lambda1 <= mu11) return done(0.0);
  }
  if ((mu21 < mu11 && lambda1 > mu11) || (mu21 > mu11 && lambda1 > mu21)) return out;

  const double lambdas[2] = {lambda1, 0.0};
  const EnvelopePoint p = envelope_point(mu, lambdas, 1);
  out.via_lp = true;
  out.status = p.status;
  if (p.feasible()) {
    out.epsilon = p.omega_star(0, 1);
    out.lambda2_max = p.max_rate;
  }
  return out;
}

EnvelopePoint one_band_envelope(std::span<const double> mu_row, std::span<const double> lambdas,
                                std::size_t k) {
  const std::size_t users = mu_row.size();
  check_rates(lambdas, users, k);

  EnvelopePoint out;
  out.fixed_rates.assign(lambdas.begin(), lambdas.end());
  out.free_user = k;

  double used = 0.0;
  Matrix omega(1, users);
  for (std::size_t l = 0; l < users; ++l) {
    if (l == k || lambdas[l] == 0.0) continue;
    if (mu_row[l] <= 0.0) return out;
    omega(0, l) = lambdas[l] / mu_row[l];
    used += omega(0, l);
  }
  if (used > 1.0 + 1e-12) return out;
  omega(0, k) = std::max(1.0 - used, 0.0);
  out.status = Status::ok;
  out.max_rate = mu_row[k] * omega(0, k);
  out.omega_star = std::move(omega);
  return out;
}

SymmetricSu symmetric_su_max(std::span<const double> g, std::size_t num_users) {
  if (num_users == 0) throw std::invalid_argument("need at least one user");
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });

  SymmetricSu out;
  out.theta.assign(g.size(), 0.0);
  const std::size_t top = std::min(g.size(), num_users);
  for (std::size_t i = 0; i < top; ++i) {
    out.theta[order[i]] = 1.0 / static_cast<double>(num_users);
    out.lambda_max += out.theta[order[i]] * g[order[i]];
  }
  return out;
}

bool symmetric_band_region_check(std::span<const double> beta, std::size_t num_bands,
                                 std::span<const double> lambdas) {
  if (beta.size() != lambdas.size()) throw DimensionError("beta and lambdas differ in length");
  double load = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (!(lambdas[k] < beta[k])) return false;
    load += lambdas[k] / beta[k];
  }
  if (num_bands < beta.size()) return load < static_cast<double>(num_bands);
  return true;
}

EnvelopePoint symmetric_band_envelope(std::span<const double> beta, std::size_t num_bands,
                                      std::span<const double> lambdas, std::size_t k) {
  const std::size_t users = beta.size();
  check_rates(lambdas, users, k);
  if (num_bands == 0) throw std::invalid_argument("need at least one band");

  EnvelopePoint out;
  out.fixed_rates.assign(lambdas.begin(), lambdas.end());
  out.free_user = k;

  const double bands = static_cast<double>(num_bands);
  std::vector<double> share(users, 0.0);
  double used = 0.0;
  for (std::size_t l = 0; l < users; ++l) {
    if (l == k || lambdas[l] == 0.0) continue;
    if (lambdas[l] > beta[l]) return out;
    share[l] = lambdas[l] / beta[l];
    used += share[l];
  }
  if (used > bands + 1e-12) return out;
  share[k] = std::clamp(bands - used, 0.0, 1.0);

  out.status = Status::ok;
  out.max_rate = beta[k] * share[k];
  out.omega_star = Matrix(num_bands, users);
  for (std::size_t j = 0; j < num_bands; ++j)
    for (std::size_t l = 0; l < users; ++l) out.omega_star(j, l) = share[l] / bands;
  return out;
}

double fully_symmetric_max(std::size_t num_bands, std::size_t num_users, double beta) {
  if (num_bands == 0 || num_users == 0) throw std::invalid_argument("empty network");
  const double ratio = static_cast<double>(num_bands) / static_cast<double>(num_users);
  return std::min(ratio, 1.0) * beta;
}

std::vector<EnvelopePoint> sweep_envelope(const Matrix& mu, std::size_t axis,
                                          std::size_t free_user, std::span<const double> grid,
                                          std::span<const double> others) {
  if (axis >= mu.cols() || free_user >= mu.cols() || axis == free_user)
    throw DimensionError("axis and free user must be distinct valid users");
  if (others.size() != mu.cols()) throw DimensionError("rate profile length must equal M_s");
  std::vector<double> lambdas(others.begin(), others.end());
  std::vector<EnvelopePoint> out;
  out.reserve(grid.size());
  for (double g : grid) {
    lambdas[axis] = g;
    out.push_back(envelope_point(mu, lambdas, free_user));
  }
  return out;
}

}  // namespace bandalloc::orthogonal
