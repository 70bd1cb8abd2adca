#include "bandalloc/randalloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bandalloc/errors.hpp"
#include "bandalloc/optim.hpp"

namespace bandalloc::randalloc {
namespace {

constexpr double kMargin = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kGoldenIters = 60;
constexpr int kBisectIters = 60;

void check_2x2(const Matrix& mu) {
  if (mu.rows() != 2 || mu.cols() != 2) throw DimensionError("expected a 2x2 rate matrix");
}

void check_rate(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw std::invalid_argument("arrival rate must be finite and nonnegative");
}

Matrix swap_users(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.rows(); ++j) {
    out(j, 0) = m(j, 1);
    out(j, 1) = m(j, 0);
  }
  return out;
}

Matrix selection(double gamma21, double gamma22) {
  return Matrix{{1.0 - gamma21, 1.0 - gamma22}, {gamma21, gamma22}};
}

struct Candidate {
  double value = kNegInf;
  double gamma21 = 0.0;
  double gamma22 = 0.0;
};

// Best lambda1 for a fixed gamma21 via the single-variable fractional program.
Candidate solve_family_member(const Matrix& mu, double lambda2, double gamma21) {
  const optim::FractionalCoeffs c = optim::FractionalCoeffs::from_rates(
      mu(0, 0), mu(0, 1), mu(1, 0), mu(1, 1), lambda2, gamma21);
  const optim::FractionalOptimum opt = optim::maximize_fractional_1d(c);
  if (!opt.feasible) return {};
  const double base = (1.0 - gamma21) * mu(0, 0) + gamma21 * mu(1, 0);
  if (lambda2 == 0.0) return {base, gamma21, opt.gamma22};
  const double denom = c.D + opt.gamma22 * c.C;
  if (!(denom > 0.0)) return {};
  return {base + lambda2 * c.objective(opt.gamma22), gamma21, opt.gamma22};
}

}  // namespace

double conditional_service_rate(const Matrix& gamma, const std::vector<bool>& nonempty,
                                const Matrix& mu, std::size_t k) {
  if (gamma.rows() != mu.rows() || gamma.cols() != mu.cols() || nonempty.size() != mu.cols())
    throw DimensionError("selection matrix, rate matrix and user set disagree in shape");
  if (k >= mu.cols()) throw DimensionError("user index out of range");
  if (!nonempty[k]) throw std::invalid_argument("user k must be in the nonempty set");
  double rate = 0.0;
  for (std::size_t j = 0; j < mu.rows(); ++j) {
    double term = mu(j, k) * gamma(j, k);
    for (std::size_t v = 0; v < mu.cols(); ++v)
      if (v != k && nonempty[v]) term *= 1.0 - gamma(j, v);
    rate += term;
  }
  return rate;
}

std::optional<double> dominant1_rate(const Matrix& mu, double lambda2, double gamma21,
                                     double gamma22) {
  check_2x2(mu);
  const double g11 = 1.0 - gamma21, g21 = gamma21;
  const double g12 = 1.0 - gamma22, g22 = gamma22;
  const double mu_s2 = g12 * g21 * mu(0, 1) + g22 * g11 * mu(1, 1);
  if (lambda2 > mu_s2) return std::nullopt;
  const double busy = lambda2 > 0.0 ? lambda2 / mu_s2 : 0.0;
  const double clash_free = g11 * g22 * mu(0, 0) + g21 * g12 * mu(1, 0);
  const double alone = g11 * mu(0, 0) + g21 * mu(1, 0);
  return busy * clash_free + (1.0 - busy) * alone;
}

DominantEnvelopePoint dominant1_envelope_2x2(const Matrix& mu, double lambda2) {
  check_2x2(mu);
  check_rate(lambda2);

  DominantEnvelopePoint out;
  out.fixed_lambda = lambda2;
  out.dominant = Dominant::first;
  if (lambda2 > std::max(mu(0, 1), mu(1, 1))) return out;

  Candidate best;
  auto consider = [&](double g21) {
    const Candidate c = solve_family_member(mu, lambda2, g21);
    if (c.value > best.value) best = c;
    return c.value;
  };

  const int steps = static_cast<int>(std::lround(1.0 / kGammaStep));
  for (int i = 0; i <= steps; ++i) consider(static_cast<double>(i) / steps);

  if (best.value != kNegInf) {
    // Golden-section pass around the best grid point.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(best.gamma21 - kGammaStep, 0.0);
    double b = std::min(best.gamma21 + kGammaStep, 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = consider(x1), f2 = consider(x2);
    for (int it = 0; it < kGoldenIters; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = consider(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = consider(x1);
      }
    }
  }

  if (best.value == kNegInf) return out;
  out.status = Status::ok;
  out.max_lambda = std::max(best.value, 0.0);
  out.gamma_star = selection(best.gamma21, best.gamma22);
  return out;
}

DominantEnvelopePoint dominant2_envelope_2x2(const Matrix& mu, double lambda1) {
  check_2x2(mu);
  DominantEnvelopePoint out = dominant1_envelope_2x2(swap_users(mu), lambda1);
  out.dominant = Dominant::second;
  if (out.feasible()) out.gamma_star = swap_users(out.gamma_star);
  return out;
}

DominantEnvelopePoint union_envelope_2x2(const Matrix& mu, std::size_t axis, double x) {
  check_2x2(mu);
  check_rate(x);
  if (axis > 1) throw DimensionError("axis must be user 0 or 1");
  if (axis == 1) {
    DominantEnvelopePoint out = union_envelope_2x2(swap_users(mu), 0, x);
    if (out.feasible()) out.gamma_star = swap_users(out.gamma_star);
    out.dominant = out.dominant == Dominant::first ? Dominant::second : Dominant::first;
    return out;
  }

  // Second dominant system: direct envelope in the free coordinate.
  DominantEnvelopePoint best = dominant2_envelope_2x2(mu, x);

  // First dominant system: largest y whose envelope still reaches x. The
  // envelope is nonincreasing in y, so bisection applies.
  const DominantEnvelopePoint at_zero = dominant1_envelope_2x2(mu, 0.0);
  if (at_zero.feasible() && at_zero.max_lambda >= x) {
    double lo = 0.0;
    double hi = std::max(mu(0, 1), mu(1, 1));
    DominantEnvelopePoint lo_point = at_zero;
    const DominantEnvelopePoint at_hi = dominant1_envelope_2x2(mu, hi);
    if (at_hi.feasible() && at_hi.max_lambda >= x) {
      lo = hi;
      lo_point = at_hi;
    } else {
      for (int it = 0; it < kBisectIters; ++it) {
        const double mid = 0.5 * (lo + hi);
        const DominantEnvelopePoint p = dominant1_envelope_2x2(mu, mid);
        if (p.feasible() && p.max_lambda >= x) {
          lo = mid;
          lo_point = p;
        } else {
          hi = mid;
        }
      }
    }
    if (!best.feasible() || lo > best.max_lambda) {
      best.status = Status::ok;
      best.max_lambda = lo;
      best.gamma_star = lo_point.gamma_star;
      best.dominant = Dominant::first;
    }
  }
  best.fixed_lambda = x;
  return best;
}

bool region_2x2_check(const Matrix& mu, double lambda1, double lambda2) {
  check_2x2(mu);
  check_rate(lambda1);
  check_rate(lambda2);
  const DominantEnvelopePoint d1 = dominant1_envelope_2x2(mu, lambda2);
  if (d1.feasible() && lambda1 < d1.max_lambda - kMargin) return true;
  const DominantEnvelopePoint d2 = dominant2_envelope_2x2(mu, lambda1);
  return d2.feasible() && lambda2 < d2.max_lambda - kMargin;
}

std::optional<Matrix> one_band_gamma_opt([[maybe_unused]] double mu11, double mu12,
                                         double lambda2) {
  check_rate(lambda2);
  if (lambda2 > mu12) return std::nullopt;
  const double root = lambda2 > 0.0 ? std::sqrt(lambda2 / mu12) : 0.0;
  const double g11 = 1.0 - std::min(root, 1.0);
  return Matrix{{g11, 1.0}, {1.0 - g11, 0.0}};
}

bool one_band_region_check(double mu11, double mu12, double lambda1, double lambda2) {
  check_rate(lambda1);
  check_rate(lambda2);
  auto term = [](double lambda, double mu) {
    if (lambda == 0.0) return 0.0;
    if (!(mu > 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(lambda / mu);
  };
  return term(lambda1, mu11) + term(lambda2, mu12) < 1.0 - kMargin;
}

std::optional<double> one_band_boundary(double mu11, double mu12, double lambda2) {
  check_rate(lambda2);
  if (lambda2 > mu12) return std::nullopt;
  const double root = lambda2 > 0.0 ? std::sqrt(lambda2 / mu12) : 0.0;
  const double slack = 1.0 - std::min(root, 1.0);
  return mu11 * slack * slack;
}

}  // namespace bandalloc::randalloc
