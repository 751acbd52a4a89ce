#pragma once

// Scaled conjugate gradient (Moller 1993).
//
// Conjugate directions with a finite-difference estimate of the curvature
// along the search direction, and a Levenberg-Marquardt style damping term
// lambda that replaces the line search. One iteration costs one objective
// and at most two gradient evaluations.

#include "bbc/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bbc {

struct ScgOptions {
  long iterations = 100;
  double sigma0 = 1e-4;
  double lambda0 = 1e-6;
  double lambda_min = 1e-15;
  double lambda_max = 1e100;
  // Stop once an accepted step lowers the objective by less than
  // reduction_tol while the gradient norm is below gradient_tol.
  double reduction_tol = 1e-10;
  double gradient_tol = 1e-8;
};

template <typename Scalar>
struct ScgResult {
  Vector<Scalar> x;
  // trace[0] is the initial objective; trace[j] the objective after
  // iteration j (unchanged on rejected steps).
  std::vector<Scalar> trace;
  long iterations = 0;
  bool converged = false;
};

template <typename Scalar, typename Objective, typename Gradient>
ScgResult<Scalar> scg_minimize(Objective&& objective, Gradient&& gradient, Vector<Scalar> x,
                               const ScgOptions& options) {
  if (options.iterations < 1) throw OptimizationError("iteration budget must be at least 1", 0);

  auto checked_value = [&](const Vector<Scalar>& at, long iteration) {
    const Scalar v = objective(at);
    if (!std::isfinite(v)) throw OptimizationError("non-finite objective", iteration);
    return v;
  };
  auto checked_gradient = [&](const Vector<Scalar>& at, long iteration) {
    Vector<Scalar> g = gradient(at);
    if (!g.allFinite()) throw OptimizationError("non-finite gradient", iteration);
    return g;
  };

  const Index n = x.size();
  ScgResult<Scalar> result;
  Scalar f_old = checked_value(x, 0);
  Vector<Scalar> g_new = checked_gradient(x, 0);
  Vector<Scalar> g_old = g_new;
  Vector<Scalar> d = -g_new;
  result.trace.push_back(f_old);

  bool success = true;
  Index n_success = 0;
  Scalar lambda = Scalar(options.lambda0);
  Scalar mu = 0, kappa = 0, gamma = 0;
  const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::numeric_limits<Scalar>::epsilon();

  for (long j = 1; j <= options.iterations; ++j) {
    if (success) {
      mu = d.dot(g_new);
      if (mu >= 0) {
        d = -g_new;
        mu = d.dot(g_new);
      }
      kappa = d.squaredNorm();
      if (kappa < tiny) {
        result.converged = true;
        break;
      }
      const Scalar sigma = Scalar(options.sigma0) / std::sqrt(kappa);
      const Vector<Scalar> g_plus = checked_gradient(x + sigma * d, j);
      gamma = d.dot(g_plus - g_new) / sigma;
    }

    // Damped curvature; force positive definiteness when needed.
    Scalar delta = gamma + lambda * kappa;
    if (delta <= 0) {
      delta = lambda * kappa;
      lambda = lambda - gamma / kappa;
    }
    const Scalar step = -mu / delta;
    const Vector<Scalar> x_new = x + step * d;
    const Scalar f_new = checked_value(x_new, j);

    // Comparison of actual to predicted reduction.
    const Scalar ratio = 2 * (f_new - f_old) / (step * mu);
    if (ratio >= 0) {
      success = true;
      ++n_success;
      x = x_new;
    } else {
      success = false;
    }
    result.trace.push_back(success ? f_new : f_old);
    result.iterations = j;

    if (success) {
      g_old = g_new;
      g_new = checked_gradient(x, j);
      const bool small_reduction = std::abs(f_new - f_old) < Scalar(options.reduction_tol);
      f_old = f_new;
      if (small_reduction && g_new.norm() < Scalar(options.gradient_tol)) {
        result.converged = true;
        break;
      }
    }

    if (ratio < Scalar(0.25)) lambda = std::min<Scalar>(4 * lambda, Scalar(options.lambda_max));
    if (ratio > Scalar(0.75)) lambda = std::max<Scalar>(lambda / 2, Scalar(options.lambda_min));

    if (n_success == n) {
      d = -g_new;
      n_success = 0;
    } else if (success) {
      const Scalar beta = (g_old - g_new).dot(g_new) / mu;
      d = beta * d - g_new;
    }
  }
  result.x = std::move(x);
  return result;
}

}  // namespace bbc
