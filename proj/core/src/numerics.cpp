#include "gridforge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gridforge::numerics {

std::string to_string(Method m) {
  switch (m) {
    case Method::kExplicitRk4:
      return "explicit-rk4";
    case Method::kImplicitTrapezoidal:
      return "implicit-trapezoidal";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "explicit-rk4" || s == "rk4") return Method::kExplicitRk4;
  if (s == "implicit-trapezoidal" || s == "trapezoidal") return Method::kImplicitTrapezoidal;
  throw std::invalid_argument("unknown integration method '" + s + "'");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrator dt must be > 0");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("integrator newton_tol must be > 0");
  if (newton_max_iter < 1) throw std::invalid_argument("integrator newton_max_iter must be >= 1");
}

Matrix finite_difference_jacobian(const ResidualFn& f, const Vector& x, const Vector& fx,
                                  double rel_step) {
  const auto n = x.size();
  Matrix jac(fx.size(), n);
  Vector xp = x;
  Vector fp(fx.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    f(xp, fp);
    jac.col(j) = (fp - fx) / h;
    xp[j] = x[j];
  }
  return jac;
}

Stepper::Stepper(IntegratorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Stepper::step(double t, Vector& x, const DerivativeFn& f) {
  switch (cfg_.method) {
    case Method::kExplicitRk4:
      step_rk4(t, x, f);
      return;
    case Method::kImplicitTrapezoidal:
      step_trapezoidal(t, x, f);
      return;
  }
}

void Stepper::step_rk4(double t, Vector& x, const DerivativeFn& f) {
  const auto n = x.size();
  if (k1_.size() != n) {
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
  }
  const double h = cfg_.dt;
  f(t, x, k1_);
  tmp_ = x + (0.5 * h) * k1_;
  f(t + 0.5 * h, tmp_, k2_);
  tmp_ = x + (0.5 * h) * k2_;
  f(t + 0.5 * h, tmp_, k3_);
  tmp_ = x + h * k3_;
  f(t + h, tmp_, k4_);
  x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void Stepper::step_trapezoidal(double t, Vector& x, const DerivativeFn& f) {
  const auto n = x.size();
  const double h = cfg_.dt;
  if (f0_.size() != n) {
    f0_.resize(n);
    f1_.resize(n);
    residual_.resize(n);
  }
  f(t, x, f0_);
  // Residual of x1 = x0 + h/2 (f(x0) + f(x1)).
  const Vector x0 = x;
  const Vector base = x0 + (0.5 * h) * f0_;
  ResidualFn g = [&](const Vector& y, Vector& r) {
    Vector fy(n);
    f(t + h, y, fy);
    r = y - base - (0.5 * h) * fy;
  };

  // tolerance relative to the size of the terms being balanced
  const double tol = cfg_.newton_tol * (1.0 + std::max(inf_norm(x0), 0.5 * h * inf_norm(f0_)));

  Vector y = x0 + h * f0_;  // explicit Euler predictor
  g(y, residual_);
  double norm = inf_norm(residual_);
  if (norm <= tol) {
    x = y;
    return;
  }
  // Chord iteration: one Jacobian per step, refreshed once if progress stalls.
  Eigen::PartialPivLU<Matrix> lu(finite_difference_jacobian(g, y, residual_));
  bool refreshed = false;
  for (int it = 0; it < cfg_.newton_max_iter; ++it) {
    y -= lu.solve(residual_);
    const double prev = norm;
    g(y, residual_);
    norm = inf_norm(residual_);
    if (!std::isfinite(norm)) break;
    if (norm <= tol) {
      x = y;
      return;
    }
    if (norm > 0.5 * prev && !refreshed) {
      lu.compute(finite_difference_jacobian(g, y, residual_));
      refreshed = true;
    }
  }
  std::ostringstream msg;
  msg << "implicit trapezoidal step at t=" << t << " did not converge (residual " << norm << ")";
  throw StepFailure(msg.str(), norm);
}

Vector integrate_step(double t, const Vector& x, const DerivativeFn& f,
                      const IntegratorConfig& cfg) {
  Stepper stepper(cfg);
  Vector y = x;
  stepper.step(t, y, f);
  return y;
}

Vector solve_equilibrium(const ResidualFn& residual, const Vector& guess,
                         const EquilibriumOptions& opts) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw std::invalid_argument("solve_equilibrium: tol must be > 0 and max_iter >= 1");
  }
  Vector x = guess;
  Vector r(guess.size());
  residual(x, r);
  double norm = inf_norm(r);
  Vector best = x;
  double best_norm = norm;

  for (int it = 0; it < opts.max_iter && norm > opts.tol; ++it) {
    const Matrix jac = finite_difference_jacobian(residual, x, r, opts.fd_rel_step);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jac);
    const Vector dx = cod.solve(r);

    // Backtracking on the infinity norm keeps Newton from overshooting on
    // strongly nonlinear residuals (power flow far from the flat start).
    double lambda = 1.0;
    Vector trial = x - dx;
    Vector rt(r.size());
    residual(trial, rt);
    double trial_norm = inf_norm(rt);
    for (int ls = 0; ls < 8 && !(trial_norm < norm) ; ++ls) {
      lambda *= 0.5;
      trial = x - lambda * dx;
      residual(trial, rt);
      trial_norm = inf_norm(rt);
    }
    x = trial;
    r = rt;
    norm = trial_norm;
    if (std::isfinite(norm) && norm < best_norm) {
      best = x;
      best_norm = norm;
    }
  }
  if (!(best_norm <= opts.tol)) {
    std::ostringstream msg;
    msg << "Newton solve did not converge in " << opts.max_iter << " iterations (residual "
        << best_norm << ")";
    throw NonConvergence(msg.str(), best, best_norm);
  }
  return best;
}

}  // namespace gridforge::numerics
