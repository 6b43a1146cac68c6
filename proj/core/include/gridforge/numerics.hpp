#pragma once

// Fixed-step time integration and Newton equilibrium solves.
//
// Everything here is a pure function of its inputs: integrators keep their
// scratch space in an explicit workspace object owned by the caller, so
// concurrent scenario runs never share mutable state.

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace gridforge::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Right-hand side of x' = f(t, x). Writes f into `dx`, which is already
/// sized like `x`.
using DerivativeFn = std::function<void(double t, const Vector& x, Vector& dx)>;

/// Residual map r(x) for root finding. Writes into `r`, sized like the guess
/// unless the callee resizes it.
using ResidualFn = std::function<void(const Vector& x, Vector& r)>;

enum class Method { kExplicitRk4, kImplicitTrapezoidal };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct IntegratorConfig {
  Method method = Method::kExplicitRk4;
  double dt = 1e-5;  // seconds
  double newton_tol = 1e-10;  // relative to 1 + max(|x|, |dt/2 f(x)|)
  int newton_max_iter = 20;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Raised by the implicit integrator when the per-step Newton iteration does
/// not reach `newton_tol`.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual_norm)
      : std::runtime_error(what), residual_norm_(residual_norm) {}
  double residual_norm() const { return residual_norm_; }

 private:
  double residual_norm_;
};

/// Raised by solve_equilibrium when max_iter is exhausted.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, Vector best, double residual_norm)
      : std::runtime_error(what), best_(std::move(best)), residual_norm_(residual_norm) {}
  const Vector& best_iterate() const { return best_; }
  double residual_norm() const { return residual_norm_; }

 private:
  Vector best_;
  double residual_norm_;
};

/// Forward-difference Jacobian of `f` at `x` with relative perturbation
/// `rel_step` (absolute floor of the same size). `fx` must equal f(x).
Matrix finite_difference_jacobian(const ResidualFn& f, const Vector& x, const Vector& fx,
                                  double rel_step = 1e-7);

/// Reusable scratch buffers for repeated steps of the same dimension.
class Stepper {
 public:
  explicit Stepper(IntegratorConfig cfg);

  const IntegratorConfig& config() const { return cfg_; }

  /// Advances `x` in place from t to t + dt.
  void step(double t, Vector& x, const DerivativeFn& f);

 private:
  void step_rk4(double t, Vector& x, const DerivativeFn& f);
  void step_trapezoidal(double t, Vector& x, const DerivativeFn& f);

  IntegratorConfig cfg_;
  Vector k1_, k2_, k3_, k4_, tmp_;
  Vector f0_, f1_, residual_;
};

/// One step from (t, x). Equivalent to constructing a Stepper and calling
/// step() once.
Vector integrate_step(double t, const Vector& x, const DerivativeFn& f,
                      const IntegratorConfig& cfg);

struct EquilibriumOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double fd_rel_step = 1e-7;
};

/// Newton iteration with a forward-difference Jacobian. The linear solve is
/// rank-revealing, so residual maps with a continuous symmetry (a free
/// rotation angle, say) still converge to a nearby root. Returns x with
/// ||r(x)||_inf <= tol.
Vector solve_equilibrium(const ResidualFn& residual, const Vector& guess,
                         const EquilibriumOptions& opts = {});

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace gridforge::numerics
