#include "gridforge/power_flow.hpp"

#include "gridforge/numerics.hpp"

#include <cmath>
#include <sstream>

namespace gridforge::network {

namespace {

std::vector<Complex> currents(const std::vector<std::vector<Complex>>& y,
                              const std::vector<Complex>& v) {
  std::vector<Complex> i(v.size(), 0.0);
  for (std::size_t r = 0; r < v.size(); ++r) {
    for (std::size_t c = 0; c < v.size(); ++c) i[r] += y[r][c] * v[c];
  }
  return i;
}

}  // namespace

PowerFlowResult solve_power_flow(const std::vector<std::vector<Complex>>& y,
                                 const std::vector<PowerFlowNode>& nodes, double tol,
                                 int max_iter) {
  const std::size_t n = nodes.size();
  if (y.size() != n) throw std::invalid_argument("power flow: admittance/node size mismatch");
  std::size_t slack_count = 0;
  for (const auto& nd : nodes) slack_count += nd.type == BusType::kSlack;
  if (slack_count != 1) throw PowerFlowError("power flow needs exactly one slack bus");

  // Unknown vector: angles of non-slack nodes, then magnitudes of PQ nodes.
  std::vector<long> angle_idx(n, -1), mag_idx(n, -1);
  long k = 0;
  for (std::size_t b = 0; b < n; ++b) {
    if (nodes[b].type != BusType::kSlack) angle_idx[b] = k++;
  }
  for (std::size_t b = 0; b < n; ++b) {
    if (nodes[b].type == BusType::kPQ) mag_idx[b] = k++;
  }
  const long dim = k;

  auto voltages = [&](const numerics::Vector& u) {
    std::vector<Complex> v(n);
    for (std::size_t b = 0; b < n; ++b) {
      const double ang = angle_idx[b] >= 0 ? u[angle_idx[b]] : nodes[b].angle;
      const double mag = mag_idx[b] >= 0 ? u[mag_idx[b]] : nodes[b].v;
      v[b] = std::polar(mag, ang);
    }
    return v;
  };

  auto residual = [&](const numerics::Vector& u, numerics::Vector& r) {
    r.resize(dim);
    const auto v = voltages(u);
    const auto i = currents(y, v);
    for (std::size_t b = 0; b < n; ++b) {
      const Complex s = v[b] * std::conj(i[b]);  // injected by the device
      if (angle_idx[b] >= 0) r[angle_idx[b]] = s.real() - (nodes[b].type == BusType::kPV ? nodes[b].p : 0.0);
      if (mag_idx[b] >= 0) r[mag_idx[b]] = s.imag();
    }
  };

  numerics::Vector guess(dim);
  for (std::size_t b = 0; b < n; ++b) {
    if (angle_idx[b] >= 0) guess[angle_idx[b]] = 0.0;
    if (mag_idx[b] >= 0) guess[mag_idx[b]] = 1.0;
  }

  numerics::Vector sol;
  try {
    sol = numerics::solve_equilibrium(residual, guess, {tol, max_iter, 1e-8});
  } catch (const numerics::NonConvergence& e) {
    std::ostringstream msg;
    msg << "power flow diverged (mismatch " << e.residual_norm() << ")";
    throw PowerFlowError(msg.str());
  }

  PowerFlowResult out;
  out.voltages = voltages(sol);
  const auto i = currents(y, out.voltages);
  out.injections.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    const double mag = std::abs(out.voltages[b]);
    if (!(mag > 0.5 && mag < 1.5)) {
      std::ostringstream msg;
      msg << "power flow converged to an infeasible voltage " << mag << " pu at node " << b;
      throw PowerFlowError(msg.str());
    }
    out.injections[b] = nodes[b].type == BusType::kPQ ? Complex{} : out.voltages[b] * std::conj(i[b]);
  }
  numerics::Vector r;
  residual(sol, r);
  out.mismatch = numerics::inf_norm(r);
  return out;
}

}  // namespace gridforge::network
