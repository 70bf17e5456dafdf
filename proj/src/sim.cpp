#include "eepred/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eepred/error.hpp"
#include "eepred/version.hpp"

namespace eepred {

namespace {

struct Coefficients {
  double f, epsilon, delta, lambda, omega0_sq, omega_p, alpha, omega_e;
  double omega_cap_sq;
};

Coefficients coefficients(const SystemParams& p) {
  return {p.f,     p.epsilon, p.delta,   p.lambda,
          p.omega0_sq, p.omega_p, p.alpha, p.omega_e,
          derive_omega_cap_sq(p)};
}

inline double accel_kernel(double x, double v, double t, double x_delayed, const Coefficients& c) {
  const double drive = 2.0 * c.epsilon * std::cos(c.omega_p * t) +
                       0.5 * c.epsilon * c.epsilon * (1.0 + std::cos(2.0 * c.omega_p * t));
  const double rhs = c.f * std::cos(c.omega_e * t) - c.lambda * x * v * v - c.omega0_sq * x +
                     c.omega_cap_sq * drive * x - c.alpha * v - c.delta * x_delayed;
  return rhs / (1.0 + c.lambda * x * x);
}

template <bool kWithDelay, class Observer>
void integrate_impl(const SystemParams& params, const SimConfig& config, Observer&& observe) {
  params.validate();
  config.validate(params);

  const Coefficients c = coefficients(params);
  const double dt = config.dt;
  const auto steps = static_cast<std::size_t>(std::llround(config.t_end / dt));
  const std::size_t lag = config.delay_steps(params);
  const double history = config.history_value();

  // x[k - lag .. k] for the delayed term
  std::vector<double> ring(kWithDelay ? lag + 1 : 1);

  double x = config.x0;
  double v = config.v0;
  observe(std::size_t{0}, 0.0, x, v);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    double xd = 0.0;
    if constexpr (kWithDelay) {
      ring[k % (lag + 1)] = x;
      xd = k >= lag ? ring[(k - lag) % (lag + 1)] : history;
    }

    const double k1x = v;
    const double k1v = accel_kernel(x, v, t, xd, c);
    const double k2x = v + 0.5 * dt * k1v;
    const double k2v = accel_kernel(x + 0.5 * dt * k1x, k2x, t + 0.5 * dt, xd, c);
    const double k3x = v + 0.5 * dt * k2v;
    const double k3v = accel_kernel(x + 0.5 * dt * k2x, k3x, t + 0.5 * dt, xd, c);
    const double k4x = v + dt * k3v;
    const double k4v = accel_kernel(x + dt * k3x, k4x, t + dt, xd, c);

    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    const double t_next = static_cast<double>(k + 1) * dt;
    if (!std::isfinite(x) || !std::isfinite(v) || std::abs(x) > config.blowup_bound) {
      throw DivergenceError(t_next, std::abs(x));
    }
    observe(k + 1, t_next, x, v);
  }
}

template <bool kWithDelay>
Trajectory integrate_stored(const SystemParams& params, const SimConfig& config) {
  params.validate();
  config.validate(params);
  const auto steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
  Trajectory traj;
  traj.dt = config.dt;
  traj.transient_cut_index = transient_cut_index(config);
  traj.t.reserve(steps + 1);
  traj.x.reserve(steps + 1);
  traj.v.reserve(steps + 1);
  integrate_impl<kWithDelay>(params, config, [&](std::size_t, double t, double x, double v) {
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.v.push_back(v);
  });
  return traj;
}

}  // namespace

double SystemParams::omega_cap_sq() const { return derive_omega_cap_sq(*this); }

void SystemParams::validate() const {
  for (double value : {f, epsilon, delta, lambda, omega0_sq, omega_p, alpha, tau, omega_e, g}) {
    if (!std::isfinite(value)) throw DomainError("system parameters must be finite");
  }
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (tau < 0.0) throw DomainError("tau must be non-negative");
}

void SimConfig::validate(const SystemParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!std::isfinite(t_end) || !std::isfinite(t_transient) || t_transient < 0.0 ||
      !(t_transient < t_end)) {
    throw DomainError("need 0 <= t_transient < t_end");
  }
  if (!std::isfinite(x0) || !std::isfinite(v0) || !std::isfinite(history_value())) {
    throw DomainError("initial conditions must be finite");
  }
  if (!(blowup_bound > 0.0)) throw DomainError("blow-up bound must be positive");
  const double ratio = params.tau / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError("tau/dt must be an integer (tau=" + std::to_string(params.tau) +
                      ", dt=" + std::to_string(dt) + ")");
  }
}

std::size_t SimConfig::delay_steps(const SystemParams& params) const {
  return static_cast<std::size_t>(std::llround(params.tau / dt));
}

double derive_omega_cap_sq(const SystemParams& params) {
  return -params.omega0_sq + params.g * std::sqrt(params.lambda);
}

double acceleration(double x, double v, double t, double x_delayed, const SystemParams& params) {
  if (!std::isfinite(x) || !std::isfinite(v) || !std::isfinite(t) || !std::isfinite(x_delayed)) {
    throw DomainError("acceleration: non-finite state");
  }
  params.validate();
  return accel_kernel(x, v, t, x_delayed, coefficients(params));
}

Trajectory integrate(const SystemParams& params, const SimConfig& config) {
  return integrate_stored<true>(params, config);
}

Trajectory integrate_without_delay(const SystemParams& params, const SimConfig& config) {
  return integrate_stored<false>(params, config);
}

void integrate_streaming(const SystemParams& params, const SimConfig& config,
                         const StepObserver& observe) {
  integrate_impl<true>(params, config, observe);
}

std::size_t transient_cut_index(const SimConfig& config) {
  const auto steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
  return std::min(steps, static_cast<std::size_t>(std::llround(config.t_transient / config.dt)));
}

void write_trajectory(std::ostream& out, const Trajectory& traj, const SystemParams& params,
                      const SimConfig& config) {
  char buf[512];
  out << "# eepred " << kVersion << " trajectory\n";
  std::snprintf(buf, sizeof buf,
                "# params f=%.17g epsilon=%.17g delta=%.17g lambda=%.17g omega0_sq=%.17g\n", params.f,
                params.epsilon, params.delta, params.lambda, params.omega0_sq);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "# params omega_p=%.17g alpha=%.17g tau=%.17g omega_e=%.17g g=%.17g\n",
                params.omega_p, params.alpha, params.tau, params.omega_e, params.g);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "# config dt=%.17g t_end=%.17g t_transient=%.17g x0=%.17g v0=%.17g history=%.17g\n",
                config.dt, config.t_end, config.t_transient, config.x0, config.v0,
                config.history_value());
  out << buf;
  out << "# transient_cut_index=" << traj.transient_cut_index << "\n";
  out << "# t x v\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g %.17g %.17g\n", traj.t[i], traj.x[i], traj.v[i]);
    out << buf;
  }
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory traj;
  bool have_dt = false;
  bool have_cut = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream header(line.substr(1));
      std::string token;
      while (header >> token) {
        if (token.rfind("dt=", 0) == 0) {
          traj.dt = std::stod(token.substr(3));
          have_dt = true;
        } else if (token.rfind("transient_cut_index=", 0) == 0) {
          traj.transient_cut_index = std::stoul(token.substr(20));
          have_cut = true;
        }
      }
      continue;
    }
    std::istringstream row(line);
    double t = 0.0, x = 0.0, v = 0.0;
    std::string rest;
    if (!(row >> t >> x >> v) || (row >> rest)) {
      throw IoError("trajectory line " + std::to_string(line_no) + ": expected three numbers");
    }
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.v.push_back(v);
  }
  if (!have_dt || !have_cut) throw IoError("trajectory header lacks dt or transient_cut_index");
  if (traj.size() == 0) throw IoError("trajectory has no samples");
  if (traj.transient_cut_index >= traj.size()) throw IoError("trajectory transient cut beyond data");
  return traj;
}

}  // namespace eepred
