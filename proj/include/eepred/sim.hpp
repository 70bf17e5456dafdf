#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eepred {

// Coefficients of the forced, parametrically driven, delayed rotating-parabola
// oscillator
//
//   (1+λx²)ẍ + λxẋ² + ω₀²x − Ω₀²[2ε cos ω_p t + ε²/2 (1+cos 2ω_p t)]x
//       + αẋ + δ x(t−τ) = f cos ω_e t,      Ω₀² = −ω₀² + g√λ.
//
// f, epsilon and delta are the three bifurcation parameters the classifiers
// learn from; the remaining fields default to the fixed experiment values.
struct SystemParams {
  double f = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double lambda = 0.5;
  double omega0_sq = 0.25;
  double omega_p = 1.0;
  double alpha = 0.2;
  double tau = 0.1;
  double omega_e = 1.0;
  double g = 9.8;

  double omega_cap_sq() const;
  // Throws DomainError unless lambda > 0, tau >= 0 and every field is finite.
  void validate() const;
};

struct SimConfig {
  double dt = 0.01;
  double t_end = 5000.0;
  double t_transient = 2500.0;
  double x0 = 0.1;
  double v0 = 0.1;
  // Constant x(t) on [−τ, 0]; x0 when unset.
  std::optional<double> history;
  double blowup_bound = 1e6;

  double history_value() const { return history.value_or(x0); }
  // Enforces dt > 0, 0 <= t_transient < t_end, and that dt divides tau.
  void validate(const SystemParams& params) const;
  // Number of dt steps spanning tau.
  std::size_t delay_steps(const SystemParams& params) const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> v;
  double dt = 0.0;
  std::size_t transient_cut_index = 0;

  std::size_t size() const { return t.size(); }
};

double derive_omega_cap_sq(const SystemParams& params);

// ẍ solved from the equation of motion. Rejects non-finite arguments.
double acceleration(double x, double v, double t, double x_delayed, const SystemParams& params);

// Classical RK4 on (x, ẋ). The delayed term is held at the stored grid value
// x(t_k − τ) for all four stages of step k, so no interpolation is needed.
// Throws DivergenceError once |x| exceeds config.blowup_bound or turns
// non-finite.
Trajectory integrate(const SystemParams& params, const SimConfig& config);

// Same scheme with the delay term removed entirely (no history buffer). For
// delta == 0 this matches integrate() bit for bit.
Trajectory integrate_without_delay(const SystemParams& params, const SimConfig& config);

// Same scheme as integrate, but hands each sample (k, t_k, x_k, v_k) to
// `observe` instead of storing it. Samples are identical bit for bit.
using StepObserver = std::function<void(std::size_t, double, double, double)>;
void integrate_streaming(const SystemParams& params, const SimConfig& config,
                         const StepObserver& observe);

// Index of the first post-transient sample.
std::size_t transient_cut_index(const SimConfig& config);

// Plain-text (t, x, v) table with a '#' header carrying params, config and
// tool version.
void write_trajectory(std::ostream& out, const Trajectory& traj, const SystemParams& params,
                      const SimConfig& config);

// Reads the table back, recovering dt and the transient cut from the header.
// Throws IoError when malformed.
Trajectory read_trajectory(std::istream& in);

}  // namespace eepred
