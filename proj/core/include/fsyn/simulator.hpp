#pragma once

// Propagation of compiled programs under the Bloch equations with rf
// inhomogeneity eps and a linear gradient coupling to position s:
//
//   dM/dt = (G(t) s Omega_z + eps u(t) Omega_y + eps v(t) Omega_x) M

#include "fsyn/compiler.hpp"
#include "fsyn/so3.hpp"

#include <span>
#include <vector>

namespace fsyn {

struct DispersionPoint {
  double s = 0.0;
  double eps = 1.0;

  /// s in [0, 1], eps in (0, 1]. Throws InvalidArgument.
  void validate() const;
};

/// Cartesian grid of dispersion points, s-major.
class EnsembleMesh {
 public:
  /// Both lists non-empty and strictly increasing; s in [0, 1], eps in (0, 1].
  EnsembleMesh(std::vector<double> s_values, std::vector<double> eps_values);

  /// n uniform points on [lo, hi] (n == 1 gives {lo}).
  static std::vector<double> uniform(double lo, double hi, int n);

  const std::vector<double>& s_values() const { return s_; }
  const std::vector<double>& eps_values() const { return eps_; }
  std::size_t size() const { return s_.size() * eps_.size(); }
  /// Flat index i = is * eps_count + ie.
  DispersionPoint point(std::size_t i) const;

  friend bool operator==(const EnsembleMesh&, const EnsembleMesh&) = default;

 private:
  std::vector<double> s_;
  std::vector<double> eps_;
};

struct SimulationResult {
  EnsembleMesh mesh;
  SpinState initial_state;
  std::vector<SpinState> final_states;  // mesh order
  /// Same order as final_states; empty when the result was loaded from CSV.
  std::vector<Rotation> propagators;
};

Rotation segment_propagator(const PulseSegment& seg, const DispersionPoint& p);

/// Product of segment propagators, last segment leftmost. Empty -> identity.
Rotation propagate(const PulseProgram& prog, const DispersionPoint& p);

/// Per-point propagate + apply. `threads` = 0 uses the hardware concurrency;
/// the output does not depend on it.
SimulationResult simulate_ensemble(const PulseProgram& prog, const EnsembleMesh& mesh,
                                   const SpinState& m0, unsigned threads = 0);

/// Constant u = pi/2 for unit time from e_z: (sin(eps pi/2), 0, cos(eps pi/2)).
std::vector<SpinState> naive_pulse(std::span<const double> eps_values);

/// Classical RK4 integration of the Bloch equations, each segment played as a
/// constant control of unit duration, `steps_per_segment` steps each.
SpinState rk4_oracle(const PulseProgram& prog, const DispersionPoint& p, const SpinState& m0,
                     int steps_per_segment);

}  // namespace fsyn
