#include "fsyn/simulator.hpp"

#include "fsyn/errors.hpp"
#include "parallel.hpp"

#include <cmath>
#include <numbers>

namespace fsyn {

namespace {

void check_sorted(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw InvalidArgument(std::string(what) + " list is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw InvalidArgument(std::string(what) + " values must strictly increase");
  }
}

Eigen::Vector3d generator_coefficients(const PulseSegment& seg, const DispersionPoint& p) {
  switch (seg.kind) {
    case SegmentKind::RfX: return {seg.magnitude * p.eps, 0.0, 0.0};
    case SegmentKind::RfY: return {0.0, seg.magnitude * p.eps, 0.0};
    case SegmentKind::Grad: return {0.0, 0.0, seg.magnitude * p.s};
  }
  throw InvalidArgument("unknown segment kind");
}

}  // namespace

void DispersionPoint::validate() const {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("position s must lie in [0, 1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("rf scale eps must lie in (0, 1]");
}

EnsembleMesh::EnsembleMesh(std::vector<double> s_values, std::vector<double> eps_values)
    : s_(std::move(s_values)), eps_(std::move(eps_values)) {
  check_sorted(s_, "s");
  check_sorted(eps_, "eps");
  for (double s : s_) DispersionPoint{s, 1.0}.validate();
  for (double e : eps_) DispersionPoint{0.0, e}.validate();
}

std::vector<double> EnsembleMesh::uniform(double lo, double hi, int n) {
  if (n < 1) throw InvalidArgument("mesh needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

DispersionPoint EnsembleMesh::point(std::size_t i) const {
  return {s_[i / eps_.size()], eps_[i % eps_.size()]};
}

Rotation segment_propagator(const PulseSegment& seg, const DispersionPoint& p) {
  const Eigen::Vector3d a = generator_coefficients(seg, p);
  return rot_exp(a.x(), a.y(), a.z());
}

Rotation propagate(const PulseProgram& prog, const DispersionPoint& p) {
  Rotation u;
  for (const PulseSegment& seg : prog.segments) u = segment_propagator(seg, p) * u;
  return u;
}

SimulationResult simulate_ensemble(const PulseProgram& prog, const EnsembleMesh& mesh,
                                   const SpinState& m0, unsigned threads) {
  SimulationResult r{mesh, m0, std::vector<SpinState>(mesh.size(), m0),
                     std::vector<Rotation>(mesh.size())};
  detail::parallel_for(mesh.size(), threads, [&](std::size_t i) {
    r.propagators[i] = propagate(prog, mesh.point(i));
    r.final_states[i] = apply(r.propagators[i], m0);
  });
  return r;
}

std::vector<SpinState> naive_pulse(std::span<const double> eps_values) {
  std::vector<SpinState> out;
  out.reserve(eps_values.size());
  for (double e : eps_values) {
    DispersionPoint{0.0, e}.validate();
    const double theta = e * std::numbers::pi / 2.0;
    out.push_back(SpinState::normalized({std::sin(theta), 0.0, std::cos(theta)}));
  }
  return out;
}

SpinState rk4_oracle(const PulseProgram& prog, const DispersionPoint& p, const SpinState& m0,
                     int steps_per_segment) {
  if (steps_per_segment < 1) throw InvalidArgument("rk4_oracle needs at least one step per segment");
  Eigen::Vector3d m = m0.vector();
  const double h = 1.0 / steps_per_segment;
  for (const PulseSegment& seg : prog.segments) {
    const Eigen::Vector3d a = generator_coefficients(seg, p);
    // dM/dt = a x M for the antisymmetric generator of a.
    const auto f = [&a](const Eigen::Vector3d& v) -> Eigen::Vector3d { return a.cross(v); };
    for (int i = 0; i < steps_per_segment; ++i) {
      const Eigen::Vector3d k1 = f(m);
      const Eigen::Vector3d k2 = f(m + 0.5 * h * k1);
      const Eigen::Vector3d k3 = f(m + 0.5 * h * k2);
      const Eigen::Vector3d k4 = f(m + h * k3);
      m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  // RK4 does not conserve the norm exactly; only gross blow-up is rejected.
  return SpinState(m, 1e-3);
}

}  // namespace fsyn
