#include "fsyn/analysis.hpp"

#include "fsyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fsyn {

namespace {

constexpr double kPi = std::numbers::pi;
const double kDriftCos = std::cos(10.0 * kPi / 180.0);
const double kDriftSin = std::sin(10.0 * kPi / 180.0);

double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

void check_point_kind(const Design& d, const DispersionPoint& p) {
  if (const auto* one = std::get_if<FourierDesign1D>(&d)) {
    if (one->variable == Variable::Epsilon && !(p.eps > 0.0)) {
      throw InvalidArgument("epsilon design evaluated at a point without positive eps");
    }
  }
}

struct Achieved {
  double signed_angle;
  Eigen::Vector3d axis;
  bool drift;
  Rotation rotation;
};

Achieved from_propagator(const Rotation& u, const Eigen::Vector3d& design_axis) {
  const AxisAngle aa = axis_angle_of(u);
  const double along = aa.axis.dot(design_axis);
  const bool drift = aa.angle > 1e-9 && std::abs(along) < kDriftCos;
  return {along < 0.0 ? -aa.angle : aa.angle, aa.axis, drift, u};
}

Achieved from_state(const SpinState& m0, const SpinState& m, const Eigen::Vector3d& a, Axis axis) {
  const Eigen::Vector3d p0 = m0.vector() - m0.vector().dot(a) * a;
  const Eigen::Vector3d p1 = m.vector() - m.vector().dot(a) * a;
  if (p0.norm() < 1e-9) {
    throw InvalidArgument("initial state is parallel to the design axis; angle is unobservable");
  }
  const double angle = std::atan2(a.dot(p0.cross(p1)), p0.dot(p1));
  const bool drift = std::abs(m.vector().dot(a) - m0.vector().dot(a)) > kDriftSin;
  return {angle, a, drift, rot_about(axis == Axis::X ? Generator::X : Generator::Y, angle)};
}

}  // namespace

Eigen::Vector3d axis_vector(Axis axis) {
  return axis == Axis::X ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
}

double predicted_angle(const Design& d, const DispersionPoint& p) {
  check_point_kind(d, p);
  if (const auto* one = std::get_if<FourierDesign1D>(&d)) {
    if (one->variable == Variable::Epsilon) return p.eps * series_eval_1d(*one, p.eps);
    return series_eval_1d(*one, p.s);
  }
  return p.eps * series_eval_2d(std::get<FourierDesign2D>(d), p.s, p.eps);
}

AngleField series_prediction(const Design& d) {
  return [d](const DispersionPoint& p) { return predicted_angle(d, p); };
}

AngleField target_angle(const TargetProfile1D& t) {
  return [t](const DispersionPoint& p) {
    return t.angle_fn(t.variable == Variable::Epsilon ? p.eps : p.s);
  };
}

AngleField target_angle(const TargetProfile2D& t) {
  return [t](const DispersionPoint& p) { return t.angle_fn(p.s, p.eps); };
}

ProfileErrorReport profile_error(const SimulationResult& result, const Design& design, Axis axis,
                                 const AngleField& target, const PointFilter& active) {
  const std::size_t n = result.mesh.size();
  if (result.final_states.size() != n) {
    throw InvalidArgument("simulation result does not match its mesh");
  }
  if (!result.propagators.empty() && result.propagators.size() != n) {
    throw InvalidArgument("simulation result propagators do not match its mesh");
  }
  if (!target) throw InvalidArgument("profile_error needs a target");

  ProfileErrorReport rep;
  if (const auto* one = std::get_if<FourierDesign1D>(&design)) {
    rep.parameter = one->variable;
    const auto& other = one->variable == Variable::Epsilon ? result.mesh.s_values()
                                                           : result.mesh.eps_values();
    if (one->variable == Variable::Position && other.size() != 1) {
      throw InvalidArgument("position designs are evaluated on a single-eps mesh");
    }
  } else {
    rep.parameter = Variable::Epsilon;
  }

  const Eigen::Vector3d a = axis_vector(axis);
  const Generator g = axis == Axis::X ? Generator::X : Generator::Y;
  double sum_state = 0.0;
  double sum_op = 0.0;
  std::size_t count = 0;
  rep.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PointError pe;
    pe.point = result.mesh.point(i);
    pe.target_angle = target(pe.point);
    pe.predicted_angle = predicted_angle(design, pe.point);

    const Achieved got = result.propagators.empty()
                             ? from_state(result.initial_state, result.final_states[i], a, axis)
                             : from_propagator(result.propagators[i], a);
    pe.achieved_angle = pe.predicted_angle + wrap_pi(got.signed_angle - pe.predicted_angle);
    pe.achieved_axis = got.axis;
    pe.axis_drift = got.drift;

    const Rotation target_rot = rot_about(g, pe.target_angle);
    pe.state_error =
        (result.final_states[i].vector() - target_rot.matrix() * result.initial_state.vector()).norm();
    pe.operator_error = operator_error(target_rot, got.rotation);
    pe.active = !active || active(pe.point);

    if (pe.active) {
      rep.max_state_error = std::max(rep.max_state_error, pe.state_error);
      rep.max_operator_error = std::max(rep.max_operator_error, pe.operator_error);
      rep.max_prediction_error =
          std::max(rep.max_prediction_error, std::abs(pe.achieved_angle - pe.predicted_angle));
      rep.max_target_residual =
          std::max(rep.max_target_residual, std::abs(wrap_pi(pe.achieved_angle - pe.target_angle)));
      if (pe.axis_drift) ++rep.drift_count;
      sum_state += pe.state_error * pe.state_error;
      sum_op += pe.operator_error * pe.operator_error;
      ++count;
    }
    rep.points.push_back(pe);
  }
  if (count > 0) {
    rep.rms_state_error = std::sqrt(sum_state / static_cast<double>(count));
    rep.rms_operator_error = std::sqrt(sum_op / static_cast<double>(count));
  }
  return rep;
}

std::vector<ScanRow> splitting_error_scan(int k, double beta, double eps,
                                          std::span<const double> beta0_list, Axis axis) {
  if (beta == 0.0) throw InvalidArgument("splitting scan needs a nonzero coefficient");
  if (k < 0) throw InvalidArgument("splitting scan needs k >= 0");
  FourierDesign1D d{Variable::Epsilon, {{k, beta}}, true};
  const DispersionPoint p{0.0, eps};
  const double ideal_angle = eps * beta * std::cos(kPi * k * eps);
  const Rotation ideal = rot_about(axis == Axis::X ? Generator::X : Generator::Y, ideal_angle);

  std::vector<ScanRow> rows;
  rows.reserve(beta0_list.size());
  for (double beta0 : beta0_list) {
    const PulseProgram prog = compile_eps(d, axis, beta0);
    rows.push_back({beta0, split_count(beta, beta0), operator_error(ideal, propagate(prog, p))});
  }
  return rows;
}

std::optional<Figure> parse_figure(const std::string& name) {
  if (name == "fig2") return Figure::Fig2;
  if (name == "fig3") return Figure::Fig3;
  if (name == "fig4") return Figure::Fig4;
  if (name == "fig5") return Figure::Fig5;
  if (name == "fig6") return Figure::Fig6;
  return std::nullopt;
}

FigureSpec figure_spec(Figure fig) {
  FigureSpec f{fig, "", 0, kReproductionBeta0, Axis::Y, SpinState::ez(), {0.0}, {1.0},
               std::nullopt, {}, 0.0, {}};
  switch (fig) {
    case Figure::Fig2:
      f.name = "fig2";
      f.term_count = 5;
      f.target = TargetProfile1D::uniform_epsilon(kPi / 2.0, 0.9);
      f.series_grid = EnsembleMesh::uniform(-1.0, 1.0, 401);
      break;
    case Figure::Fig3:
      f.name = "fig3";
      f.term_count = 5;
      f.target = TargetProfile1D::uniform_epsilon(kPi / 2.0, 0.9);
      f.eps_values = EnsembleMesh::uniform(0.1, 1.0, 181);
      break;
    case Figure::Fig4:
      f.name = "fig4";
      f.eps_values = EnsembleMesh::uniform(0.1, 1.0, 181);
      break;
    case Figure::Fig5:
      f.name = "fig5";
      f.term_count = 9;
      f.axis = Axis::X;
      f.initial_state = SpinState::ey();
      f.target = TargetProfile1D::uniform_epsilon(kPi, 0.5);
      f.eps_values = EnsembleMesh::uniform(0.5, 1.0, 101);
      break;
    case Figure::Fig6:
      f.name = "fig6";
      f.term_count = 30;
      f.target = slice_target(0.5, 0.75, kPi / 2.0);
      f.s_values = EnsembleMesh::uniform(0.0, 1.0, 201);
      f.eps_values = {1.0};
      f.band_centers = {0.5, 0.75};
      f.band_halfwidth = 0.05;
      break;
  }
  return f;
}

FigureRun figure_dataset(Figure fig, unsigned threads) {
  FigureRun run{figure_spec(fig), std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                std::nullopt, {}};
  const FigureSpec& spec = run.spec;

  if (fig == Figure::Fig4) {
    const EnsembleMesh mesh(spec.s_values, spec.eps_values);
    const std::vector<SpinState> finals = naive_pulse(spec.eps_values);
    // The naive pulse is the single hard pulse RfY(pi/2); its propagators are exact.
    std::vector<Rotation> props;
    for (double e : spec.eps_values) props.push_back(rot_exp(0.0, e * kPi / 2.0, 0.0));
    run.result = SimulationResult{mesh, SpinState::ez(), finals, props};
    return run;
  }

  const TargetProfile1D& target = *spec.target;
  run.design = design_1d(target, spec.term_count);
  run.truncation = truncation_error(*run.design, target, 1001);

  if (fig == Figure::Fig2) {
    const EvenFunction g = even_extension(target);
    for (double x : spec.series_grid) run.series_table.push_back({x, g(x), series_eval_1d(*run.design, x)});
    return run;
  }

  run.program = compile(*run.design, spec.axis, spec.beta0);
  const EnsembleMesh mesh(spec.s_values, spec.eps_values);
  run.result = simulate_ensemble(*run.program, mesh, spec.initial_state, threads);

  PointFilter active;
  if (!spec.band_centers.empty()) {
    active = [centers = spec.band_centers, w = spec.band_halfwidth](const DispersionPoint& p) {
      return std::none_of(centers.begin(), centers.end(),
                          [&](double c) { return std::abs(p.s - c) <= w; });
    };
  }
  run.report = profile_error(*run.result, *run.design, spec.axis, target_angle(target), active);
  return run;
}

}  // namespace fsyn
