#pragma once

// Comparison of simulated ensembles against targets and series predictions,
// the beta0 splitting-error scan, and the figure-reproduction pipelines.

#include "fsyn/compiler.hpp"
#include "fsyn/fourier.hpp"
#include "fsyn/simulator.hpp"
#include "fsyn/so3.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fsyn {

using AngleField = std::function<double(const DispersionPoint&)>;
using PointFilter = std::function<bool(const DispersionPoint&)>;

Eigen::Vector3d axis_vector(Axis axis);

/// Series prediction of the net rotation angle:
///   Epsilon: eps * series(eps); Position: series(s); joint: eps * series(s, eps).
double predicted_angle(const Design& d, const DispersionPoint& p);

AngleField series_prediction(const Design& d);
AngleField target_angle(const TargetProfile1D& t);
AngleField target_angle(const TargetProfile2D& t);

struct PointError {
  DispersionPoint point;
  double target_angle = 0.0;
  double predicted_angle = 0.0;
  /// Signed angle about the design axis, unwrapped to the branch nearest the prediction.
  double achieved_angle = 0.0;
  Eigen::Vector3d achieved_axis = Eigen::Vector3d::UnitX();
  bool axis_drift = false;  // achieved axis more than 10 degrees off the design axis
  double state_error = 0.0;     // |M_final - R_target M0|
  double operator_error = 0.0;  // E(R_target, achieved propagator)
  bool active = true;
};

struct ProfileErrorReport {
  Variable parameter = Variable::Epsilon;  // which coordinate labels the rows
  std::vector<PointError> points;          // mesh order
  // Aggregates over active points.
  double max_state_error = 0.0;
  double rms_state_error = 0.0;
  double max_operator_error = 0.0;
  double rms_operator_error = 0.0;
  double max_prediction_error = 0.0;  // |achieved - predicted|
  double max_target_residual = 0.0;   // |achieved - target|
  std::size_t drift_count = 0;
};

/// Per-point comparison of `result` against rotations by `target` about the
/// design axis. With propagators present the achieved rotation comes from
/// axis_angle_of; for state-only results (loaded from CSV) the achieved angle
/// is read off the state about the design axis and operator_error compares
/// rotations about that axis. Throws InvalidArgument when the result is
/// inconsistent with its mesh or the design kind.
ProfileErrorReport profile_error(const SimulationResult& result, const Design& design, Axis axis,
                                 const AngleField& target, const PointFilter& active = {});

struct ScanRow {
  double beta0 = 0.0;
  int n = 0;
  double operator_error = 0.0;
};

/// Compiles the single term (k, beta) at each beta0, propagates at eps and
/// compares with exp(eps beta cos(pi k eps) Omega_axis).
std::vector<ScanRow> splitting_error_scan(int k, double beta, double eps,
                                          std::span<const double> beta0_list, Axis axis = Axis::Y);

enum class Figure { Fig2, Fig3, Fig4, Fig5, Fig6 };

/// Fixed parameters of a reproduction run.
struct FigureSpec {
  Figure figure;
  std::string name;  // "fig2" .. "fig6"
  int term_count = 0;
  double beta0 = kReproductionBeta0;
  Axis axis = Axis::Y;
  SpinState initial_state = SpinState::ez();
  std::vector<double> s_values;
  std::vector<double> eps_values;
  std::optional<TargetProfile1D> target;
  /// Report aggregates skip points within band_halfwidth of each band center.
  std::vector<double> band_centers;
  double band_halfwidth = 0.0;
  /// Abscissae of the series-vs-extension table (Fig2).
  std::vector<double> series_grid;
};

FigureSpec figure_spec(Figure fig);
std::optional<Figure> parse_figure(const std::string& name);

struct SeriesRow {
  double x = 0.0;
  double g = 0.0;
  double series = 0.0;
};

struct FigureRun {
  FigureSpec spec;
  std::optional<FourierDesign1D> design;
  std::optional<PulseProgram> program;
  std::optional<SimulationResult> result;
  std::optional<ProfileErrorReport> report;  // against the ideal target
  std::optional<TruncationReport> truncation;
  std::vector<SeriesRow> series_table;  // Fig2 only
};

/// Runs the full pipeline for one figure with its fixed parameters.
FigureRun figure_dataset(Figure fig, unsigned threads = 0);

}  // namespace fsyn
