#pragma once

// Target rotation-angle profiles and their truncated cosine-series designs.
//
// A design approximates a target on the dispersion variable x in [0, 1] by
//
//   sum_k beta_k cos(pi k x)
//
// where the series is fitted to the even extension of the base function
// (phi(eps)/eps for rf-inhomogeneity targets, phi(s) for position targets).

#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace fsyn {

enum class Variable { Epsilon, Position };

/// Desired rotation angle as a function of one dispersion parameter.
struct TargetProfile1D {
  Variable variable = Variable::Epsilon;
  std::function<double(double)> angle_fn;
  double lo = 0.0;  // active range [lo, hi]; lo = 1 - delta for Epsilon targets
  double hi = 1.0;
  /// Interior points of (0, 1) where angle_fn (or its derivative) jumps.
  /// Quadrature panels are aligned to them.
  std::vector<double> breakpoints;

  /// phi(eps) on [1 - delta, 1].
  static TargetProfile1D epsilon(std::function<double(double)> phi, double delta,
                                 std::vector<double> breakpoints = {});
  /// Constant rotation angle over eps in [1 - delta, 1].
  static TargetProfile1D uniform_epsilon(double angle, double delta);
  /// phi(s) on [lo, hi].
  static TargetProfile1D position(std::function<double(double)> phi, double lo = 0.0,
                                  double hi = 1.0, std::vector<double> breakpoints = {});
  /// Piecewise-linear interpolation through (xs[i], angles[i]); xs strictly increasing.
  /// The active range is [xs.front(), xs.back()].
  static TargetProfile1D tabulated(Variable variable, std::span<const double> xs,
                                   std::span<const double> angles);

  /// The function the series approximates: phi(x)/x for Epsilon, phi(x) for Position.
  double base(double x) const;

  /// Throws InvalidArgument if the range or function is unusable.
  void validate() const;
};

/// Desired rotation angle phi(s, eps) over s in [0, 1], eps in [eps_lo, 1].
struct TargetProfile2D {
  std::function<double(double, double)> angle_fn;
  double eps_lo = 0.5;
  std::vector<double> s_breakpoints;
  std::vector<double> eps_breakpoints;

  double base(double s, double eps) const { return angle_fn(s, eps) / eps; }
  void validate() const;
};

/// An even function on [-1, 1], stored by its restriction to [0, 1].
/// Evaluation at x uses |x|, so g(-x) == g(x) exactly.
struct EvenFunction {
  std::function<double(double)> on_unit;
  std::vector<double> breakpoints;  // in (0, 1)

  double operator()(double x) const;
};

struct Term1D {
  int k = 0;
  double beta = 0.0;  // radians

  friend bool operator==(const Term1D&, const Term1D&) = default;
};

struct Term2D {
  int k1 = 0;
  int k2 = 0;
  double beta = 0.0;

  friend bool operator==(const Term2D&, const Term2D&) = default;
};

struct FourierDesign1D {
  Variable variable = Variable::Epsilon;
  std::vector<Term1D> terms;  // strictly increasing k
  bool divides_by_parameter = true;

  void validate() const;
  friend bool operator==(const FourierDesign1D&, const FourierDesign1D&) = default;
};

struct FourierDesign2D {
  std::vector<Term2D> terms;  // unique (k1, k2)

  void validate() const;
  friend bool operator==(const FourierDesign2D&, const FourierDesign2D&) = default;
};

using Design = std::variant<FourierDesign1D, FourierDesign2D>;

struct QuadratureOptions {
  /// Fine-grid spacing on [0, 1]. The coarse companion grid uses every other node.
  double fine_spacing = 1.0 / 4000.0;
  /// Largest accepted |fine - coarse| / 15 before the integral is rejected.
  double tolerance = 1e-8;
};

struct TruncationReport {
  double max_abs = 0.0;  // |series - base| over the active range
  double rms = 0.0;
  /// Angle-level residual: |x * series(x) - phi(x)| for Epsilon designs,
  /// identical to max_abs for Position designs.
  double max_abs_angle = 0.0;
};

EvenFunction even_extension(const TargetProfile1D& t);

/// beta_k = int_{-1}^{1} cos(pi k x) g(x) dx for k >= 1, beta_0 = (1/2) int g,
/// for k = 0 .. K-1. Throws NumericalToleranceError when the Richardson
/// residual exceeds the tolerance.
FourierDesign1D coefficients_1d(const EvenFunction& g, int term_count, Variable variable,
                                bool divides_by_parameter, const QuadratureOptions& opts = {});

/// Convenience: even extension followed by coefficients_1d.
FourierDesign1D design_1d(const TargetProfile1D& t, int term_count,
                          const QuadratureOptions& opts = {});

/// Tensor-product cosine coefficients of phi(s, eps)/eps, extended evenly in
/// both variables. Terms are ordered lexicographically by (k1, k2).
FourierDesign2D coefficients_2d(const TargetProfile2D& t, int k1_count, int k2_count,
                                const QuadratureOptions& opts = {});

double series_eval_1d(const FourierDesign1D& d, double x);
double series_eval_2d(const FourierDesign2D& d, double s, double eps);

TruncationReport truncation_error(const FourierDesign1D& d, const TargetProfile1D& t, int grid_n);

/// Slice profile: `angle` on [lo, hi], 0 elsewhere. With ramp_width > 0 the
/// edges become linear ramps over [lo - w, lo] and [hi, hi + w].
TargetProfile1D slice_target(double lo, double hi, double angle, double ramp_width = 0.0);

}  // namespace fsyn
