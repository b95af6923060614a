#include "fsyn/fourier.hpp"

#include "fsyn/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

namespace fsyn {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(double x) { return std::isfinite(x); }

// Composite Simpson on [0, 1] with panels aligned to the breakpoints. The
// coarse rule lives on every other fine node so both share one set of
// function values. Each piece owns its end nodes, nudged one ulp inward, so a
// jump at a breakpoint contributes its one-sided limits to either side.
struct SimpsonPair {
  std::vector<double> nodes;
  std::vector<double> fine;
  std::vector<double> coarse;
};

SimpsonPair build_rule(const std::vector<double>& breakpoints, double fine_spacing) {
  std::set<double> cuts{0.0, 1.0};
  for (double b : breakpoints) {
    if (b > 0.0 && b < 1.0) cuts.insert(b);
  }
  SimpsonPair rule;
  const double coarse_spacing = 2.0 * fine_spacing;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    const double a = *it;
    const double b = *std::next(it);
    auto coarse_panels = static_cast<std::size_t>(std::ceil((b - a) / coarse_spacing - 1e-9));
    coarse_panels = std::max<std::size_t>(coarse_panels, 2);
    if (coarse_panels % 2 != 0) ++coarse_panels;
    const std::size_t fine_panels = 2 * coarse_panels;
    const double h = (b - a) / static_cast<double>(fine_panels);

    for (std::size_t i = 0; i <= fine_panels; ++i) {
      double x = a + static_cast<double>(i) * h;
      if (i == 0) x = std::nextafter(a, b);
      if (i == fine_panels) x = std::nextafter(b, a);
      const double wf = (i == 0 || i == fine_panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      double wc = 0.0;
      if (i % 2 == 0) {
        const std::size_t j = i / 2;
        wc = ((j == 0 || j == coarse_panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0)) * 2.0 * h / 3.0;
      }
      rule.nodes.push_back(x);
      rule.fine.push_back(wf * h / 3.0);
      rule.coarse.push_back(wc);
    }
  }
  return rule;
}

// Neumaier-compensated running sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double richardson(double fine, double coarse) { return fine + (fine - coarse) / 15.0; }

void check_residual(double fine, double coarse, double scale, const QuadratureOptions& opts,
                    const char* what) {
  const double residual = std::abs(fine - coarse) / 15.0;
  if (!(residual <= opts.tolerance * std::max(1.0, scale))) {
    std::ostringstream msg;
    msg << what << ": quadrature did not converge (residual " << residual << ")";
    throw NumericalToleranceError(msg.str(), residual);
  }
}

double normalization(int k) { return k == 0 ? 0.5 : 1.0; }

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

TargetProfile1D TargetProfile1D::epsilon(std::function<double(double)> phi, double delta,
                                         std::vector<double> breakpoints) {
  TargetProfile1D t;
  t.variable = Variable::Epsilon;
  t.angle_fn = std::move(phi);
  t.lo = 1.0 - delta;
  t.hi = 1.0;
  t.breakpoints = std::move(breakpoints);
  t.validate();
  return t;
}

TargetProfile1D TargetProfile1D::uniform_epsilon(double angle, double delta) {
  require(finite(angle), "target angle must be finite");
  return epsilon([angle](double) { return angle; }, delta);
}

TargetProfile1D TargetProfile1D::position(std::function<double(double)> phi, double lo, double hi,
                                          std::vector<double> breakpoints) {
  TargetProfile1D t;
  t.variable = Variable::Position;
  t.angle_fn = std::move(phi);
  t.lo = lo;
  t.hi = hi;
  t.breakpoints = std::move(breakpoints);
  t.validate();
  return t;
}

TargetProfile1D TargetProfile1D::tabulated(Variable variable, std::span<const double> xs,
                                           std::span<const double> angles) {
  require(xs.size() >= 2 && xs.size() == angles.size(),
          "tabulated target needs at least two (x, angle) samples of equal count");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require(finite(xs[i]) && finite(angles[i]), "tabulated target samples must be finite");
    if (i > 0) require(xs[i] > xs[i - 1], "tabulated target abscissae must strictly increase");
  }
  std::vector<double> x(xs.begin(), xs.end());
  std::vector<double> y(angles.begin(), angles.end());

  TargetProfile1D t;
  t.variable = variable;
  t.lo = x.front();
  t.hi = x.back();
  t.breakpoints.assign(x.begin() + 1, x.end() - 1);
  t.angle_fn = [x = std::move(x), y = std::move(y)](double v) {
    if (v <= x.front()) return y.front();
    if (v >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double f = (v - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + f * (y[i] - y[i - 1]);
  };
  t.validate();
  return t;
}

double TargetProfile1D::base(double x) const {
  const double phi = angle_fn(x);
  return variable == Variable::Epsilon ? phi / x : phi;
}

void TargetProfile1D::validate() const {
  require(static_cast<bool>(angle_fn), "target has no angle function");
  require(finite(lo) && finite(hi) && lo < hi, "target active range must satisfy lo < hi");
  require(lo >= 0.0 && hi <= 1.0, "target active range must lie in [0, 1]");
  if (variable == Variable::Epsilon) {
    require(lo > 0.0, "epsilon targets must be bounded away from zero (delta < 1)");
  }
  for (double x : {lo, 0.5 * (lo + hi), hi}) {
    require(finite(base(x)), "target angle function is not finite on its active range");
  }
}

void TargetProfile2D::validate() const {
  require(static_cast<bool>(angle_fn), "target has no angle function");
  require(finite(eps_lo) && eps_lo > 0.0 && eps_lo < 1.0,
          "joint target epsilon range must be [1 - delta, 1] with 0 < delta < 1");
  for (double s : {0.0, 0.5, 1.0}) {
    for (double e : {eps_lo, 1.0}) {
      require(finite(base(s, e)), "joint target angle function is not finite on its domain");
    }
  }
}

TargetProfile1D slice_target(double lo, double hi, double angle, double ramp_width) {
  require(finite(lo) && finite(hi) && finite(angle) && finite(ramp_width),
          "slice parameters must be finite");
  require(0.0 <= lo && lo < hi && hi <= 1.0, "slice requires 0 <= lo < hi <= 1");
  require(ramp_width >= 0.0 && ramp_width < 0.5 * (hi - lo),
          "slice ramp width must be in [0, (hi - lo)/2)");

  std::vector<double> breaks{lo, hi};
  std::function<double(double)> phi;
  if (ramp_width == 0.0) {
    phi = [=](double s) { return (s >= lo && s <= hi) ? angle : 0.0; };
  } else {
    breaks.push_back(lo - ramp_width);
    breaks.push_back(hi + ramp_width);
    const double w = ramp_width;
    phi = [=](double s) {
      if (s >= lo && s <= hi) return angle;
      if (s > lo - w && s < lo) return angle * (s - (lo - w)) / w;
      if (s > hi && s < hi + w) return angle * ((hi + w) - s) / w;
      return 0.0;
    };
  }
  return TargetProfile1D::position(std::move(phi), 0.0, 1.0, std::move(breaks));
}

// ---------------------------------------------------------------------------
// Even extension and coefficients
// ---------------------------------------------------------------------------

double EvenFunction::operator()(double x) const { return on_unit(std::abs(x)); }

EvenFunction even_extension(const TargetProfile1D& t) {
  t.validate();
  EvenFunction g;
  const double lo = t.lo;
  const double hi = t.hi;
  const double below = t.base(lo);
  const double above = t.base(hi);
  g.on_unit = [t, lo, hi, below, above](double x) {
    if (x < lo) return below;
    if (x > hi) return above;
    return t.base(x);
  };
  g.breakpoints = t.breakpoints;
  g.breakpoints.push_back(lo);
  g.breakpoints.push_back(hi);
  return g;
}

FourierDesign1D coefficients_1d(const EvenFunction& g, int term_count, Variable variable,
                                bool divides_by_parameter, const QuadratureOptions& opts) {
  require(term_count >= 1, "term count must be at least 1");
  require(static_cast<bool>(g.on_unit), "even function is empty");
  require(opts.fine_spacing > 0.0 && opts.fine_spacing <= 0.25, "invalid quadrature spacing");

  const SimpsonPair rule = build_rule(g.breakpoints, opts.fine_spacing);
  std::vector<double> values(rule.nodes.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = g.on_unit(rule.nodes[i]);
    if (!finite(values[i])) {
      throw NumericalToleranceError("even function is not finite at a quadrature node",
                                    std::numeric_limits<double>::infinity());
    }
    scale = std::max(scale, std::abs(values[i]));
  }

  FourierDesign1D d;
  d.variable = variable;
  d.divides_by_parameter = divides_by_parameter;
  d.terms.resize(static_cast<std::size_t>(term_count));
  std::vector<std::pair<double, double>> estimates(d.terms.size());
  detail::parallel_for(d.terms.size(), 0, [&](std::size_t idx) {
    const int k = static_cast<int>(idx);
    Accumulator fine_acc;
    Accumulator coarse_acc;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double f = values[i] * std::cos(kPi * k * rule.nodes[i]);
      fine_acc.add(rule.fine[i] * f);
      coarse_acc.add(rule.coarse[i] * f);
    }
    const double fine = fine_acc.value();
    const double coarse = coarse_acc.value();
    // int_{-1}^{1} = 2 int_0^1 for even integrands.
    const double c = 2.0 * normalization(k);
    d.terms[idx] = Term1D{k, c * richardson(fine, coarse)};
    estimates[idx] = {c * fine, c * coarse};
  });
  for (const auto& [fine, coarse] : estimates) {
    check_residual(fine, coarse, scale, opts, "coefficients_1d");
  }
  return d;
}

FourierDesign1D design_1d(const TargetProfile1D& t, int term_count, const QuadratureOptions& opts) {
  return coefficients_1d(even_extension(t), term_count, t.variable,
                         t.variable == Variable::Epsilon, opts);
}

FourierDesign2D coefficients_2d(const TargetProfile2D& t, int k1_count, int k2_count,
                                const QuadratureOptions& opts) {
  require(k1_count >= 1 && k2_count >= 1, "term counts must be at least 1");
  require(opts.fine_spacing > 0.0 && opts.fine_spacing <= 0.25, "invalid quadrature spacing");
  t.validate();

  std::vector<double> eps_breaks = t.eps_breakpoints;
  eps_breaks.push_back(t.eps_lo);
  const SimpsonPair rs = build_rule(t.s_breakpoints, opts.fine_spacing);
  const SimpsonPair re = build_rule(eps_breaks, opts.fine_spacing);
  const std::size_t ns = rs.nodes.size();
  const std::size_t ne = re.nodes.size();
  const auto k1n = static_cast<std::size_t>(k1_count);
  const auto k2n = static_cast<std::size_t>(k2_count);

  std::vector<double> cos_e(k2n * ne);
  for (std::size_t k = 0; k < k2n; ++k) {
    for (std::size_t j = 0; j < ne; ++j) {
      cos_e[k * ne + j] = std::cos(kPi * static_cast<double>(k) * re.nodes[j]);
    }
  }

  // Inner eps-integrals per s node: h[k2][i].
  std::vector<double> h_fine(k2n * ns);
  std::vector<double> h_coarse(k2n * ns);
  std::vector<double> row_scale(ns, 0.0);
  detail::parallel_for(ns, 0, [&](std::size_t i) {
    const double s = rs.nodes[i];
    std::vector<double> row(ne);
    for (std::size_t j = 0; j < ne; ++j) {
      const double e = std::max(re.nodes[j], t.eps_lo);
      row[j] = t.base(s, e);
      row_scale[i] = std::max(row_scale[i], std::abs(row[j]));
    }
    for (std::size_t k = 0; k < k2n; ++k) {
      Accumulator f;
      Accumulator c;
      for (std::size_t j = 0; j < ne; ++j) {
        const double v = row[j] * cos_e[k * ne + j];
        f.add(re.fine[j] * v);
        c.add(re.coarse[j] * v);
      }
      h_fine[k * ns + i] = f.value();
      h_coarse[k * ns + i] = c.value();
    }
  });
  const double scale = *std::max_element(row_scale.begin(), row_scale.end());
  if (!finite(scale)) {
    throw NumericalToleranceError("joint target is not finite at a quadrature node",
                                  std::numeric_limits<double>::infinity());
  }

  FourierDesign2D d;
  d.terms.resize(k1n * k2n);
  for (std::size_t a = 0; a < k1n; ++a) {
    for (std::size_t b = 0; b < k2n; ++b) {
      Accumulator fine_acc;
      Accumulator coarse_acc;
      for (std::size_t i = 0; i < ns; ++i) {
        const double c1 = std::cos(kPi * static_cast<double>(a) * rs.nodes[i]);
        fine_acc.add(rs.fine[i] * c1 * h_fine[b * ns + i]);
        coarse_acc.add(rs.coarse[i] * c1 * h_coarse[b * ns + i]);
      }
      const double fine = fine_acc.value();
      const double coarse = coarse_acc.value();
      const double norm = 4.0 * normalization(static_cast<int>(a)) * normalization(static_cast<int>(b));
      check_residual(norm * fine, norm * coarse, scale, opts, "coefficients_2d");
      d.terms[a * k2n + b] = Term2D{static_cast<int>(a), static_cast<int>(b), norm * richardson(fine, coarse)};
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double series_eval_1d(const FourierDesign1D& d, double x) {
  double sum = 0.0;
  for (const Term1D& t : d.terms) sum += t.beta * std::cos(kPi * t.k * x);
  return sum;
}

double series_eval_2d(const FourierDesign2D& d, double s, double eps) {
  double sum = 0.0;
  for (const Term2D& t : d.terms) {
    sum += t.beta * std::cos(kPi * t.k1 * s) * std::cos(kPi * t.k2 * eps);
  }
  return sum;
}

TruncationReport truncation_error(const FourierDesign1D& d, const TargetProfile1D& t, int grid_n) {
  require(grid_n >= 2, "truncation_error needs at least two grid points");
  t.validate();
  TruncationReport r;
  double sq = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    const double x = t.lo + (t.hi - t.lo) * static_cast<double>(i) / (grid_n - 1);
    const double series = series_eval_1d(d, x);
    const double err = std::abs(series - t.base(x));
    const double angle_err = t.variable == Variable::Epsilon
                                 ? std::abs(x * series - t.angle_fn(x))
                                 : err;
    r.max_abs = std::max(r.max_abs, err);
    r.max_abs_angle = std::max(r.max_abs_angle, angle_err);
    sq += err * err;
  }
  r.rms = std::sqrt(sq / grid_n);
  return r;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void FourierDesign1D::validate() const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require(terms[i].k >= 0, "design term index k must be nonnegative");
    require(finite(terms[i].beta), "design coefficient must be finite");
    if (i > 0) require(terms[i].k > terms[i - 1].k, "design term indices must strictly increase");
  }
}

void FourierDesign2D::validate() const {
  std::set<std::pair<int, int>> seen;
  for (const Term2D& t : terms) {
    require(t.k1 >= 0 && t.k2 >= 0, "design term indices must be nonnegative");
    require(finite(t.beta), "design coefficient must be finite");
    require(seen.emplace(t.k1, t.k2).second, "design term index pairs must be unique");
  }
}

}  // namespace fsyn
