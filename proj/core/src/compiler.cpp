#include "fsyn/compiler.hpp"

#include "fsyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace fsyn {

namespace {

constexpr double kPi = std::numbers::pi;

void check_beta0(double beta0) {
  // Small slack so "30deg" converted from degrees is accepted.
  if (!(beta0 > 0.0 && beta0 <= kDefaultBeta0 * (1.0 + 1e-12))) {
    throw InvalidArgument("beta0 must lie in (0, pi/6]");
  }
}

SegmentKind flip_kind(Axis axis) { return axis == Axis::Y ? SegmentKind::RfY : SegmentKind::RfX; }
SegmentKind conj_kind(Axis axis) { return axis == Axis::Y ? SegmentKind::RfX : SegmentKind::RfY; }

class Emitter {
 public:
  explicit Emitter(std::vector<PulseSegment>& out) : out_(out) {}

  void operator()(SegmentKind kind, double magnitude) {
    if (magnitude != 0.0) out_.push_back({kind, magnitude});
  }

 private:
  std::vector<PulseSegment>& out_;
};

// Chronological U2k then U1k: C(a) F C(-a) | C(-a) F C(a).
void emit_conjugation_element(Emitter& emit, SegmentKind conj, double conj_angle, SegmentKind flip,
                              double half_flip) {
  emit(conj, conj_angle);
  emit(flip, half_flip);
  emit(conj, -conj_angle);
  emit(conj, -conj_angle);
  emit(flip, half_flip);
  emit(conj, conj_angle);
}

PulseProgram compile_1d(const FourierDesign1D& d, Axis axis, double beta0, bool position) {
  check_beta0(beta0);
  d.validate();

  PulseProgram p;
  p.beta0 = beta0;
  p.provenance.push_back({d, axis});
  Emitter emit(p.segments);
  const SegmentKind flip = flip_kind(axis);

  for (const Term1D& term : d.terms) {
    if (term.beta == 0.0) continue;
    const int n = split_count(term.beta, beta0);
    const double b = term.beta / n;
    for (int rep = 0; rep < n; ++rep) {
      if (term.k == 0) {
        emit(flip, b);
        continue;
      }
      if (position) {
        const double area = (axis == Axis::Y ? 1.0 : -1.0) * kPi * term.k;
        emit_conjugation_element(emit, SegmentKind::Grad, area, flip, 0.5 * b);
      } else {
        emit_conjugation_element(emit, conj_kind(axis), -kPi * term.k, flip, 0.5 * b);
      }
    }
  }
  return p;
}

void require_same_kind(const Design& a, const Design& b) {
  if (a.index() != b.index()) throw InvalidArgument("Euler stages must share a design kind");
  if (const auto* da = std::get_if<FourierDesign1D>(&a)) {
    if (da->variable != std::get<FourierDesign1D>(b).variable) {
      throw InvalidArgument("Euler stages must share a design variable");
    }
  }
}

}  // namespace

int split_count(double beta, double beta0) {
  if (beta == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(std::abs(beta) / beta0)));
}

PulseProgram compile_eps(const FourierDesign1D& d, Axis axis, double beta0) {
  if (d.variable != Variable::Epsilon || !d.divides_by_parameter) {
    throw InvalidArgument("compile_eps needs an epsilon design approximating phi/eps");
  }
  return compile_1d(d, axis, beta0, false);
}

PulseProgram compile_position(const FourierDesign1D& d, Axis axis, double beta0) {
  if (d.variable != Variable::Position || d.divides_by_parameter) {
    throw InvalidArgument("compile_position needs a position design approximating phi");
  }
  return compile_1d(d, axis, beta0, true);
}

PulseProgram compile_joint(const FourierDesign2D& d, Axis axis, double beta0) {
  check_beta0(beta0);
  d.validate();

  std::vector<Term2D> terms = d.terms;
  std::stable_sort(terms.begin(), terms.end(), [](const Term2D& a, const Term2D& b) {
    return std::tie(a.k1, a.k2) < std::tie(b.k1, b.k2);
  });

  PulseProgram p;
  p.beta0 = beta0;
  p.provenance.push_back({d, axis});
  Emitter emit(p.segments);
  const SegmentKind flip = flip_kind(axis);
  const SegmentKind conj = conj_kind(axis);
  const double grad_sign = axis == Axis::Y ? 1.0 : -1.0;

  for (const Term2D& term : terms) {
    if (term.beta == 0.0) continue;
    const int n = split_count(term.beta, beta0);
    const double quarter = 0.25 * term.beta / n;
    const double area = grad_sign * kPi * term.k1;
    const double outer = kPi * term.k2;
    for (int rep = 0; rep < n; ++rep) {
      emit(conj, -outer);
      emit_conjugation_element(emit, SegmentKind::Grad, area, flip, quarter);
      emit(conj, outer);
      emit(conj, outer);
      emit_conjugation_element(emit, SegmentKind::Grad, area, flip, quarter);
      emit(conj, -outer);
    }
  }
  return p;
}

PulseProgram compile(const Design& d, Axis axis, double beta0) {
  if (const auto* one = std::get_if<FourierDesign1D>(&d)) {
    return one->variable == Variable::Epsilon ? compile_eps(*one, axis, beta0)
                                              : compile_position(*one, axis, beta0);
  }
  return compile_joint(std::get<FourierDesign2D>(d), axis, beta0);
}

PulseProgram compile_euler(const Design& first, const Design& second, const Design& third,
                           double beta0, std::array<Axis, 3> axes) {
  require_same_kind(first, second);
  require_same_kind(first, third);
  PulseProgram out;
  out.beta0 = beta0;
  const Design* stages[] = {&first, &second, &third};
  for (std::size_t i = 0; i < 3; ++i) {
    PulseProgram part = compile(*stages[i], axes[i], beta0);
    out.segments.insert(out.segments.end(), part.segments.begin(), part.segments.end());
    out.provenance.insert(out.provenance.end(), part.provenance.begin(), part.provenance.end());
  }
  return out;
}

PulseProgram peephole_cancel(const PulseProgram& p) {
  PulseProgram out;
  out.beta0 = p.beta0;
  out.provenance = p.provenance;
  for (const PulseSegment& seg : p.segments) {
    if (seg.magnitude == 0.0) continue;
    if (!out.segments.empty() && out.segments.back().kind == seg.kind) {
      out.segments.back().magnitude += seg.magnitude;
      if (out.segments.back().magnitude == 0.0) out.segments.pop_back();
    } else {
      out.segments.push_back(seg);
    }
  }
  return out;
}

double program_duration(const PulseProgram& p, double max_rf_amplitude, double max_grad_area_rate) {
  if (!(max_rf_amplitude > 0.0) || !(max_grad_area_rate > 0.0)) {
    throw InvalidArgument("program_duration: rates must be positive");
  }
  double rf = 0.0;
  double grad = 0.0;
  for (const PulseSegment& seg : p.segments) {
    (seg.kind == SegmentKind::Grad ? grad : rf) += std::abs(seg.magnitude);
  }
  return rf / max_rf_amplitude + grad / max_grad_area_rate;
}

}  // namespace fsyn
