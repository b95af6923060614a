#pragma once

// Compiles cosine-series designs into chronological lists of hard rf pulses
// and gradient lobes.
//
// Segment semantics at dispersion point (s, eps):
//   RfX(theta) -> exp(theta * eps * Omega_x)
//   RfY(theta) -> exp(theta * eps * Omega_y)
//   Grad(area) -> exp(area * s * Omega_z)
// The net propagator multiplies segments right to left: the first segment in
// the list acts first.

#include "fsyn/fourier.hpp"

#include <array>
#include <numbers>
#include <vector>

namespace fsyn {

enum class SegmentKind { RfX, RfY, Grad };
enum class Axis { X, Y };

struct PulseSegment {
  SegmentKind kind = SegmentKind::RfY;
  double magnitude = 0.0;  // signed flip angle (rf) or gradient area

  friend bool operator==(const PulseSegment&, const PulseSegment&) = default;
};

/// One compiled design and the rotation axis it was compiled for.
struct ProgramStage {
  Design design;
  Axis axis = Axis::Y;

  friend bool operator==(const ProgramStage&, const ProgramStage&) = default;
};

struct PulseProgram {
  std::vector<PulseSegment> segments;  // chronological
  double beta0 = 0.0;
  std::vector<ProgramStage> provenance;

  friend bool operator==(const PulseProgram&, const PulseProgram&) = default;
};

inline constexpr double kDefaultBeta0 = std::numbers::pi / 6.0;  // 30 degrees
inline constexpr double kReproductionBeta0 = 5.0 * std::numbers::pi / 180.0;

/// Number of repetitions used for a coefficient: ceil(|beta| / beta0).
int split_count(double beta, double beta0);

/// Rf-inhomogeneity design (Variable::Epsilon). Each term (k, beta) becomes
/// n = ceil(|beta|/beta0) copies of the six-pulse conjugation element
///   [C(-pi k), F(b/2), C(pi k), C(pi k), F(b/2), C(-pi k)],  b = beta/n,
/// with F the flip about `axis` and C the conjugating pulse about the other
/// transverse axis. k = 0 terms emit n bare F(b) pulses.
PulseProgram compile_eps(const FourierDesign1D& d, Axis axis, double beta0 = kDefaultBeta0);

/// Position design (Variable::Position). Same splitting, with gradient lobes as
/// the conjugating segments:
///   axis Y: [G(pi k), Y(b/2), G(-pi k), G(-pi k), Y(b/2), G(pi k)]
///   axis X: [G(-pi k), X(b/2), G(pi k), G(pi k), X(b/2), G(-pi k)]
PulseProgram compile_position(const FourierDesign1D& d, Axis axis, double beta0 = kDefaultBeta0);

/// Joint (s, eps) design. Each term (k1, k2, beta) becomes n copies of the
/// sixteen-segment element: the position element for k1 with quarter flips,
/// conjugated by +/- pi k2 rf pulses about the other transverse axis.
PulseProgram compile_joint(const FourierDesign2D& d, Axis axis, double beta0 = kDefaultBeta0);

/// Dispatches on the design kind.
PulseProgram compile(const Design& d, Axis axis, double beta0 = kDefaultBeta0);

/// Concatenates three stages so the net propagator is R3 R2 R1 with `first`
/// acting first. All designs must share a kind. Default axes realize
/// exp(c Omega_y) exp(b Omega_x) exp(a Omega_y) for designs (a, b, c).
PulseProgram compile_euler(const Design& first, const Design& second, const Design& third,
                           double beta0 = kDefaultBeta0,
                           std::array<Axis, 3> axes = {Axis::Y, Axis::X, Axis::Y});

/// Merges runs of same-kind segments (they commute) and drops exact zeros.
/// The result is fully reduced, so the operation is idempotent.
PulseProgram peephole_cancel(const PulseProgram& p);

/// Total time at the given peak rates: sum |rf| / max_rf + sum |grad| / max_grad.
double program_duration(const PulseProgram& p, double max_rf_amplitude, double max_grad_area_rate);

}  // namespace fsyn
