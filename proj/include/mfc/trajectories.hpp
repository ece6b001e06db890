#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace mfc {

/// Reference value and its first two time derivatives.
struct ReferenceSample {
  double y = 0.0;
  double dy = 0.0;
  double ddy = 0.0;
};

struct HoldSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  double value = 0.0;
};

/// Quintic smoothstep y_start + (y_end - y_start)(10 s^3 - 15 s^4 + 6 s^5),
/// s = (t - t0) / (t1 - t0): first and second derivatives vanish at both ends.
struct BezierSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  double y_start = 0.0;
  double y_end = 0.0;
};

/// Critically damped second-order filter response toward `target`, started
/// from value `y0` and slope `v0` at t0, time constant `time_constant`.
struct FilteredStepSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  double y0 = 0.0;
  double v0 = 0.0;
  double target = 0.0;
  double time_constant = 1.0;
};

inline constexpr double kFilteredSettleConstants = 10.0;

using Segment = std::variant<HoldSegment, BezierSegment, FilteredStepSegment>;

ReferenceSample eval_segment(const Segment& s, double t);
double segment_start(const Segment& s);
double segment_end(const Segment& s);

/// Piecewise reference over [start(), horizon()]. Segments must be
/// contiguous; values must be continuous at every joint except where the
/// following segment is a Hold (a pure step).
class ReferenceProfile {
 public:
  ReferenceProfile() = default;
  explicit ReferenceProfile(std::vector<Segment> segments);

  /// Throws RangeError outside [start(), horizon()].
  ReferenceSample eval(double t) const;

  double start() const;
  double horizon() const;
  const std::vector<Segment>& segments() const { return segments_; }

  /// Intervals during which the reference moves: Bezier segments in full,
  /// filtered steps for kFilteredSettleConstants time constants (the
  /// remaining fraction of the step is then below 6e-4).
  std::vector<std::pair<double, double>> move_intervals() const;

  /// Smallest and largest value reached, sampled at segment ends and on a
  /// fine grid inside moving segments.
  std::pair<double, double> value_range() const;

 private:
  std::vector<Segment> segments_;
};

inline ReferenceSample eval_reference(const ReferenceProfile& p, double t) { return p.eval(t); }

/// Constant reference over [0, horizon].
ReferenceProfile constant_reference(double value, double horizon);

/// Piecewise-constant levels (time, value) with strictly increasing times,
/// each change passed through a critically damped filter of time constant
/// `smoothing` (0 gives raw steps). Runs from the first level's time to
/// `horizon`.
ReferenceProfile staircase(const std::vector<std::pair<double, double>>& levels, double smoothing,
                           double horizon);

}  // namespace mfc
