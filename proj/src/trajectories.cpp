#include "mfc/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b))); }

ReferenceSample eval_bezier(const BezierSegment& b, double t) {
  const double span = b.t1 - b.t0;
  const double s = std::clamp((t - b.t0) / span, 0.0, 1.0);
  const double d = b.y_end - b.y_start;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {b.y_start + d * (10.0 * s3 - 15.0 * s3 * s + 6.0 * s3 * s2),
          d * (30.0 * s2 - 60.0 * s3 + 30.0 * s2 * s2) / span,
          d * (60.0 * s - 180.0 * s2 + 120.0 * s3) / (span * span)};
}

ReferenceSample eval_filtered(const FilteredStepSegment& f, double t) {
  const double T = f.time_constant;
  const double s = t - f.t0;
  const double c1 = f.y0 - f.target;
  const double c2 = f.v0 + c1 / T;
  const double decay = std::exp(-s / T);
  const double lin = c1 + c2 * s;
  return {f.target + lin * decay, (c2 - lin / T) * decay, (-2.0 * c2 / T + lin / (T * T)) * decay};
}

}  // namespace

ReferenceSample eval_segment(const Segment& s, double t) {
  return std::visit(Overloaded{
                        [](const HoldSegment& h) { return ReferenceSample{h.value, 0.0, 0.0}; },
                        [t](const BezierSegment& b) { return eval_bezier(b, t); },
                        [t](const FilteredStepSegment& f) { return eval_filtered(f, t); },
                    },
                    s);
}

double segment_start(const Segment& s) {
  return std::visit([](const auto& seg) { return seg.t0; }, s);
}

double segment_end(const Segment& s) {
  return std::visit([](const auto& seg) { return seg.t1; }, s);
}

ReferenceProfile::ReferenceProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("reference profile needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(segment_end(s) > segment_start(s))) {
      throw ConfigError("reference segment must have positive duration");
    }
    if (const auto* f = std::get_if<FilteredStepSegment>(&s); f && !(f->time_constant > 0.0)) {
      throw ConfigError("filtered step needs a positive time constant");
    }
    if (i == 0) continue;
    const Segment& prev = segments_[i - 1];
    if (!close(segment_end(prev), segment_start(s))) {
      throw ConfigError("reference segments must be contiguous");
    }
    if (!std::holds_alternative<HoldSegment>(s)) {
      const double end_value = eval_segment(prev, segment_end(prev)).y;
      const double start_value = eval_segment(s, segment_start(s)).y;
      if (!close(end_value, start_value)) {
        throw ConfigError("reference value jumps at a segment joint");
      }
    }
  }
}

double ReferenceProfile::start() const {
  return segments_.empty() ? 0.0 : segment_start(segments_.front());
}

double ReferenceProfile::horizon() const {
  return segments_.empty() ? 0.0 : segment_end(segments_.back());
}

ReferenceSample ReferenceProfile::eval(double t) const {
  if (segments_.empty()) throw RangeError("empty reference profile");
  const double tol = 1e-9 * (1.0 + std::abs(horizon()));
  if (!(t >= start() - tol) || !(t <= horizon() + tol)) {
    throw RangeError("time " + std::to_string(t) + " outside reference horizon");
  }
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double v, const Segment& s) { return v < segment_end(s); });
  return eval_segment(it == segments_.end() ? segments_.back() : *it, t);
}

std::vector<std::pair<double, double>> ReferenceProfile::move_intervals() const {
  std::vector<std::pair<double, double>> out;
  for (const Segment& s : segments_) {
    if (std::holds_alternative<HoldSegment>(s)) continue;
    double end = segment_end(s);
    if (const auto* f = std::get_if<FilteredStepSegment>(&s)) {
      end = std::min(end, f->t0 + kFilteredSettleConstants * f->time_constant);
    }
    if (!out.empty() && close(out.back().second, segment_start(s))) {
      out.back().second = end;
    } else {
      out.emplace_back(segment_start(s), end);
    }
  }
  return out;
}

std::pair<double, double> ReferenceProfile::value_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Segment& s : segments_) {
    const double a = segment_start(s);
    const double b = segment_end(s);
    const int n = std::holds_alternative<HoldSegment>(s) ? 1 : 256;
    for (int k = 0; k <= n; ++k) {
      const double v = eval_segment(s, a + (b - a) * k / n).y;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

ReferenceProfile constant_reference(double value, double horizon) {
  return ReferenceProfile({HoldSegment{0.0, horizon, value}});
}

ReferenceProfile staircase(const std::vector<std::pair<double, double>>& levels, double smoothing,
                           double horizon) {
  if (levels.empty()) throw ConfigError("staircase needs at least one level");
  if (!(smoothing >= 0.0)) throw ConfigError("staircase smoothing must be >= 0");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i].first > levels[i - 1].first)) {
      throw ConfigError("staircase level times must increase");
    }
  }
  if (!(horizon > levels.back().first)) {
    throw ConfigError("staircase horizon must exceed the last level time");
  }

  std::vector<Segment> segs;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double t0 = levels[i].first;
    const double t1 = i + 1 < levels.size() ? levels[i + 1].first : horizon;
    const double target = levels[i].second;
    if (i == 0 || smoothing == 0.0) {
      segs.emplace_back(HoldSegment{t0, t1, target});
      continue;
    }
    const ReferenceSample carry = eval_segment(segs.back(), t0);
    segs.emplace_back(FilteredStepSegment{t0, t1, carry.y, carry.dy, target, smoothing});
  }
  return ReferenceProfile(std::move(segs));
}

}  // namespace mfc
