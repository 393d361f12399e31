#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/geometry.hpp"
#include "turnkit/skeleton.hpp"

namespace turnkit {

// Fixed 64-bit mixing step (splitmix64), used for seed derivation so that
// per-clip streams are independent of generation order.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64_next(s);
}

// Small deterministic generator for the test harness; normal deviates via
// the basic Box-Muller transform.
class SynthRng {
public:
  explicit SynthRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t state_;
};

enum class RateProfile : int { constant = 0, smoothstep = 1 };

constexpr std::string_view rate_profile_name(RateProfile p) {
  return p == RateProfile::constant ? "constant" : "smoothstep";
}

inline std::optional<RateProfile> rate_profile_from_name(std::string_view n) {
  if (n == "constant") return RateProfile::constant;
  if (n == "smoothstep") return RateProfile::smoothstep;
  return std::nullopt;
}

// Heading progress through a turn, s in [0, 1] -> [0, 1].
inline double profile_value(RateProfile p, double s) {
  s = std::clamp(s, 0.0, 1.0);
  if (p == RateProfile::constant) return s;
  return s * s * (3.0 - 2.0 * s);  // smoothstep; peak rate 1.5x the mean
}

// Peak-to-mean rate ratio of a profile.
constexpr double profile_peak_ratio(RateProfile p) {
  return p == RateProfile::constant ? 1.0 : 1.5;
}

// One leg of a walking route: straight travel or an in-place-heading turn.
struct RouteSegment {
  enum class Kind { straight, turn };
  Kind kind = Kind::straight;
  double duration_s = 0.0;
  double turn_deg = 0.0;  // signed; positive = ccw
  RateProfile profile = RateProfile::constant;

  static RouteSegment straight(double duration_s) {
    return {Kind::straight, duration_s, 0.0, RateProfile::constant};
  }

  static RouteSegment turn(double signed_deg, double duration_s,
                           RateProfile profile = RateProfile::constant) {
    return {Kind::turn, duration_s, signed_deg, profile};
  }
};

struct RouteParams {
  std::vector<RouteSegment> segments;
  double fps = 30.0;
  double hip_width = 0.30;
  double knee_width = 0.22;
  double shoulder_width = 0.40;
  int en_bloc_lag_frames = 0;  // knee/shoulder orientation lag behind the hip
  double walk_speed = 1.2;
  std::string clip_id = "synth";
};

// Per-turn groundtruth within a route.
struct TurnSpan {
  std::size_t start_frame = 0;  // half-open [start, end)
  std::size_t end_frame = 0;
  double turn_deg = 0.0;  // signed
  double mean_rate_deg_s = 0.0;
  double max_rate_deg_s = 0.0;
};

struct RouteResult {
  SkeletonSequence seq;
  std::vector<TurnSpan> turns;
  std::vector<double> heading_deg;  // per-frame heading
};

namespace detail {

// Heading at time t for a segment list; segments are contiguous in time.
inline double route_heading_deg(const std::vector<RouteSegment>& segs,
                                double t) {
  double base = 0.0;
  double t0 = 0.0;
  for (const RouteSegment& s : segs) {
    const double t1 = t0 + s.duration_s;
    if (t < t1) {
      if (s.kind == RouteSegment::Kind::turn && s.duration_s > 0.0) {
        return base + s.turn_deg * profile_value(s.profile, (t - t0) / s.duration_s);
      }
      return base;
    }
    if (s.kind == RouteSegment::Kind::turn) base += s.turn_deg;
    t0 = t1;
  }
  return base;
}

}  // namespace detail

// Builds a 17-joint kinematic walker whose hip/knee/shoulder pair vectors
// are perpendicular to the (possibly lagged) heading at their configured
// widths. Rigid offsets, analytic heading: the generator is an exact
// oracle for ground-plane rotation, not a gait simulation. Up axis is z.
inline RouteResult generate_route(const RouteParams& params) {
  if (params.segments.empty()) {
    throw InvalidArgumentError("generate_route: empty segment list");
  }
  if (!(params.fps > 0.0) || !std::isfinite(params.fps)) {
    throw InvalidArgumentError("generate_route: fps must be positive");
  }
  if (!(params.hip_width > 0.0) || !(params.knee_width > 0.0) ||
      !(params.shoulder_width > 0.0)) {
    throw InvalidArgumentError("generate_route: widths must be positive");
  }
  if (params.en_bloc_lag_frames < 0) {
    throw InvalidArgumentError("generate_route: lag must be >= 0");
  }
  double total = 0.0;
  for (const RouteSegment& s : params.segments) {
    if (!(s.duration_s > 0.0)) {
      throw InvalidArgumentError("generate_route: segment duration must be positive");
    }
    total += s.duration_s;
  }

  // Last frame lands at or just past the end of the final segment, so a
  // turn that closes the route is fully captured.
  const double fps = params.fps;
  const std::size_t T =
      static_cast<std::size_t>(std::ceil(total * fps - 1e-9)) + 1;

  RouteResult out;
  out.seq.fps = fps;
  out.seq.up_axis = Axis::z;
  out.seq.clip_id = params.clip_id;
  out.seq.frames.reserve(T);
  out.heading_deg.reserve(T);

  // Turn spans in frames: last frame at or before onset through the first
  // frame at or after completion (half-open).
  double t0 = 0.0;
  for (const RouteSegment& s : params.segments) {
    if (s.kind == RouteSegment::Kind::turn) {
      const double t1 = t0 + s.duration_s;
      TurnSpan span;
      span.start_frame = static_cast<std::size_t>(std::floor(t0 * fps + 1e-9));
      span.end_frame = std::min<std::size_t>(
          T, static_cast<std::size_t>(std::ceil(t1 * fps - 1e-9)) + 1);
      span.turn_deg = s.turn_deg;
      span.mean_rate_deg_s = std::abs(s.turn_deg) / s.duration_s;
      span.max_rate_deg_s = span.mean_rate_deg_s * profile_peak_ratio(s.profile);
      out.turns.push_back(span);
    }
    t0 += s.duration_s;
  }

  double px = 0.0, py = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    const double t = static_cast<double>(i) / fps;
    const double hdg = detail::route_heading_deg(params.segments, t);
    out.heading_deg.push_back(hdg);

    const double lag_t =
        std::max(0.0, t - static_cast<double>(params.en_bloc_lag_frames) / fps);
    const double hdg_lag = detail::route_heading_deg(params.segments, lag_t);

    const double a = to_radians(hdg);
    const double al = to_radians(hdg_lag);
    const double dx = std::cos(a), dy = std::sin(a);      // travel direction
    const double nx = -std::sin(a), ny = std::cos(a);     // left normal (hip)
    const double lx = -std::sin(al), ly = std::cos(al);   // lagged left normal

    SkeletonFrame f;
    auto place = [&](JointId id, double cx, double cy, double z) {
      f.set(id, {cx, cy, z});
    };
    const double hw = params.hip_width / 2.0;
    const double kw = params.knee_width / 2.0;
    const double sw = params.shoulder_width / 2.0;

    place(JointId::pelvis, px, py, 1.00);
    place(JointId::left_hip, px + nx * hw, py + ny * hw, 1.00);
    place(JointId::right_hip, px - nx * hw, py - ny * hw, 1.00);
    place(JointId::left_knee, px + lx * kw, py + ly * kw, 0.55);
    place(JointId::right_knee, px - lx * kw, py - ly * kw, 0.55);
    place(JointId::left_ankle, px + lx * kw, py + ly * kw, 0.08);
    place(JointId::right_ankle, px - lx * kw, py - ly * kw, 0.08);
    place(JointId::spine, px, py, 1.25);
    place(JointId::thorax, px, py, 1.45);
    place(JointId::neck, px, py, 1.60);
    place(JointId::head, px, py, 1.72);
    place(JointId::left_shoulder, px + lx * sw, py + ly * sw, 1.50);
    place(JointId::right_shoulder, px - lx * sw, py - ly * sw, 1.50);
    place(JointId::left_elbow, px + lx * (sw + 0.05), py + ly * (sw + 0.05), 1.22);
    place(JointId::right_elbow, px - lx * (sw + 0.05), py - ly * (sw + 0.05), 1.22);
    place(JointId::left_wrist, px + lx * (sw + 0.08), py + ly * (sw + 0.08), 0.96);
    place(JointId::right_wrist, px - lx * (sw + 0.08), py - ly * (sw + 0.08), 0.96);
    out.seq.frames.push_back(std::move(f));

    px += dx * params.walk_speed / fps;
    py += dy * params.walk_speed / fps;
  }
  return out;
}

struct SynthParams {
  double turn_deg = 90.0;  // groundtruth magnitude, > 0
  double duration_s = 2.0;
  double fps = 30.0;
  double hip_width = 0.30;
  double knee_width = 0.22;
  double shoulder_width = 0.40;
  int en_bloc_lag_frames = 0;
  double pre_walk_s = 0.0;
  double post_walk_s = 0.0;
  RateProfile rate_profile = RateProfile::constant;
  TurnDirection direction = TurnDirection::ccw;
  std::string clip_id = "synth";

  void validate() const {
    if (!(turn_deg > 0.0)) throw InvalidArgumentError("synth: turn_deg must be positive");
    if (!(duration_s > 0.0)) throw InvalidArgumentError("synth: duration_s must be positive");
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidArgumentError("synth: fps must be positive");
    if (!(hip_width > 0.0)) throw InvalidArgumentError("synth: hip_width must be positive");
    if (!(knee_width > 0.0)) throw InvalidArgumentError("synth: knee_width must be positive");
    if (!(shoulder_width > 0.0)) throw InvalidArgumentError("synth: shoulder_width must be positive");
    if (en_bloc_lag_frames < 0 ||
        static_cast<double>(en_bloc_lag_frames) >= duration_s * fps) {
      throw InvalidArgumentError("synth: en_bloc_lag_frames must be in [0, turn frames)");
    }
    if (pre_walk_s < 0.0 || post_walk_s < 0.0) {
      throw InvalidArgumentError("synth: pre/post walk must be >= 0");
    }
  }
};

struct TurnGroundtruth {
  std::string clip_id;
  double turn_deg = 0.0;  // magnitude
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  std::vector<double> heading_deg;
  double mean_rate_deg_s = 0.0;
  double max_rate_deg_s = 0.0;
  TurnDirection direction = TurnDirection::ccw;
};

// One straight-turn-straight clip with analytic groundtruth.
inline std::pair<SkeletonSequence, TurnGroundtruth> generate_turn(
    const SynthParams& p) {
  p.validate();
  RouteParams route;
  route.fps = p.fps;
  route.hip_width = p.hip_width;
  route.knee_width = p.knee_width;
  route.shoulder_width = p.shoulder_width;
  route.en_bloc_lag_frames = p.en_bloc_lag_frames;
  route.clip_id = p.clip_id;
  const double sign = p.direction == TurnDirection::ccw ? 1.0 : -1.0;
  if (p.pre_walk_s > 0.0) {
    route.segments.push_back(RouteSegment::straight(p.pre_walk_s));
  }
  route.segments.push_back(
      RouteSegment::turn(sign * p.turn_deg, p.duration_s, p.rate_profile));
  if (p.post_walk_s > 0.0) {
    route.segments.push_back(RouteSegment::straight(p.post_walk_s));
  }
  RouteResult rr = generate_route(route);

  TurnGroundtruth gt;
  gt.clip_id = p.clip_id;
  gt.turn_deg = p.turn_deg;
  gt.start_frame = rr.turns.front().start_frame;
  gt.end_frame = rr.turns.front().end_frame;
  gt.heading_deg = std::move(rr.heading_deg);
  gt.mean_rate_deg_s = p.turn_deg / p.duration_s;
  gt.max_rate_deg_s = gt.mean_rate_deg_s * profile_peak_ratio(p.rate_profile);
  gt.direction = p.direction;
  return {std::move(rr.seq), std::move(gt)};
}

struct NoiseParams {
  double jitter_sd = 0.0;     // per-coordinate Gaussian sd, length units
  double dropout_prob = 0.0;  // per joint per frame, in [0, 1)
  std::uint64_t seed = 0;
};

// Deterministic per seed: jitters every present joint and independently
// marks joints missing.
inline SkeletonSequence add_noise(const SkeletonSequence& seq,
                                  const NoiseParams& n) {
  if (n.jitter_sd < 0.0) throw InvalidArgumentError("noise: jitter_sd must be >= 0");
  if (n.dropout_prob < 0.0 || n.dropout_prob >= 1.0) {
    throw InvalidArgumentError("noise: dropout_prob must be in [0, 1)");
  }
  SkeletonSequence out = seq;
  SynthRng rng(mix_seed(n.seed, 0x6e6f697365ULL));
  for (SkeletonFrame& frame : out.frames) {
    for (int j = 0; j < kJointCount; ++j) {
      auto& p = frame.positions[static_cast<std::size_t>(j)];
      if (!p) continue;
      if (n.jitter_sd > 0.0) {
        p->x += n.jitter_sd * rng.normal();
        p->y += n.jitter_sd * rng.normal();
        p->z += n.jitter_sd * rng.normal();
      }
      if (n.dropout_prob > 0.0 && rng.uniform() < n.dropout_prob) {
        p.reset();
      }
    }
  }
  return out;
}

struct CohortParams {
  int n_subjects = 2;
  int turns_per_subject = 1;
  double angle_mean_deg = 90.0;
  double angle_sd_deg = 0.0;
  double rate_mean_deg_s = 60.0;
  double rate_sd_deg_s = 0.0;
  Group group = Group::unknown;
  std::string subject_prefix = "S";
  double fps = 30.0;
  std::uint64_t seed = 0;
};

struct CohortClip {
  std::string subject_id;
  Group group = Group::unknown;
  SkeletonSequence seq;
  TurnGroundtruth gt;
};

// Samples a characteristic turning angle and rate per subject, then emits
// that subject's turns. Deterministic per seed.
inline std::vector<CohortClip> generate_cohort(const CohortParams& p) {
  if (p.n_subjects < 2) throw InvalidArgumentError("cohort: n_subjects must be >= 2");
  if (p.turns_per_subject < 1) throw InvalidArgumentError("cohort: turns_per_subject must be >= 1");
  if (!(p.angle_mean_deg > 0.0) || p.angle_sd_deg < 0.0 ||
      !(p.rate_mean_deg_s > 0.0) || p.rate_sd_deg_s < 0.0) {
    throw InvalidArgumentError("cohort: means must be positive, sds >= 0");
  }
  SynthRng rng(mix_seed(p.seed, 0x636f686f7274ULL));
  std::vector<CohortClip> out;
  for (int s = 0; s < p.n_subjects; ++s) {
    const double angle =
        std::max(30.0, p.angle_mean_deg + p.angle_sd_deg * rng.normal());
    const double rate =
        std::max(10.0, p.rate_mean_deg_s + p.rate_sd_deg_s * rng.normal());
    const std::string subject = p.subject_prefix + std::to_string(s + 1);
    for (int k = 0; k < p.turns_per_subject; ++k) {
      SynthParams sp;
      sp.turn_deg = angle;
      sp.duration_s = angle / rate;
      sp.fps = p.fps;
      sp.pre_walk_s = 0.5;
      sp.post_walk_s = 0.5;
      sp.direction = k % 2 == 0 ? TurnDirection::ccw : TurnDirection::cw;
      sp.clip_id = subject + "_t" + std::to_string(k + 1);
      auto [seq, gt] = generate_turn(sp);
      out.push_back({subject, p.group, std::move(seq), std::move(gt)});
    }
  }
  return out;
}

// Similarity transform about the sequence's up axis: rotation, uniform
// positive scaling, then translation. Angle measures are invariant.
inline SkeletonSequence apply_similarity(const SkeletonSequence& seq,
                                         double yaw_deg, Vec3 translation,
                                         double scale) {
  if (!(scale > 0.0)) throw InvalidArgumentError("apply_similarity: scale must be positive");
  const double a = to_radians(yaw_deg);
  const double c = std::cos(a), s = std::sin(a);
  SkeletonSequence out = seq;
  for (SkeletonFrame& frame : out.frames) {
    for (int j = 0; j < kJointCount; ++j) {
      auto& p = frame.positions[static_cast<std::size_t>(j)];
      if (!p) continue;
      double x = p->x, y = p->y, z = p->z;
      double rx = x, ry = y, rz = z;
      switch (seq.up_axis) {
        case Axis::z:
          rx = c * x - s * y;
          ry = s * x + c * y;
          break;
        case Axis::y:
          rz = c * z - s * x;
          rx = s * z + c * x;
          break;
        case Axis::x:
          ry = c * y - s * z;
          rz = s * y + c * z;
          break;
      }
      p->x = rx * scale + translation.x;
      p->y = ry * scale + translation.y;
      p->z = rz * scale + translation.z;
    }
  }
  return out;
}

// Permutes coordinates so the vertical axis moves from z to the requested
// axis, keeping ground-plane geometry intact.
inline SkeletonSequence with_up_axis(const SkeletonSequence& seq, Axis up) {
  if (seq.up_axis != Axis::z) {
    throw InvalidArgumentError("with_up_axis expects a z-up sequence");
  }
  SkeletonSequence out = seq;
  out.up_axis = up;
  if (up == Axis::z) return out;
  for (SkeletonFrame& frame : out.frames) {
    for (int j = 0; j < kJointCount; ++j) {
      auto& p = frame.positions[static_cast<std::size_t>(j)];
      if (!p) continue;
      const Vec3 v = *p;
      if (up == Axis::x) {
        // ground components (x, y) -> (y, z), vertical z -> x
        *p = {v.z, v.x, v.y};
      } else {
        // ground components (x, y) -> (x, z), vertical z -> y
        *p = {v.x, v.z, v.y};
      }
    }
  }
  return out;
}

}  // namespace turnkit
