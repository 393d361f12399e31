#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/joints.hpp"
#include "turnkit/skeleton.hpp"

namespace turnkit {

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;

constexpr double to_degrees(double rad) { return rad * kDegPerRad; }
constexpr double to_radians(double deg) { return deg / kDegPerRad; }

// Absolute floor below which a body vector never defines a direction; the
// working threshold is scale-free, 1e-9 times the clip median magnitude.
inline constexpr double kDegenerateAbsEps = 1e-12;
inline constexpr double kDegenerateRelEps = 1e-9;

enum class TurnDirection : int { cw = 0, ccw = 1 };

constexpr std::string_view turn_direction_name(TurnDirection d) {
  return d == TurnDirection::cw ? "cw" : "ccw";
}

// Ground-plane point after dropping the up-axis component; the remaining
// two components keep their original order.
struct GroundPoint {
  double u = 0.0;
  double v = 0.0;
};

inline GroundPoint project_point(const Vec3& p, Axis up) {
  switch (up) {
    case Axis::x:
      return {p.y, p.z};
    case Axis::y:
      return {p.x, p.z};
    case Axis::z:
      return {p.x, p.y};
  }
  return {p.x, p.y};
}

inline std::array<std::optional<GroundPoint>, kJointCount> project_ground(
    const SkeletonFrame& frame, Axis up) {
  std::array<std::optional<GroundPoint>, kJointCount> out;
  for (int j = 0; j < kJointCount; ++j) {
    const auto& p = frame.positions[static_cast<std::size_t>(j)];
    if (p) out[static_cast<std::size_t>(j)] = project_point(*p, up);
  }
  return out;
}

// Left-minus-right ground-plane vector of a frontal joint pair.
struct BodyVector {
  double u = 0.0;
  double v = 0.0;
  int frame_index = -1;
  JointPair pair = JointPair::hip;

  double norm() const { return std::hypot(u, v); }
};

namespace detail {

inline std::optional<BodyVector> try_pair_vector(const SkeletonFrame& frame,
                                                 JointPair pair, Axis up,
                                                 int frame_index) {
  const PairJoints pj = pair_joints(pair);
  const auto& l = frame.positions[static_cast<std::size_t>(pj.left)];
  const auto& r = frame.positions[static_cast<std::size_t>(pj.right)];
  if (!l || !r) return std::nullopt;
  GroundPoint gl = project_point(*l, up);
  GroundPoint gr = project_point(*r, up);
  return BodyVector{gl.u - gr.u, gl.v - gr.v, frame_index, pair};
}

inline double cross_z(const BodyVector& a, const BodyVector& b) {
  return a.u * b.v - a.v * b.u;
}

inline double dot(const BodyVector& a, const BodyVector& b) {
  return a.u * b.u + a.v * b.v;
}

// Degeneracy threshold from the clip's median pair-vector magnitude.
inline double degeneracy_threshold(std::vector<double> norms) {
  if (norms.empty()) return kDegenerateAbsEps;
  std::nth_element(norms.begin(), norms.begin() + static_cast<long>(norms.size() / 2),
                   norms.end());
  double median = norms[norms.size() / 2];
  return std::max(kDegenerateAbsEps, kDegenerateRelEps * median);
}

}  // namespace detail

inline BodyVector pair_vector(const SkeletonFrame& frame, JointPair pair,
                              Axis up, int frame_index = -1) {
  auto bv = detail::try_pair_vector(frame, pair, up, frame_index);
  if (!bv) {
    throw MissingJointError(std::string(pair_name(pair)) +
                            " pair incomplete in frame");
  }
  if (bv->norm() < kDegenerateAbsEps) {
    throw DegenerateVectorError(std::string(pair_name(pair)) +
                                " vector degenerate (zero length)");
  }
  return *bv;
}

enum class StepMode : int {
  unsigned_arcsin = 0,  // arcsin(|cross| / (|a||b|)), range [0, 90]
  signed_atan2 = 1,     // atan2(cross, dot), range (-180, 180]
};

constexpr std::string_view step_mode_name(StepMode m) {
  return m == StepMode::unsigned_arcsin ? "unsigned" : "signed";
}

inline std::optional<StepMode> step_mode_from_name(std::string_view name) {
  if (name == "unsigned") return StepMode::unsigned_arcsin;
  if (name == "signed") return StepMode::signed_atan2;
  return std::nullopt;
}

// Angle between two body vectors, in degrees.
inline double step_angle(const BodyVector& a, const BodyVector& b,
                         StepMode mode) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kDegenerateAbsEps || nb < kDegenerateAbsEps) {
    throw DegenerateVectorError("degenerate vector in step angle");
  }
  const double cz = detail::cross_z(a, b);
  if (mode == StepMode::unsigned_arcsin) {
    const double s = std::clamp(std::abs(cz) / (na * nb), 0.0, 1.0);
    return to_degrees(std::asin(s));
  }
  return to_degrees(std::atan2(cz, detail::dot(a, b)));
}

// Result of accumulating rotation over one clip.
struct TurnEstimate {
  double theta_deg = 0.0;     // accumulated turning angle, >= 0
  double omega_deg_s = 0.0;   // theta / ((T-1)/fps)
  double w_max_deg_s = 0.0;   // max per-transition rate
  std::vector<double> steps_deg;  // length T-1; 0 at skipped transitions
  int skipped_transitions = 0;
  JointPairSet pair_set;
  StepMode mode = StepMode::unsigned_arcsin;
};

// Max of |theta_t| * fps over per-transition angles, degrees/second.
inline double max_angular_velocity(std::span<const double> steps_deg,
                                   double fps) {
  if (steps_deg.empty()) {
    throw InvalidArgumentError("max_angular_velocity: no steps");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw InvalidArgumentError("max_angular_velocity: fps must be positive");
  }
  double m = 0.0;
  for (double s : steps_deg) m = std::max(m, std::abs(s));
  return m * fps;
}

namespace detail {

// Per-pair vectors for every frame plus the clip-level degeneracy
// threshold applied; entries left empty are missing or degenerate.
struct PairSeries {
  std::vector<std::optional<BodyVector>> vectors;
};

inline std::vector<PairSeries> usable_pair_series(const SkeletonSequence& seq,
                                                  const std::vector<JointPair>& pairs) {
  const std::size_t T = seq.frames.size();
  std::vector<PairSeries> series(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    series[p].vectors.resize(T);
    std::vector<double> norms;
    norms.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
      auto bv = try_pair_vector(seq.frames[t], pairs[p], seq.up_axis,
                                static_cast<int>(t));
      if (bv) {
        series[p].vectors[t] = *bv;
        norms.push_back(bv->norm());
      }
    }
    const double eps = degeneracy_threshold(std::move(norms));
    for (std::size_t t = 0; t < T; ++t) {
      auto& bv = series[p].vectors[t];
      if (bv && bv->norm() < eps) bv.reset();
    }
  }
  return series;
}

}  // namespace detail

// Accumulates per-transition rotation over the clip. The per-transition
// angle is the arithmetic mean across the selected pairs; a transition
// where any selected pair is missing or degenerate in either frame is
// skipped (contributes a zero step). Duration uses the full (T-1)/fps.
inline TurnEstimate total_angle(const SkeletonSequence& seq,
                                JointPairSet pairs,
                                StepMode mode = StepMode::unsigned_arcsin) {
  const std::size_t T = seq.frames.size();
  if (T < 2) {
    throw TooShortError("total_angle requires at least 2 frames, got " +
                        std::to_string(T));
  }
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) {
    throw InvalidArgumentError("total_angle: fps must be positive");
  }

  const std::vector<JointPair> plist = pairs.list();
  const auto series = detail::usable_pair_series(seq, plist);

  TurnEstimate est;
  est.pair_set = pairs;
  est.mode = mode;
  est.steps_deg.assign(T - 1, 0.0);

  double signed_sum = 0.0;
  double unsigned_sum = 0.0;
  int used = 0;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    bool usable = true;
    for (std::size_t p = 0; p < plist.size(); ++p) {
      if (!series[p].vectors[t] || !series[p].vectors[t + 1]) {
        usable = false;
        break;
      }
    }
    if (!usable) {
      ++est.skipped_transitions;
      continue;
    }
    double step = 0.0;
    for (std::size_t p = 0; p < plist.size(); ++p) {
      step += step_angle(*series[p].vectors[t], *series[p].vectors[t + 1], mode);
    }
    step /= static_cast<double>(plist.size());
    est.steps_deg[t] = step;
    signed_sum += step;
    unsigned_sum += std::abs(step);
    ++used;
  }
  if (used == 0) {
    throw NoUsableTransitionError(
        "no usable transition in clip '" + seq.clip_id + "'");
  }

  est.theta_deg = mode == StepMode::unsigned_arcsin ? unsigned_sum
                                                    : std::abs(signed_sum);
  const double duration = static_cast<double>(T - 1) / seq.fps;
  est.omega_deg_s = est.theta_deg / duration;
  est.w_max_deg_s = max_angular_velocity(est.steps_deg, seq.fps);
  return est;
}

// Unsigned angle between the pair vectors at the first and last usable
// frames, averaged over the selected pairs; range [0, 180]. Agrees with
// total_angle only when the rotation is monotone with per-step angles
// below 90 degrees and total below 180.
inline double first_last_angle(const SkeletonSequence& seq,
                               JointPairSet pairs) {
  const std::size_t T = seq.frames.size();
  if (T < 2) {
    throw TooShortError("first_last_angle requires at least 2 frames");
  }
  const std::vector<JointPair> plist = pairs.list();
  const auto series = detail::usable_pair_series(seq, plist);

  auto all_usable = [&](std::size_t t) {
    for (std::size_t p = 0; p < plist.size(); ++p) {
      if (!series[p].vectors[t]) return false;
    }
    return true;
  };

  std::size_t first = 0;
  while (first < T && !all_usable(first)) ++first;
  if (first >= T) {
    throw MissingJointError("no frame with all selected pairs computable");
  }
  std::size_t last = T - 1;
  while (last > first && !all_usable(last)) --last;
  if (last == first) {
    throw DegenerateVectorError("only one usable frame for first/last angle");
  }

  double sum = 0.0;
  for (std::size_t p = 0; p < plist.size(); ++p) {
    const BodyVector& a = *series[p].vectors[first];
    const BodyVector& b = *series[p].vectors[last];
    sum += std::abs(to_degrees(std::atan2(detail::cross_z(a, b),
                                          detail::dot(a, b))));
  }
  return sum / static_cast<double>(plist.size());
}

}  // namespace turnkit
