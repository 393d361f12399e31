#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/geometry.hpp"
#include "turnkit/skeleton.hpp"

namespace turnkit {

struct DetectConfig {
  double min_turn_deg = 45.0;        // net rotation needed to emit an episode
  JointPairSet pairs{JointPair::hip};
  int smooth_window_frames = 5;      // centered moving average, odd
  double min_rate_deg_s = 5.0;       // rate gate for opening/extending
  int max_gap_frames = 10;           // tolerated below-gate transitions
  double reversal_tolerance_deg = 10.0;  // tolerated counter-rotation

  void validate() const {
    if (!(min_turn_deg > 0.0)) {
      throw InvalidArgumentError("detect: min_turn_deg must be positive");
    }
    if (smooth_window_frames < 1 || smooth_window_frames % 2 == 0) {
      throw InvalidArgumentError("detect: smooth window must be odd and positive");
    }
    if (!(min_rate_deg_s > 0.0)) {
      throw InvalidArgumentError("detect: min_rate_deg_s must be positive");
    }
    if (max_gap_frames < 1) {
      throw InvalidArgumentError("detect: max_gap_frames must be positive");
    }
    if (!(reversal_tolerance_deg > 0.0)) {
      throw InvalidArgumentError("detect: reversal_tolerance_deg must be positive");
    }
  }
};

// Detected turning episode over the half-open frame span [start, end).
struct TurnEpisode {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  double accumulated_deg = 0.0;  // |net signed rotation| over the span
  TurnDirection direction = TurnDirection::ccw;
  double mean_rate_deg_s = 0.0;
  int index = 0;  // position within the clip's episode list
};

namespace detail {

// Centered moving average of pair-vector components; missing entries are
// skipped, a window with no data stays missing.
inline std::vector<std::optional<BodyVector>> smooth_series(
    const std::vector<std::optional<BodyVector>>& raw, int window,
    JointPair pair) {
  const std::size_t T = raw.size();
  const int h = window / 2;
  std::vector<std::optional<BodyVector>> out(T);
  for (std::size_t i = 0; i < T; ++i) {
    double su = 0.0, sv = 0.0;
    int count = 0;
    const long lo = std::max<long>(0, static_cast<long>(i) - h);
    const long hi = std::min<long>(static_cast<long>(T) - 1,
                                   static_cast<long>(i) + h);
    for (long j = lo; j <= hi; ++j) {
      const auto& bv = raw[static_cast<std::size_t>(j)];
      if (!bv) continue;
      su += bv->u;
      sv += bv->v;
      ++count;
    }
    if (count == 0) continue;
    BodyVector s;
    s.u = su / count;
    s.v = sv / count;
    s.frame_index = static_cast<int>(i);
    s.pair = pair;
    out[i] = s;
  }
  return out;
}

struct EpisodeCandidate {
  std::size_t first = 0;  // first active transition
  std::size_t last = 0;   // last same-direction active transition
};

}  // namespace detail

// Scans the smoothed signed rotation rate for same-direction runs. An
// episode opens when |rate| exceeds the gate, tolerates pauses up to
// max_gap_frames and counter-rotation up to reversal_tolerance_deg, and is
// emitted when its net rotation magnitude reaches min_turn_deg. Scanning
// is independent of min_turn_deg, so raising the threshold only filters.
inline std::vector<TurnEpisode> detect_turns(const SkeletonSequence& seq,
                                             const DetectConfig& cfg = {}) {
  cfg.validate();
  const std::size_t T = seq.frames.size();
  if (T < 2) {
    throw TooShortError("detect_turns requires at least 2 frames, got " +
                        std::to_string(T));
  }
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) {
    throw InvalidArgumentError("detect_turns: fps must be positive");
  }

  const std::vector<JointPair> plist = cfg.pairs.list();

  // Smoothed, degeneracy-filtered vector series per pair.
  std::vector<std::vector<std::optional<BodyVector>>> smoothed(plist.size());
  for (std::size_t p = 0; p < plist.size(); ++p) {
    std::vector<std::optional<BodyVector>> raw(T);
    for (std::size_t t = 0; t < T; ++t) {
      raw[t] = detail::try_pair_vector(seq.frames[t], plist[p], seq.up_axis,
                                       static_cast<int>(t));
    }
    smoothed[p] = detail::smooth_series(raw, cfg.smooth_window_frames, plist[p]);
    std::vector<double> norms;
    for (const auto& bv : smoothed[p]) {
      if (bv) norms.push_back(bv->norm());
    }
    const double eps = detail::degeneracy_threshold(std::move(norms));
    for (auto& bv : smoothed[p]) {
      if (bv && bv->norm() < eps) bv.reset();
    }
  }

  const std::size_t n_steps = T - 1;
  std::vector<double> step(n_steps, 0.0);
  std::vector<bool> usable(n_steps, false);
  for (std::size_t t = 0; t < n_steps; ++t) {
    double sum = 0.0;
    bool ok = true;
    for (std::size_t p = 0; p < plist.size(); ++p) {
      if (!smoothed[p][t] || !smoothed[p][t + 1]) {
        ok = false;
        break;
      }
      sum += step_angle(*smoothed[p][t], *smoothed[p][t + 1],
                        StepMode::signed_atan2);
    }
    if (!ok) continue;
    usable[t] = true;
    step[t] = sum / static_cast<double>(plist.size());
  }

  std::vector<double> prefix(n_steps + 1, 0.0);
  for (std::size_t t = 0; t < n_steps; ++t) prefix[t + 1] = prefix[t] + step[t];

  auto active = [&](std::size_t t) {
    return usable[t] && std::abs(step[t]) * seq.fps > cfg.min_rate_deg_s;
  };
  auto sign_of = [](double v) { return v >= 0.0 ? 1 : -1; };

  std::vector<detail::EpisodeCandidate> candidates;
  std::size_t t = 0;
  while (t < n_steps) {
    if (!active(t)) {
      ++t;
      continue;
    }
    const int dir = sign_of(step[t]);
    detail::EpisodeCandidate cand{t, t};
    double counter = 0.0;
    int gap = 0;
    std::size_t counter_start = n_steps;
    std::size_t resume = n_steps;
    for (std::size_t u = t + 1; u < n_steps; ++u) {
      if (active(u) && sign_of(step[u]) == dir) {
        cand.last = u;
        counter = 0.0;
        gap = 0;
        counter_start = n_steps;
        continue;
      }
      if (active(u)) {  // counter-rotation above the gate
        if (counter_start == n_steps) counter_start = u;
        counter += std::abs(step[u]);
        ++gap;
        if (counter > cfg.reversal_tolerance_deg) {
          resume = counter_start;  // let the opposite turn reopen here
          break;
        }
      } else {
        ++gap;
      }
      if (gap > cfg.max_gap_frames) {
        resume = u + 1;
        break;
      }
    }
    candidates.push_back(cand);
    t = std::max(resume == n_steps ? n_steps : resume, cand.last + 1);
  }

  // Enforce disjoint frame spans: an episode covers [first, last+2).
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].first < candidates[i - 1].last + 2) {
      candidates[i].first = candidates[i - 1].last + 2;
    }
  }

  std::vector<TurnEpisode> out;
  for (const auto& cand : candidates) {
    if (cand.first > cand.last) continue;
    const double net = prefix[cand.last + 1] - prefix[cand.first];
    if (std::abs(net) < cfg.min_turn_deg) continue;
    TurnEpisode ep;
    ep.start_frame = cand.first;
    ep.end_frame = cand.last + 2;
    ep.accumulated_deg = std::abs(net);
    ep.direction = net >= 0.0 ? TurnDirection::ccw : TurnDirection::cw;
    const double span_s =
        static_cast<double>(ep.end_frame - ep.start_frame - 1) / seq.fps;
    ep.mean_rate_deg_s = ep.accumulated_deg / span_s;
    ep.index = static_cast<int>(out.size());
    out.push_back(ep);
  }
  return out;
}

// Extracts the episode's frame span as a standalone clip.
inline SkeletonSequence trim_episode(const SkeletonSequence& seq,
                                     const TurnEpisode& ep) {
  const std::size_t T = seq.frames.size();
  if (ep.start_frame >= ep.end_frame || ep.end_frame > T) {
    throw InvalidArgumentError(
        "trim_episode: span [" + std::to_string(ep.start_frame) + ", " +
        std::to_string(ep.end_frame) + ") out of range for " +
        std::to_string(T) + " frames");
  }
  SkeletonSequence clip;
  clip.fps = seq.fps;
  clip.up_axis = seq.up_axis;
  clip.clip_id = seq.clip_id + "#" + std::to_string(ep.index);
  clip.frames.assign(seq.frames.begin() + static_cast<long>(ep.start_frame),
                     seq.frames.begin() + static_cast<long>(ep.end_frame));
  return clip;
}

}  // namespace turnkit
