#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "turnkit/geometry.hpp"
#include "turnkit/stats.hpp"
#include "turnkit/synth.hpp"

using namespace turnkit;

TEST_CASE("constant-rate turn is an exact oracle for every pair set") {
  SynthParams p;
  p.turn_deg = 90.0;
  p.duration_s = 2.0;
  p.fps = 30.0;
  auto [seq, gt] = generate_turn(p);
  REQUIRE(gt.turn_deg == 90.0);
  for (JointPairSet pairs : {JointPairSet{JointPair::hip},
                             JointPairSet{JointPair::knee},
                             JointPairSet{JointPair::shoulder},
                             JointPairSet::all()}) {
    TurnEstimate est = total_angle(seq, pairs);
    REQUIRE(est.theta_deg == Catch::Approx(90.0).margin(1e-9));
  }
}

TEST_CASE("en-bloc lag perturbs onset steps but not the final total") {
  SynthParams p;
  p.turn_deg = 90.0;
  p.duration_s = 2.0;
  p.fps = 30.0;
  p.en_bloc_lag_frames = 10;
  p.post_walk_s = 1.0;  // lag completes within the clip
  auto [seq, gt] = generate_turn(p);

  TurnEstimate hip_only = total_angle(seq, {JointPair::hip});
  REQUIRE(hip_only.theta_deg == Catch::Approx(90.0).margin(1e-9));

  TurnEstimate both = total_angle(seq, {JointPair::hip, JointPair::knee});
  REQUIRE(both.theta_deg == Catch::Approx(90.0).margin(1e-6));

  // during onset the knee has not started turning, so the mean step halves
  TurnEstimate knee_only = total_angle(seq, {JointPair::knee});
  bool onset_differs = false;
  for (std::size_t t = 0; t < 5; ++t) {
    if (std::abs(hip_only.steps_deg[t] - knee_only.steps_deg[t]) > 1e-9) {
      onset_differs = true;
    }
  }
  REQUIRE(onset_differs);
}

TEST_CASE("no-turn params produce zero angle and no detections") {
  RouteParams p;
  p.segments = {RouteSegment::straight(3.0)};
  p.clip_id = "flat";
  auto rr = generate_route(p);
  TurnEstimate est = total_angle(rr.seq, {JointPair::hip});
  REQUIRE(est.theta_deg == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(rr.turns.empty());
}

TEST_CASE("smoothstep peak rate is 1.5 times the mean rate") {
  SynthParams p;
  p.turn_deg = 180.0;
  p.duration_s = 3.0;
  p.fps = 30.0;
  p.rate_profile = RateProfile::smoothstep;
  auto [seq, gt] = generate_turn(p);
  REQUIRE(gt.mean_rate_deg_s == Catch::Approx(60.0));
  REQUIRE(gt.max_rate_deg_s == Catch::Approx(90.0));

  TurnEstimate est = total_angle(seq, {JointPair::hip});
  // the discrete max cannot exceed the analytic max, and sits within the
  // per-frame quantization of the peak
  REQUIRE(est.w_max_deg_s <= gt.max_rate_deg_s + 1e-9);
  double expected_discrete = 0.0;
  for (std::size_t t = 0; t + 1 < gt.heading_deg.size(); ++t) {
    expected_discrete = std::max(
        expected_discrete,
        std::abs(gt.heading_deg[t + 1] - gt.heading_deg[t]) * p.fps);
  }
  REQUIRE(est.w_max_deg_s == Catch::Approx(expected_discrete).margin(1e-9));
  const double quant = gt.max_rate_deg_s - expected_discrete;
  REQUIRE(std::abs(est.w_max_deg_s - gt.max_rate_deg_s) <=
          2.0 * quant + 1e-9);
}

TEST_CASE("groundtruth max rate never drops below the mean rate") {
  SynthRng rng(5150);
  for (int i = 0; i < 20; ++i) {
    SynthParams p;
    p.turn_deg = rng.uniform(30.0, 250.0);
    p.duration_s = rng.uniform(0.8, 4.0);
    p.rate_profile =
        rng.uniform() < 0.5 ? RateProfile::constant : RateProfile::smoothstep;
    auto [seq, gt] = generate_turn(p);
    REQUIRE(gt.max_rate_deg_s >= gt.mean_rate_deg_s);
  }
}

TEST_CASE("noise is deterministic and identity at zero") {
  SynthParams p;
  p.turn_deg = 90.0;
  p.duration_s = 2.0;
  auto [seq, gt] = generate_turn(p);

  NoiseParams none;
  REQUIRE(add_noise(seq, none) == seq);

  NoiseParams noisy;
  noisy.jitter_sd = 0.01;
  noisy.dropout_prob = 0.03;
  noisy.seed = 77;
  SkeletonSequence a = add_noise(seq, noisy);
  SkeletonSequence b = add_noise(seq, noisy);
  REQUIRE(a == b);
  REQUIRE(a != seq);

  noisy.seed = 78;
  REQUIRE(add_noise(seq, noisy) != a);
}

TEST_CASE("dropout rate concentrates at the configured probability") {
  RouteParams p;
  p.segments = {RouteSegment::straight(999.0 / 30.0)};  // 1000 frames
  auto rr = generate_route(p);
  REQUIRE(rr.seq.frame_count() == 1000);

  NoiseParams noisy;
  noisy.dropout_prob = 0.05;
  noisy.seed = 3;
  SkeletonSequence out = add_noise(rr.seq, noisy);
  std::size_t missing = 0;
  for (const auto& f : out.frames) {
    for (int j = 0; j < kJointCount; ++j) {
      if (!f.positions[static_cast<std::size_t>(j)]) ++missing;
    }
  }
  const double fraction =
      static_cast<double>(missing) / (1000.0 * kJointCount);
  REQUIRE(fraction == Catch::Approx(0.05).margin(0.01));
}

TEST_CASE("jitter with no true turn exposes the arcsin rectification bias") {
  RouteParams p;
  p.segments = {RouteSegment::straight(10.0)};  // 301 frames, no rotation
  p.clip_id = "jitter";
  auto rr = generate_route(p);
  NoiseParams noisy;
  noisy.jitter_sd = 0.02 * p.hip_width;
  noisy.seed = 11;
  SkeletonSequence shaken = add_noise(rr.seq, noisy);

  TurnEstimate su = total_angle(shaken, {JointPair::hip},
                                StepMode::unsigned_arcsin);
  TurnEstimate ss = total_angle(shaken, {JointPair::hip},
                                StepMode::signed_atan2);
  // signed steps cancel, unsigned steps rectify and accumulate
  REQUIRE(ss.theta_deg < 15.0);
  REQUIRE(su.theta_deg > ss.theta_deg);
  REQUIRE(su.theta_deg > 50.0);
}

TEST_CASE("cohorts are deterministic per seed with exact sd=0 means") {
  CohortParams cp;
  cp.n_subjects = 4;
  cp.turns_per_subject = 2;
  cp.angle_mean_deg = 120.0;
  cp.angle_sd_deg = 0.0;
  cp.rate_mean_deg_s = 80.0;
  cp.rate_sd_deg_s = 0.0;
  cp.group = Group::pd;
  cp.seed = 9;
  auto cohort = generate_cohort(cp);
  REQUIRE(cohort.size() == 8);
  for (const auto& clip : cohort) {
    REQUIRE(clip.gt.turn_deg == Catch::Approx(120.0));
    REQUIRE(clip.group == Group::pd);
    TurnEstimate est = total_angle(clip.seq, {JointPair::hip, JointPair::knee});
    REQUIRE(est.theta_deg == Catch::Approx(120.0).margin(1e-6));
  }

  auto again = generate_cohort(cp);
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    REQUIRE(again[i].seq == cohort[i].seq);
    REQUIRE(again[i].subject_id == cohort[i].subject_id);
  }
}

TEST_CASE("sampled cohorts recover the generating parameters") {
  CohortParams cp;
  cp.n_subjects = 40;
  cp.turns_per_subject = 1;
  cp.angle_mean_deg = 100.0;
  cp.angle_sd_deg = 12.0;
  cp.rate_mean_deg_s = 90.0;
  cp.rate_sd_deg_s = 5.0;
  cp.seed = 2718;
  auto cohort = generate_cohort(cp);
  std::vector<double> angles;
  for (const auto& clip : cohort) angles.push_back(clip.gt.turn_deg);
  GroupStats g = summarize_group(angles);
  // within ~3 standard errors of the generating parameters
  REQUIRE(g.mean == Catch::Approx(100.0).margin(3.0 * 12.0 / std::sqrt(40.0)));
  REQUIRE(g.sd == Catch::Approx(12.0).margin(5.0));
}

TEST_CASE("up-axis permutation preserves estimates") {
  SynthParams p;
  p.turn_deg = 135.0;
  p.duration_s = 2.0;
  auto [seq, gt] = generate_turn(p);
  for (Axis up : {Axis::x, Axis::y}) {
    SkeletonSequence moved = with_up_axis(seq, up);
    REQUIRE(moved.up_axis == up);
    TurnEstimate est = total_angle(moved, {JointPair::hip});
    REQUIRE(est.theta_deg == Catch::Approx(135.0).margin(1e-9));
  }
}

TEST_CASE("parameter validation names the failing field") {
  SynthParams p;
  p.fps = 0.0;
  REQUIRE_THROWS_WITH(generate_turn(p),
                      Catch::Matchers::ContainsSubstring("fps"));
  SynthParams lag;
  lag.duration_s = 1.0;
  lag.fps = 30.0;
  lag.en_bloc_lag_frames = 30;
  REQUIRE_THROWS_WITH(generate_turn(lag),
                      Catch::Matchers::ContainsSubstring("lag"));
  NoiseParams noise;
  noise.dropout_prob = 1.0;
  SkeletonSequence empty_seq;
  REQUIRE_THROWS_AS(add_noise(empty_seq, noise), InvalidArgumentError);
}
