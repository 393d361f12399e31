#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "turnkit/stats.hpp"
#include "turnkit/synth.hpp"

using namespace turnkit;

TEST_CASE("per-subject means collapse repeated observations") {
  std::vector<SubjectValue> rs{{"S1", Group::pd, 80.0},
                               {"S1", Group::pd, 100.0},
                               {"S2", Group::control, 50.0}};
  auto means = per_subject_means(rs);
  REQUIRE(means.size() == 2);
  REQUIRE(means[0].subject_id == "S1");
  REQUIRE(means[0].value == Catch::Approx(90.0));
  REQUIRE(means[1].value == Catch::Approx(50.0));

  std::vector<SubjectValue> single{{"S1", Group::pd, 42.0}};
  REQUIRE(per_subject_means(single)[0].value == 42.0);

  std::vector<SubjectValue> conflict{{"S1", Group::pd, 1.0},
                                     {"S1", Group::control, 2.0}};
  REQUIRE_THROWS_AS(per_subject_means(conflict), InvalidArgumentError);
}

TEST_CASE("group summary uses the n-1 standard deviation") {
  std::vector<double> v{1.0, 2.0, 3.0};
  GroupStats g = summarize_group(v, "PD", "angle");
  REQUIRE(g.n == 3);
  REQUIRE(g.mean == Catch::Approx(2.0));
  REQUIRE(g.sd == Catch::Approx(1.0));

  std::vector<double> constant{5.0, 5.0, 5.0, 5.0};
  REQUIRE(summarize_group(constant).sd == 0.0);

  std::vector<double> one{1.0};
  REQUIRE_THROWS_AS(summarize_group(one), InvalidArgumentError);
}

TEST_CASE("student t distribution function") {
  REQUIRE(student_t_cdf(0.0, 10.0) == 0.5);
  // symmetry to machine precision
  for (double t : {0.3, 1.0, 2.5, 7.0}) {
    for (double df : {1.0, 5.0, 20.0, 100.0}) {
      REQUIRE(std::abs(student_t_cdf(t, df) + student_t_cdf(-t, df) - 1.0) <
              1e-12);
    }
  }
  // classic table entry: df=10, t=2.228 -> two-tailed 0.05
  REQUIRE(student_t_two_tailed_p(2.228, 10.0) ==
          Catch::Approx(0.05).margin(5e-4));
  // quantile inverts the CDF
  for (double p : {0.6, 0.9, 0.975, 0.999}) {
    for (double df : {3.0, 12.0, 50.0}) {
      REQUIRE(student_t_cdf(student_t_quantile(p, df), df) ==
              Catch::Approx(p).margin(1e-10));
    }
  }
}

TEST_CASE("pooled t test reproduces the reference group comparison") {
  // turning angle row
  GroupStats pd{"PD", "angle", 11, 92.65, 13.21};
  GroupStats control{"control", "angle", 11, 103.75, 16.75};
  TTestResult angle = t_test_from_summary(pd, control);
  REQUIRE(angle.t_stat == Catch::Approx(-1.73).margin(0.01));
  REQUIRE(angle.cohens_d == Catch::Approx(-0.74).margin(0.01));
  REQUIRE(angle.df == 20.0);
  REQUIRE(angle.p_two_tailed == Catch::Approx(0.0998).margin(0.002));
  REQUIRE(angle.mean_diff == Catch::Approx(-11.10).margin(1e-9));
  REQUIRE(angle.ci_low < angle.mean_diff);
  REQUIRE(angle.mean_diff < angle.ci_high);

  // max angular velocity row
  GroupStats pd_w{"PD", "w_max", 11, 127.86, 29.77};
  GroupStats control_w{"control", "w_max", 11, 160.19, 36.49};
  TTestResult vel = t_test_from_summary(pd_w, control_w);
  REQUIRE(vel.t_stat == Catch::Approx(-2.28).margin(0.01));
  REQUIRE(vel.cohens_d == Catch::Approx(-0.97).margin(0.01));
  REQUIRE(vel.p_two_tailed == Catch::Approx(0.034).margin(0.002));
  // the velocity difference is significant at the 0.05 level
  REQUIRE(vel.ci_high < 0.0);
}

TEST_CASE("degenerate t test inputs") {
  GroupStats a{"A", "m", 5, 3.0, 1.0};
  GroupStats tiny{"B", "m", 1, 3.0, 0.0};
  REQUIRE_THROWS_AS(t_test_from_summary(a, tiny), InvalidArgumentError);

  // identical groups
  TTestResult same = t_test_from_summary(a, a);
  REQUIRE(same.t_stat == 0.0);
  REQUIRE(same.cohens_d == 0.0);
  REQUIRE(same.p_two_tailed == 1.0);

  // zero variance with a real difference: infinite-t marker
  std::vector<double> zeros{0.0, 0.0, 0.0, 0.0};
  std::vector<double> ones{1.0, 1.0, 1.0, 1.0};
  TTestResult inf = t_test_from_samples(zeros, ones);
  REQUIRE(std::isinf(inf.t_stat));
  REQUIRE(inf.t_stat < 0.0);
  REQUIRE(inf.p_two_tailed == 0.0);

  std::vector<double> flat{2.0, 2.0, 2.0};
  TTestResult both_flat = t_test_from_samples(flat, flat);
  REQUIRE(both_flat.t_stat == 0.0);
  REQUIRE(both_flat.p_two_tailed == 1.0);
}

TEST_CASE("samples route matches the summary route bit for bit") {
  std::vector<double> a{3.2, 4.7, 1.1, 5.5, 2.0};
  std::vector<double> b{6.1, 4.4, 7.7, 5.0};
  TTestResult from_samples = t_test_from_samples(a, b);
  TTestResult from_summary = t_test_from_summary(summarize_group(a),
                                                 summarize_group(b));
  REQUIRE(from_samples.t_stat == from_summary.t_stat);
  REQUIRE(from_samples.p_two_tailed == from_summary.p_two_tailed);
  REQUIRE(from_samples.cohens_d == from_summary.cohens_d);
  REQUIRE(from_samples.ci_low == from_summary.ci_low);
  REQUIRE(from_samples.ci_high == from_summary.ci_high);
}

TEST_CASE("swapping groups negates t, d, and mirrors the interval") {
  GroupStats a{"A", "m", 8, 10.0, 2.5};
  GroupStats b{"B", "m", 6, 12.5, 3.0};
  TTestResult ab = t_test_from_summary(a, b);
  TTestResult ba = t_test_from_summary(b, a);
  REQUIRE(ab.t_stat == Catch::Approx(-ba.t_stat).margin(1e-12));
  REQUIRE(ab.cohens_d == Catch::Approx(-ba.cohens_d).margin(1e-12));
  REQUIRE(ab.mean_diff == Catch::Approx(-ba.mean_diff).margin(1e-12));
  REQUIRE(ab.ci_low == Catch::Approx(-ba.ci_high).margin(1e-9));
  REQUIRE(ab.ci_high == Catch::Approx(-ba.ci_low).margin(1e-9));
  REQUIRE(ab.p_two_tailed == Catch::Approx(ba.p_two_tailed).margin(1e-12));
}

TEST_CASE("t, d, p are location and scale invariant") {
  SynthRng rng(31337);
  std::vector<double> a, b;
  for (int i = 0; i < 9; ++i) a.push_back(50.0 + 8.0 * rng.normal());
  for (int i = 0; i < 7; ++i) b.push_back(55.0 + 9.0 * rng.normal());
  TTestResult base = t_test_from_samples(a, b);

  auto shifted = [&](double offset, double scale) {
    std::vector<double> sa = a, sb = b;
    for (double& v : sa) v = v * scale + offset;
    for (double& v : sb) v = v * scale + offset;
    return t_test_from_samples(sa, sb);
  };
  TTestResult moved = shifted(123.0, 1.0);
  REQUIRE(moved.t_stat == Catch::Approx(base.t_stat).margin(1e-9));
  REQUIRE(moved.cohens_d == Catch::Approx(base.cohens_d).margin(1e-9));
  REQUIRE(moved.p_two_tailed == Catch::Approx(base.p_two_tailed).margin(1e-9));

  TTestResult scaled = shifted(0.0, 3.5);
  REQUIRE(scaled.t_stat == Catch::Approx(base.t_stat).margin(1e-9));
  REQUIRE(scaled.p_two_tailed == Catch::Approx(base.p_two_tailed).margin(1e-9));
  REQUIRE(scaled.mean_diff == Catch::Approx(3.5 * base.mean_diff).margin(1e-9));
  REQUIRE(scaled.ci_low == Catch::Approx(3.5 * base.ci_low).margin(1e-7));
  REQUIRE(scaled.ci_high == Catch::Approx(3.5 * base.ci_high).margin(1e-7));
}

TEST_CASE("p below alpha exactly when zero is outside the interval") {
  SynthRng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b;
    const double shift = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < 6; ++i) a.push_back(rng.normal());
    for (int i = 0; i < 6; ++i) b.push_back(shift + rng.normal());
    TTestResult r = t_test_from_samples(a, b);
    const bool significant = r.p_two_tailed < 0.05;
    const bool zero_outside = r.ci_low > 0.0 || r.ci_high < 0.0;
    REQUIRE(significant == zero_outside);
  }
}

TEST_CASE("null p-values are uniform") {
  SynthRng rng(987654321);
  const int trials = 10000;
  std::vector<double> pvals;
  pvals.reserve(trials);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 8; ++i) a.push_back(rng.normal());
    for (int i = 0; i < 8; ++i) b.push_back(rng.normal());
    pvals.push_back(t_test_from_samples(a, b).p_two_tailed);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double cdf = static_cast<double>(i + 1) / trials;
    ks = std::max(ks, std::abs(cdf - pvals[static_cast<std::size_t>(i)]));
  }
  REQUIRE(ks < 0.02);
}

TEST_CASE("closed loop: cohorts through the estimator to the group test") {
  // generating parameters for the two groups (angle deg, rate deg/s)
  CohortParams pd;
  pd.n_subjects = 11;
  pd.turns_per_subject = 3;
  pd.angle_mean_deg = 92.65;
  pd.angle_sd_deg = 13.21;
  pd.rate_mean_deg_s = 127.86;
  pd.rate_sd_deg_s = 29.77;
  pd.group = Group::pd;
  pd.subject_prefix = "P";
  pd.seed = 2;
  CohortParams control = pd;
  control.angle_mean_deg = 103.75;
  control.angle_sd_deg = 16.75;
  control.rate_mean_deg_s = 160.19;
  control.rate_sd_deg_s = 36.49;
  control.group = Group::control;
  control.subject_prefix = "C";
  control.seed = 1002;

  std::vector<SubjectValue> angles, rates;
  for (const auto& cohort : {generate_cohort(pd), generate_cohort(control)}) {
    for (const auto& clip : cohort) {
      TurnEstimate est =
          total_angle(clip.seq, {JointPair::hip, JointPair::knee});
      angles.push_back({clip.subject_id, clip.group, est.theta_deg});
      rates.push_back({clip.subject_id, clip.group, est.w_max_deg_s});
    }
  }
  auto split = [](const std::vector<SubjectValue>& values) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& s : per_subject_means(values)) {
      (s.group == Group::pd ? out.first : out.second).push_back(s.value);
    }
    return out;
  };
  auto [angle_pd, angle_c] = split(angles);
  auto [rate_pd, rate_c] = split(rates);
  REQUIRE(angle_pd.size() == 11);
  REQUIRE(angle_c.size() == 11);

  // estimated group means sit within ~3 standard errors of the
  // generating means
  auto within = [](const GroupStats& g, double mean, double sd) {
    return std::abs(g.mean - mean) <= 3.0 * sd / std::sqrt(11.0);
  };
  REQUIRE(within(summarize_group(angle_pd), 92.65, 13.21));
  REQUIRE(within(summarize_group(angle_c), 103.75, 16.75));
  REQUIRE(within(summarize_group(rate_pd), 127.86, 29.77));
  REQUIRE(within(summarize_group(rate_c), 160.19, 36.49));

  // the max angular velocity contrast comes out significant with the
  // control group faster
  TTestResult w = t_test_from_samples(rate_pd, rate_c);
  REQUIRE(w.t_stat < 0.0);
  REQUIRE(w.p_two_tailed < 0.05);
  REQUIRE(w.ci_high < 0.0);
}

TEST_CASE("welch variant reports a fractional df") {
  GroupStats a{"A", "m", 10, 5.0, 1.0};
  GroupStats b{"B", "m", 5, 7.0, 4.0};
  TTestResult pooled = t_test_from_summary(a, b);
  TTestResult welch = t_test_from_summary(a, b, 0.95, true);
  REQUIRE(pooled.df == 13.0);
  REQUIRE(welch.df < 13.0);
  REQUIRE(welch.df > 4.0);
  REQUIRE(welch.t_stat != pooled.t_stat);
  // d is pooled in both variants
  REQUIRE(welch.cohens_d == Catch::Approx(pooled.cohens_d).margin(1e-12));
}
