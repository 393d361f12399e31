#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/skeleton.hpp"

namespace turnkit {

namespace detail {

// Continued fraction for the regularized incomplete beta function,
// evaluated with the modified Lentz algorithm.
inline double betacf(double a, double b, double x) {
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b), absolute accuracy well under 1e-8.
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidArgumentError("incomplete_beta requires a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * detail::betacf(a, b, x) / a;
  }
  return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// Student-t distribution function; CDF(0) is exactly 0.5 and
// CDF(t) + CDF(-t) = 1 by construction.
inline double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgumentError("student_t_cdf requires df > 0");
  if (t == 0.0) return 0.5;
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

inline double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgumentError("p-value requires df > 0");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

// Inverse CDF for p in (0, 1), by bisection on the CDF.
inline double student_t_quantile(double p, double df) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw InvalidArgumentError("student_t_quantile requires p in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double target = upper ? p : 1.0 - p;
  double lo = 0.0;
  double hi = 2.0;
  while (student_t_cdf(hi, df) < target && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  const double q = 0.5 * (lo + hi);
  return upper ? q : -q;
}

// Sample summary of one group (n-1 denominator for the sd).
struct GroupStats {
  std::string group_name;
  std::string measure_name;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

inline GroupStats summarize_group(std::span<const double> values,
                                  std::string group_name = {},
                                  std::string measure_name = {}) {
  if (values.size() < 2) {
    throw InvalidArgumentError("summarize_group requires n >= 2");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {std::move(group_name), std::move(measure_name),
          static_cast<int>(values.size()), mean, std::sqrt(ss / (n - 1.0))};
}

struct SubjectValue {
  std::string subject_id;
  Group group = Group::unknown;
  double value = 0.0;
};

// Collapses repeated observations to one mean per subject; a subject may
// belong to only one group.
inline std::vector<SubjectValue> per_subject_means(
    std::span<const SubjectValue> records) {
  if (records.empty()) {
    throw InvalidArgumentError("per_subject_means: empty input");
  }
  struct Acc {
    Group group;
    double sum = 0.0;
    int n = 0;
    std::size_t first_seen = 0;
  };
  std::map<std::string, Acc> acc;
  std::size_t order = 0;
  for (const SubjectValue& r : records) {
    auto [it, inserted] = acc.try_emplace(r.subject_id,
                                          Acc{r.group, 0.0, 0, order++});
    if (!inserted && it->second.group != r.group) {
      throw InvalidArgumentError("subject '" + r.subject_id +
                                 "' appears in two groups");
    }
    it->second.sum += r.value;
    ++it->second.n;
  }
  std::vector<const std::pair<const std::string, Acc>*> ordered;
  for (const auto& kv : acc) ordered.push_back(&kv);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->second.first_seen < b->second.first_seen;
  });
  std::vector<SubjectValue> out;
  out.reserve(ordered.size());
  for (const auto* kv : ordered) {
    out.push_back({kv->first, kv->second.group,
                   kv->second.sum / kv->second.n});
  }
  return out;
}

struct TTestResult {
  double t_stat = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double mean_diff = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double cohens_d = 0.0;
  double ci_level = 0.95;
};

// Two-sample t-test from group summaries. The default is the pooled
// Student form; welch switches to the Welch-Satterthwaite variant.
// Cohen's d always uses the pooled sd.
inline TTestResult t_test_from_summary(const GroupStats& a,
                                       const GroupStats& b,
                                       double ci_level = 0.95,
                                       bool welch = false) {
  if (a.n < 2 || b.n < 2) {
    throw InvalidArgumentError("t test requires n >= 2 in both groups");
  }
  if (!(ci_level > 0.0) || !(ci_level < 1.0)) {
    throw InvalidArgumentError("ci_level must be in (0, 1)");
  }
  const double na = a.n, nb = b.n;
  const double diff = a.mean - b.mean;
  const double sp2 =
      ((na - 1.0) * a.sd * a.sd + (nb - 1.0) * b.sd * b.sd) / (na + nb - 2.0);
  const double sp = std::sqrt(sp2);

  TTestResult res;
  res.mean_diff = diff;
  res.ci_level = ci_level;

  double se, df;
  if (welch) {
    const double va = a.sd * a.sd / na;
    const double vb = b.sd * b.sd / nb;
    se = std::sqrt(va + vb);
    df = (va + vb) * (va + vb) /
         (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  } else {
    se = sp * std::sqrt(1.0 / na + 1.0 / nb);
    df = na + nb - 2.0;
  }
  res.df = df;

  if (se == 0.0) {
    if (diff == 0.0) {
      res.t_stat = 0.0;
      res.p_two_tailed = 1.0;
      res.cohens_d = 0.0;
      res.ci_low = res.ci_high = 0.0;
      return res;
    }
    const double inf = std::numeric_limits<double>::infinity();
    res.t_stat = diff > 0.0 ? inf : -inf;
    res.p_two_tailed = 0.0;
    res.cohens_d = res.t_stat;
    res.ci_low = res.ci_high = diff;
    return res;
  }

  res.t_stat = diff / se;
  res.p_two_tailed = student_t_two_tailed_p(res.t_stat, df);
  res.cohens_d = sp == 0.0 ? 0.0 : diff / sp;
  const double t_crit = student_t_quantile(1.0 - (1.0 - ci_level) / 2.0, df);
  res.ci_low = diff - t_crit * se;
  res.ci_high = diff + t_crit * se;
  return res;
}

inline TTestResult t_test_from_samples(std::span<const double> a,
                                       std::span<const double> b,
                                       double ci_level = 0.95,
                                       bool welch = false) {
  return t_test_from_summary(summarize_group(a), summarize_group(b), ci_level,
                             welch);
}

}  // namespace turnkit
