#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/skeleton.hpp"

namespace turnkit {

inline constexpr int kBinStepDeg = 45;
inline constexpr int kMaxBinDeg = 360;
inline constexpr double kHalfBinDeg = 22.5;

// Quantized turning-angle label: a multiple of 45 in [45, 360].
class AngleBin {
public:
  explicit AngleBin(int degrees) : degrees_(degrees) {
    if (degrees % kBinStepDeg != 0 || degrees < kBinStepDeg ||
        degrees > kMaxBinDeg) {
      throw InvalidArgumentError("angle bin must be a multiple of 45 in [45, 360], got " +
                                 std::to_string(degrees));
    }
  }

  int degrees() const { return degrees_; }

  auto operator<=>(const AngleBin&) const = default;

private:
  int degrees_;
};

// Nearest-bin quantization result; no bin means the angle was below the
// half-bin threshold (22.5 degrees).
struct Quantized {
  std::optional<AngleBin> bin;
  bool clamped = false;  // input >= 382.5 clamped to 360

  bool sub_threshold() const { return !bin.has_value(); }
};

// Nearest multiple of 45 in [45, 360]; exact midpoints round to the larger
// bin, values below 22.5 are sub-threshold, values at or above 382.5 clamp
// to 360.
inline Quantized quantize_angle(double theta_deg) {
  if (!std::isfinite(theta_deg) || theta_deg < 0.0) {
    throw InvalidArgumentError("quantize_angle requires a finite angle >= 0");
  }
  if (theta_deg < kHalfBinDeg) return {std::nullopt, false};
  const double k = std::floor(theta_deg / kBinStepDeg + 0.5);
  const int deg = static_cast<int>(k) * kBinStepDeg;
  if (deg > kMaxBinDeg) return {AngleBin(kMaxBinDeg), true};
  return {AngleBin(deg), false};
}

// One prediction joined with its label and grouping attributes.
struct EvalRecord {
  std::string clip_id;
  double predicted_theta_deg = 0.0;
  Quantized predicted;
  AngleBin label_bin;
  Scenario scenario = Scenario::unknown;
  std::string location;
  Group group = Group::unknown;
  std::string subject_id;
};

inline EvalRecord make_eval_record(std::string clip_id, double predicted_theta,
                                   AngleBin label,
                                   const Annotation* ann = nullptr) {
  EvalRecord rec{std::move(clip_id),  predicted_theta,
                 quantize_angle(predicted_theta), label,
                 Scenario::unknown,   std::string{},
                 Group::unknown,      std::string{}};
  if (ann) {
    rec.scenario = ann->scenario;
    rec.location = ann->location;
    rec.group = ann->group;
    rec.subject_id = ann->subject_id;
  }
  return rec;
}

// Fraction of records whose predicted bin equals the label bin;
// sub-threshold predictions count as incorrect.
inline double bin_accuracy(std::span<const EvalRecord> records) {
  if (records.empty()) throw InvalidArgumentError("bin_accuracy: empty input");
  std::size_t correct = 0;
  for (const EvalRecord& r : records) {
    if (r.predicted.bin && *r.predicted.bin == r.label_bin) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

// Mean |predicted continuous angle - label bin| in degrees.
inline double mae(std::span<const EvalRecord> records) {
  if (records.empty()) throw InvalidArgumentError("mae: empty input");
  double sum = 0.0;
  for (const EvalRecord& r : records) {
    sum += std::abs(r.predicted_theta_deg - r.label_bin.degrees());
  }
  return sum / static_cast<double>(records.size());
}

// Per-bin precision weighted by label support. Bins that are never
// predicted contribute precision 0.
inline double weighted_precision(std::span<const EvalRecord> records) {
  if (records.empty()) {
    throw InvalidArgumentError("weighted_precision: empty input");
  }
  std::map<int, int> label_n, tp, positive;
  for (const EvalRecord& r : records) {
    ++label_n[r.label_bin.degrees()];
    if (r.predicted.bin) {
      ++positive[r.predicted.bin->degrees()];
      if (*r.predicted.bin == r.label_bin) ++tp[r.predicted.bin->degrees()];
    }
  }
  const double n = static_cast<double>(records.size());
  double sum = 0.0;
  for (const auto& [bin, nb] : label_n) {
    auto pos = positive.find(bin);
    if (pos == positive.end() || pos->second == 0) continue;  // precision 0
    auto hit = tp.find(bin);
    const double prec = hit == tp.end()
                            ? 0.0
                            : static_cast<double>(hit->second) / pos->second;
    sum += (nb / n) * prec;
  }
  return sum;
}

// Chance-corrected inter-rater agreement on bin labels; returns exactly 1
// on perfect agreement.
inline double cohens_kappa(std::span<const AngleBin> rater_a,
                           std::span<const AngleBin> rater_b) {
  if (rater_a.empty()) throw InvalidArgumentError("cohens_kappa: empty input");
  if (rater_a.size() != rater_b.size()) {
    throw InvalidArgumentError("cohens_kappa: length mismatch");
  }
  const double n = static_cast<double>(rater_a.size());
  std::size_t agree = 0;
  std::map<int, int> marg_a, marg_b;
  for (std::size_t i = 0; i < rater_a.size(); ++i) {
    if (rater_a[i] == rater_b[i]) ++agree;
    ++marg_a[rater_a[i].degrees()];
    ++marg_b[rater_b[i].degrees()];
  }
  const double po = static_cast<double>(agree) / n;
  if (po == 1.0) return 1.0;
  double pe = 0.0;
  for (const auto& [bin, na] : marg_a) {
    auto itb = marg_b.find(bin);
    if (itb != marg_b.end()) pe += (na / n) * (itb->second / n);
  }
  return (po - pe) / (1.0 - pe);
}

enum class GroupKey : int {
  scenario = 0,
  location = 1,
  group = 2,
  label_bin = 3,
  subject_id = 4,
};

constexpr std::string_view group_key_name(GroupKey k) {
  switch (k) {
    case GroupKey::scenario:
      return "scenario";
    case GroupKey::location:
      return "location";
    case GroupKey::group:
      return "group";
    case GroupKey::label_bin:
      return "label_bin";
    case GroupKey::subject_id:
      return "subject_id";
  }
  return "scenario";
}

inline std::optional<GroupKey> group_key_from_name(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    auto k = static_cast<GroupKey>(i);
    if (group_key_name(k) == name) return k;
  }
  return std::nullopt;
}

inline std::string record_key(const EvalRecord& r, GroupKey key) {
  switch (key) {
    case GroupKey::scenario:
      return std::string(scenario_name(r.scenario));
    case GroupKey::location:
      return r.location;
    case GroupKey::group:
      return std::string(group_name(r.group));
    case GroupKey::label_bin:
      return std::to_string(r.label_bin.degrees());
    case GroupKey::subject_id:
      return r.subject_id;
  }
  return {};
}

struct EvalRow {
  std::string key;
  int n = 0;
  double accuracy = 0.0;
  double mae_deg = 0.0;
  double wprec = 0.0;
};

struct EvalReport {
  GroupKey key = GroupKey::scenario;
  std::vector<EvalRow> rows;  // deterministic key order
  EvalRow average;            // unweighted mean across rows; n = total records
  int sub_threshold_count = 0;
};

// Partitions records by the grouping attribute and evaluates each group.
// The average row is the unweighted mean of the per-group metrics,
// regardless of group sizes.
inline EvalReport grouped_eval(std::span<const EvalRecord> records,
                               GroupKey key) {
  if (records.empty()) throw InvalidArgumentError("grouped_eval: empty input");

  std::map<std::string, std::vector<EvalRecord>> parts;
  int sub = 0;
  for (const EvalRecord& r : records) {
    parts[record_key(r, key)].push_back(r);
    if (r.predicted.sub_threshold()) ++sub;
  }

  EvalReport report;
  report.key = key;
  report.sub_threshold_count = sub;
  double acc_sum = 0.0, mae_sum = 0.0, wp_sum = 0.0;
  std::vector<std::pair<std::string, const std::vector<EvalRecord>*>> ordered;
  for (const auto& [k, v] : parts) ordered.emplace_back(k, &v);
  if (key == GroupKey::label_bin) {
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      return std::stoi(a.first) < std::stoi(b.first);
    });
  }
  for (const auto& [k, v] : ordered) {
    EvalRow row;
    row.key = k;
    row.n = static_cast<int>(v->size());
    row.accuracy = bin_accuracy(*v);
    row.mae_deg = mae(*v);
    row.wprec = weighted_precision(*v);
    acc_sum += row.accuracy;
    mae_sum += row.mae_deg;
    wp_sum += row.wprec;
    report.rows.push_back(std::move(row));
  }
  const double g = static_cast<double>(report.rows.size());
  report.average = {"avg", static_cast<int>(records.size()), acc_sum / g,
                    mae_sum / g, wp_sum / g};
  return report;
}

}  // namespace turnkit
