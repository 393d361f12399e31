// turnkit: batch turning-angle analytics on 3D skeleton sequences.
//
// Subcommands: angle | detect | eval | stats | synth. All outputs are
// comma-separated tables with a header row; floating-point values use six
// significant digits. For fixed inputs, configs, and seeds every emitted
// file is byte-identical across runs and --jobs settings.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "turnkit/detection.hpp"
#include "turnkit/geometry.hpp"
#include "turnkit/io.hpp"
#include "turnkit/metrics.hpp"
#include "turnkit/stats.hpp"
#include "turnkit/synth.hpp"
#include "turnkit/table.hpp"

namespace fs = std::filesystem;
using namespace turnkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailed = 3;

// Ordered results, scheduling-independent: workers pull indices from a
// shared counter and write to preassigned slots.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                    c == '-' || c == '#';
    out += ok ? c : '_';
  }
  return out.empty() ? "clip" : out;
}

std::string strip_commas(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

struct CommonOptions {
  std::string pairs_text = "hip,knee";
  std::string mode_text = "unsigned";
  std::string up_text;  // optional override
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  JointPairSet pairs;
  StepMode mode = StepMode::unsigned_arcsin;
  std::optional<Axis> up_override;

  void add_flags(CLI::App* cmd, bool with_mode = true) {
    cmd->add_option("--pairs", pairs_text,
                    "joint pairs: comma list of hip,knee,shoulder")
        ->capture_default_str();
    if (with_mode) {
      cmd->add_option("--mode", mode_text, "step mode: unsigned|signed")
          ->capture_default_str();
    }
    cmd->add_option("--up", up_text, "override the up axis: x|y|z");
    cmd->add_option("--jobs", jobs, "worker count")->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--out", out_dir, "output directory")
        ->capture_default_str();
  }

  void resolve() {
    auto parsed = JointPairSet::parse(pairs_text);
    if (!parsed) {
      throw CLI::ValidationError("--pairs", "expected a comma list of hip,knee,shoulder");
    }
    pairs = *parsed;
    auto m = step_mode_from_name(mode_text);
    if (!m) throw CLI::ValidationError("--mode", "expected unsigned or signed");
    mode = *m;
    if (!up_text.empty()) {
      auto a = axis_from_name(up_text);
      if (!a) throw CLI::ValidationError("--up", "expected x, y, or z");
      up_override = a;
    }
    if (jobs < 1) throw CLI::ValidationError("--jobs", "must be >= 1");
    fs::create_directories(out_dir);
  }
};

SkeletonSequence load_clip(const fs::path& path,
                           const std::optional<Axis>& up_override) {
  SkeletonSequence seq = load_sequence(path);
  if (up_override) seq.up_axis = *up_override;
  return seq;
}

// ---------------------------------------------------------------------------
// angle: per-clip turning estimates
// ---------------------------------------------------------------------------

struct AngleRow {
  std::string clip_id;
  bool ok = false;
  double theta_deg = 0.0;
  Quantized bin;
  double omega_deg_s = 0.0;
  double w_max_deg_s = 0.0;
  int skipped = 0;
  std::string error;
};

int run_angle(const std::vector<std::string>& inputs, CommonOptions& opt) {
  std::vector<AngleRow> rows(inputs.size());
  parallel_for(inputs.size(), opt.jobs, [&](std::size_t i) {
    AngleRow& row = rows[i];
    const fs::path path(inputs[i]);
    row.clip_id = path.stem().string();
    try {
      SkeletonSequence seq = load_clip(path, opt.up_override);
      row.clip_id = seq.clip_id;
      TurnEstimate est = total_angle(seq, opt.pairs, opt.mode);
      row.theta_deg = est.theta_deg;
      row.bin = quantize_angle(est.theta_deg);
      row.omega_deg_s = est.omega_deg_s;
      row.w_max_deg_s = est.w_max_deg_s;
      row.skipped = est.skipped_transitions;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = strip_commas(e.what());
    }
  });

  CsvWriter out(fs::path(opt.out_dir) / "angles.csv");
  out.row({"clip_id", "theta_deg", "bin", "omega_deg_s", "w_max_deg_s",
           "skipped_transitions", "error"});
  std::size_t failures = 0;
  for (const AngleRow& row : rows) {
    if (row.ok) {
      std::string bin = row.bin.sub_threshold()
                            ? "sub"
                            : std::to_string(row.bin.bin->degrees());
      out.row({row.clip_id, format_g6(row.theta_deg), bin,
               format_g6(row.omega_deg_s), format_g6(row.w_max_deg_s),
               std::to_string(row.skipped), ""});
    } else {
      ++failures;
      out.row({row.clip_id, "", "", "", "", "", row.error});
      std::cerr << "angle: " << row.clip_id << ": " << row.error << '\n';
    }
  }
  out.comment("pairs: " + opt.pairs.str());
  out.comment("mode: " + std::string(step_mode_name(opt.mode)));
  out.close();

  if (failures == rows.size()) return kExitFailed;
  return failures > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// detect: episode segmentation over untrimmed sequences
// ---------------------------------------------------------------------------

int run_detect(const std::vector<std::string>& inputs, CommonOptions& opt,
               DetectConfig cfg, bool emit_clips) {
  cfg.pairs = opt.pairs;
  cfg.validate();

  struct ClipOutcome {
    std::string clip_id;
    std::vector<TurnEpisode> episodes;
    SkeletonSequence seq;
    bool ok = false;
    std::string error;
  };
  std::vector<ClipOutcome> outcomes(inputs.size());
  parallel_for(inputs.size(), opt.jobs, [&](std::size_t i) {
    ClipOutcome& oc = outcomes[i];
    const fs::path path(inputs[i]);
    oc.clip_id = path.stem().string();
    try {
      oc.seq = load_clip(path, opt.up_override);
      oc.clip_id = oc.seq.clip_id;
      oc.episodes = detect_turns(oc.seq, cfg);
      oc.ok = true;
    } catch (const std::exception& e) {
      oc.error = strip_commas(e.what());
    }
  });

  CsvWriter out(fs::path(opt.out_dir) / "episodes.csv");
  out.row({"clip_id", "start_frame", "end_frame", "accumulated_deg",
           "direction", "mean_rate_deg_s"});
  std::size_t failures = 0;
  for (const ClipOutcome& oc : outcomes) {
    if (!oc.ok) {
      ++failures;
      std::cerr << "detect: " << oc.clip_id << ": " << oc.error << '\n';
      continue;
    }
    for (const TurnEpisode& ep : oc.episodes) {
      out.row({oc.clip_id, std::to_string(ep.start_frame),
               std::to_string(ep.end_frame), format_g6(ep.accumulated_deg),
               std::string(turn_direction_name(ep.direction)),
               format_g6(ep.mean_rate_deg_s)});
      if (emit_clips) {
        SkeletonSequence clip = trim_episode(oc.seq, ep);
        save_sequence(clip, fs::path(opt.out_dir) /
                                (sanitize_filename(clip.clip_id) + ".turnskel"));
      }
    }
  }
  out.close();

  if (!outcomes.empty() && failures == outcomes.size()) return kExitFailed;
  return failures > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// eval: join predictions with annotations, grouped metric tables
// ---------------------------------------------------------------------------

struct JoinedRecords {
  std::vector<EvalRecord> records;
  std::map<std::string, double> w_max_by_clip;
  std::vector<std::string> unmatched_results;
  std::vector<std::string> unmatched_annotations;
  std::vector<std::string> failed_results;
};

JoinedRecords join_results(const fs::path& results_path,
                           const fs::path& annotations_path) {
  CsvTable results = read_csv(results_path);
  const int c_clip = results.require_column("clip_id");
  const int c_theta = results.require_column("theta_deg");
  const int c_err = results.column("error");
  const int c_wmax = results.column("w_max_deg_s");

  AnnotationSet ann = load_annotations(annotations_path);
  std::map<std::string, const Annotation*> by_clip;
  for (const Annotation& a : ann.records) by_clip[a.clip_id] = &a;

  JoinedRecords out;
  std::set<std::string> matched;
  for (const auto& row : results.rows) {
    const std::string& clip = row[static_cast<std::size_t>(c_clip)];
    if (c_err >= 0 && !row[static_cast<std::size_t>(c_err)].empty()) {
      out.failed_results.push_back(clip);
      continue;
    }
    auto it = by_clip.find(clip);
    if (it == by_clip.end()) {
      out.unmatched_results.push_back(clip);
      continue;
    }
    auto theta = parse_double(row[static_cast<std::size_t>(c_theta)]);
    if (!theta) {
      out.failed_results.push_back(clip);
      continue;
    }
    matched.insert(clip);
    out.records.push_back(make_eval_record(
        clip, *theta, AngleBin(it->second->label_deg), it->second));
    if (c_wmax >= 0) {
      if (auto w = parse_double(row[static_cast<std::size_t>(c_wmax)])) {
        out.w_max_by_clip[clip] = *w;
      }
    }
  }
  for (const Annotation& a : ann.records) {
    if (!matched.count(a.clip_id)) out.unmatched_annotations.push_back(a.clip_id);
  }
  return out;
}

void write_eval_report(const EvalReport& report,
                       std::span<const EvalRecord> all_records,
                       const JoinedRecords& joined, const fs::path& csv_path,
                       const fs::path& txt_path) {
  const EvalRow overall{"overall", static_cast<int>(all_records.size()),
                        bin_accuracy(all_records), mae(all_records),
                        weighted_precision(all_records)};

  CsvWriter csv(csv_path);
  csv.row({"group_key", "n", "accuracy", "mae_deg", "wprec"});
  auto emit = [&](const EvalRow& row) {
    csv.row({row.key, std::to_string(row.n), format_g6(row.accuracy),
             format_g6(row.mae_deg), format_g6(row.wprec)});
  };
  for (const EvalRow& row : report.rows) emit(row);
  emit(report.average);
  emit(overall);
  csv.comment("sub_threshold_predictions: " +
              std::to_string(report.sub_threshold_count));
  if (!joined.unmatched_results.empty()) {
    std::string ids;
    for (const auto& id : joined.unmatched_results) ids += " " + id;
    csv.comment("unmatched_results:" + ids);
  }
  if (!joined.unmatched_annotations.empty()) {
    std::string ids;
    for (const auto& id : joined.unmatched_annotations) ids += " " + id;
    csv.comment("unmatched_annotations:" + ids);
  }
  csv.close();

  std::ofstream txt(txt_path);
  txt << "grouped by " << group_key_name(report.key) << "\n";
  txt << std::left;
  auto line = [&](const EvalRow& row) {
    txt << "  " << row.key << ": n=" << row.n << " accuracy="
        << format_g6(row.accuracy) << " mae_deg=" << format_g6(row.mae_deg)
        << " wprec=" << format_g6(row.wprec) << "\n";
  };
  for (const EvalRow& row : report.rows) line(row);
  line(report.average);
  line(overall);
  txt << "sub-threshold predictions: " << report.sub_threshold_count << "\n";
  if (!joined.unmatched_results.empty()) {
    txt << "unmatched results (excluded):";
    for (const auto& id : joined.unmatched_results) txt << ' ' << id;
    txt << "\n";
  }
  if (!joined.unmatched_annotations.empty()) {
    txt << "unmatched annotations (excluded):";
    for (const auto& id : joined.unmatched_annotations) txt << ' ' << id;
    txt << "\n";
  }
}

void write_plot_data(std::span<const EvalRecord> records,
                     const fs::path& out_dir) {
  // per-bin prediction distribution
  std::map<int, std::vector<double>> by_bin;
  for (const EvalRecord& r : records) {
    by_bin[r.label_bin.degrees()].push_back(r.predicted_theta_deg);
  }
  CsvWriter bins(out_dir / "plot_pred_by_bin.csv");
  bins.row({"label_bin", "n", "mean_pred_deg", "sd_pred_deg"});
  for (const auto& [bin, preds] : by_bin) {
    double mean = 0.0;
    for (double p : preds) mean += p;
    mean /= static_cast<double>(preds.size());
    double sd = 0.0;
    if (preds.size() > 1) {
      double ss = 0.0;
      for (double p : preds) ss += (p - mean) * (p - mean);
      sd = std::sqrt(ss / (static_cast<double>(preds.size()) - 1.0));
    }
    bins.row({std::to_string(bin), std::to_string(preds.size()),
              format_g6(mean), format_g6(sd)});
  }
  bins.close();

  // absolute-error histogram, 10 degree bins with an open tail
  constexpr int kBins = 18;
  std::vector<std::size_t> counts(kBins + 1, 0);
  for (const EvalRecord& r : records) {
    const double err = std::abs(r.predicted_theta_deg - r.label_bin.degrees());
    const int slot = std::min(kBins, static_cast<int>(err / 10.0));
    ++counts[static_cast<std::size_t>(slot)];
  }
  CsvWriter hist(out_dir / "plot_abs_error_hist.csv");
  hist.row({"err_low_deg", "err_high_deg", "count"});
  for (int b = 0; b < kBins; ++b) {
    hist.row({std::to_string(10 * b), std::to_string(10 * (b + 1)),
              std::to_string(counts[static_cast<std::size_t>(b)])});
  }
  hist.row({std::to_string(10 * kBins), "inf",
            std::to_string(counts[static_cast<std::size_t>(kBins)])});
  hist.close();
}

int run_eval(const std::string& results_path, const std::string& ann_path,
             const std::string& group_by, bool plots, CommonOptions& opt) {
  JoinedRecords joined = join_results(results_path, ann_path);
  if (joined.records.empty()) {
    std::cerr << "eval: no records joined between results and annotations\n";
    return kExitFailed;
  }
  std::vector<GroupKey> keys;
  for (std::string_view tok : split(group_by, ',')) {
    auto key = group_key_from_name(trim(tok));
    if (!key) {
      std::cerr << "eval: unknown group-by key '" << trim(tok) << "'\n";
      return kExitUsage;
    }
    keys.push_back(*key);
  }
  for (GroupKey key : keys) {
    EvalReport report = grouped_eval(joined.records, key);
    const std::string base = "eval_" + std::string(group_key_name(key));
    write_eval_report(report, joined.records, joined,
                      fs::path(opt.out_dir) / (base + ".csv"),
                      fs::path(opt.out_dir) / (base + ".txt"));
  }
  if (plots) write_plot_data(joined.records, fs::path(opt.out_dir));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats: cross-sectional group comparison
// ---------------------------------------------------------------------------

int run_stats(const std::string& results_path, const std::string& ann_path,
              const std::string& measure, bool welch, CommonOptions& opt) {
  if (measure != "angle" && measure != "w_max") {
    std::cerr << "stats: --measure must be angle or w_max\n";
    return kExitUsage;
  }
  JoinedRecords joined = join_results(results_path, ann_path);
  if (joined.records.empty()) {
    std::cerr << "stats: no records joined between results and annotations\n";
    return kExitFailed;
  }

  std::vector<SubjectValue> values;
  for (const EvalRecord& r : joined.records) {
    if (r.group == Group::unknown) continue;
    double v = r.predicted_theta_deg;
    if (measure == "w_max") {
      auto it = joined.w_max_by_clip.find(r.clip_id);
      if (it == joined.w_max_by_clip.end()) continue;
      v = it->second;
    }
    values.push_back({r.subject_id, r.group, v});
  }
  if (values.empty()) {
    std::cerr << "stats: no records with a known group\n";
    return kExitFailed;
  }

  std::vector<double> pd, control;
  try {
    for (const SubjectValue& s : per_subject_means(values)) {
      (s.group == Group::pd ? pd : control).push_back(s.value);
    }
  } catch (const std::exception& e) {
    std::cerr << "stats: " << e.what() << '\n';
    return kExitFailed;
  }
  if (pd.size() < 2 || control.size() < 2) {
    std::cerr << "stats: need at least 2 subjects per group, got PD="
              << pd.size() << " control=" << control.size() << '\n';
    return kExitFailed;
  }

  GroupStats gpd = summarize_group(pd, "PD", measure);
  GroupStats gc = summarize_group(control, "control", measure);
  TTestResult t = t_test_from_summary(gpd, gc, 0.95, welch);

  CsvWriter out(fs::path(opt.out_dir) / ("stats_" + measure + ".csv"));
  out.row({"measure", "group", "n", "mean", "sd", "t", "df", "p", "d",
           "ci_low", "ci_high"});
  auto emit = [&](const GroupStats& g) {
    out.row({measure, g.group_name, std::to_string(g.n), format_g6(g.mean),
             format_g6(g.sd), format_g6(t.t_stat), format_g6(t.df),
             format_g6(t.p_two_tailed), format_g6(t.cohens_d),
             format_g6(t.ci_low), format_g6(t.ci_high)});
  };
  emit(gpd);
  emit(gc);
  out.comment(std::string("test: ") + (welch ? "welch" : "pooled") +
              ", two-tailed, ci_level 0.95, per-subject means");
  out.close();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth: deterministic clip generation from a params table
// ---------------------------------------------------------------------------

struct SynthRow {
  SynthParams params;
  NoiseParams noise;
  std::string subject_id;
  Group group = Group::unknown;
};

SynthRow parse_synth_row(const CsvTable& table, std::size_t r,
                         std::uint64_t seed) {
  const auto& row = table.rows[r];
  auto field = [&](const char* name) -> std::optional<std::string> {
    int c = table.column(name);
    if (c < 0) return std::nullopt;
    const std::string& v = row[static_cast<std::size_t>(c)];
    if (v.empty()) return std::nullopt;
    return v;
  };
  auto numeric = [&](const char* name) -> std::optional<double> {
    auto v = field(name);
    if (!v) return std::nullopt;
    auto d = parse_double(*v);
    if (!d) {
      throw ParseError(table.source.string() + ": row " + std::to_string(r + 1) +
                       ": bad value for " + name + ": " + *v);
    }
    return d;
  };
  auto required = [&](const char* name) -> double {
    auto v = numeric(name);
    if (!v) {
      throw ParseError(table.source.string() + ": row " + std::to_string(r + 1) +
                       ": missing required field " + name);
    }
    return *v;
  };

  SynthRow out;
  auto clip = field("clip_id");
  if (!clip) {
    throw ParseError(table.source.string() + ": row " + std::to_string(r + 1) +
                     ": missing required field clip_id");
  }
  out.params.clip_id = *clip;
  out.params.turn_deg = required("turn_deg");
  out.params.duration_s = required("duration_s");
  out.params.fps = required("fps");
  if (auto v = numeric("pre_s")) out.params.pre_walk_s = *v;
  if (auto v = numeric("post_s")) out.params.post_walk_s = *v;
  if (auto v = numeric("lag_frames")) out.params.en_bloc_lag_frames = static_cast<int>(*v);
  if (auto v = numeric("hip_width")) out.params.hip_width = *v;
  if (auto v = numeric("knee_width")) out.params.knee_width = *v;
  if (auto v = numeric("shoulder_width")) out.params.shoulder_width = *v;
  if (auto v = field("direction")) {
    if (*v == "cw") {
      out.params.direction = TurnDirection::cw;
    } else if (*v == "ccw") {
      out.params.direction = TurnDirection::ccw;
    } else {
      throw ParseError("bad value for direction: " + *v);
    }
  }
  if (auto v = field("profile")) {
    auto p = rate_profile_from_name(*v);
    if (!p) throw ParseError("bad value for profile: " + *v);
    out.params.rate_profile = *p;
  }
  if (auto v = numeric("jitter_sd")) out.noise.jitter_sd = *v;
  if (auto v = numeric("dropout_prob")) out.noise.dropout_prob = *v;
  out.noise.seed = mix_seed(seed, r);
  out.subject_id = field("subject_id").value_or(out.params.clip_id);
  if (auto v = field("group")) {
    auto g = group_from_name(*v);
    out.group = g.value_or(Group::unknown);
  }
  return out;
}

int run_synth(const std::string& params_path, CommonOptions& opt) {
  CsvTable table = read_csv(params_path);
  std::vector<SynthRow> rows;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    rows.push_back(parse_synth_row(table, r, opt.seed));
    rows.back().params.validate();
    if (!seen.insert(rows.back().params.clip_id).second) {
      std::cerr << "synth: duplicate clip_id '" << rows.back().params.clip_id
                << "'\n";
      return kExitUsage;
    }
  }
  if (rows.empty()) {
    std::cerr << "synth: params file has no rows\n";
    return kExitUsage;
  }

  struct Generated {
    TurnGroundtruth gt;
    double duration_s = 0.0;
  };
  std::vector<Generated> generated(rows.size());
  std::atomic<bool> failed{false};
  parallel_for(rows.size(), opt.jobs, [&](std::size_t i) {
    try {
      auto [seq, gt] = generate_turn(rows[i].params);
      if (rows[i].noise.jitter_sd > 0.0 || rows[i].noise.dropout_prob > 0.0) {
        seq = add_noise(seq, rows[i].noise);
      }
      save_sequence(seq, fs::path(opt.out_dir) /
                             (sanitize_filename(seq.clip_id) + ".turnskel"));
      generated[i].gt = std::move(gt);
      generated[i].duration_s = rows[i].params.duration_s;
    } catch (const std::exception& e) {
      std::cerr << "synth: row " << (i + 1) << ": " << e.what() << '\n';
      failed = true;
    }
  });
  if (failed) return kExitFailed;

  CsvWriter gt_out(fs::path(opt.out_dir) / "groundtruth.csv");
  gt_out.row({"clip_id", "turn_deg", "start_frame", "end_frame", "mean_rate",
              "max_rate"});
  std::vector<Annotation> annotations;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TurnGroundtruth& gt = generated[i].gt;
    gt_out.row({gt.clip_id, format_g6(gt.turn_deg),
                std::to_string(gt.start_frame), std::to_string(gt.end_frame),
                format_g6(gt.mean_rate_deg_s), format_g6(gt.max_rate_deg_s)});
    Quantized q = quantize_angle(gt.turn_deg);
    if (!q.sub_threshold()) {
      Annotation a;
      a.clip_id = gt.clip_id;
      a.label_deg = q.bin->degrees();
      a.duration_s = generated[i].duration_s;
      a.scenario = Scenario::unknown;
      a.location = "synthetic";
      a.subject_id = rows[i].subject_id;
      a.group = rows[i].group;
      annotations.push_back(std::move(a));
    }
  }
  gt_out.close();
  save_annotations(annotations, fs::path(opt.out_dir) / "annotations.csv");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"turning-angle analytics for 3D skeleton sequences"};
  app.require_subcommand(1);

  CommonOptions opt;

  // angle
  auto* angle = app.add_subcommand("angle", "per-clip turning estimates");
  std::vector<std::string> angle_inputs;
  angle->add_option("inputs", angle_inputs, "skeleton files")->required();
  opt.add_flags(angle);

  // detect
  auto* detect = app.add_subcommand("detect", "segment turning episodes");
  std::vector<std::string> detect_inputs;
  bool emit_clips = false;
  DetectConfig detect_cfg;
  detect->add_option("inputs", detect_inputs, "skeleton files")->required();
  detect->add_option("--min-turn", detect_cfg.min_turn_deg,
                     "episode threshold, degrees")->capture_default_str();
  detect->add_option("--min-rate", detect_cfg.min_rate_deg_s,
                     "rate gate, degrees/second")->capture_default_str();
  detect->add_option("--smooth-window", detect_cfg.smooth_window_frames,
                     "centered smoothing window, frames (odd)")
      ->capture_default_str();
  detect->add_option("--max-gap", detect_cfg.max_gap_frames,
                     "tolerated pause, frames")->capture_default_str();
  detect->add_option("--reversal-tolerance", detect_cfg.reversal_tolerance_deg,
                     "tolerated counter-rotation, degrees")
      ->capture_default_str();
  detect->add_flag("--emit-clips", emit_clips, "write trimmed episode clips");
  CommonOptions detect_opt;
  detect_opt.pairs_text = "hip";
  detect_opt.add_flags(detect, /*with_mode=*/false);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate predictions against labels");
  std::string eval_results, eval_ann, group_by = "scenario";
  bool plots = false;
  eval->add_option("--results", eval_results, "angles.csv from the angle command")
      ->required();
  eval->add_option("--annotations", eval_ann, "annotation table")->required();
  eval->add_option("--group-by", group_by,
                   "comma list of scenario,location,group,label_bin,subject_id")
      ->capture_default_str();
  eval->add_flag("--plots", plots, "emit plot-data tables");
  opt.add_flags(eval);

  // stats
  auto* stats = app.add_subcommand("stats", "PD vs control group statistics");
  std::string stats_results, stats_ann, measure = "angle";
  bool welch = false;
  stats->add_option("--results", stats_results, "angles.csv from the angle command")
      ->required();
  stats->add_option("--annotations", stats_ann, "annotation table")->required();
  stats->add_option("--measure", measure, "angle|w_max")->capture_default_str();
  stats->add_flag("--welch", welch, "Welch variant instead of pooled");
  opt.add_flags(stats);

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic clips");
  std::string params_path;
  synth->add_option("--params", params_path, "params table, one clip per row")
      ->required();
  opt.add_flags(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(angle)) {
      opt.resolve();
      return run_angle(angle_inputs, opt);
    }
    if (app.got_subcommand(detect)) {
      detect_opt.resolve();
      return run_detect(detect_inputs, detect_opt, detect_cfg, emit_clips);
    }
    if (app.got_subcommand(eval)) {
      opt.resolve();
      return run_eval(eval_results, eval_ann, group_by, plots, opt);
    }
    if (app.got_subcommand(stats)) {
      opt.resolve();
      return run_stats(stats_results, stats_ann, measure, welch, opt);
    }
    if (app.got_subcommand(synth)) {
      opt.resolve();
      return run_synth(params_path, opt);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgumentError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
