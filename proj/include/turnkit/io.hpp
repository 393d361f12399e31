#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/skeleton.hpp"
#include "turnkit/table.hpp"

namespace turnkit {

// Skeleton file format, one clip per file:
//   #turnskel v1 fps=<float> up=<x|y|z> joints=17 clip=<id>
// then one line per frame with 51 whitespace-separated decimals
// (x y z per joint in canonical order); a missing joint is "nan nan nan".

namespace detail {

inline ParseError parse_error(const std::filesystem::path& path,
                              std::size_t lineno, const std::string& msg) {
  return ParseError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
}

}  // namespace detail

inline SkeletonSequence load_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw detail::parse_error(path, 1, "empty file, expected header");
  }
  std::string_view header = trim(line);
  constexpr std::string_view kMagic = "#turnskel v1 ";
  if (header.substr(0, kMagic.size()) != kMagic) {
    throw detail::parse_error(path, 1, "malformed header, expected '#turnskel v1 ...'");
  }

  SkeletonSequence seq;
  // clip=<id> consumes the rest of the header line.
  std::size_t clip_pos = header.find(" clip=");
  if (clip_pos == std::string_view::npos) {
    throw detail::parse_error(path, 1, "header missing clip=<id>");
  }
  seq.clip_id = std::string(header.substr(clip_pos + 6));

  bool saw_fps = false, saw_up = false, saw_joints = false;
  for (std::string_view tok : split_ws(header.substr(kMagic.size(), clip_pos - kMagic.size()))) {
    std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos) {
      throw detail::parse_error(path, 1, "malformed header token '" + std::string(tok) + "'");
    }
    std::string_view key = tok.substr(0, eq);
    std::string_view value = tok.substr(eq + 1);
    if (key == "fps") {
      auto fps = parse_double(value);
      if (!fps || !std::isfinite(*fps) || *fps <= 0.0) {
        throw detail::parse_error(path, 1, "fps must be a positive finite number");
      }
      seq.fps = *fps;
      saw_fps = true;
    } else if (key == "up") {
      auto axis = axis_from_name(value);
      if (!axis) {
        throw detail::parse_error(path, 1, "up axis must be one of x, y, z");
      }
      seq.up_axis = *axis;
      saw_up = true;
    } else if (key == "joints") {
      auto n = parse_int(value);
      if (!n || *n != kJointCount) {
        throw detail::parse_error(path, 1, "joint count mismatch (expected joints=17)");
      }
      saw_joints = true;
    } else {
      throw detail::parse_error(path, 1, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!saw_fps || !saw_up || !saw_joints) {
    throw detail::parse_error(path, 1, "header must define fps, up, joints, clip");
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    std::vector<std::string_view> toks = split_ws(sv);
    if (toks.size() != static_cast<std::size_t>(3 * kJointCount)) {
      throw detail::parse_error(path, lineno,
                                "joint count mismatch (expected 51 values, got " +
                                    std::to_string(toks.size()) + ")");
    }
    SkeletonFrame frame;
    for (int j = 0; j < kJointCount; ++j) {
      double c[3];
      int nan_count = 0;
      for (int k = 0; k < 3; ++k) {
        auto v = parse_double(toks[static_cast<std::size_t>(3 * j + k)]);
        if (!v) {
          throw detail::parse_error(path, lineno,
                                    "bad number '" + std::string(toks[static_cast<std::size_t>(3 * j + k)]) + "'");
        }
        c[k] = *v;
        if (std::isnan(c[k])) ++nan_count;
      }
      if (nan_count == 3) continue;  // joint marked missing
      if (nan_count > 0 || !std::isfinite(c[0]) || !std::isfinite(c[1]) ||
          !std::isfinite(c[2])) {
        throw detail::parse_error(
            path, lineno,
            "non-finite value not marked missing at joint " +
                std::string(kJointNames[static_cast<std::size_t>(j)]));
      }
      frame.set(static_cast<JointId>(j), {c[0], c[1], c[2]});
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

inline void save_sequence(const SkeletonSequence& seq,
                          const std::filesystem::path& path) {
  validate(seq);
  if (seq.clip_id.find('\n') != std::string::npos ||
      seq.clip_id.find('\r') != std::string::npos) {
    throw InvalidArgumentError("clip_id must not contain newlines");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "#turnskel v1 fps=" << format_full(seq.fps) << " up="
      << axis_name(seq.up_axis) << " joints=" << kJointCount << " clip="
      << seq.clip_id << '\n';
  for (const SkeletonFrame& frame : seq.frames) {
    for (int j = 0; j < kJointCount; ++j) {
      if (j) out << ' ';
      const auto& p = frame.positions[static_cast<std::size_t>(j)];
      if (p) {
        out << format_full(p->x) << ' ' << format_full(p->y) << ' '
            << format_full(p->z);
      } else {
        out << "nan nan nan";
      }
    }
    out << '\n';
  }
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

struct AnnotationSet {
  std::vector<Annotation> records;
  int unknown_scenario_count = 0;
  int unknown_group_count = 0;
};

// Annotation table: header row
//   clip_id,label_deg,duration_s,scenario,location,subject_id,group
// Unrecognized scenario/group values map to unknown and are counted.
inline AnnotationSet load_annotations(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  const int c_clip = table.require_column("clip_id");
  const int c_label = table.require_column("label_deg");
  const int c_dur = table.require_column("duration_s");
  const int c_scen = table.require_column("scenario");
  const int c_loc = table.require_column("location");
  const int c_subj = table.require_column("subject_id");
  const int c_group = table.require_column("group");

  AnnotationSet out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto fail = [&](const std::string& msg) {
      return ParseError(path.string() + ": record " + std::to_string(r + 1) +
                        " (" + row[static_cast<std::size_t>(c_clip)] + "): " + msg);
    };
    Annotation a;
    a.clip_id = row[static_cast<std::size_t>(c_clip)];
    auto label = parse_int(row[static_cast<std::size_t>(c_label)]);
    if (!label || *label % 45 != 0 || *label < 45 || *label > 360) {
      throw fail("label not a 45 degree multiple in [45, 360]: " +
                 row[static_cast<std::size_t>(c_label)]);
    }
    a.label_deg = static_cast<int>(*label);
    auto dur = parse_double(row[static_cast<std::size_t>(c_dur)]);
    if (!dur || !(*dur > 0.0) || !std::isfinite(*dur)) {
      throw fail("non-positive duration: " + row[static_cast<std::size_t>(c_dur)]);
    }
    a.duration_s = *dur;
    if (auto s = scenario_from_name(row[static_cast<std::size_t>(c_scen)])) {
      a.scenario = *s;
    } else {
      a.scenario = Scenario::unknown;
      ++out.unknown_scenario_count;
    }
    a.location = row[static_cast<std::size_t>(c_loc)];
    a.subject_id = row[static_cast<std::size_t>(c_subj)];
    if (auto g = group_from_name(row[static_cast<std::size_t>(c_group)])) {
      a.group = *g;
    } else {
      a.group = Group::unknown;
      ++out.unknown_group_count;
    }
    out.records.push_back(std::move(a));
  }
  return out;
}

inline void save_annotations(const std::vector<Annotation>& records,
                             const std::filesystem::path& path) {
  CsvWriter w(path);
  w.row({"clip_id", "label_deg", "duration_s", "scenario", "location",
         "subject_id", "group"});
  for (const Annotation& a : records) {
    w.row({a.clip_id, std::to_string(a.label_deg), format_full(a.duration_s),
           std::string(scenario_name(a.scenario)), a.location, a.subject_id,
           std::string(group_name(a.group))});
  }
  w.close();
}

}  // namespace turnkit
