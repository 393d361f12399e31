#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/error.hpp"
#include "turnkit/joints.hpp"

namespace turnkit {

enum class Axis : int { x = 0, y = 1, z = 2 };

constexpr std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::x:
      return "x";
    case Axis::y:
      return "y";
    case Axis::z:
      return "z";
  }
  return "z";
}

inline std::optional<Axis> axis_from_name(std::string_view name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  return std::nullopt;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }

  double operator[](int i) const { return i == 0 ? x : i == 1 ? y : z; }

  bool operator==(const Vec3&) const = default;
};

// One pose: 17 joints, each fully present or fully missing.
struct SkeletonFrame {
  std::array<std::optional<Vec3>, kJointCount> positions;

  bool has(JointId id) const {
    return positions[static_cast<std::size_t>(id)].has_value();
  }

  const Vec3& at(JointId id) const {
    const auto& p = positions[static_cast<std::size_t>(id)];
    if (!p) {
      throw MissingJointError(std::string("joint missing: ") +
                              std::string(joint_name(id)));
    }
    return *p;
  }

  void set(JointId id, Vec3 v) {
    positions[static_cast<std::size_t>(id)] = v;
  }

  void clear(JointId id) {
    positions[static_cast<std::size_t>(id)].reset();
  }

  bool operator==(const SkeletonFrame&) const = default;
};

struct SkeletonSequence {
  std::vector<SkeletonFrame> frames;
  double fps = 0.0;
  Axis up_axis = Axis::z;
  std::string clip_id;

  std::size_t frame_count() const { return frames.size(); }

  // (T-1)/fps; zero when there is no transition.
  double duration_s() const {
    return frames.size() < 2
               ? 0.0
               : static_cast<double>(frames.size() - 1) / fps;
  }

  bool operator==(const SkeletonSequence&) const = default;
};

// Throws InvalidArgumentError on a malformed sequence. Present joints must
// be fully finite; fps must be positive and finite.
inline void validate(const SkeletonSequence& seq) {
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) {
    throw InvalidArgumentError("fps must be positive and finite");
  }
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    for (int j = 0; j < kJointCount; ++j) {
      const auto& p = seq.frames[f].positions[static_cast<std::size_t>(j)];
      if (p && !p->finite()) {
        throw InvalidArgumentError(
            "non-finite coordinate at frame " + std::to_string(f) +
            ", joint " + std::string(kJointNames[static_cast<std::size_t>(j)]));
      }
    }
  }
}

enum class Scenario : int {
  loosely_scripted = 0,
  clinical = 1,
  free_living = 2,
  unknown = 3,
};

constexpr std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::loosely_scripted:
      return "loosely_scripted";
    case Scenario::clinical:
      return "clinical";
    case Scenario::free_living:
      return "free_living";
    case Scenario::unknown:
      return "unknown";
  }
  return "unknown";
}

inline std::optional<Scenario> scenario_from_name(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    auto s = static_cast<Scenario>(i);
    if (scenario_name(s) == name) return s;
  }
  return std::nullopt;
}

enum class Group : int { pd = 0, control = 1, unknown = 2 };

constexpr std::string_view group_name(Group g) {
  switch (g) {
    case Group::pd:
      return "PD";
    case Group::control:
      return "control";
    case Group::unknown:
      return "unknown";
  }
  return "unknown";
}

inline std::optional<Group> group_from_name(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    auto g = static_cast<Group>(i);
    if (group_name(g) == name) return g;
  }
  return std::nullopt;
}

// Clinician-style label for one clip.
struct Annotation {
  std::string clip_id;
  int label_deg = 0;  // positive multiple of 45 in [45, 360]
  double duration_s = 0.0;
  Scenario scenario = Scenario::unknown;
  std::string location;
  std::string subject_id;
  Group group = Group::unknown;
};

}  // namespace turnkit
