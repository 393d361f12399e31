#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turnkit/error.hpp"

namespace turnkit {

// Canonical 17-joint skeleton, Human3.6M ordering.
enum class JointId : int {
  pelvis = 0,
  right_hip = 1,
  right_knee = 2,
  right_ankle = 3,
  left_hip = 4,
  left_knee = 5,
  left_ankle = 6,
  spine = 7,
  thorax = 8,
  neck = 9,
  head = 10,
  left_shoulder = 11,
  left_elbow = 12,
  left_wrist = 13,
  right_shoulder = 14,
  right_elbow = 15,
  right_wrist = 16,
};

inline constexpr int kJointCount = 17;

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "pelvis",       "right_hip",      "right_knee",  "right_ankle",
    "left_hip",     "left_knee",      "left_ankle",  "spine",
    "thorax",       "neck",           "head",        "left_shoulder",
    "left_elbow",   "left_wrist",     "right_shoulder",
    "right_elbow",  "right_wrist",
};

constexpr int joint_index(JointId id) { return static_cast<int>(id); }

constexpr std::string_view joint_name(JointId id) {
  return kJointNames[static_cast<std::size_t>(id)];
}

inline std::optional<JointId> joint_from_name(std::string_view name) {
  for (int i = 0; i < kJointCount; ++i) {
    if (kJointNames[static_cast<std::size_t>(i)] == name) {
      return static_cast<JointId>(i);
    }
  }
  return std::nullopt;
}

// Left/right joint pairs on the frontal plane.
enum class JointPair : int { hip = 0, knee = 1, shoulder = 2 };

inline constexpr int kPairCount = 3;

struct PairJoints {
  JointId left;
  JointId right;
};

constexpr PairJoints pair_joints(JointPair p) {
  switch (p) {
    case JointPair::hip:
      return {JointId::left_hip, JointId::right_hip};
    case JointPair::knee:
      return {JointId::left_knee, JointId::right_knee};
    case JointPair::shoulder:
      return {JointId::left_shoulder, JointId::right_shoulder};
  }
  return {JointId::left_hip, JointId::right_hip};
}

constexpr std::string_view pair_name(JointPair p) {
  switch (p) {
    case JointPair::hip:
      return "hip";
    case JointPair::knee:
      return "knee";
    case JointPair::shoulder:
      return "shoulder";
  }
  return "hip";
}

inline std::optional<JointPair> pair_from_name(std::string_view name) {
  for (int i = 0; i < kPairCount; ++i) {
    auto p = static_cast<JointPair>(i);
    if (pair_name(p) == name) return p;
  }
  return std::nullopt;
}

// Non-empty subset of {hip, knee, shoulder}. Defaults to hip+knee, the
// combination that performs best overall.
class JointPairSet {
public:
  JointPairSet() : bits_(0b011) {}

  JointPairSet(std::initializer_list<JointPair> pairs) : bits_(0) {
    for (JointPair p : pairs) bits_ |= bit(p);
    if (bits_ == 0) {
      throw InvalidArgumentError("joint pair set must be non-empty");
    }
  }

  static JointPairSet all() { return {JointPair::hip, JointPair::knee, JointPair::shoulder}; }

  // Parses a comma-separated list such as "hip,knee".
  static std::optional<JointPairSet> parse(std::string_view text) {
    std::uint8_t bits = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string_view tok = text.substr(pos, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - pos);
      auto p = pair_from_name(tok);
      if (!p) return std::nullopt;
      bits |= bit(*p);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (bits == 0) return std::nullopt;
    JointPairSet s;
    s.bits_ = bits;
    return s;
  }

  bool contains(JointPair p) const { return (bits_ & bit(p)) != 0; }

  int size() const { return std::popcount(bits_); }

  // Fixed order: hip, knee, shoulder.
  std::vector<JointPair> list() const {
    std::vector<JointPair> out;
    for (int i = 0; i < kPairCount; ++i) {
      auto p = static_cast<JointPair>(i);
      if (contains(p)) out.push_back(p);
    }
    return out;
  }

  std::string str() const {
    std::string out;
    for (JointPair p : list()) {
      if (!out.empty()) out += ',';
      out += pair_name(p);
    }
    return out;
  }

  bool operator==(const JointPairSet&) const = default;

private:
  static constexpr std::uint8_t bit(JointPair p) {
    return static_cast<std::uint8_t>(1u << static_cast<int>(p));
  }

  std::uint8_t bits_;
};

}  // namespace turnkit
