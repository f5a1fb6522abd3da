#pragma once

#include <array>
#include <string>
#include <vector>

#include "ghzcav/hamiltonians.hpp"

namespace ghzcav {

enum class SegmentLabel { Step1a, Step1b, Step1c, Step2, Step3c, Step3b, Step3a };

inline constexpr std::array<SegmentLabel, 7> kSegmentOrder = {
    SegmentLabel::Step1a, SegmentLabel::Step1b, SegmentLabel::Step1c, SegmentLabel::Step2,
    SegmentLabel::Step3c, SegmentLabel::Step3b, SegmentLabel::Step3a};

std::string to_string(SegmentLabel label);

struct Segment {
  SegmentLabel label;
  double t_start = 0.0;
  double duration = 0.0;
  std::vector<PulseSpec> pulses;  // pulses active during this segment

  double t_end() const { return t_start + duration; }
};

struct Schedule {
  std::vector<Segment> segments;
  double total_time = 0.0;
  double rabi_r = 0.0;        // (1,2) pulse on qubit 1
  double rabi_r_tilde = 0.0;  // (0,1) pulse on qubit 1
  double g = 0.0;
  double lambda = 0.0;

  const Segment& segment(SegmentLabel label) const;
  double duration(SegmentLabel label) const { return segment(label).duration; }
};

}  // namespace ghzcav
