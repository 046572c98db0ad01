#pragma once

#include <vector>

#include "disclab/geometry.hpp"

/// One instance of every body kind, plus the C_σ values the suites sweep.
inline std::vector<disclab::BodySpec> test_zoo() {
  using disclab::BodySpec;
  std::vector<disclab::SupportSample> octagon;
  for (int i = 0; i < 8; ++i) octagon.push_back({disclab::kTwoPi * i / 8.0, 0.3});
  return {BodySpec::disk(0.25),        BodySpec::axis_square(0.5), BodySpec::regular_polygon(6, 0.3),
          BodySpec::c_sigma(0.5),      BodySpec::c_sigma(2.0 / 3.0), BodySpec::c_sigma(0.75),
          BodySpec::c_sigma(0.9),      BodySpec::c_one(),           BodySpec::lens(0.75),
          BodySpec::custom_profile(octagon)};
}
