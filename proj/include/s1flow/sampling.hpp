#pragma once

#include <random>

#include "s1flow/frame_geometry.hpp"

namespace s1flow {

/// Random frame data with every field in [-scale, scale] except f, which lies in
/// [0.2, 2]. When `integrable` is set the result satisfies d^2 f = 0 exactly.
FramePointData random_frame_point(std::mt19937_64& rng, double scale = 2.0,
                                  bool integrable = true);

} // namespace s1flow
