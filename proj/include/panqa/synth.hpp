#pragma once

#include <cstddef>
#include <cstdint>

#include "panqa/raster.hpp"

namespace panqa {

struct SyntheticScene {
  MultibandImage ms;   // 4-band reflectance truth at PAN resolution
  MultibandImage pan;  // single band, same size
};

// Deterministic piecewise scene: Voronoi regions with per-region spectra,
// smooth gradients, textured patches. All samples lie in [0, 1].
// Width and height must be divisible by 4.
SyntheticScene synthesize_scene(std::uint64_t seed, std::size_t width, std::size_t height);

}  // namespace panqa
