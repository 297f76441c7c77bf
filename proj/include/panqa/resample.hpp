#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "panqa/raster.hpp"

namespace panqa {

inline constexpr double kDefaultMsMtfGain = 0.3;
inline constexpr double kDefaultPanMtfGain = 0.15;

// Separable low-pass filter. The 2D kernel is the outer product of `taps`
// with itself. For an even tap count the kernel is anchored at
// (taps.size() - 1) / 2, which lines up with the decimation phase of degrade().
struct MtfKernel {
  std::vector<double> taps;
  int ratio = 1;
  double mtf_gain = 1.0;
  double sigma = 0.0;

  std::size_t anchor() const { return (taps.size() - 1) / 2; }
  std::vector<double> taps2d() const;
  // Real part of the 1D DTFT at `frequency` (cycles per sample); for a
  // symmetric kernel this is the full transfer value.
  double transfer(double frequency) const;
};

// Gaussian whose transfer equals mtf_gain at the low-resolution Nyquist
// frequency 1 / (2 * ratio); truncated at +-4 sigma and renormalized.
MtfKernel mtf_gaussian_kernel(int ratio, double mtf_gain);

// r-tap averaging kernel (block mean when combined with degrade()).
MtfKernel box_kernel(int ratio);

MtfKernel identity_kernel();

// Mirror-padded separable filtering followed by decimation at phase
// (ratio - 1) / 2. Width and height must be divisible by ratio.
MultibandImage degrade(const MultibandImage& img, int ratio, const MtfKernel& kernel);

// Filtering only, no decimation. Exposed for tests and the a-trous fuser.
MultibandImage filter_separable(const MultibandImage& img, const std::vector<double>& taps,
                                std::size_t anchor, std::size_t dilation = 1);

enum class Resampler { nearest, bilinear, bicubic };

std::string to_string(Resampler r);
Resampler resampler_from_string(const std::string& s);

// Output is (W * ratio) x (H * ratio). Output pixel centers map to input
// coordinate (X + 0.5) / ratio - 0.5; interpolation borders are mirror-padded.
MultibandImage upsample(const MultibandImage& img, int ratio, Resampler method);

// Half-sample symmetric reflection of an index into [0, n).
std::ptrdiff_t mirror_index(std::ptrdiff_t i, std::ptrdiff_t n);

}  // namespace panqa
