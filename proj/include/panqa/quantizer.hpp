#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "panqa/raster.hpp"

namespace panqa {

enum class QuantizationLevel { fine = 0, intermediate = 1, coarse = 2 };

std::string to_string(QuantizationLevel l);
QuantizationLevel quantization_level_from_string(const std::string& s);

// Three co-registered label maps from one image, from fine to coarse.
// merge_tables[0] maps fine labels to intermediate ones, merge_tables[1]
// intermediate to coarse.
class LabelMapStack {
 public:
  // Validates shape agreement, strictly decreasing level counts, label
  // ranges and merge consistency.
  LabelMapStack(std::array<LabelPlane, 3> planes, std::array<std::size_t, 3> level_counts,
                std::array<std::vector<std::uint32_t>, 2> merge_tables);

  // Derives merge tables from the observed fine -> intermediate -> coarse
  // mapping; throws InputError if that mapping is not a function.
  static LabelMapStack from_planes(std::array<LabelPlane, 3> planes,
                                   std::array<std::size_t, 3> level_counts);

  const LabelPlane& plane(QuantizationLevel l) const { return planes_[static_cast<std::size_t>(l)]; }
  const LabelPlane& fine() const { return planes_[0]; }
  const LabelPlane& intermediate() const { return planes_[1]; }
  const LabelPlane& coarse() const { return planes_[2]; }
  const std::array<std::size_t, 3>& level_counts() const { return level_counts_; }
  const std::array<std::vector<std::uint32_t>, 2>& merge_tables() const { return merge_tables_; }

  std::size_t width() const { return planes_[0].width; }
  std::size_t height() const { return planes_[0].height; }

  friend bool operator==(const LabelMapStack&, const LabelMapStack&) = default;

 private:
  std::array<LabelPlane, 3> planes_;
  std::array<std::size_t, 3> level_counts_;
  std::array<std::vector<std::uint32_t>, 2> merge_tables_;
};

// Context-free spectral quantizer: labels depend only on each pixel's vector.
class SpectralQuantizer {
 public:
  virtual ~SpectralQuantizer() = default;
  virtual LabelMapStack quantize(const MultibandImage& img) const = 0;
};

// Reference quantizer on reflectance in [0, 1].
//   fine:         4 bins per band (thresholds 0.25, 0.5, 0.75), product code, 4^B labels
//   intermediate: 2 bins per band (fine bins {0,1} -> 0, {2,3} -> 1), 2^B labels
//   coarse:       number of bands in the upper half, B + 1 labels
// Samples in [-0.01, 1.5] are clamped to [0, 1]; anything else is rejected.
class ThresholdQuantizer final : public SpectralQuantizer {
 public:
  static constexpr std::array<double, 3> kThresholds{0.25, 0.5, 0.75};
  static constexpr double kLowSlack = -0.01;
  static constexpr double kHighSlack = 1.5;
  static constexpr std::size_t kMinBands = 3;
  static constexpr std::size_t kMaxBands = 8;

  LabelMapStack quantize(const MultibandImage& img) const override;
};

LabelMapStack quantize_spectral(const MultibandImage& img);

std::size_t post_classification_change_count(const LabelMapStack& a, const LabelMapStack& b,
                                             QuantizationLevel level = QuantizationLevel::coarse);

struct CrossAura {
  std::size_t width = 0;
  std::size_t height = 0;
  // Per-pixel sum over the three levels of 8-neighbors with a different label, in [0, 24].
  std::vector<std::uint8_t> values;
  double mean = 0.0;
};

CrossAura cross_aura(const LabelMapStack& stack);

// Same count for a single label plane, in [0, 8]. Border pixels use the
// neighbors that exist.
std::vector<std::uint8_t> cross_aura_level(const LabelPlane& plane);

// Mean over pixels of |[aura_a > 0] - [aura_b > 0]|.
double binary_contour_cost(const LabelMapStack& a, const LabelMapStack& b);

// |mean aura a - mean aura b|.
double cross_aura_cost(const LabelMapStack& a, const LabelMapStack& b);

// Stacks are stored as 3-band u16 rasters; band names carry level name and
// cardinality ("fine:256").
void save_stack(const LabelMapStack& stack, const std::filesystem::path& path);
LabelMapStack load_stack(const std::filesystem::path& path);

}  // namespace panqa
