#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "panqa/raster.hpp"

namespace panqa {

inline constexpr std::size_t kDefaultGrayLevels = 32;
inline constexpr std::size_t kDefaultBlockSize = 8;
inline constexpr double kErgasGoodThreshold = 3.0;

// Population moments and min-max histogram entropy of one band.
struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  double entropy_bits = 0.0;
};

// Non-overlapping BL x BL tiling; partial blocks at the right and bottom edges are dropped.
struct BlockSpec {
  std::size_t block_size = kDefaultBlockSize;

  void validate() const;
};

// Skewness and kurtosis are defined as 0 for a constant band.
SummaryStats summary_stats(const BandView& band, std::size_t gl = kDefaultGrayLevels);

std::vector<SummaryStats> summary_stats(const MultibandImage& img, std::size_t gl = kDefaultGrayLevels);

// Mean over bands of |a_b - b_b|.
double mdb_cost(std::span<const double> a, std::span<const double> b);

// The five per-band summary-statistic costs, in the order
// mean, std, skewness, kurtosis, entropy.
struct SummaryCosts {
  double mean = 0.0;
  double std = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  double entropy = 0.0;
};
SummaryCosts summary_costs(const MultibandImage& reference, const MultibandImage& test,
                           std::size_t gl = kDefaultGrayLevels);

// Pearson correlation with population normalization. Throws NumericError on
// a constant band.
double pcc(std::span<const double> a, std::span<const double> b);

// Mean over bands of (1 - pcc).
double inverse_pcc_cost(const MultibandImage& reference, const MultibandImage& test);

struct SamResult {
  double mean_degrees = 0.0;
  // Per-pixel angle in degrees; excluded pixels hold 0.
  std::vector<double> per_pixel;
  std::size_t excluded = 0;
};

// Pixels with a zero spectral vector in either image are excluded.
SamResult sam(const MultibandImage& a, const MultibandImage& b);
double sam_mean(const MultibandImage& a, const MultibandImage& b);

// 100 * factor * sqrt(mean_b(RMSE_b^2 / Mean_b^2)), Mean_b from the reference.
// factor defaults to 1 / ratio.
double ergas(const MultibandImage& reference, const MultibandImage& test, int ratio,
             std::optional<double> factor = std::nullopt);

inline bool ergas_is_good(double value) { return value < kErgasGoodThreshold; }

// Moments of one block pair, population divisors.
struct BlockMoments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
};

BlockMoments block_moments(std::span<const double> x, std::span<const double> y);

// Correlation * luminance * contrast.
double q_three_factor(const BlockMoments& m);
// 4 cov * mean_x * mean_y / ((var_x + var_y) * (mean_x^2 + mean_y^2)).
double q_combined(const BlockMoments& m);

// Block-averaged universal image quality index. A block whose denominator is
// zero scores 1 when the two blocks are identical and 0 otherwise.
double q_index(const BandView& a, const BandView& b, const BlockSpec& blocks = {});

// Quaternion extension of Q for 4-band images, block-averaged.
double q4(const MultibandImage& a, const MultibandImage& b, const BlockSpec& blocks = {});

struct QnrParams {
  double alpha = 1.0;
  double beta = 1.0;
  double p = 1.0;
  double q = 1.0;
  // Block size at the low-resolution scale; high-resolution blocks span the
  // same ground area (block_size * ratio pixels).
  BlockSpec blocks{};
};

struct QnrResult {
  double qnr = 0.0;
  double d_lambda = 0.0;
  double d_s = 0.0;
};

QnrResult qnr(const MultibandImage& ms_low, const MultibandImage& fused_high,
              const MultibandImage& pan_high, const MultibandImage& pan_low,
              const QnrParams& params = {});

}  // namespace panqa
