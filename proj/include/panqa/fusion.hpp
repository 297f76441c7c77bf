#pragma once

#include <string>

#include "panqa/raster.hpp"
#include "panqa/resample.hpp"

namespace panqa {

enum class FusionMethod { pca, cn, atwt };

std::string to_string(FusionMethod m);
FusionMethod fusion_method_from_string(const std::string& s);

struct FusionConfig {
  FusionMethod method = FusionMethod::pca;
  Resampler resampler = Resampler::bilinear;
  int wavelet_levels = 2;
  // Count of user-set parameters; feeds the free-parameter process cost.
  int declared_free_parameters = 1;
  // Clip the fused product to the reflectance range [0, 1] (pansharpen only).
  bool clip_to_unit = false;

  // Checks the parameter invariants for a given PAN/MS scale ratio.
  void validate(int ratio) const;
};

// Default free-parameter count for a method: the resampler, plus the level
// count for the a-trous fuser.
int default_free_parameters(FusionMethod m);

// Principal-component substitution. PC1 is replaced by PAN mean/std matched
// to PC1; eigenvectors are signed so their components sum to >= 0.
MultibandImage pansharpen_pca(const MultibandImage& ms, const MultibandImage& pan,
                              const FusionConfig& cfg);

// Color-normalized (Brovey-style) sharpening.
MultibandImage pansharpen_cn(const MultibandImage& ms, const MultibandImage& pan,
                             const FusionConfig& cfg);

// Additive a-trous wavelet detail injection (B3-spline scaling kernel).
MultibandImage pansharpen_atwt(const MultibandImage& ms, const MultibandImage& pan,
                               const FusionConfig& cfg);

MultibandImage pansharpen(const MultibandImage& ms, const MultibandImage& pan,
                          const FusionConfig& cfg);

// Principal axes of the band covariance (population), largest variance first.
// vectors[k] is the k-th eigenvector, signed so its components sum to >= 0.
struct PcaBasis {
  std::vector<double> mean;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> vectors;

  // Projection of every pixel onto component k (mean removed).
  std::vector<double> project(const MultibandImage& img, std::size_t k) const;
};

PcaBasis pca_basis(const MultibandImage& img);

// Affine mean/std matching of `source` onto the moments of `target`.
std::vector<double> match_mean_std(std::span<const double> source, double target_mean,
                                   double target_std);

}  // namespace panqa
