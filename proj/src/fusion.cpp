#include "panqa/fusion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "panqa/error.hpp"

namespace panqa {

namespace {

constexpr double kIntensityFloor = 1e-12;

int check_shapes(const MultibandImage& ms, const MultibandImage& pan, std::size_t min_bands) {
  if (pan.bands() != 1) throw InputError("fusion: PAN must have exactly one band");
  if (ms.bands() < min_bands) {
    throw InputError("fusion: MS needs at least " + std::to_string(min_bands) + " bands");
  }
  if (pan.width() % ms.width() != 0 || pan.height() % ms.height() != 0 ||
      pan.width() / ms.width() != pan.height() / ms.height()) {
    throw InputError("fusion: PAN dimensions must be an integer multiple of MS dimensions");
  }
  return static_cast<int>(pan.width() / ms.width());
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

std::string to_string(FusionMethod m) {
  switch (m) {
    case FusionMethod::pca:
      return "pca";
    case FusionMethod::cn:
      return "cn";
    case FusionMethod::atwt:
      return "atwt";
  }
  return "?";
}

FusionMethod fusion_method_from_string(const std::string& s) {
  if (s == "pca") return FusionMethod::pca;
  if (s == "cn") return FusionMethod::cn;
  if (s == "atwt") return FusionMethod::atwt;
  throw InputError("unknown fusion method '" + s + "'");
}

int default_free_parameters(FusionMethod m) { return m == FusionMethod::atwt ? 2 : 1; }

void FusionConfig::validate(int ratio) const {
  if (declared_free_parameters < 1) throw InputError("fusion: declared_free_parameters must be >= 1");
  if (method == FusionMethod::atwt) {
    if (wavelet_levels < 1) throw InputError("fusion: wavelet_levels must be >= 1");
    if (static_cast<double>(wavelet_levels) > std::log2(static_cast<double>(ratio)) + 2.0) {
      throw InputError("fusion: wavelet_levels must not exceed log2(ratio) + 2");
    }
  }
}

std::vector<double> match_mean_std(std::span<const double> source, double target_mean,
                                   double target_std) {
  const double m = mean_of(source);
  const double s = std_of(source, m);
  std::vector<double> out(source.size());
  if (s == 0.0) {
    std::fill(out.begin(), out.end(), target_mean);
    return out;
  }
  const double scale = target_std / s;
  for (std::size_t i = 0; i < source.size(); ++i) out[i] = (source[i] - m) * scale + target_mean;
  return out;
}

std::vector<double> PcaBasis::project(const MultibandImage& img, std::size_t k) const {
  std::vector<double> pc(img.pixels(), 0.0);
  for (std::size_t b = 0; b < img.bands(); ++b) {
    const auto band = img.band(b).samples;
    const double w = vectors[k][b];
    for (std::size_t i = 0; i < pc.size(); ++i) pc[i] += w * (band[i] - mean[b]);
  }
  return pc;
}

PcaBasis pca_basis(const MultibandImage& img) {
  const std::size_t nb = img.bands();
  const auto n = static_cast<double>(img.pixels());
  PcaBasis basis;
  basis.mean.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) basis.mean[b] = mean_of(img.band(b).samples);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
  for (std::size_t i = 0; i < nb; ++i) {
    const auto bi = img.band(i).samples;
    for (std::size_t j = i; j < nb; ++j) {
      const auto bj = img.band(j).samples;
      double acc = 0.0;
      for (std::size_t p = 0; p < bi.size(); ++p) acc += (bi[p] - basis.mean[i]) * (bj[p] - basis.mean[j]);
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc / n;
      cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = acc / n;
    }
  }
  if (cov.trace() <= 0.0) throw NumericError("rank-deficient: band covariance is zero (all bands constant)");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("rank-deficient: eigen decomposition failed");
  const auto& values = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  for (Eigen::Index k = static_cast<Eigen::Index>(nb) - 1; k >= 0; --k) {
    std::vector<double> v(nb);
    double sum = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      v[b] = vecs(static_cast<Eigen::Index>(b), k);
      sum += v[b];
    }
    if (sum < 0.0) {
      for (double& x : v) x = -x;
    }
    basis.eigenvalues.push_back(values(k));
    basis.vectors.push_back(std::move(v));
  }
  return basis;
}

MultibandImage pansharpen_pca(const MultibandImage& ms, const MultibandImage& pan,
                              const FusionConfig& cfg) {
  const int ratio = check_shapes(ms, pan, 2);
  cfg.validate(ratio);
  const MultibandImage up = upsample(ms, ratio, cfg.resampler);
  const PcaBasis basis = pca_basis(up);
  const std::size_t nb = up.bands();

  const std::vector<double> pc1 = basis.project(up, 0);
  const double pc1_mean = mean_of(pc1);
  const std::vector<double> pan_matched =
      match_mean_std(pan.band(0).samples, pc1_mean, std_of(pc1, pc1_mean));

  // Back-projection with PC1 swapped: x' = x + v1 * (pan' - pc1).
  MultibandImage out = up;
  for (std::size_t b = 0; b < nb; ++b) {
    auto dst = out.band_samples(b);
    const double w = basis.vectors[0][b];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * (pan_matched[i] - pc1[i]);
  }
  return out;
}

MultibandImage pansharpen_cn(const MultibandImage& ms, const MultibandImage& pan,
                             const FusionConfig& cfg) {
  const int ratio = check_shapes(ms, pan, 1);
  cfg.validate(ratio);
  const MultibandImage up = upsample(ms, ratio, cfg.resampler);
  const std::size_t nb = up.bands();
  std::vector<double> intensity(up.pixels(), 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto band = up.band(b).samples;
    for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] += band[i];
  }
  for (double& v : intensity) v /= static_cast<double>(nb);
  const double imean = mean_of(intensity);
  const std::vector<double> pan_matched =
      match_mean_std(pan.band(0).samples, imean, std_of(intensity, imean));

  MultibandImage out = up;
  for (std::size_t b = 0; b < nb; ++b) {
    auto dst = out.band_samples(b);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] *= pan_matched[i] / std::max(intensity[i], kIntensityFloor);
    }
  }
  return out;
}

MultibandImage pansharpen_atwt(const MultibandImage& ms, const MultibandImage& pan,
                               const FusionConfig& cfg) {
  const int ratio = check_shapes(ms, pan, 1);
  cfg.validate(ratio);
  const MultibandImage up = upsample(ms, ratio, cfg.resampler);

  static const std::vector<double> kB3 = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  MultibandImage approx = pan;
  std::vector<double> detail(pan.pixels(), 0.0);
  std::size_t dilation = 1;
  for (int level = 0; level < cfg.wavelet_levels; ++level) {
    MultibandImage next = filter_separable(approx, kB3, 2, dilation);
    const auto prev = approx.band(0).samples;
    const auto cur = next.band(0).samples;
    for (std::size_t i = 0; i < detail.size(); ++i) detail[i] += prev[i] - cur[i];
    approx = std::move(next);
    dilation *= 2;
  }

  MultibandImage out = up;
  for (std::size_t b = 0; b < out.bands(); ++b) {
    auto dst = out.band_samples(b);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += detail[i];
  }
  return out;
}

MultibandImage pansharpen(const MultibandImage& ms, const MultibandImage& pan,
                          const FusionConfig& cfg) {
  MultibandImage out;
  switch (cfg.method) {
    case FusionMethod::pca:
      out = pansharpen_pca(ms, pan, cfg);
      break;
    case FusionMethod::cn:
      out = pansharpen_cn(ms, pan, cfg);
      break;
    case FusionMethod::atwt:
      out = pansharpen_atwt(ms, pan, cfg);
      break;
    default:
      throw InputError("unknown fusion method");
  }
  if (cfg.clip_to_unit) {
    for (double& v : out.samples()) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

}  // namespace panqa
