#include "panqa/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "panqa/error.hpp"
#include "panqa/parallel.hpp"

namespace panqa {

std::ptrdiff_t mirror_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * n;
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<double> MtfKernel::taps2d() const {
  std::vector<double> out(taps.size() * taps.size());
  for (std::size_t y = 0; y < taps.size(); ++y) {
    for (std::size_t x = 0; x < taps.size(); ++x) out[y * taps.size() + x] = taps[y] * taps[x];
  }
  return out;
}

double MtfKernel::transfer(double frequency) const {
  const double center = (static_cast<double>(taps.size()) - 1.0) / 2.0;
  double re = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    re += taps[k] * std::cos(2.0 * std::numbers::pi * frequency * (static_cast<double>(k) - center));
  }
  return re;
}

MtfKernel mtf_gaussian_kernel(int ratio, double mtf_gain) {
  if (ratio < 2) throw InputError("mtf kernel: ratio must be >= 2");
  if (!(mtf_gain > 0.0 && mtf_gain < 1.0)) throw InputError("mtf kernel: mtf_gain must lie in (0, 1)");
  const double nyquist = 1.0 / (2.0 * ratio);
  const double sigma =
      std::sqrt(-std::log(mtf_gain) / (2.0 * std::numbers::pi * std::numbers::pi * nyquist * nyquist));
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));

  MtfKernel k;
  k.ratio = ratio;
  k.mtf_gain = mtf_gain;
  k.sigma = sigma;
  k.taps.resize(static_cast<std::size_t>(2 * half + 1));
  for (std::ptrdiff_t i = -half; i <= half; ++i) {
    const double d = static_cast<double>(i);
    k.taps[static_cast<std::size_t>(i + half)] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  const double sum = std::accumulate(k.taps.begin(), k.taps.end(), 0.0);
  for (double& t : k.taps) t /= sum;
  return k;
}

MtfKernel box_kernel(int ratio) {
  if (ratio < 1) throw InputError("box kernel: ratio must be >= 1");
  MtfKernel k;
  k.ratio = ratio;
  k.taps.assign(static_cast<std::size_t>(ratio), 1.0 / ratio);
  return k;
}

MtfKernel identity_kernel() {
  MtfKernel k;
  k.taps = {1.0};
  return k;
}

MultibandImage filter_separable(const MultibandImage& img, const std::vector<double>& taps,
                                std::size_t anchor, std::size_t dilation) {
  if (taps.empty()) throw InputError("filter: empty kernel");
  const auto w = static_cast<std::ptrdiff_t>(img.width());
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  const auto a = static_cast<std::ptrdiff_t>(anchor);
  const auto step = static_cast<std::ptrdiff_t>(dilation);
  MultibandImage out(img.width(), img.height(), img.bands());
  out.set_band_names(img.band_names());

  parallel_for(img.bands(), [&](std::size_t b) {
    const auto src = img.band(b).samples;
    std::vector<double> rows(src.size());
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) {
          const auto xx = mirror_index(x + (static_cast<std::ptrdiff_t>(k) - a) * step, w);
          acc += taps[k] * src[static_cast<std::size_t>(y * w + xx)];
        }
        rows[static_cast<std::size_t>(y * w + x)] = acc;
      }
    }
    auto dst = out.band_samples(b);
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) {
          const auto yy = mirror_index(y + (static_cast<std::ptrdiff_t>(k) - a) * step, h);
          acc += taps[k] * rows[static_cast<std::size_t>(yy * w + x)];
        }
        dst[static_cast<std::size_t>(y * w + x)] = acc;
      }
    }
  });
  return out;
}

MultibandImage degrade(const MultibandImage& img, int ratio, const MtfKernel& kernel) {
  if (ratio < 1) throw InputError("degrade: ratio must be >= 1");
  const auto r = static_cast<std::size_t>(ratio);
  if (img.width() % r != 0 || img.height() % r != 0) {
    throw InputError("degrade: image dimensions " + std::to_string(img.width()) + "x" +
                     std::to_string(img.height()) + " are not divisible by ratio " +
                     std::to_string(ratio));
  }
  const MultibandImage filtered = filter_separable(img, kernel.taps, kernel.anchor());
  const std::size_t phase = (r - 1) / 2;
  const std::size_t ow = img.width() / r;
  const std::size_t oh = img.height() / r;
  MultibandImage out(ow, oh, img.bands());
  out.set_band_names(img.band_names());
  for (std::size_t b = 0; b < img.bands(); ++b) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) out.at(x, y, b) = filtered.at(x * r + phase, y * r + phase, b);
    }
  }
  return out;
}

std::string to_string(Resampler r) {
  switch (r) {
    case Resampler::nearest:
      return "nearest";
    case Resampler::bilinear:
      return "bilinear";
    case Resampler::bicubic:
      return "bicubic";
  }
  return "?";
}

Resampler resampler_from_string(const std::string& s) {
  if (s == "nearest") return Resampler::nearest;
  if (s == "bilinear") return Resampler::bilinear;
  if (s == "bicubic") return Resampler::bicubic;
  throw InputError("unknown resampling method '" + s + "'");
}

namespace {

// Keys cubic convolution, a = -0.5.
double cubic_weight(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

struct Tap {
  std::ptrdiff_t index;
  double weight;
};

// Interpolation taps for every output coordinate along one axis.
std::vector<std::vector<Tap>> axis_taps(std::size_t n_in, int ratio, Resampler method) {
  const std::size_t n_out = n_in * static_cast<std::size_t>(ratio);
  const auto n = static_cast<std::ptrdiff_t>(n_in);
  std::vector<std::vector<Tap>> taps(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    if (method == Resampler::nearest) {
      taps[o] = {{static_cast<std::ptrdiff_t>(o / static_cast<std::size_t>(ratio)), 1.0}};
      continue;
    }
    const double src = (static_cast<double>(o) + 0.5) / ratio - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    const auto i0 = static_cast<std::ptrdiff_t>(base);
    if (method == Resampler::bilinear) {
      taps[o] = {{mirror_index(i0, n), 1.0 - t}, {mirror_index(i0 + 1, n), t}};
    } else {
      for (std::ptrdiff_t k = -1; k <= 2; ++k) {
        taps[o].push_back({mirror_index(i0 + k, n), cubic_weight(t - static_cast<double>(k))});
      }
    }
  }
  return taps;
}

}  // namespace

MultibandImage upsample(const MultibandImage& img, int ratio, Resampler method) {
  if (ratio < 1) throw InputError("upsample: ratio must be >= 1");
  if (ratio == 1) return img;
  const auto xt = axis_taps(img.width(), ratio, method);
  const auto yt = axis_taps(img.height(), ratio, method);
  const std::size_t ow = xt.size();
  const std::size_t oh = yt.size();
  const std::size_t iw = img.width();
  MultibandImage out(ow, oh, img.bands());
  out.set_band_names(img.band_names());

  parallel_for(img.bands(), [&](std::size_t b) {
    const auto src = img.band(b).samples;
    std::vector<double> rows(ow * img.height());
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (const Tap& t : xt[x]) acc += t.weight * src[y * iw + static_cast<std::size_t>(t.index)];
        rows[y * ow + x] = acc;
      }
    }
    auto dst = out.band_samples(b);
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (const Tap& t : yt[y]) acc += t.weight * rows[static_cast<std::size_t>(t.index) * ow + x];
        dst[y * ow + x] = acc;
      }
    }
  });
  return out;
}

}  // namespace panqa
