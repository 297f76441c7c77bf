#include "panqa/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "panqa/error.hpp"

namespace panqa {

namespace {

// Uniform [0, 1) from the raw engine output, independent of the standard
// library's distribution implementations.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 engine_;
};

constexpr std::size_t kBands = 4;
constexpr std::array<double, kBands> kPanWeights{0.1, 0.25, 0.3, 0.35};

struct Region {
  double x, y;
  std::array<double, kBands> spectrum;
};

struct Patch {
  double x0, y0, x1, y1;
  double freq_x, freq_y, phase, amplitude;
};

}  // namespace

SyntheticScene synthesize_scene(std::uint64_t seed, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0 || width % 4 != 0 || height % 4 != 0) {
    throw InputError("synth: width and height must be positive multiples of 4");
  }
  Uniform rnd(seed);
  const auto w = static_cast<double>(width);
  const auto h = static_cast<double>(height);

  std::vector<Region> regions(12);
  for (auto& r : regions) {
    r.x = rnd(0.0, w);
    r.y = rnd(0.0, h);
    for (auto& s : r.spectrum) s = rnd(0.1, 0.65);
  }
  std::array<double, kBands> grad_x{}, grad_y{};
  for (std::size_t b = 0; b < kBands; ++b) {
    grad_x[b] = rnd(-0.08, 0.08);
    grad_y[b] = rnd(-0.08, 0.08);
  }
  std::vector<Patch> patches(6);
  for (auto& p : patches) {
    const double pw = rnd(0.1, 0.3) * w;
    const double ph = rnd(0.1, 0.3) * h;
    p.x0 = rnd(0.0, w - pw);
    p.y0 = rnd(0.0, h - ph);
    p.x1 = p.x0 + pw;
    p.y1 = p.y0 + ph;
    p.freq_x = rnd(0.15, 0.9);
    p.freq_y = rnd(0.15, 0.9);
    p.phase = rnd(0.0, 2.0 * std::numbers::pi);
    p.amplitude = rnd(0.03, 0.08);
  }

  MultibandImage ms(width, height, kBands);
  MultibandImage pan(width, height, 1);
  ms.set_band_names({"blue", "green", "red", "nir"});
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) + 0.5;
      const double fy = static_cast<double>(y) + 0.5;
      const Region* nearest = &regions.front();
      double best = std::numeric_limits<double>::max();
      for (const auto& r : regions) {
        const double d = (fx - r.x) * (fx - r.x) + (fy - r.y) * (fy - r.y);
        if (d < best) {
          best = d;
          nearest = &r;
        }
      }
      double texture = 0.0;
      for (const auto& p : patches) {
        if (fx >= p.x0 && fx < p.x1 && fy >= p.y0 && fy < p.y1) {
          texture += p.amplitude * std::sin(p.freq_x * fx + p.phase) * std::cos(p.freq_y * fy);
        }
      }
      const double grain = rnd(-0.01, 0.01);
      double pan_value = 0.0;
      for (std::size_t b = 0; b < kBands; ++b) {
        double v = nearest->spectrum[b] + grad_x[b] * (fx / w - 0.5) + grad_y[b] * (fy / h - 0.5) +
                   texture * (1.0 + 0.2 * static_cast<double>(b)) + grain;
        v = std::clamp(v, 0.02, 0.95);
        ms.at(x, y, b) = v;
        pan_value += kPanWeights[b] * v;
      }
      pan.at(x, y, 0) = std::clamp(pan_value + rnd(-0.015, 0.015), 0.0, 1.0);
    }
  }
  return {std::move(ms), std::move(pan)};
}

}  // namespace panqa
