#include "panqa/glcm3.hpp"

#include <algorithm>
#include <cmath>

#include "panqa/error.hpp"
#include "panqa/parallel.hpp"

namespace panqa {

LabelPlane quantize_gray_levels(const BandView& band, std::size_t gl) {
  if (gl < 2) throw InputError("quantize_gray_levels: gl must be >= 2");
  LabelPlane out{band.width, band.height, std::vector<std::uint32_t>(band.size(), 0)};
  if (band.size() == 0) return out;
  const auto [lo_it, hi_it] = std::minmax_element(band.samples.begin(), band.samples.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (range == 0.0) return out;
  const auto top = static_cast<double>(gl - 1);
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double level = std::floor(static_cast<double>(gl) * (band.samples[i] - lo) / range);
    out.labels[i] = static_cast<std::uint32_t>(std::clamp(level, 0.0, top));
  }
  return out;
}

void RingSpec::validate() const {
  if (radii.empty()) throw InputError("rings: at least one radius is required");
  if (radii.front() < 1) throw InputError("rings: radii must be >= 1");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] <= radii[i - 1]) throw InputError("rings: radii must be strictly increasing");
  }
}

std::size_t RingSpec::pairs_per_center() const {
  std::size_t n = 0;
  for (int r : radii) n += 4 * static_cast<std::size_t>(r);
  return n;
}

Glcm3::Glcm3(std::size_t gl) : gl_(gl), counts_(gl * gl * gl, 0) {
  if (gl < 2) throw InputError("glcm3: gl must be >= 2");
}

void Glcm3::add(std::size_t depth, std::size_t level_a, std::size_t level_b, std::uint64_t n) {
  const auto [row, col] = std::minmax(level_a, level_b);
  counts_[index(depth, row, col)] += n;
  total_ += n;
}

void Glcm3::merge(const Glcm3& other) {
  if (other.gl_ != gl_) throw InputError("glcm3: cannot merge matrices with different gl");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::vector<Glcm3::Cell> Glcm3::cells() const {
  std::vector<Cell> out;
  for (std::size_t d = 0; d < gl_; ++d) {
    for (std::size_t r = 0; r < gl_; ++r) {
      for (std::size_t c = r; c < gl_; ++c) {
        const std::uint64_t n = counts_[index(d, r, c)];
        if (n != 0) {
          out.push_back({static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(r),
                         static_cast<std::uint32_t>(c), n});
        }
      }
    }
  }
  return out;
}

Glcm3 tims_glcm(const LabelPlane& labels, std::size_t gl, const RingSpec& rings) {
  rings.validate();
  const auto rmax = static_cast<std::size_t>(rings.max_radius());
  const std::size_t w = labels.width;
  const std::size_t h = labels.height;
  if (w < 2 * rmax + 1 || h < 2 * rmax + 1) {
    throw InputError("tims_glcm: image " + std::to_string(w) + "x" + std::to_string(h) +
                     " has no center at distance " + std::to_string(rmax) + " from the border");
  }
  for (std::uint32_t l : labels.labels) {
    if (l >= gl) throw InputError("tims_glcm: label exceeds gray-level count");
  }

  // Half of each ring: the top row (dy = +r, all dx) and the right column
  // without its corners. Every other ring position is a point reflection of one of these.
  std::vector<std::ptrdiff_t> half;
  const auto sw = static_cast<std::ptrdiff_t>(w);
  for (int r : rings.radii) {
    for (int dx = -r; dx <= r; ++dx) half.push_back(static_cast<std::ptrdiff_t>(r) * sw + dx);
    for (int dy = -r + 1; dy <= r - 1; ++dy) half.push_back(static_cast<std::ptrdiff_t>(dy) * sw + r);
  }

  const std::size_t rows = h - 2 * rmax;
  const std::size_t stripes = std::min<std::size_t>(rows, std::max<std::size_t>(1, thread_count() * 4));
  std::vector<Glcm3> partial(stripes, Glcm3(gl));
  parallel_for(stripes, [&](std::size_t s) {
    Glcm3& m = partial[s];
    const std::size_t y0 = rmax + rows * s / stripes;
    const std::size_t y1 = rmax + rows * (s + 1) / stripes;
    const std::uint32_t* data = labels.labels.data();
    for (std::size_t y = y0; y < y1; ++y) {
      for (std::size_t x = rmax; x < w - rmax; ++x) {
        const std::uint32_t* c = data + y * w + x;
        for (std::ptrdiff_t off : half) m.add(*c, c[off], c[-off]);
      }
    }
  });

  Glcm3 out(gl);
  for (const Glcm3& m : partial) out.merge(m);
  return out;
}

Glcm3Features glcm3_features(const Glcm3& m) {
  if (m.total_tuples() == 0) throw NumericError("glcm3_features: empty matrix");
  Glcm3Features f;
  const auto total = static_cast<double>(m.total_tuples());
  for (const auto& cell : m.cells()) {
    const double p = static_cast<double>(cell.count) / total;
    const auto i = static_cast<double>(cell.depth);
    const auto j = static_cast<double>(cell.row);
    const auto k = static_cast<double>(cell.col);
    f.contrast += ((i - j) * (i - j) + (j - k) * (j - k) + (i - k) * (i - k)) * p;
    f.energy += p * p;
    f.lne += (i * i + j * j + k * k) * p;
  }
  return f;
}

Glcm3Features glcm3_cost(const BandView& a, const BandView& b, std::size_t gl, const RingSpec& rings) {
  if (a.width != b.width || a.height != b.height) throw InputError("glcm3_cost: shape mismatch");
  const Glcm3Features fa = glcm3_features(tims_glcm(quantize_gray_levels(a, gl), gl, rings));
  const Glcm3Features fb = glcm3_features(tims_glcm(quantize_gray_levels(b, gl), gl, rings));
  return {std::abs(fa.contrast - fb.contrast), std::abs(fa.energy - fb.energy),
          std::abs(fa.lne - fb.lne)};
}

Glcm3Features glcm3_image_cost(const MultibandImage& a, const MultibandImage& b, std::size_t gl,
                               const RingSpec& rings) {
  if (!a.same_shape(b)) throw InputError("glcm3_image_cost: shape mismatch");
  Glcm3Features sum;
  for (std::size_t band = 0; band < a.bands(); ++band) {
    const Glcm3Features d = glcm3_cost(a.band(band), b.band(band), gl, rings);
    sum.contrast += d.contrast;
    sum.energy += d.energy;
    sum.lne += d.lne;
  }
  const auto n = static_cast<double>(a.bands());
  return {sum.contrast / n, sum.energy / n, sum.lne / n};
}

namespace {

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t m = i % sn;
  if (m < 0) m += sn;
  return static_cast<std::size_t>(m);
}

}  // namespace

AutocorrStats autocorr_stats(const BandView& band, const std::vector<Offset2>& order2,
                             const std::vector<Offset3>& order3) {
  if (band.size() == 0) throw InputError("autocorr_stats: empty band");
  const auto limit = static_cast<int>(std::min(band.width, band.height));
  auto check = [&](int d) {
    if (std::abs(d) > limit) throw InputError("autocorr_stats: offset outside +-min(W, H)");
  };
  for (const auto& o : order2) {
    check(o.dx);
    check(o.dy);
  }
  for (const auto& o : order3) {
    check(o.dx1);
    check(o.dy1);
    check(o.dx2);
    check(o.dy2);
  }

  const std::size_t w = band.width;
  const std::size_t h = band.height;
  const auto n = static_cast<double>(band.size());
  AutocorrStats s;
  for (double v : band.samples) s.a1 += v;
  s.a1 /= n;

  for (const auto& o : order2) {
    double acc = 0.0;
    for (std::size_t y = 0; y < h; ++y) {
      const std::size_t y2 = wrap(static_cast<std::ptrdiff_t>(y) + o.dy, h);
      for (std::size_t x = 0; x < w; ++x) {
        acc += band(x, y) * band(wrap(static_cast<std::ptrdiff_t>(x) + o.dx, w), y2);
      }
    }
    s.a2.push_back(acc / n);
  }
  for (const auto& o : order3) {
    double acc = 0.0;
    for (std::size_t y = 0; y < h; ++y) {
      const std::size_t ya = wrap(static_cast<std::ptrdiff_t>(y) + o.dy1, h);
      const std::size_t yb = wrap(static_cast<std::ptrdiff_t>(y) + o.dy2, h);
      for (std::size_t x = 0; x < w; ++x) {
        acc += band(x, y) * band(wrap(static_cast<std::ptrdiff_t>(x) + o.dx1, w), ya) *
               band(wrap(static_cast<std::ptrdiff_t>(x) + o.dx2, w), yb);
      }
    }
    s.a3.push_back(acc / n);
  }
  return s;
}

}  // namespace panqa
