#include "panqa/metrics_spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "panqa/error.hpp"
#include "panqa/glcm3.hpp"

namespace panqa {

void BlockSpec::validate() const {
  if (block_size < 2) throw InputError("block size must be >= 2");
}

SummaryStats summary_stats(const BandView& band, std::size_t gl) {
  if (band.size() == 0) throw InputError("summary_stats: empty band");
  if (gl < 2) throw InputError("summary_stats: gl must be >= 2");
  const auto n = static_cast<double>(band.size());
  SummaryStats s;
  const auto [lo, hi] = std::minmax_element(band.samples.begin(), band.samples.end());
  if (*lo == *hi) {
    // Exactly constant: the floating-point mean would leave tiny residuals.
    s.mean = *lo;
    return s;
  }
  s.mean = std::accumulate(band.samples.begin(), band.samples.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : band.samples) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.std = std::sqrt(m2);
  if (m2 > 0.0) {
    s.skewness = m3 / (m2 * s.std);
    s.kurtosis = m4 / (m2 * m2);
  }

  const LabelPlane levels = quantize_gray_levels(band, gl);
  std::vector<std::size_t> hist(gl, 0);
  for (std::uint32_t l : levels.labels) ++hist[l];
  double h = 0.0;
  for (std::size_t c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  s.entropy_bits = std::max(h, 0.0);
  return s;
}

std::vector<SummaryStats> summary_stats(const MultibandImage& img, std::size_t gl) {
  std::vector<SummaryStats> out;
  out.reserve(img.bands());
  for (std::size_t b = 0; b < img.bands(); ++b) out.push_back(summary_stats(img.band(b), gl));
  return out;
}

double mdb_cost(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("mdb_cost: length mismatch");
  if (a.empty()) throw InputError("mdb_cost: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

SummaryCosts summary_costs(const MultibandImage& reference, const MultibandImage& test,
                           std::size_t gl) {
  if (reference.bands() != test.bands()) throw InputError("summary_costs: band count mismatch");
  const auto ra = summary_stats(reference, gl);
  const auto tb = summary_stats(test, gl);
  auto column = [&](auto member) {
    std::vector<double> x, y;
    for (std::size_t b = 0; b < ra.size(); ++b) {
      x.push_back(ra[b].*member);
      y.push_back(tb[b].*member);
    }
    return mdb_cost(x, y);
  };
  return {column(&SummaryStats::mean), column(&SummaryStats::std),
          column(&SummaryStats::skewness), column(&SummaryStats::kurtosis),
          column(&SummaryStats::entropy_bits)};
}

double pcc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InputError("pcc: length mismatch");
  const BlockMoments m = block_moments(a, b);
  if (m.var_x <= 0.0 || m.var_y <= 0.0) throw NumericError("pcc: zero variance");
  return std::clamp(m.cov_xy / std::sqrt(m.var_x * m.var_y), -1.0, 1.0);
}

double inverse_pcc_cost(const MultibandImage& reference, const MultibandImage& test) {
  if (!reference.same_shape(test)) throw InputError("inverse_pcc_cost: shape mismatch");
  double acc = 0.0;
  for (std::size_t b = 0; b < reference.bands(); ++b) {
    acc += 1.0 - pcc(reference.band(b).samples, test.band(b).samples);
  }
  return acc / static_cast<double>(reference.bands());
}

SamResult sam(const MultibandImage& a, const MultibandImage& b) {
  if (!a.same_shape(b)) throw InputError("sam: shape mismatch");
  SamResult r;
  r.per_pixel.assign(a.pixels(), 0.0);
  double total = 0.0;
  std::size_t included = 0;
  for (std::size_t i = 0; i < a.pixels(); ++i) {
    double na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.bands(); ++k) {
      const double x = a.samples()[k * a.pixels() + i];
      const double y = b.samples()[k * a.pixels() + i];
      na += x * x;
      nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) {
      ++r.excluded;
      continue;
    }
    // Half-angle form on unit vectors; acos of the cosine loses ~1e-6 degrees near 0.
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    double diff = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < a.bands(); ++k) {
      const double x = a.samples()[k * a.pixels() + i] / na;
      const double y = b.samples()[k * a.pixels() + i] / nb;
      diff += (x - y) * (x - y);
      sum += (x + y) * (x + y);
    }
    const double deg = 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum)) * 180.0 / std::numbers::pi;
    r.per_pixel[i] = deg;
    total += deg;
    ++included;
  }
  if (included == 0) throw NumericError("sam: every pixel has a zero spectral vector");
  r.mean_degrees = total / static_cast<double>(included);
  return r;
}

double sam_mean(const MultibandImage& a, const MultibandImage& b) { return sam(a, b).mean_degrees; }

double ergas(const MultibandImage& reference, const MultibandImage& test, int ratio,
             std::optional<double> factor) {
  if (!reference.same_shape(test)) throw InputError("ergas: shape mismatch");
  if (ratio < 1) throw InputError("ergas: ratio must be >= 1");
  const double f = factor.value_or(1.0 / ratio);
  const auto n = static_cast<double>(reference.pixels());
  double acc = 0.0;
  for (std::size_t b = 0; b < reference.bands(); ++b) {
    const auto r = reference.band(b).samples;
    const auto t = test.band(b).samples;
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
    if (mean == 0.0) throw NumericError("ergas: zero reference band mean");
    double se = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) se += (r[i] - t[i]) * (r[i] - t[i]);
    acc += (se / n) / (mean * mean);
  }
  return 100.0 * f * std::sqrt(acc / static_cast<double>(reference.bands()));
}

BlockMoments block_moments(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  BlockMoments m;
  m.mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  m.mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.var_x += dx * dx;
    m.var_y += dy * dy;
    m.cov_xy += dx * dy;
  }
  m.var_x /= n;
  m.var_y /= n;
  m.cov_xy /= n;
  return m;
}

double q_three_factor(const BlockMoments& m) {
  const double sx = std::sqrt(m.var_x);
  const double sy = std::sqrt(m.var_y);
  const double correlation = m.cov_xy / (sx * sy);
  const double luminance = 2.0 * m.mean_x * m.mean_y / (m.mean_x * m.mean_x + m.mean_y * m.mean_y);
  const double contrast = 2.0 * sx * sy / (m.var_x + m.var_y);
  return correlation * luminance * contrast;
}

double q_combined(const BlockMoments& m) {
  return 4.0 * m.cov_xy * (m.mean_x * m.mean_y) /
         ((m.var_x + m.var_y) * (m.mean_x * m.mean_x + m.mean_y * m.mean_y));
}

namespace {

struct BlockGrid {
  std::size_t size;
  std::size_t nx;
  std::size_t ny;
};

BlockGrid block_grid(std::size_t width, std::size_t height, const BlockSpec& blocks) {
  blocks.validate();
  const std::size_t bl = blocks.block_size;
  if (width < bl || height < bl) {
    throw InputError("image " + std::to_string(width) + "x" + std::to_string(height) +
                     " is smaller than one " + std::to_string(bl) + "x" + std::to_string(bl) + " block");
  }
  return {bl, width / bl, height / bl};
}

// Copies block (bx, by) of a plane into `out`, row by row.
void gather_block(std::span<const double> plane, std::size_t width, const BlockGrid& g,
                  std::size_t bx, std::size_t by, std::vector<double>& out) {
  out.clear();
  for (std::size_t y = by * g.size; y < (by + 1) * g.size; ++y) {
    const auto row = plane.subspan(y * width + bx * g.size, g.size);
    out.insert(out.end(), row.begin(), row.end());
  }
}

}  // namespace

double q_index(const BandView& a, const BandView& b, const BlockSpec& blocks) {
  if (a.width != b.width || a.height != b.height) throw InputError("q_index: shape mismatch");
  const BlockGrid g = block_grid(a.width, a.height, blocks);
  std::vector<double> xa, xb;
  double total = 0.0;
  for (std::size_t by = 0; by < g.ny; ++by) {
    for (std::size_t bx = 0; bx < g.nx; ++bx) {
      gather_block(a.samples, a.width, g, bx, by, xa);
      gather_block(b.samples, b.width, g, bx, by, xb);
      const BlockMoments m = block_moments(xa, xb);
      const double denom = (m.var_x + m.var_y) * (m.mean_x * m.mean_x + m.mean_y * m.mean_y);
      if (denom == 0.0) {
        total += (xa == xb) ? 1.0 : 0.0;
      } else {
        total += q_combined(m);
      }
    }
  }
  return total / static_cast<double>(g.nx * g.ny);
}

namespace {

using Quaternion = std::array<double, 4>;

// p * conj(q)
Quaternion mul_conj(const Quaternion& p, const Quaternion& q) {
  const double a1 = p[0], b1 = p[1], c1 = p[2], d1 = p[3];
  const double a2 = q[0], b2 = -q[1], c2 = -q[2], d2 = -q[3];
  return {a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2, a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
          a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2, a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2};
}

double norm2(const Quaternion& q) { return q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]; }

}  // namespace

double q4(const MultibandImage& a, const MultibandImage& b, const BlockSpec& blocks) {
  if (a.bands() != 4 || b.bands() != 4) throw InputError("q4: both images need exactly 4 bands");
  if (!a.same_shape(b)) throw InputError("q4: shape mismatch");
  const BlockGrid g = block_grid(a.width(), a.height(), blocks);
  const std::size_t w = a.width();
  const std::size_t np = g.size * g.size;
  std::vector<Quaternion> za(np), zb(np);
  double total = 0.0;
  for (std::size_t by = 0; by < g.ny; ++by) {
    for (std::size_t bx = 0; bx < g.nx; ++bx) {
      std::size_t i = 0;
      for (std::size_t y = by * g.size; y < (by + 1) * g.size; ++y) {
        for (std::size_t x = bx * g.size; x < (bx + 1) * g.size; ++x, ++i) {
          for (std::size_t k = 0; k < 4; ++k) {
            za[i][k] = a.samples()[k * a.pixels() + y * w + x];
            zb[i][k] = b.samples()[k * b.pixels() + y * w + x];
          }
        }
      }
      Quaternion ma{}, mb{};
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t k = 0; k < 4; ++k) {
          ma[k] += za[p][k];
          mb[k] += zb[p][k];
        }
      }
      for (std::size_t k = 0; k < 4; ++k) {
        ma[k] /= static_cast<double>(np);
        mb[k] /= static_cast<double>(np);
      }
      Quaternion cov{};
      double va = 0.0, vb = 0.0;
      for (std::size_t p = 0; p < np; ++p) {
        Quaternion da, db;
        for (std::size_t k = 0; k < 4; ++k) {
          da[k] = za[p][k] - ma[k];
          db[k] = zb[p][k] - mb[k];
        }
        const Quaternion c = mul_conj(da, db);
        for (std::size_t k = 0; k < 4; ++k) cov[k] += c[k];
        va += norm2(da);
        vb += norm2(db);
      }
      for (double& c : cov) c /= static_cast<double>(np);
      va /= static_cast<double>(np);
      vb /= static_cast<double>(np);

      const double mean_a2 = norm2(ma);
      const double mean_b2 = norm2(mb);
      const double denom = (va + vb) * (mean_a2 + mean_b2);
      if (denom == 0.0) {
        total += (za == zb) ? 1.0 : 0.0;
      } else {
        total += 4.0 * std::sqrt(norm2(cov)) * std::sqrt(mean_a2) * std::sqrt(mean_b2) / denom;
      }
    }
  }
  return total / static_cast<double>(g.nx * g.ny);
}

QnrResult qnr(const MultibandImage& ms_low, const MultibandImage& fused_high,
              const MultibandImage& pan_high, const MultibandImage& pan_low,
              const QnrParams& params) {
  if (pan_high.bands() != 1 || pan_low.bands() != 1) throw InputError("qnr: PAN images must be single-band");
  if (fused_high.bands() != ms_low.bands()) throw InputError("qnr: band count mismatch");
  if (fused_high.width() != pan_high.width() || fused_high.height() != pan_high.height()) {
    throw InputError("qnr: fused and PAN shapes differ");
  }
  if (ms_low.width() != pan_low.width() || ms_low.height() != pan_low.height()) {
    throw InputError("qnr: MS and degraded PAN shapes differ");
  }
  if (fused_high.width() % ms_low.width() != 0 || fused_high.height() % ms_low.height() != 0 ||
      fused_high.width() / ms_low.width() != fused_high.height() / ms_low.height()) {
    throw InputError("qnr: high/low shapes are not related by an integer ratio");
  }
  if (params.p <= 0.0 || params.q <= 0.0) throw InputError("qnr: p and q must be positive");
  if (ms_low.bands() < 2) throw InputError("qnr: at least two bands are required");

  const std::size_t ratio = fused_high.width() / ms_low.width();
  const BlockSpec low = params.blocks;
  const BlockSpec high{params.blocks.block_size * ratio};
  const std::size_t nb = ms_low.bands();

  double dl = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (i == j) continue;
      const double d = q_index(ms_low.band(i), ms_low.band(j), low) -
                       q_index(fused_high.band(i), fused_high.band(j), high);
      dl += std::pow(std::abs(d), params.p);
    }
  }
  dl = std::pow(dl / static_cast<double>(nb * (nb - 1)), 1.0 / params.p);

  double ds = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double d = q_index(fused_high.band(b), pan_high.band(0), high) -
                     q_index(ms_low.band(b), pan_low.band(0), low);
    ds += std::pow(std::abs(d), params.q);
  }
  ds = std::pow(ds / static_cast<double>(nb), 1.0 / params.q);

  QnrResult r;
  r.d_lambda = std::clamp(dl, 0.0, 1.0);
  r.d_s = std::clamp(ds, 0.0, 1.0);
  r.qnr = std::pow(1.0 - r.d_lambda, params.alpha) * std::pow(1.0 - r.d_s, params.beta);
  return r;
}

}  // namespace panqa
