#include "panqa/quantizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "panqa/error.hpp"

namespace panqa {

namespace {

constexpr std::array<const char*, 3> kLevelNames{"fine", "intermediate", "coarse"};

void check_same_dims(const LabelMapStack& a, const LabelMapStack& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InputError(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

std::string to_string(QuantizationLevel l) { return kLevelNames[static_cast<std::size_t>(l)]; }

QuantizationLevel quantization_level_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i) {
    if (s == kLevelNames[i]) return static_cast<QuantizationLevel>(i);
  }
  throw InputError("unknown quantization level '" + s + "'");
}

LabelMapStack::LabelMapStack(std::array<LabelPlane, 3> planes, std::array<std::size_t, 3> level_counts,
                             std::array<std::vector<std::uint32_t>, 2> merge_tables)
    : planes_(std::move(planes)), level_counts_(level_counts), merge_tables_(std::move(merge_tables)) {
  for (const auto& p : planes_) {
    if (p.width != planes_[0].width || p.height != planes_[0].height ||
        p.labels.size() != p.width * p.height) {
      throw InputError("label stack: planes must share dimensions");
    }
  }
  if (!(level_counts_[0] > level_counts_[1] && level_counts_[1] > level_counts_[2])) {
    throw InputError("label stack: level counts must strictly decrease from fine to coarse");
  }
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::uint32_t v : planes_[l].labels) {
      if (v >= level_counts_[l]) {
        throw InputError("label stack: " + std::string(kLevelNames[l]) + " label out of range");
      }
    }
  }
  for (std::size_t t = 0; t < 2; ++t) {
    if (merge_tables_[t].size() != level_counts_[t]) {
      throw InputError("label stack: merge table size must equal the finer level count");
    }
    for (std::uint32_t v : merge_tables_[t]) {
      if (v >= level_counts_[t + 1]) throw InputError("label stack: merge table target out of range");
    }
    const auto& finer = planes_[t].labels;
    const auto& coarser = planes_[t + 1].labels;
    for (std::size_t i = 0; i < finer.size(); ++i) {
      if (merge_tables_[t][finer[i]] != coarser[i]) {
        throw InputError("label stack: planes are inconsistent with the merge tables");
      }
    }
  }
}

LabelMapStack LabelMapStack::from_planes(std::array<LabelPlane, 3> planes,
                                         std::array<std::size_t, 3> level_counts) {
  std::array<std::vector<std::uint32_t>, 2> tables;
  for (std::size_t t = 0; t < 2; ++t) {
    if (planes[t].labels.size() != planes[t + 1].labels.size()) {
      throw InputError("label stack: planes must share dimensions");
    }
    std::map<std::uint32_t, std::uint32_t> seen;
    for (std::size_t i = 0; i < planes[t].labels.size(); ++i) {
      const auto [it, inserted] = seen.emplace(planes[t].labels[i], planes[t + 1].labels[i]);
      if (!inserted && it->second != planes[t + 1].labels[i]) {
        throw InputError("label stack: " + std::string(kLevelNames[t]) + " -> " +
                         kLevelNames[t + 1] + " mapping is not a function");
      }
    }
    // Unobserved labels map to 0; they never occur in these planes.
    tables[t].assign(level_counts[t], 0);
    for (const auto& [from, to] : seen) {
      if (from >= level_counts[t]) throw InputError("label stack: label out of range");
      tables[t][from] = to;
    }
  }
  return LabelMapStack(std::move(planes), level_counts, std::move(tables));
}

LabelMapStack ThresholdQuantizer::quantize(const MultibandImage& img) const {
  const std::size_t nb = img.bands();
  if (nb < kMinBands) throw InputError("quantize_spectral: at least 3 bands are required");
  if (nb > kMaxBands) throw InputError("quantize_spectral: at most 8 bands are supported");

  const std::size_t n_fine = std::size_t{1} << (2 * nb);
  const std::size_t n_inter = std::size_t{1} << nb;
  const std::size_t n_coarse = nb + 1;

  std::array<std::vector<std::uint32_t>, 2> tables;
  tables[0].resize(n_fine);
  for (std::size_t code = 0; code < n_fine; ++code) {
    std::uint32_t inter = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t bin = (code >> (2 * b)) & 3u;
      if (bin >= 2) inter |= 1u << b;
    }
    tables[0][code] = inter;
  }
  tables[1].resize(n_inter);
  for (std::size_t code = 0; code < n_inter; ++code) {
    tables[1][code] = static_cast<std::uint32_t>(std::popcount(code));
  }

  const std::size_t np = img.pixels();
  std::array<LabelPlane, 3> planes;
  for (auto& p : planes) p = {img.width(), img.height(), std::vector<std::uint32_t>(np, 0)};
  for (std::size_t i = 0; i < np; ++i) {
    std::uint32_t code = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const double v = img.samples()[b * np + i];
      if (v < kLowSlack || v > kHighSlack) {
        throw InputError("quantize_spectral: sample " + std::to_string(v) +
                         " is outside the reflectance range");
      }
      const double r = std::clamp(v, 0.0, 1.0);
      const auto bin = static_cast<std::uint32_t>(
          std::upper_bound(kThresholds.begin(), kThresholds.end(), r) - kThresholds.begin());
      code |= bin << (2 * b);
    }
    planes[0].labels[i] = code;
    planes[1].labels[i] = tables[0][code];
    planes[2].labels[i] = tables[1][planes[1].labels[i]];
  }
  return LabelMapStack(std::move(planes), {n_fine, n_inter, n_coarse}, std::move(tables));
}

LabelMapStack quantize_spectral(const MultibandImage& img) { return ThresholdQuantizer{}.quantize(img); }

std::size_t post_classification_change_count(const LabelMapStack& a, const LabelMapStack& b,
                                             QuantizationLevel level) {
  check_same_dims(a, b, "post_classification_change_count");
  const auto& la = a.plane(level).labels;
  const auto& lb = b.plane(level).labels;
  std::size_t n = 0;
  for (std::size_t i = 0; i < la.size(); ++i) n += la[i] != lb[i] ? 1 : 0;
  return n;
}

std::vector<std::uint8_t> cross_aura_level(const LabelPlane& plane) {
  const auto w = static_cast<std::ptrdiff_t>(plane.width);
  const auto h = static_cast<std::ptrdiff_t>(plane.height);
  std::vector<std::uint8_t> out(plane.labels.size(), 0);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const std::uint32_t c = plane.labels[static_cast<std::size_t>(y * w + x)];
      std::uint8_t n = 0;
      for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
        for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const std::ptrdiff_t xx = x + dx;
          const std::ptrdiff_t yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          if (plane.labels[static_cast<std::size_t>(yy * w + xx)] != c) ++n;
        }
      }
      out[static_cast<std::size_t>(y * w + x)] = n;
    }
  }
  return out;
}

CrossAura cross_aura(const LabelMapStack& stack) {
  if (stack.width() < 3 || stack.height() < 3) throw InputError("cross_aura: image must be at least 3x3");
  CrossAura r{stack.width(), stack.height(), std::vector<std::uint8_t>(stack.width() * stack.height(), 0), 0.0};
  for (std::size_t l = 0; l < 3; ++l) {
    const auto level = cross_aura_level(stack.plane(static_cast<QuantizationLevel>(l)));
    for (std::size_t i = 0; i < level.size(); ++i) r.values[i] = static_cast<std::uint8_t>(r.values[i] + level[i]);
  }
  std::size_t sum = 0;
  for (std::uint8_t v : r.values) sum += v;
  r.mean = static_cast<double>(sum) / static_cast<double>(r.values.size());
  return r;
}

double binary_contour_cost(const LabelMapStack& a, const LabelMapStack& b) {
  check_same_dims(a, b, "binary_contour_cost");
  const CrossAura ca = cross_aura(a);
  const CrossAura cb = cross_aura(b);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < ca.values.size(); ++i) diff += (ca.values[i] > 0) != (cb.values[i] > 0) ? 1 : 0;
  return static_cast<double>(diff) / static_cast<double>(ca.values.size());
}

double cross_aura_cost(const LabelMapStack& a, const LabelMapStack& b) {
  check_same_dims(a, b, "cross_aura_cost");
  return std::abs(cross_aura(a).mean - cross_aura(b).mean);
}

void save_stack(const LabelMapStack& stack, const std::filesystem::path& path) {
  const std::size_t np = stack.width() * stack.height();
  std::vector<double> samples;
  samples.reserve(3 * np);
  std::vector<std::string> names;
  for (std::size_t l = 0; l < 3; ++l) {
    if (stack.level_counts()[l] > 65536) throw InputError("save_stack: labels do not fit in u16");
    for (std::uint32_t v : stack.plane(static_cast<QuantizationLevel>(l)).labels) samples.push_back(v);
    names.push_back(std::string(kLevelNames[l]) + ":" + std::to_string(stack.level_counts()[l]));
  }
  save_image(MultibandImage(stack.width(), stack.height(), 3, std::move(samples), std::move(names)), path,
             SampleType::u16);
}

LabelMapStack load_stack(const std::filesystem::path& path) {
  const MultibandImage img = load_image(path);
  if (img.bands() != 3) throw InputError("load_stack: expected 3 label planes");
  if (img.band_names().size() != 3) throw InputError("load_stack: band names with level counts are required");
  std::array<LabelPlane, 3> planes;
  std::array<std::size_t, 3> counts{};
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string& name = img.band_names()[l];
    const std::string prefix = std::string(kLevelNames[l]) + ":";
    if (name.rfind(prefix, 0) != 0) throw InputError("load_stack: unexpected band name '" + name + "'");
    try {
      counts[l] = std::stoul(name.substr(prefix.size()));
    } catch (const std::exception&) {
      throw InputError("load_stack: bad level count in '" + name + "'");
    }
    planes[l] = {img.width(), img.height(), {}};
    for (double v : img.band(l).samples) planes[l].labels.push_back(static_cast<std::uint32_t>(v));
  }
  return LabelMapStack::from_planes(std::move(planes), counts);
}

}  // namespace panqa
