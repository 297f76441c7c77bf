#include <gtest/gtest.h>

#include "panqa/error.hpp"
#include "panqa/quantizer.hpp"
#include "test_util.hpp"

using namespace panqa;
using panqa::test::random_image;

namespace {

LabelPlane plane(std::size_t w, std::size_t h, std::uint32_t v = 0) {
  return {w, h, std::vector<std::uint32_t>(w * h, v)};
}

// Stack whose three levels are all taken from one binary plane.
LabelMapStack binary_stack(const LabelPlane& p) {
  return LabelMapStack::from_planes({p, p, p}, {4, 3, 2});
}

}  // namespace

TEST(Quantizer, LevelCountsAndMergeConsistency) {
  for (std::size_t nb : {3u, 4u, 6u}) {
    const auto img = random_image(nb, 16, 16, nb, 0.0, 1.0);
    const auto s = quantize_spectral(img);
    EXPECT_EQ(s.level_counts()[0], std::size_t{1} << (2 * nb));
    EXPECT_EQ(s.level_counts()[1], std::size_t{1} << nb);
    EXPECT_EQ(s.level_counts()[2], nb + 1);
    for (std::size_t i = 0; i < img.pixels(); ++i) {
      const auto f = s.fine().labels[i];
      EXPECT_EQ(s.intermediate().labels[i], s.merge_tables()[0][f]);
      EXPECT_EQ(s.coarse().labels[i], s.merge_tables()[1][s.merge_tables()[0][f]]);
    }
  }
}

TEST(Quantizer, ContextFree) {
  // Identical spectra get identical labels regardless of position or neighbors.
  auto img = random_image(1, 8, 8, 4, 0.0, 1.0);
  for (std::size_t b = 0; b < 4; ++b) img.at(7, 7, b) = img.at(0, 0, b);
  const auto s = quantize_spectral(img);
  for (auto l : {QuantizationLevel::fine, QuantizationLevel::intermediate, QuantizationLevel::coarse}) {
    EXPECT_EQ(s.plane(l)(0, 0), s.plane(l)(7, 7));
  }
}

TEST(Quantizer, HandCodedLabels) {
  // Bands 0.1, 0.3, 0.6, 0.9 fall in bins 0, 1, 2, 3.
  MultibandImage img(1, 1, 4, std::vector<double>{0.1, 0.3, 0.6, 0.9});
  const auto s = quantize_spectral(img);
  EXPECT_EQ(s.fine().labels[0], 0u | (1u << 2) | (2u << 4) | (3u << 6));
  EXPECT_EQ(s.intermediate().labels[0], 0b1100u);
  EXPECT_EQ(s.coarse().labels[0], 2u);
}

TEST(Quantizer, ConstantImageSingleLabel) {
  MultibandImage img(5, 5, 4, 0.4);
  const auto s = quantize_spectral(img);
  for (auto l : {QuantizationLevel::fine, QuantizationLevel::intermediate, QuantizationLevel::coarse}) {
    const auto& p = s.plane(l).labels;
    EXPECT_TRUE(std::all_of(p.begin(), p.end(), [&](auto v) { return v == p.front(); }));
  }
}

TEST(Quantizer, RangeAndBandChecks) {
  MultibandImage slack(1, 1, 3, std::vector<double>{-0.005, 1.2, 0.5});
  EXPECT_NO_THROW(quantize_spectral(slack));
  MultibandImage neg(1, 1, 3, std::vector<double>{-0.5, 0.2, 0.5});
  EXPECT_THROW(quantize_spectral(neg), InputError);
  EXPECT_THROW(quantize_spectral(MultibandImage(2, 2, 2, 0.5)), InputError);
  EXPECT_THROW(quantize_spectral(MultibandImage(2, 2, 9, 0.5)), InputError);
}

TEST(LabelMapStack, ConstructorValidates) {
  const auto p = plane(3, 3);
  EXPECT_THROW(LabelMapStack({p, p, p}, {2, 2, 1}, {std::vector<std::uint32_t>{0, 0}, {0, 0}}), InputError);
  EXPECT_THROW(LabelMapStack({p, plane(3, 2), p}, {3, 2, 1}, {std::vector<std::uint32_t>{0, 0, 0}, {0, 0}}),
               InputError);
  // Fine 1 -> intermediate 1 at one pixel, fine 0 -> intermediate 0 elsewhere.
  auto fine = p;
  fine.labels[0] = 1;
  auto inter = p;
  inter.labels[0] = 1;
  EXPECT_NO_THROW(LabelMapStack::from_planes({fine, inter, p}, {3, 2, 1}));
  // fine label 0 maps to both intermediate 0 and 1: not a function.
  auto conflict = p;
  conflict.labels[4] = 1;
  EXPECT_THROW(LabelMapStack::from_planes({p, conflict, p}, {3, 2, 1}), InputError);
}

TEST(ChangeCount, Examples) {
  const auto img = random_image(2, 10, 10, 4, 0.0, 1.0);
  const auto a = quantize_spectral(img);
  EXPECT_EQ(post_classification_change_count(a, a), 0u);
  auto other = img;
  // Force exactly three pixels into a different coarse class.
  std::size_t changed = 0;
  for (std::size_t i = 0; i < img.pixels() && changed < 3; ++i) {
    const auto before = a.coarse().labels[i];
    const double v = before == 0 ? 0.9 : 0.1;
    for (std::size_t b = 0; b < 4; ++b) other.band_samples(b)[i] = v;
    ++changed;
  }
  const auto b = quantize_spectral(other);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < img.pixels(); ++i) expected += a.coarse().labels[i] != b.coarse().labels[i];
  EXPECT_EQ(post_classification_change_count(a, b), expected);
  EXPECT_GE(expected, 1u);
  EXPECT_LE(expected, 3u);
  EXPECT_GE(post_classification_change_count(a, b, QuantizationLevel::fine), expected);
}

TEST(ChangeCount, CountsDifferingPixels) {
  const auto base = plane(6, 6);
  for (std::size_t k : {0u, 1u, 5u, 36u}) {
    auto coarse = base;
    for (std::size_t i = 0; i < k; ++i) coarse.labels[(i * 7) % 36] = 1;
    const auto a = binary_stack(base);
    const auto b = binary_stack(coarse);
    EXPECT_EQ(post_classification_change_count(a, b), k);
    EXPECT_EQ(post_classification_change_count(b, a, QuantizationLevel::intermediate), k);
  }
}

TEST(CrossAura, UniformIsZero) {
  const auto s = binary_stack(plane(6, 6));
  const auto a = cross_aura(s);
  EXPECT_EQ(a.mean, 0.0);
  for (auto v : a.values) EXPECT_EQ(v, 0u);
}

TEST(CrossAura, SingleDifferingPixelOneLevel) {
  auto odd = plane(5, 5);
  odd.labels[2 * 5 + 2] = 1;
  const auto flat = plane(5, 5);
  const auto s = LabelMapStack::from_planes({odd, flat, flat}, {4, 2, 1});
  const auto a = cross_aura(s);
  EXPECT_EQ(a.values[2 * 5 + 2], 8u);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      EXPECT_EQ(a.values[static_cast<std::size_t>((2 + dy) * 5 + 2 + dx)], 1u);
    }
  }
  EXPECT_EQ(a.values[0], 0u);
}

TEST(CrossAura, CheckerboardInterior) {
  // With two labels the diagonal neighbors of a checkerboard share the
  // center label, so only the 4 edge neighbors count.
  auto cb = plane(6, 6);
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 0; x < 6; ++x) cb.labels[y * 6 + x] = (x + y) % 2;
  }
  const auto level = cross_aura_level(cb);
  for (std::size_t y = 1; y < 5; ++y) {
    for (std::size_t x = 1; x < 5; ++x) EXPECT_EQ(level[y * 6 + x], 4u);
  }
  EXPECT_EQ(level[0], 2u);  // corner: right and below differ, diagonal does not
}

TEST(CrossAura, RangeAndSmallImages) {
  const auto s = quantize_spectral(random_image(3, 12, 12, 4, 0.0, 1.0));
  const auto a = cross_aura(s);
  for (auto v : a.values) EXPECT_LE(v, 24u);
  EXPECT_THROW(cross_aura(binary_stack(plane(2, 5))), InputError);
}

TEST(BinaryContour, Examples) {
  const auto s = quantize_spectral(random_image(4, 12, 12, 4, 0.0, 1.0));
  EXPECT_EQ(binary_contour_cost(s, s), 0.0);
  const auto uniform = binary_stack(plane(6, 6));
  auto cb = plane(6, 6);
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 0; x < 6; ++x) cb.labels[y * 6 + x] = (x + y) % 2;
  }
  EXPECT_EQ(binary_contour_cost(uniform, binary_stack(cb)), 1.0);
}

TEST(BinaryContour, MetricProperties) {
  std::vector<LabelMapStack> stacks;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto img = random_image(seed, 16, 16, 4, 0.0, 1.0);
    stacks.push_back(quantize_spectral(img));
  }
  for (const auto& a : stacks) {
    EXPECT_EQ(post_classification_change_count(a, a), 0u);
    for (const auto& b : stacks) {
      EXPECT_EQ(binary_contour_cost(a, b), binary_contour_cost(b, a));
      for (const auto& c : stacks) {
        EXPECT_LE(binary_contour_cost(a, c), binary_contour_cost(a, b) + binary_contour_cost(b, c) + 1e-15);
      }
    }
  }
}

TEST(Stack, SaveLoadRoundTrip) {
  panqa::test::TempDir dir("stack");
  const auto s = quantize_spectral(random_image(5, 9, 7, 4, 0.0, 1.0));
  save_stack(s, dir / "st");
  const auto back = load_stack(dir / "st");
  EXPECT_EQ(back.fine(), s.fine());
  EXPECT_EQ(back.intermediate(), s.intermediate());
  EXPECT_EQ(back.coarse(), s.coarse());
  EXPECT_EQ(back.level_counts(), s.level_counts());
  EXPECT_EQ(post_classification_change_count(back, s, QuantizationLevel::fine), 0u);
}
