#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "panqa/error.hpp"
#include "panqa/resample.hpp"
#include "test_util.hpp"

using namespace panqa;

namespace {

double image_mean(const MultibandImage& img) {
  const auto s = img.samples();
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

}  // namespace

TEST(MtfKernel, TapsSumToOne) {
  for (int r : {2, 3, 4, 6}) {
    for (double g : {0.15, 0.3, 0.5}) {
      const auto k = mtf_gaussian_kernel(r, g);
      EXPECT_NEAR(std::accumulate(k.taps.begin(), k.taps.end(), 0.0), 1.0, 1e-12);
      EXPECT_EQ(k.taps.size() % 2, 1u);
    }
  }
}

TEST(MtfKernel, SigmaForRatio4Gain03) {
  const auto k = mtf_gaussian_kernel(4, 0.3);
  const double nyquist = 1.0 / 8.0;
  EXPECT_NEAR(k.sigma, std::sqrt(-std::log(0.3) / (2.0 * M_PI * M_PI * nyquist * nyquist)), 1e-12);
  EXPECT_NEAR(k.sigma, 1.977, 2e-3);
}

TEST(MtfKernel, TransferAtNyquistMatchesGain) {
  for (int r : {2, 4, 8}) {
    for (double g : {0.15, 0.25, 0.3}) {
      const auto k = mtf_gaussian_kernel(r, g);
      EXPECT_NEAR(k.transfer(1.0 / (2.0 * r)), g, 0.02 * g) << "r=" << r << " g=" << g;
      EXPECT_NEAR(k.transfer(0.0), 1.0, 1e-12);
    }
  }
}

TEST(MtfKernel, RejectsBadParameters) {
  EXPECT_THROW(mtf_gaussian_kernel(1, 0.3), InputError);
  EXPECT_THROW(mtf_gaussian_kernel(4, 0.0), InputError);
  EXPECT_THROW(mtf_gaussian_kernel(4, 1.0), InputError);
}

TEST(Degrade, ConstantStaysConstant) {
  for (int r : {2, 3, 4}) {
    MultibandImage img(12, 12, 2, 0.37);
    const auto out = degrade(img, r, mtf_gaussian_kernel(r, 0.3));
    ASSERT_EQ(out.width(), 12u / static_cast<unsigned>(r));
    for (double v : out.samples()) EXPECT_NEAR(v, 0.37, 1e-12);
  }
}

TEST(Degrade, IdentityKernelRatioOne) {
  const auto img = panqa::test::random_image(5, 7, 5, 3);
  EXPECT_EQ(degrade(img, 1, identity_kernel()), img);
}

TEST(Degrade, RejectsIndivisibleDimensions) {
  MultibandImage img(10, 8, 1);
  EXPECT_THROW_MSG(degrade(img, 4, box_kernel(4)), InputError, "not divisible");
}

TEST(Degrade, FilteredRampKeepsMean) {
  // Symmetric kernel with half-sample mirror padding: every input sample
  // contributes total weight 1, so the filtered mean equals the input mean.
  MultibandImage ramp(8, 8, 1);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) ramp.at(x, y, 0) = static_cast<double>(x + 8 * y);
  }
  const auto k = mtf_gaussian_kernel(4, 0.3);
  const auto filtered = filter_separable(ramp, k.taps, k.anchor());
  EXPECT_NEAR(image_mean(filtered), image_mean(ramp), 1e-9);
  const auto out = degrade(ramp, 4, k);
  EXPECT_EQ(out.width(), 2u);
  EXPECT_EQ(out.height(), 2u);
}

TEST(Degrade, MeanPreservedOnPerturbedConstant) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e-4, 1e-4);
  MultibandImage img(32, 32, 2);
  for (double& v : img.samples()) v = 0.5 + u(rng);
  const auto out = degrade(img, 4, mtf_gaussian_kernel(4, 0.3));
  EXPECT_NEAR(image_mean(out) / image_mean(img), 1.0, 1e-6);
}

TEST(Degrade, NearestUpsampleThenBoxDegradeIsIdentity) {
  for (int r : {2, 3, 4, 5}) {
    const auto img = panqa::test::random_image(100 + static_cast<std::uint64_t>(r), 6, 4, 2);
    const auto back = degrade(upsample(img, r, Resampler::nearest), r, box_kernel(r));
    ASSERT_TRUE(back.same_shape(img));
    for (std::size_t i = 0; i < img.samples().size(); ++i) {
      EXPECT_NEAR(back.samples()[i], img.samples()[i], 4 * std::numeric_limits<double>::epsilon())
          << "r=" << r;
    }
  }
  // Power-of-two box averages of replicated values are exact.
  const auto img = panqa::test::random_image(3, 5, 5, 1);
  EXPECT_EQ(degrade(upsample(img, 2, Resampler::nearest), 2, box_kernel(2)), img);
}

TEST(Degrade, CommutesWithBandSelection) {
  const auto img = panqa::test::random_image(9, 16, 8, 3);
  const auto k = mtf_gaussian_kernel(4, 0.3);
  const auto full = degrade(img, 4, k);
  for (std::size_t b = 0; b < 3; ++b) {
    const std::vector<std::size_t> one{b};
    EXPECT_EQ(degrade(img.select_bands(one), 4, k), full.select_bands(one));
  }
}

TEST(Upsample, NearestReplicates) {
  MultibandImage img(2, 2, 1, std::vector<double>{1, 2, 3, 4});
  const auto up = upsample(img, 2, Resampler::nearest);
  const std::vector<double> expected{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
  EXPECT_EQ(std::vector<double>(up.samples().begin(), up.samples().end()), expected);
}

TEST(Upsample, RatioOneIsIdentity) {
  const auto img = panqa::test::random_image(1, 5, 4, 2);
  for (auto m : {Resampler::nearest, Resampler::bilinear, Resampler::bicubic}) EXPECT_EQ(upsample(img, 1, m), img);
}

TEST(Upsample, ConstantStaysConstant) {
  MultibandImage img(3, 4, 2, 0.8);
  for (auto m : {Resampler::bilinear, Resampler::bicubic}) {
    const auto up = upsample(img, 4, m);
    EXPECT_EQ(up.width(), 12u);
    EXPECT_EQ(up.height(), 16u);
    for (double v : up.samples()) EXPECT_NEAR(v, 0.8, 1e-12);
  }
}

TEST(Upsample, BilinearReproducesLinearInterior) {
  // Away from the mirrored border, bilinear interpolation is exact for a ramp.
  MultibandImage img(6, 1, 1, std::vector<double>{0, 1, 2, 3, 4, 5});
  const auto up = upsample(img, 2, Resampler::bilinear);
  for (std::size_t x = 1; x + 1 < up.width(); ++x) {
    EXPECT_NEAR(up.at(x, 0, 0), (static_cast<double>(x) + 0.5) / 2.0 - 0.5, 1e-12);
  }
}

TEST(Upsample, MethodNames) {
  EXPECT_EQ(resampler_from_string("bicubic"), Resampler::bicubic);
  EXPECT_EQ(to_string(Resampler::nearest), "nearest");
  EXPECT_THROW(resampler_from_string("lanczos"), InputError);
}

TEST(MirrorIndex, HalfSampleSymmetric) {
  EXPECT_EQ(mirror_index(-1, 5), 0);
  EXPECT_EQ(mirror_index(-2, 5), 1);
  EXPECT_EQ(mirror_index(5, 5), 4);
  EXPECT_EQ(mirror_index(6, 5), 3);
  EXPECT_EQ(mirror_index(2, 5), 2);
  EXPECT_EQ(mirror_index(-1, 1), 0);
}
