#include <gtest/gtest.h>

#include <fstream>

#include "json.hpp"
#include "panqa/error.hpp"
#include "panqa/raster.hpp"
#include "test_util.hpp"

using namespace panqa;
using panqa::test::TempDir;

namespace {

void write_raw(const std::filesystem::path& stem, const nlohmann::json& header,
               const std::vector<unsigned char>& payload) {
  std::ofstream(stem.string() + ".json") << header.dump();
  std::ofstream out(stem.string() + ".raw", std::ios::binary);
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
}

nlohmann::json header(std::size_t w, std::size_t h, std::size_t b, const std::string& dtype,
                      std::vector<double> gain, std::vector<double> offset) {
  return {{"width", w},   {"height", h},     {"bands", b},          {"dtype", dtype},
          {"gain", gain}, {"offset", offset}, {"nodata", nullptr}, {"band_names", nlohmann::json::array()}};
}

}  // namespace

TEST(Raster, LoadU8IdentityCalibration) {
  TempDir dir("raster");
  write_raw(dir / "img", header(2, 2, 1, "u8", {1.0}, {0.0}), {0, 255, 10, 20});
  const auto img = load_image(dir / "img");
  EXPECT_EQ(img.width(), 2u);
  EXPECT_EQ(img.height(), 2u);
  const std::vector<double> expected{0, 255, 10, 20};
  EXPECT_EQ(std::vector<double>(img.samples().begin(), img.samples().end()), expected);
}

TEST(Raster, LoadU16AppliesGainOffset) {
  TempDir dir("raster");
  // 100 and 200 little-endian
  write_raw(dir / "img", header(1, 1, 2, "u16", {0.01, 0.01}, {0.0, 0.0}), {100, 0, 200, 0});
  const auto img = load_image(dir / "img.json");
  EXPECT_NEAR(img.at(0, 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(img.at(0, 0, 1), 2.0, 1e-12);
}

TEST(Raster, AcceptsRawPathToo) {
  TempDir dir("raster");
  write_raw(dir / "img", header(1, 1, 1, "u8", {2.0}, {1.0}), {3});
  EXPECT_DOUBLE_EQ(load_image(dir / "img.raw").at(0, 0, 0), 7.0);
}

TEST(Raster, ShortPayloadIsLengthMismatch) {
  TempDir dir("raster");
  write_raw(dir / "img", header(2, 2, 1, "u8", {1.0}, {0.0}), {0, 1, 2});
  EXPECT_THROW_MSG(load_image(dir / "img"), InputError, "length mismatch");
}

TEST(Raster, MissingFileAndMalformedHeader) {
  TempDir dir("raster");
  EXPECT_THROW_MSG(load_image(dir / "nope"), InputError, "missing file");
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW_MSG(load_image(dir / "bad"), InputError, "malformed header");
  write_raw(dir / "g", header(1, 1, 2, "u8", {1.0}, {0.0, 0.0}), {1, 2});
  EXPECT_THROW_MSG(load_image(dir / "g"), InputError, "gain and offset");
  write_raw(dir / "t", header(1, 1, 1, "u32", {1.0}, {0.0}), {1, 2, 3, 4});
  EXPECT_THROW_MSG(load_image(dir / "t"), InputError, "sample_type");
}

TEST(Raster, NodataPixelRejected) {
  TempDir dir("raster");
  auto h = header(2, 1, 1, "u8", {1.0}, {0.0});
  h["nodata"] = 0;
  write_raw(dir / "img", h, {5, 0});
  EXPECT_THROW_MSG(load_image(dir / "img"), InputError, "nodata");
}

TEST(Raster, F32RoundTripIsExact) {
  TempDir dir("raster");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(-2.0f, 2.0f);
  MultibandImage img(5, 3, 2);
  for (double& v : img.samples()) v = u(rng);
  save_image(img, dir / "rt", SampleType::f32);
  EXPECT_EQ(load_image(dir / "rt"), img);
}

TEST(Raster, HeaderFieldsPreserved) {
  TempDir dir("raster");
  MultibandImage img = panqa::test::random_image(3, 4, 4, 3);
  img.set_band_names({"b", "g", "r"});
  save_image(img, dir / "h", SampleType::f32);
  const auto h = read_header(dir / "h");
  EXPECT_EQ(h.width, 4u);
  EXPECT_EQ(h.height, 4u);
  EXPECT_EQ(h.bands, 3u);
  EXPECT_EQ(h.dtype, SampleType::f32);
  EXPECT_EQ(h.band_names, (std::vector<std::string>{"b", "g", "r"}));
  EXPECT_FALSE(h.nodata.has_value());
  EXPECT_EQ(load_image(dir / "h").band_names(), img.band_names());
}

TEST(Raster, SaveNegativeAsU8IsRangeError) {
  TempDir dir("raster");
  MultibandImage img(1, 1, 1, -0.1);
  EXPECT_THROW_MSG(save_image(img, dir / "neg", SampleType::u8), InputError, "range error");
}

TEST(Raster, IntegralSaveWithCalibrationRoundTrips) {
  TempDir dir("raster");
  MultibandImage img(2, 1, 1, std::vector<double>{0.1234, 0.5});
  save_image(img, dir / "c", SampleType::u16, Calibration{{1e-4}, {0.0}});
  const auto back = load_image(dir / "c");
  EXPECT_NEAR(back.at(0, 0, 0), 0.1234, 1e-12);
  EXPECT_NEAR(back.at(1, 0, 0), 0.5, 1e-12);
  EXPECT_THROW_MSG(save_image(MultibandImage(1, 1, 1, 7.0), dir / "o", SampleType::u16, Calibration{{1e-4}, {0.0}}),
                   InputError, "range error");
}

TEST(Raster, BandViews) {
  MultibandImage img(2, 2, 2, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  const auto b0 = img.band(0);
  EXPECT_EQ(std::vector<double>(b0.samples.begin(), b0.samples.end()), (std::vector<double>{1, 2, 3, 4}));
  const auto b1 = img.band(1);
  EXPECT_EQ(std::vector<double>(b1.samples.begin(), b1.samples.end()), (std::vector<double>{5, 6, 7, 8}));
  EXPECT_DOUBLE_EQ(b1(1, 0), 6.0);
  EXPECT_DOUBLE_EQ(b1(0, 1), 7.0);
  EXPECT_THROW(img.band(2), InputError);
}

TEST(Raster, ConstructorChecksLength) {
  EXPECT_THROW_MSG(MultibandImage(2, 2, 1, std::vector<double>{1, 2, 3}), InputError, "length mismatch");
  EXPECT_THROW(MultibandImage(0, 2, 1), InputError);
}

TEST(Raster, SelectBandsReorders) {
  MultibandImage img(1, 1, 3, std::vector<double>{1, 2, 3}, {"a", "b", "c"});
  const std::vector<std::size_t> order{2, 0};
  const auto s = img.select_bands(order);
  EXPECT_EQ(s.bands(), 2u);
  EXPECT_DOUBLE_EQ(s.at(0, 0, 0), 3.0);
  EXPECT_DOUBLE_EQ(s.at(0, 0, 1), 1.0);
  EXPECT_EQ(s.band_names(), (std::vector<std::string>{"c", "a"}));
}
