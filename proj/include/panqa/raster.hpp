#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace panqa {

enum class SampleType { u8, u16, f32 };

std::string to_string(SampleType t);
SampleType sample_type_from_string(const std::string& s);

// Sidecar header of the raw band-sequential format.
struct ImageHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t bands = 0;
  SampleType dtype = SampleType::f32;
  std::vector<double> gain;
  std::vector<double> offset;
  std::optional<double> nodata;
  std::vector<std::string> band_names;

  void validate() const;
};

// Read-only view of one W x H plane.
struct BandView {
  std::size_t width = 0;
  std::size_t height = 0;
  std::span<const double> samples;

  std::size_t size() const { return samples.size(); }
  double operator()(std::size_t x, std::size_t y) const { return samples[y * width + x]; }
};

// W x H x B raster of calibrated samples, band-sequential, row-major within band.
class MultibandImage {
 public:
  MultibandImage() = default;
  MultibandImage(std::size_t width, std::size_t height, std::size_t bands, double fill = 0.0);
  MultibandImage(std::size_t width, std::size_t height, std::size_t bands,
                 std::vector<double> samples, std::vector<std::string> band_names = {});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t bands() const { return bands_; }
  std::size_t pixels() const { return width_ * height_; }

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  const std::vector<std::string>& band_names() const { return band_names_; }
  void set_band_names(std::vector<std::string> names);

  BandView band(std::size_t b) const;
  std::span<double> band_samples(std::size_t b);

  double at(std::size_t x, std::size_t y, std::size_t b) const {
    return samples_[(b * height_ + y) * width_ + x];
  }
  double& at(std::size_t x, std::size_t y, std::size_t b) {
    return samples_[(b * height_ + y) * width_ + x];
  }

  bool same_shape(const MultibandImage& other) const {
    return width_ == other.width_ && height_ == other.height_ && bands_ == other.bands_;
  }

  // Copies the listed bands, in the listed order, into a new image.
  MultibandImage select_bands(std::span<const std::size_t> order) const;

  friend bool operator==(const MultibandImage&, const MultibandImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> samples_;
  std::vector<std::string> band_names_;
};

// Single-band image from a view.
MultibandImage to_image(const BandView& view);

// Integer label plane, used for quantized gray levels and spectral categories.
struct LabelPlane {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> labels;

  std::uint32_t operator()(std::size_t x, std::size_t y) const { return labels[y * width + x]; }
  friend bool operator==(const LabelPlane&, const LabelPlane&) = default;
};

// Affine DN -> physical conversion used when writing integral payloads.
struct Calibration {
  std::vector<double> gain;
  std::vector<double> offset;
};

// Both accept "<stem>", "<stem>.json" or "<stem>.raw".
struct ImagePaths {
  std::filesystem::path header;
  std::filesystem::path payload;
};
ImagePaths image_paths(const std::filesystem::path& path);

ImageHeader read_header(const std::filesystem::path& path);

MultibandImage load_image(const std::filesystem::path& path);

// f32 payloads are written uncalibrated (gain 1, offset 0). Integral payloads
// store round((v - offset) / gain); out-of-range DNs raise InputError.
void save_image(const MultibandImage& img, const std::filesystem::path& path,
                SampleType sample_type, const std::optional<Calibration>& calibration = std::nullopt);

}  // namespace panqa
