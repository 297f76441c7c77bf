#include "panqa/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "json.hpp"
#include "panqa/error.hpp"

namespace panqa {

namespace {

std::size_t sample_size(SampleType t) {
  switch (t) {
    case SampleType::u8:
      return 1;
    case SampleType::u16:
      return 2;
    case SampleType::f32:
      return 4;
  }
  throw InputError("unknown sample_type");
}

template <typename T>
T from_little_endian(const unsigned char* p) {
  T value;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&value, p, sizeof(T));
  } else {
    unsigned char tmp[sizeof(T)];
    std::reverse_copy(p, p + sizeof(T), tmp);
    std::memcpy(&value, tmp, sizeof(T));
  }
  return value;
}

template <typename T>
void append_little_endian(std::vector<unsigned char>& out, T value) {
  unsigned char tmp[sizeof(T)];
  std::memcpy(tmp, &value, sizeof(T));
  if constexpr (std::endian::native != std::endian::little) {
    std::reverse(tmp, tmp + sizeof(T));
  }
  out.insert(out.end(), tmp, tmp + sizeof(T));
}

}  // namespace

std::string to_string(SampleType t) {
  switch (t) {
    case SampleType::u8:
      return "u8";
    case SampleType::u16:
      return "u16";
    case SampleType::f32:
      return "f32";
  }
  return "?";
}

SampleType sample_type_from_string(const std::string& s) {
  if (s == "u8") return SampleType::u8;
  if (s == "u16") return SampleType::u16;
  if (s == "f32") return SampleType::f32;
  throw InputError("unknown sample_type '" + s + "'");
}

void ImageHeader::validate() const {
  if (width < 1 || height < 1) throw InputError("header: width and height must be >= 1");
  if (bands < 1) throw InputError("header: bands must be >= 1");
  if (gain.size() != bands || offset.size() != bands) {
    throw InputError("header: gain and offset must have one entry per band");
  }
  if (!band_names.empty() && band_names.size() != bands) {
    throw InputError("header: band_names must be empty or have one entry per band");
  }
}

MultibandImage::MultibandImage(std::size_t width, std::size_t height, std::size_t bands,
                               double fill)
    : MultibandImage(width, height, bands, std::vector<double>(width * height * bands, fill)) {}

MultibandImage::MultibandImage(std::size_t width, std::size_t height, std::size_t bands,
                               std::vector<double> samples, std::vector<std::string> band_names)
    : width_(width), height_(height), bands_(bands), samples_(std::move(samples)) {
  if (width_ < 1 || height_ < 1 || bands_ < 1) {
    throw InputError("image dimensions must be >= 1");
  }
  if (samples_.size() != width_ * height_ * bands_) {
    throw InputError("length mismatch: expected " + std::to_string(width_ * height_ * bands_) +
                     " samples, got " + std::to_string(samples_.size()));
  }
  set_band_names(std::move(band_names));
}

void MultibandImage::set_band_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != bands_) {
    throw InputError("band_names must have one entry per band");
  }
  band_names_ = std::move(names);
}

BandView MultibandImage::band(std::size_t b) const {
  if (b >= bands_) {
    throw InputError("band index " + std::to_string(b) + " out of range (bands = " +
                     std::to_string(bands_) + ")");
  }
  return BandView{width_, height_, std::span<const double>(samples_).subspan(b * pixels(), pixels())};
}

std::span<double> MultibandImage::band_samples(std::size_t b) {
  if (b >= bands_) throw InputError("band index out of range");
  return std::span<double>(samples_).subspan(b * pixels(), pixels());
}

MultibandImage MultibandImage::select_bands(std::span<const std::size_t> order) const {
  std::vector<double> out;
  out.reserve(order.size() * pixels());
  std::vector<std::string> names;
  for (std::size_t b : order) {
    auto v = band(b);
    out.insert(out.end(), v.samples.begin(), v.samples.end());
    if (!band_names_.empty()) names.push_back(band_names_[b]);
  }
  return MultibandImage(width_, height_, order.size(), std::move(out), std::move(names));
}

MultibandImage to_image(const BandView& view) {
  return MultibandImage(view.width, view.height, 1,
                        std::vector<double>(view.samples.begin(), view.samples.end()));
}

ImagePaths image_paths(const std::filesystem::path& path) {
  std::filesystem::path stem = path;
  if (stem.extension() == ".json" || stem.extension() == ".raw") stem.replace_extension();
  ImagePaths p;
  p.header = stem;
  p.header += ".json";
  p.payload = stem;
  p.payload += ".raw";
  return p;
}

ImageHeader read_header(const std::filesystem::path& path) {
  const auto paths = image_paths(path);
  std::ifstream in(paths.header);
  if (!in) throw InputError("missing file: " + paths.header.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed header " + paths.header.string() + ": " + e.what());
  }
  ImageHeader h;
  try {
    h.width = j.at("width").get<std::size_t>();
    h.height = j.at("height").get<std::size_t>();
    h.bands = j.at("bands").get<std::size_t>();
    h.dtype = sample_type_from_string(j.at("dtype").get<std::string>());
    h.gain = j.value("gain", std::vector<double>(h.bands, 1.0));
    h.offset = j.value("offset", std::vector<double>(h.bands, 0.0));
    if (j.contains("nodata") && !j["nodata"].is_null()) h.nodata = j["nodata"].get<double>();
    if (j.contains("band_names") && !j["band_names"].is_null()) {
      h.band_names = j["band_names"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed header " + paths.header.string() + ": " + e.what());
  }
  h.validate();
  return h;
}

MultibandImage load_image(const std::filesystem::path& path) {
  const ImageHeader h = read_header(path);
  const auto paths = image_paths(path);
  std::ifstream in(paths.payload, std::ios::binary);
  if (!in) throw InputError("missing file: " + paths.payload.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  const std::size_t n = h.width * h.height * h.bands;
  const std::size_t elem = sample_size(h.dtype);
  if (bytes.size() != n * elem) {
    throw InputError("length mismatch: " + paths.payload.string() + " has " +
                     std::to_string(bytes.size()) + " bytes, header implies " +
                     std::to_string(n * elem));
  }

  const std::size_t plane = h.width * h.height;
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = bytes.data() + i * elem;
    double dn = 0.0;
    switch (h.dtype) {
      case SampleType::u8:
        dn = p[0];
        break;
      case SampleType::u16:
        dn = from_little_endian<std::uint16_t>(p);
        break;
      case SampleType::f32:
        dn = from_little_endian<float>(p);
        break;
    }
    if (h.nodata && dn == *h.nodata) {
      throw InputError("nodata pixel found in " + paths.payload.string() +
                       " (nodata masking is not supported)");
    }
    const std::size_t b = i / plane;
    const double v = dn * h.gain[b] + h.offset[b];
    if (!std::isfinite(v)) {
      throw InputError("non-finite sample after calibration in " + paths.payload.string());
    }
    samples[i] = v;
  }
  return MultibandImage(h.width, h.height, h.bands, std::move(samples), h.band_names);
}

void save_image(const MultibandImage& img, const std::filesystem::path& path,
                SampleType sample_type, const std::optional<Calibration>& calibration) {
  const std::size_t bands = img.bands();
  std::vector<double> gain(bands, 1.0);
  std::vector<double> offset(bands, 0.0);
  if (calibration && sample_type != SampleType::f32) {
    if (calibration->gain.size() != bands || calibration->offset.size() != bands) {
      throw InputError("calibration must have one gain and offset per band");
    }
    gain = calibration->gain;
    offset = calibration->offset;
    for (double g : gain) {
      if (!(g != 0.0) || !std::isfinite(g)) throw InputError("calibration gain must be finite and nonzero");
    }
  }

  const std::size_t plane = img.pixels();
  const auto samples = img.samples();
  std::vector<unsigned char> bytes;
  bytes.reserve(samples.size() * sample_size(sample_type));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t b = i / plane;
    const double v = samples[i];
    if (!std::isfinite(v)) throw InputError("cannot save non-finite sample");
    switch (sample_type) {
      case SampleType::f32:
        append_little_endian(bytes, static_cast<float>(v));
        break;
      case SampleType::u8:
      case SampleType::u16: {
        // Range is checked before rounding, so -0.1 is rejected rather than stored as 0.
        const double raw = (v - offset[b]) / gain[b];
        const double hi = sample_type == SampleType::u8 ? 255.0 : 65535.0;
        const double dn = std::round(raw);
        if (raw < -1e-9 || raw > hi + 1e-9) {
          throw InputError("range error: sample " + std::to_string(v) + " is not representable as " +
                           to_string(sample_type));
        }
        if (sample_type == SampleType::u8) {
          bytes.push_back(static_cast<unsigned char>(dn));
        } else {
          append_little_endian(bytes, static_cast<std::uint16_t>(dn));
        }
        break;
      }
    }
  }

  nlohmann::json j;
  j["width"] = img.width();
  j["height"] = img.height();
  j["bands"] = bands;
  j["dtype"] = to_string(sample_type);
  j["gain"] = gain;
  j["offset"] = offset;
  j["nodata"] = nullptr;
  j["band_names"] = img.band_names();

  const auto paths = image_paths(path);
  {
    std::ofstream out(paths.payload, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + paths.payload.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("I/O failure writing " + paths.payload.string());
  }
  std::ofstream out(paths.header, std::ios::trunc);
  if (!out) throw InputError("cannot write " + paths.header.string());
  out << j.dump(2) << '\n';
  if (!out) throw InputError("I/O failure writing " + paths.header.string());
}

}  // namespace panqa
