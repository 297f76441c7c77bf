#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "panqa/raster.hpp"

namespace panqa {

// Linear min-max binning: floor(gl * (v - min) / (max - min)), clamped to
// gl - 1. A constant band maps to level 0 everywhere.
LabelPlane quantize_gray_levels(const BandView& band, std::size_t gl);

// Concentric square rings around the window center.
struct RingSpec {
  std::vector<int> radii{1, 2, 3};

  void validate() const;
  int max_radius() const { return radii.back(); }
  std::size_t window_size() const { return static_cast<std::size_t>(2 * max_radius() + 1); }
  // Opposite pairs per center: sum over r of 4r.
  std::size_t pairs_per_center() const;
};

// Upper-triangular third-order co-occurrence counts. A cell is addressed by
// (depth = center level, row = min of the opposite pair, col = max of the pair);
// cells with row > col are never populated.
class Glcm3 {
 public:
  struct Cell {
    std::uint32_t depth;
    std::uint32_t row;
    std::uint32_t col;
    std::uint64_t count;
  };

  explicit Glcm3(std::size_t gl);

  std::size_t gl() const { return gl_; }
  std::uint64_t total_tuples() const { return total_; }

  std::uint64_t count(std::size_t depth, std::size_t row, std::size_t col) const {
    return counts_[index(depth, row, col)];
  }
  double probability(std::size_t depth, std::size_t row, std::size_t col) const {
    return static_cast<double>(count(depth, row, col)) / static_cast<double>(total_);
  }

  // Nonzero cells in (depth, row, col) lexicographic order.
  std::vector<Cell> cells() const;

  void add(std::size_t depth, std::size_t level_a, std::size_t level_b, std::uint64_t n = 1);
  void merge(const Glcm3& other);

  friend bool operator==(const Glcm3&, const Glcm3&) = default;

 private:
  std::size_t index(std::size_t depth, std::size_t row, std::size_t col) const {
    return (depth * gl_ + row) * gl_ + col;
  }

  std::size_t gl_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Accumulates, for every center at distance >= max radius from the border,
// one tuple per diametrically opposite pair on each square ring.
// Throws InputError when no valid center exists.
Glcm3 tims_glcm(const LabelPlane& labels, std::size_t gl, const RingSpec& rings = {});

struct Glcm3Features {
  double contrast = 0.0;
  double energy = 0.0;
  double lne = 0.0;
};

// Throws NumericError on an empty matrix.
Glcm3Features glcm3_features(const Glcm3& m);

// |difference| of each feature between two bands, each quantized on its own range.
Glcm3Features glcm3_cost(const BandView& a, const BandView& b, std::size_t gl,
                         const RingSpec& rings = {});

// Band-averaged feature costs between two images (Minkowski order 1 across bands).
Glcm3Features glcm3_image_cost(const MultibandImage& a, const MultibandImage& b, std::size_t gl,
                               const RingSpec& rings = {});

struct Offset2 {
  int dx;
  int dy;
};
struct Offset3 {
  int dx1;
  int dy1;
  int dx2;
  int dy2;
};

struct AutocorrStats {
  double a1 = 0.0;
  std::vector<double> a2;
  std::vector<double> a3;
};

// Image-wide 1st/2nd/3rd order moments with wraparound indexing:
// a2(n, m) = mean I(x, y) I(x + n, y + m), and similarly for a3.
AutocorrStats autocorr_stats(const BandView& band, const std::vector<Offset2>& order2,
                             const std::vector<Offset3>& order3);

}  // namespace panqa
