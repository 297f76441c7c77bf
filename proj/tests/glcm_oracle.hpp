#pragma once

// Brute-force third-order co-occurrence counts, written independently of the
// library accumulator: every position of every square ring is visited and
// paired with its point reflection, so each opposite pair is seen twice and
// the counts are halved at the end.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "panqa/glcm3.hpp"

namespace panqa::test {

using OracleKey = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;
using OracleCounts = std::map<OracleKey, std::uint64_t>;

inline OracleCounts glcm_oracle(const LabelPlane& p, const std::vector<int>& radii) {
  const int rmax = *std::max_element(radii.begin(), radii.end());
  const int w = static_cast<int>(p.width);
  const int h = static_cast<int>(p.height);
  OracleCounts doubled;
  for (int y = rmax; y < h - rmax; ++y) {
    for (int x = rmax; x < w - rmax; ++x) {
      const std::uint32_t c = p(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      for (int r : radii) {
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
            const std::uint32_t a = p(static_cast<std::size_t>(x + dx), static_cast<std::size_t>(y + dy));
            const std::uint32_t b = p(static_cast<std::size_t>(x - dx), static_cast<std::size_t>(y - dy));
            ++doubled[{c, std::min(a, b), std::max(a, b)}];
          }
        }
      }
    }
  }
  OracleCounts out;
  for (const auto& [k, n] : doubled) {
    if (n % 2 != 0) throw std::logic_error("oracle: odd doubled count");
    out[k] = n / 2;
  }
  return out;
}

// Contrast, energy and LNE from oracle counts, summed in the same
// lexicographic cell order the library uses.
inline Glcm3Features oracle_features(const OracleCounts& counts) {
  std::uint64_t total = 0;
  for (const auto& kv : counts) total += kv.second;
  Glcm3Features f;
  for (const auto& [k, n] : counts) {
    const double p = static_cast<double>(n) / static_cast<double>(total);
    const auto i = static_cast<double>(std::get<0>(k));
    const auto j = static_cast<double>(std::get<1>(k));
    const auto l = static_cast<double>(std::get<2>(k));
    f.contrast += ((i - j) * (i - j) + (j - l) * (j - l) + (i - l) * (i - l)) * p;
    f.energy += p * p;
    f.lne += (i * i + j * j + l * l) * p;
  }
  return f;
}

// True when the accumulator holds exactly the oracle's nonzero cells.
inline bool matches_oracle(const Glcm3& m, const OracleCounts& oracle) {
  const auto cells = m.cells();
  if (cells.size() != oracle.size()) return false;
  auto it = oracle.begin();
  for (const auto& c : cells) {
    if (it->first != OracleKey{c.depth, c.row, c.col} || it->second != c.count) return false;
    ++it;
  }
  return true;
}

inline LabelPlane random_labels(std::uint64_t seed, std::size_t w, std::size_t h, std::uint32_t gl) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> u(0, gl - 1);
  LabelPlane p{w, h, std::vector<std::uint32_t>(w * h)};
  for (auto& l : p.labels) l = u(rng);
  return p;
}

}  // namespace panqa::test
