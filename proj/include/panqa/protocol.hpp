#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace panqa {

// Raw cost indexes of one candidate; every value is minimized.
struct QiRecord {
  std::string candidate_id;

  struct Category1 {
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    double entropy = 0.0;
  } category1;

  struct Category2 {
    double post_class_change = 0.0;
    std::optional<double> inverse_pcc;
  } category2;

  struct Category3 {
    double glcm_contrast = 0.0;
    double glcm_energy = 0.0;
    double glcm_lne = 0.0;
    double cross_aura = 0.0;
  } category3;

  struct Category4 {
    double binary_contour = 0.0;
  } category4;

  struct Process {
    double wall_seconds = 0.0;
    int n_free_parameters = 1;
  } process;

  void validate() const;
};

enum class Category { spectral = 1, spectral_spatial1 = 2, spectral_spatial2 = 3, spectral_spatial12 = 4 };

// Whether category 2 includes the inverse-correlation cost.
enum class Category2Case { with_ipcc, without_ipcc };

// (x - mean) / sigma with the population sigma. Throws NumericError when
// fewer than two values are given or sigma is zero.
std::vector<double> zscore(std::span<const double> values);

enum class RankMethod {
  competition,  // "1224": ties share the minimum rank, the next rank skips
  dense,        // "1223"
};

// Lower value is better unless lower_is_better is false. Ties are exact
// equality.
std::vector<int> rank(std::span<const double> values, bool lower_is_better = true,
                      RankMethod method = RankMethod::competition);

// Named raw cost columns of one category, in QiRecord field order.
struct CostColumn {
  std::string name;
  std::vector<double> values;
};
std::vector<CostColumn> category_columns(std::span<const QiRecord> records, Category category,
                                         Category2Case c2 = Category2Case::with_ipcc);

struct CategorySum {
  std::vector<double> sums;
  // Columns skipped because they have zero variance across candidates.
  std::vector<std::string> dropped;
};

// Sum of within-category z-scores per candidate.
CategorySum category_sum(std::span<const QiRecord> records, Category category,
                         Category2Case c2 = Category2Case::with_ipcc);

// Partial ranks of one candidate; process ranks are absent for product-only tables.
struct PartialRanks {
  std::string candidate_id;
  int spectral = 0;
  int spectral_spatial1_i = 0;
  int spectral_spatial1_ii = 0;
  int spectral_spatial2 = 0;
  int spectral_spatial12 = 0;
  std::optional<int> process_time;
  std::optional<int> process_free_parameters;
};

struct RankRow {
  PartialRanks partial;
  // Within-category z-score sums; absent when the table was built from ranks.
  std::optional<std::array<double, 5>> category_sums;  // 1, 2(i), 2(ii), 3, 4
  int sum_a = 0;
  int pdfr_a = 0;
  int sum_c = 0;
  int pdfr_c = 0;
  std::optional<int> sum_b;
  std::optional<int> ppfr_b;
  std::optional<int> sum_d;
  std::optional<int> ppfr_d;
};

struct RankTable {
  std::vector<RankRow> rows;
  std::vector<std::string> warnings;
  bool has_process() const { return !rows.empty() && rows.front().ppfr_b.has_value(); }
};

// Final ranks from partial ranks. Process columns are used when every row
// carries them.
RankTable aggregate_partial_ranks(std::span<const PartialRanks> partial);

// Full ladder from raw costs: z-score sums, per-category competition ranks,
// process ranks (time: competition, free parameters: dense), final ranks.
RankTable aggregate(std::span<const QiRecord> records, bool include_process = true);

// Average (fractional) ranks, 1-based, lower value -> lower rank.
std::vector<double> fractional_ranks(std::span<const double> values);

// Tie-corrected Spearman correlation: Pearson correlation of fractional ranks.
double srcc(std::span<const double> a, std::span<const double> b);

// 1 - 6*sum(d^2)/(n(n^2-1)) applied to the given values as ranks, with no tie
// correction. Equal to srcc when both inputs are tie-free permutations of 1..n.
double srcc_uncorrected(std::span<const double> ranks_a, std::span<const double> ranks_b);

inline constexpr std::size_t kSubjectiveLevels = 7;

// Winner-take-all label from a per-candidate bin histogram (index 0 = "A").
// When the runner-up count is within 10% of the winner count, both labels are
// reported best-first, e.g. "B/C".
std::string label_from_histogram(std::span<const std::size_t> counts);

// scores[c][s]: score of candidate c by subject s, in 1..7 (1 = excellent).
// All scores are standardized together, the standardized range is split into
// seven equal bins A..G, and each candidate is labeled from its histogram.
std::vector<std::string> bin_subjective_scores(const std::vector<std::vector<double>>& scores);

}  // namespace panqa
