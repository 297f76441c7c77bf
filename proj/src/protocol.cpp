#include "panqa/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "panqa/error.hpp"

namespace panqa {

void QiRecord::validate() const {
  const std::vector<double> costs{category1.mean,        category1.std,           category1.skewness,
                                  category1.kurtosis,    category1.entropy,       category2.post_class_change,
                                  category3.glcm_contrast, category3.glcm_energy, category3.glcm_lne,
                                  category3.cross_aura,  category4.binary_contour, process.wall_seconds};
  for (double c : costs) {
    if (!std::isfinite(c)) throw InputError("QI record '" + candidate_id + "': non-finite cost");
    if (c < 0.0) throw InputError("QI record '" + candidate_id + "': negative cost");
  }
  if (category2.inverse_pcc && (!std::isfinite(*category2.inverse_pcc) || *category2.inverse_pcc < 0.0)) {
    throw InputError("QI record '" + candidate_id + "': invalid inverse PCC cost");
  }
  if (process.n_free_parameters < 1) {
    throw InputError("QI record '" + candidate_id + "': n_free_parameters must be >= 1");
  }
}

std::vector<double> zscore(std::span<const double> values) {
  if (values.size() < 2) throw NumericError("zscore: at least two values are required");
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / n);
  if (!(sigma > 0.0)) throw NumericError("degenerate QI: zero variance across candidates");
  std::vector<double> z(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sigma;
  return z;
}

std::vector<int> rank(std::span<const double> values, bool lower_is_better, RankMethod method) {
  std::vector<double> key(values.begin(), values.end());
  if (!lower_is_better) {
    for (double& k : key) k = -k;
  }
  std::vector<double> sorted = key;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (method == RankMethod::competition) {
      out[i] = 1 + static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), key[i]) - sorted.begin());
    } else {
      out[i] = 1 + static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), key[i]) - distinct.begin());
    }
  }
  return out;
}

std::vector<CostColumn> category_columns(std::span<const QiRecord> records, Category category,
                                         Category2Case c2) {
  auto column = [&](std::string name, auto get) {
    CostColumn c{std::move(name), {}};
    for (const auto& r : records) c.values.push_back(get(r));
    return c;
  };
  std::vector<CostColumn> cols;
  switch (category) {
    case Category::spectral:
      cols.push_back(column("MeanUnvrt", [](const QiRecord& r) { return r.category1.mean; }));
      cols.push_back(column("StDvUnvrt", [](const QiRecord& r) { return r.category1.std; }));
      cols.push_back(column("SkwnsUnvrt", [](const QiRecord& r) { return r.category1.skewness; }));
      cols.push_back(column("KrtsUnvrt", [](const QiRecord& r) { return r.category1.kurtosis; }));
      cols.push_back(column("EntrpyUnvrt", [](const QiRecord& r) { return r.category1.entropy; }));
      break;
    case Category::spectral_spatial1: {
      cols.push_back(column("PostClChngDtctnMvrt", [](const QiRecord& r) { return r.category2.post_class_change; }));
      if (c2 == Category2Case::with_ipcc) {
        const auto with = std::count_if(records.begin(), records.end(),
                                        [](const QiRecord& r) { return r.category2.inverse_pcc.has_value(); });
        if (with != 0 && static_cast<std::size_t>(with) != records.size()) {
          throw InputError("category 2: inverse PCC cost must be present for all candidates or none");
        }
        if (with != 0) {
          cols.push_back(column("InvrCrltnBivrt", [](const QiRecord& r) { return *r.category2.inverse_pcc; }));
        }
      }
      break;
    }
    case Category::spectral_spatial2:
      cols.push_back(column("3ordrCntrstUnvrt", [](const QiRecord& r) { return r.category3.glcm_contrast; }));
      cols.push_back(column("3ordrEnrgyUnvrt", [](const QiRecord& r) { return r.category3.glcm_energy; }));
      cols.push_back(column("3ordrLneUnvrt", [](const QiRecord& r) { return r.category3.glcm_lne; }));
      cols.push_back(column("CntourXauraMvrt", [](const QiRecord& r) { return r.category3.cross_aura; }));
      break;
    case Category::spectral_spatial12:
      cols.push_back(column("BinaryCntourMvrt", [](const QiRecord& r) { return r.category4.binary_contour; }));
      break;
  }
  return cols;
}

CategorySum category_sum(std::span<const QiRecord> records, Category category, Category2Case c2) {
  if (records.size() < 2) throw InputError("category_sum: at least two candidates are required");
  CategorySum out{std::vector<double>(records.size(), 0.0), {}};
  for (const CostColumn& col : category_columns(records, category, c2)) {
    std::vector<double> z;
    try {
      z = zscore(col.values);
    } catch (const NumericError&) {
      out.dropped.push_back(col.name);
      continue;
    }
    for (std::size_t i = 0; i < z.size(); ++i) out.sums[i] += z[i];
  }
  return out;
}

RankTable aggregate_partial_ranks(std::span<const PartialRanks> partial) {
  if (partial.size() < 2) throw InputError("aggregate: at least two candidates are required");
  const bool process = std::all_of(partial.begin(), partial.end(), [](const PartialRanks& p) {
    return p.process_time.has_value() && p.process_free_parameters.has_value();
  });

  RankTable t;
  std::vector<double> a, c, b, d;
  for (const PartialRanks& p : partial) {
    RankRow row;
    row.partial = p;
    row.sum_a = p.spectral + p.spectral_spatial1_i + p.spectral_spatial2 + p.spectral_spatial12;
    row.sum_c = p.spectral + p.spectral_spatial1_ii + p.spectral_spatial2 + p.spectral_spatial12;
    a.push_back(row.sum_a);
    c.push_back(row.sum_c);
    if (process) {
      const int proc = *p.process_time + *p.process_free_parameters;
      row.sum_b = row.sum_a + proc;
      row.sum_d = row.sum_c + proc;
      b.push_back(*row.sum_b);
      d.push_back(*row.sum_d);
    }
    t.rows.push_back(std::move(row));
  }
  const auto ra = rank(a);
  const auto rc = rank(c);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    t.rows[i].pdfr_a = ra[i];
    t.rows[i].pdfr_c = rc[i];
  }
  if (process) {
    const auto rb = rank(b);
    const auto rd = rank(d);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      t.rows[i].ppfr_b = rb[i];
      t.rows[i].ppfr_d = rd[i];
    }
  }
  return t;
}

RankTable aggregate(std::span<const QiRecord> records, bool include_process) {
  if (records.size() < 2) throw InputError("aggregate: at least two candidates are required");
  for (const auto& r : records) r.validate();

  std::vector<std::string> warnings;
  auto sums = [&](Category cat, Category2Case c2, const char* label) {
    CategorySum s = category_sum(records, cat, c2);
    for (const auto& name : s.dropped) {
      warnings.push_back(std::string("degenerate QI ") + name + " dropped from " + label);
    }
    return s.sums;
  };
  const auto s1 = sums(Category::spectral, Category2Case::with_ipcc, "SPCTRL");
  const auto s2i = sums(Category::spectral_spatial1, Category2Case::with_ipcc, "SPCTRL&SPTL1 case (i)");
  const auto s2ii = sums(Category::spectral_spatial1, Category2Case::without_ipcc, "SPCTRL&SPTL1 case (ii)");
  const auto s3 = sums(Category::spectral_spatial2, Category2Case::with_ipcc, "SPCTRL&SPTL2");
  const auto s4 = sums(Category::spectral_spatial12, Category2Case::with_ipcc, "SPCTRL&SPTL1&SPTL2");
  const auto r1 = rank(s1), r2i = rank(s2i), r2ii = rank(s2ii), r3 = rank(s3), r4 = rank(s4);

  std::vector<double> time, params;
  for (const auto& r : records) {
    time.push_back(r.process.wall_seconds);
    params.push_back(r.process.n_free_parameters);
  }
  const auto pt = rank(time, true, RankMethod::competition);
  const auto pp = rank(params, true, RankMethod::dense);

  std::vector<PartialRanks> partial;
  for (std::size_t i = 0; i < records.size(); ++i) {
    PartialRanks p{records[i].candidate_id, r1[i], r2i[i], r2ii[i], r3[i], r4[i], std::nullopt, std::nullopt};
    if (include_process) {
      p.process_time = pt[i];
      p.process_free_parameters = pp[i];
    }
    partial.push_back(std::move(p));
  }
  RankTable t = aggregate_partial_ranks(partial);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    t.rows[i].category_sums = std::array<double, 5>{s1[i], s2i[i], s2ii[i], s3[i], s4[i]};
  }
  t.warnings = std::move(warnings);
  return t;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // Positions start..end-1 hold 1-based ranks start+1..end; their average:
    const double avg = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = avg;
    start = end;
  }
  return ranks;
}

double srcc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("srcc: length mismatch");
  if (a.size() < 2) throw InputError("srcc: at least two observations are required");
  const auto ra = fractional_ranks(a);
  const auto rb = fractional_ranks(b);
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw NumericError("srcc: zero rank variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double srcc_uncorrected(std::span<const double> ranks_a, std::span<const double> ranks_b) {
  if (ranks_a.size() != ranks_b.size()) throw InputError("srcc: length mismatch");
  if (ranks_a.size() < 2) throw InputError("srcc: at least two observations are required");
  double d2 = 0.0;
  for (std::size_t i = 0; i < ranks_a.size(); ++i) d2 += (ranks_a[i] - ranks_b[i]) * (ranks_a[i] - ranks_b[i]);
  const auto n = static_cast<double>(ranks_a.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

std::string label_from_histogram(std::span<const std::size_t> counts) {
  if (counts.size() != kSubjectiveLevels) throw InputError("histogram must have 7 bins");
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return counts[i] > counts[j]; });
  const std::size_t first = counts[order[0]];
  const std::size_t second = counts[order[1]];
  if (first == 0) throw InputError("histogram is empty");
  std::string label(1, static_cast<char>('A' + order[0]));
  if (second > 0 && 10 * (first - second) < first) {
    label += '/';
    label += static_cast<char>('A' + order[1]);
  }
  return label;
}

std::vector<std::string> bin_subjective_scores(const std::vector<std::vector<double>>& scores) {
  if (scores.empty()) throw InputError("subjective scores: no candidates");
  const std::size_t subjects = scores.front().size();
  if (subjects < 2) throw InputError("subjective scores: at least two subjects are required");
  std::vector<double> flat;
  for (const auto& row : scores) {
    if (row.size() != subjects) throw InputError("subjective scores: ragged matrix");
    for (double s : row) {
      if (!(s >= 1.0 && s <= 7.0)) throw InputError("subjective scores must lie in 1..7");
      flat.push_back(s);
    }
  }
  std::vector<double> z;
  try {
    z = zscore(flat);
  } catch (const NumericError&) {
    throw NumericError("subjective scores: degenerate (all equal) distribution");
  }
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const double zmin = *lo;
  const double width = (*hi - zmin) / static_cast<double>(kSubjectiveLevels);

  std::vector<std::string> labels;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    std::vector<std::size_t> hist(kSubjectiveLevels, 0);
    for (std::size_t s = 0; s < subjects; ++s) {
      const double v = z[c * subjects + s];
      auto bin = static_cast<std::size_t>(std::floor((v - zmin) / width));
      ++hist[std::min(bin, kSubjectiveLevels - 1)];
    }
    labels.push_back(label_from_histogram(hist));
  }
  return labels;
}

}  // namespace panqa
