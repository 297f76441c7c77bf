#include "panqa/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "panqa/error.hpp"
#include "panqa/parallel.hpp"

namespace panqa {

namespace {

template <typename F>
auto in_stage(const std::string& stage, const std::string& candidate, F&& f) {
  try {
    return f();
  } catch (const NumericError& e) {
    throw NumericError(stage + " failed for candidate '" + candidate + "': " + e.what());
  } catch (const InputError& e) {
    throw InputError(stage + " failed for candidate '" + candidate + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

EvalReport evaluate_candidate(const MultibandImage& reference, const LabelMapStack& reference_stack,
                              const MultibandImage& candidate, const std::string& candidate_id,
                              const EvalOptions& options) {
  if (!reference.same_shape(candidate)) {
    throw InputError("candidate '" + candidate_id + "' does not match the reference shape");
  }
  EvalReport r;
  QiRecord& q = r.record;
  q.candidate_id = candidate_id;

  const SummaryCosts c1 = summary_costs(reference, candidate, options.gl);
  q.category1 = {c1.mean, c1.std, c1.skewness, c1.kurtosis, c1.entropy};

  const LabelMapStack stack = quantize_spectral(candidate);
  q.category2.post_class_change =
      static_cast<double>(post_classification_change_count(reference_stack, stack, options.change_level));
  if (options.include_inverse_pcc) q.category2.inverse_pcc = inverse_pcc_cost(reference, candidate);

  const Glcm3Features g = glcm3_image_cost(reference, candidate, options.gl, options.rings);
  q.category3 = {g.contrast, g.energy, g.lne, cross_aura_cost(reference_stack, stack)};
  q.category4.binary_contour = binary_contour_cost(reference_stack, stack);

  r.sam_degrees = sam_mean(reference, candidate);
  r.ergas = ergas(reference, candidate, options.ratio, options.ergas_factor);
  r.ergas_good = ergas_is_good(r.ergas);
  if (reference.bands() == 4) r.q4 = q4(reference, candidate, BlockSpec{options.block_size});
  return r;
}

EvalReport evaluate_candidate(const MultibandImage& reference, const MultibandImage& candidate,
                              const std::string& candidate_id, const EvalOptions& options) {
  return evaluate_candidate(reference, quantize_spectral(reference), candidate, candidate_id, options);
}

nlohmann::json to_json(const EvalReport& r) {
  const QiRecord& q = r.record;
  nlohmann::json j;
  j["candidate_id"] = q.candidate_id;
  j["category1"] = {{"MeanUnvrt", q.category1.mean},
                    {"StDvUnvrt", q.category1.std},
                    {"SkwnsUnvrt", q.category1.skewness},
                    {"KrtsUnvrt", q.category1.kurtosis},
                    {"EntrpyUnvrt", q.category1.entropy}};
  j["category2"] = {{"PostClChngDtctnMvrt", q.category2.post_class_change}};
  j["category2"]["InvrCrltnBivrt"] =
      q.category2.inverse_pcc ? nlohmann::json(*q.category2.inverse_pcc) : nlohmann::json(nullptr);
  j["category3"] = {{"3ordrCntrstUnvrt", q.category3.glcm_contrast},
                    {"3ordrEnrgyUnvrt", q.category3.glcm_energy},
                    {"3ordrLneUnvrt", q.category3.glcm_lne},
                    {"CntourXauraMvrt", q.category3.cross_aura}};
  j["category4"] = {{"BinaryCntourMvrt", q.category4.binary_contour}};
  j["sam_degrees"] = r.sam_degrees;
  j["ergas"] = r.ergas;
  j["ergas_good"] = r.ergas_good;
  j["q4"] = r.q4 ? nlohmann::json(*r.q4) : nlohmann::json(nullptr);
  return j;
}

ProcessMetadata read_process_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    ProcessMetadata m;
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.declared_free_parameters = j.at("declared_free_parameters").get<int>();
    m.method = j.value("method", "");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "wall_seconds" && it.key() != "declared_free_parameters" && it.key() != "method") {
        m.extra[it.key()] = it.value();
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed process metadata " + path.string() + ": " + e.what());
  }
}

void write_process_metadata(const ProcessMetadata& meta, const std::filesystem::path& path) {
  nlohmann::json j = meta.extra.is_object() ? meta.extra : nlohmann::json::object();
  j["method"] = meta.method;
  j["wall_seconds"] = meta.wall_seconds;
  j["declared_free_parameters"] = meta.declared_free_parameters;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void RunManifest::validate() const {
  if (candidates.size() < 2) throw InputError("manifest: at least two candidates are required");
  std::set<std::string> ids;
  for (const auto& c : candidates) {
    if (c.id.empty()) throw InputError("manifest: empty candidate id");
    if (!ids.insert(c.id).second) throw InputError("manifest: duplicate candidate id '" + c.id + "'");
    if (c.n_free_parameters < 1) throw InputError("manifest: n_free_parameters must be >= 1 for '" + c.id + "'");
    if (!(c.wall_seconds >= 0.0)) throw InputError("manifest: wall_seconds must be >= 0 for '" + c.id + "'");
  }
  if (options.ratio < 1) throw InputError("manifest: ratio must be >= 1");
  BlockSpec{options.block_size}.validate();
  options.rings.validate();
  if (options.gl < 2) throw InputError("manifest: gl must be >= 2");
}

RunManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunManifest m;
  try {
    m.reference = resolve(base_dir, j.at("reference").get<std::string>());
    m.options.ratio = j.value("ratio", 4);
    if (j.contains("options")) {
      const auto& o = j["options"];
      if (o.contains("ergas_factor") && !o["ergas_factor"].is_null()) {
        m.options.ergas_factor = o["ergas_factor"].get<double>();
      }
      m.options.block_size = o.value("block_size", m.options.block_size);
      m.options.gl = o.value("gl", m.options.gl);
      if (o.contains("radii")) m.options.rings.radii = o["radii"].get<std::vector<int>>();
      if (o.contains("change_level")) {
        m.options.change_level = quantization_level_from_string(o["change_level"].get<std::string>());
      }
      if (o.contains("category2_case")) {
        const auto c = o["category2_case"].get<std::string>();
        if (c == "with_ipcc") {
          m.options.include_inverse_pcc = true;
        } else if (c == "without_ipcc") {
          m.options.include_inverse_pcc = false;
        } else {
          throw InputError("manifest: category2_case must be with_ipcc or without_ipcc");
        }
      }
    }
    for (const auto& c : j.at("candidates")) {
      ManifestCandidate mc;
      mc.id = c.at("id").get<std::string>();
      mc.image = resolve(base_dir, c.at("image").get<std::string>());
      mc.method = c.value("method", "");
      if (c.contains("process")) {
        const ProcessMetadata p = read_process_metadata(resolve(base_dir, c["process"].get<std::string>()));
        mc.wall_seconds = p.wall_seconds;
        mc.n_free_parameters = p.declared_free_parameters;
        if (mc.method.empty()) mc.method = p.method;
      } else {
        mc.wall_seconds = c.at("wall_seconds").get<double>();
        mc.n_free_parameters = c.at("n_free_parameters").get<int>();
      }
      m.candidates.push_back(std::move(mc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  m.validate();
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed manifest " + path.string() + ": " + e.what());
  }
  return parse_manifest(j, path.parent_path());
}

PipelineResult run_pipeline(const RunManifest& manifest) {
  manifest.validate();
  const MultibandImage reference =
      in_stage("load", "reference", [&] { return load_image(manifest.reference); });
  const LabelMapStack reference_stack =
      in_stage("quantize", "reference", [&] { return quantize_spectral(reference); });

  std::vector<ManifestCandidate> candidates = manifest.candidates;
  std::sort(candidates.begin(), candidates.end(),
            [](const ManifestCandidate& a, const ManifestCandidate& b) { return a.id < b.id; });

  PipelineResult result;
  result.reports.resize(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    const auto& c = candidates[i];
    const MultibandImage img = in_stage("load", c.id, [&] { return load_image(c.image); });
    EvalReport r = in_stage("eval", c.id, [&] {
      return evaluate_candidate(reference, reference_stack, img, c.id, manifest.options);
    });
    r.record.process.wall_seconds = c.wall_seconds;
    r.record.process.n_free_parameters = c.n_free_parameters;
    result.reports[i] = std::move(r);
  });

  std::vector<QiRecord> records;
  for (const auto& r : result.reports) records.push_back(r.record);
  result.table = in_stage("rank", "all", [&] { return aggregate(records, true); });
  return result;
}

namespace {

std::string fmt6(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return fmt6(*v);
  } else {
    return std::to_string(*v);
  }
}

const std::vector<std::string> kCsvColumns{
    "candidate_id",         "SPCTRL_sum",     "PDPR_SPCTRL",       "SPCTRL_SPTL1_i_sum",
    "PDPR_SPCTRL_SPTL1_i",  "SPCTRL_SPTL1_ii_sum", "PDPR_SPCTRL_SPTL1_ii", "SPCTRL_SPTL2_sum",
    "PDPR_SPCTRL_SPTL2",    "SPCTRL_SPTL1_SPTL2_sum", "PDPR_SPCTRL_SPTL1_SPTL2", "PSPR1_time",
    "PSPR2_free_params",    "sum_A",          "PDFR_A",            "sum_C",
    "PDFR_C",               "sum_B",          "PPFR_B",            "sum_D",
    "PPFR_D"};

}  // namespace

void write_ranks_csv(const RankTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const RankRow& r : table.rows) {
    const auto& p = r.partial;
    auto sum = [&](std::size_t k) { return r.category_sums ? fmt6((*r.category_sums)[k]) : std::string(); };
    out << p.candidate_id << ',' << sum(0) << ',' << p.spectral << ',' << sum(1) << ',' << p.spectral_spatial1_i
        << ',' << sum(2) << ',' << p.spectral_spatial1_ii << ',' << sum(3) << ',' << p.spectral_spatial2 << ','
        << sum(4) << ',' << p.spectral_spatial12 << ',' << opt(p.process_time) << ','
        << opt(p.process_free_parameters) << ',' << r.sum_a << ',' << r.pdfr_a << ',' << r.sum_c << ','
        << r.pdfr_c << ',' << opt(r.sum_b) << ',' << opt(r.ppfr_b) << ',' << opt(r.sum_d) << ','
        << opt(r.ppfr_d) << '\n';
  }
}

nlohmann::json pipeline_report(const PipelineResult& result) {
  std::vector<QiRecord> records;
  for (const auto& r : result.reports) records.push_back(r.record);

  // z-scores per cost column, keyed by column name.
  nlohmann::json zscores = nlohmann::json::object();
  for (Category cat : {Category::spectral, Category::spectral_spatial1, Category::spectral_spatial2,
                       Category::spectral_spatial12}) {
    for (const CostColumn& col : category_columns(records, cat, Category2Case::with_ipcc)) {
      try {
        zscores[col.name] = zscore(col.values);
      } catch (const NumericError&) {
        zscores[col.name] = nullptr;
      }
    }
  }

  nlohmann::json j;
  j["warnings"] = result.table.warnings;
  j["candidates"] = nlohmann::json::array();
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    nlohmann::json c = to_json(result.reports[i]);
    const QiRecord& q = result.reports[i].record;
    c["process"] = {{"wall_seconds", q.process.wall_seconds}, {"n_free_parameters", q.process.n_free_parameters}};
    nlohmann::json z = nlohmann::json::object();
    for (auto it = zscores.begin(); it != zscores.end(); ++it) {
      z[it.key()] = it.value().is_null() ? nlohmann::json(nullptr) : it.value()[i];
    }
    c["zscores"] = z;
    const RankRow& r = result.table.rows[i];
    if (r.category_sums) {
      const auto& s = *r.category_sums;
      c["category_sums"] = {{"SPCTRL", s[0]},
                            {"SPCTRL_SPTL1_i", s[1]},
                            {"SPCTRL_SPTL1_ii", s[2]},
                            {"SPCTRL_SPTL2", s[3]},
                            {"SPCTRL_SPTL1_SPTL2", s[4]}};
    }
    const auto& p = r.partial;
    nlohmann::json ranks = {{"PDPR_SPCTRL", p.spectral},
                            {"PDPR_SPCTRL_SPTL1_i", p.spectral_spatial1_i},
                            {"PDPR_SPCTRL_SPTL1_ii", p.spectral_spatial1_ii},
                            {"PDPR_SPCTRL_SPTL2", p.spectral_spatial2},
                            {"PDPR_SPCTRL_SPTL1_SPTL2", p.spectral_spatial12},
                            {"sum_A", r.sum_a},
                            {"PDFR_A", r.pdfr_a},
                            {"sum_C", r.sum_c},
                            {"PDFR_C", r.pdfr_c}};
    if (r.ppfr_b) {
      ranks["PSPR1_time"] = *p.process_time;
      ranks["PSPR2_free_params"] = *p.process_free_parameters;
      ranks["sum_B"] = *r.sum_b;
      ranks["PPFR_B"] = *r.ppfr_b;
      ranks["sum_D"] = *r.sum_d;
      ranks["PPFR_D"] = *r.ppfr_d;
    }
    c["ranks"] = ranks;
    j["candidates"].push_back(c);
  }
  return j;
}

std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw InputError("column '" + column + "' not found in " + path.string());
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (idx >= cells.size() || cells[idx].empty()) {
      throw InputError("missing value in column '" + column + "' of " + path.string());
    }
    try {
      values.push_back(std::stod(cells[idx]));
    } catch (const std::exception&) {
      throw InputError("non-numeric value '" + cells[idx] + "' in column '" + column + "'");
    }
  }
  return values;
}

}  // namespace panqa
