#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "panqa/glcm3.hpp"
#include "panqa/metrics_spectral.hpp"
#include "panqa/protocol.hpp"
#include "panqa/quantizer.hpp"
#include "panqa/raster.hpp"

namespace panqa {

struct EvalOptions {
  int ratio = 4;
  std::optional<double> ergas_factor;
  std::size_t block_size = kDefaultBlockSize;
  std::size_t gl = kDefaultGrayLevels;
  RingSpec rings{};
  QuantizationLevel change_level = QuantizationLevel::coarse;
  // When false the inverse-correlation cost is not computed at all, so
  // category 2 reduces to the post-classification change in every case.
  bool include_inverse_pcc = true;
};

// Product costs of one candidate against the reference, plus the classic
// comparison metrics reported alongside them.
struct EvalReport {
  QiRecord record;  // process fields left at their defaults
  double sam_degrees = 0.0;
  double ergas = 0.0;
  bool ergas_good = false;
  std::optional<double> q4;
};

EvalReport evaluate_candidate(const MultibandImage& reference, const LabelMapStack& reference_stack,
                              const MultibandImage& candidate, const std::string& candidate_id,
                              const EvalOptions& options);

EvalReport evaluate_candidate(const MultibandImage& reference, const MultibandImage& candidate,
                              const std::string& candidate_id, const EvalOptions& options);

nlohmann::json to_json(const EvalReport& report);

struct ProcessMetadata {
  double wall_seconds = 0.0;
  int declared_free_parameters = 1;
  std::string method;
  nlohmann::json extra;  // everything else found in the file
};

ProcessMetadata read_process_metadata(const std::filesystem::path& path);
void write_process_metadata(const ProcessMetadata& meta, const std::filesystem::path& path);

struct ManifestCandidate {
  std::string id;
  std::filesystem::path image;
  std::string method;
  double wall_seconds = 0.0;
  int n_free_parameters = 1;
};

struct RunManifest {
  std::filesystem::path reference;
  std::vector<ManifestCandidate> candidates;
  EvalOptions options;

  void validate() const;
};

// Relative paths are resolved against `base_dir`. A candidate may give its
// process costs inline (wall_seconds, n_free_parameters) or via a
// "process" entry naming a process-metadata JSON written by `fuse`.
RunManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunManifest load_manifest(const std::filesystem::path& path);

struct PipelineResult {
  std::vector<EvalReport> reports;  // sorted by candidate id
  RankTable table;                  // rows in the same order
};

// Thrown with the failing stage and candidate in the message; the original
// exception type (InputError / NumericError) is preserved.
PipelineResult run_pipeline(const RunManifest& manifest);

void write_ranks_csv(const RankTable& table, std::ostream& out);
nlohmann::json pipeline_report(const PipelineResult& result);

// Reads a named numeric column from a CSV written by write_ranks_csv (or any
// CSV with a header row).
std::vector<double> read_csv_column(const std::filesystem::path& path, const std::string& column);

}  // namespace panqa
