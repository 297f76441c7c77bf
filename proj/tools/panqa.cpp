// panqa: command-line front end for the quality-assessment library.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "panqa/error.hpp"
#include "panqa/fusion.hpp"
#include "panqa/glcm3.hpp"
#include "panqa/metrics_spectral.hpp"
#include "panqa/pipeline.hpp"
#include "panqa/protocol.hpp"
#include "panqa/quantizer.hpp"
#include "panqa/raster.hpp"
#include "panqa/resample.hpp"
#include "panqa/synth.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw panqa::InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw panqa::InputError("missing file: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw panqa::InputError("empty CSV: " + path.string());
  return rows;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw panqa::InputError("non-numeric " + what + ": '" + s + "'");
  }
}

std::vector<int> parse_radii(const std::string& s) {
  std::vector<int> radii;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) radii.push_back(static_cast<int>(to_number(item, "radius")));
  return radii;
}

// Partial-rank CSV: candidate_id plus the five PDPR columns, optionally the
// two PSPR columns.
std::vector<panqa::PartialRanks> read_partial_ranks(const fs::path& path) {
  const auto rows = read_csv(path);
  const auto& header = rows.front();
  auto col = [&](const std::string& name, bool required) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      if (required) throw panqa::InputError("column '" + name + "' not found in " + path.string());
      return -1;
    }
    return it - header.begin();
  };
  const auto id = col("candidate_id", true);
  const std::array<std::ptrdiff_t, 5> pd{col("PDPR_SPCTRL", true), col("PDPR_SPCTRL_SPTL1_i", true),
                                         col("PDPR_SPCTRL_SPTL1_ii", true), col("PDPR_SPCTRL_SPTL2", true),
                                         col("PDPR_SPCTRL_SPTL1_SPTL2", true)};
  const auto time = col("PSPR1_time", false);
  const auto params = col("PSPR2_free_params", false);
  std::vector<panqa::PartialRanks> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](std::ptrdiff_t c) -> const std::string& {
      if (c < 0 || static_cast<std::size_t>(c) >= row.size()) {
        throw panqa::InputError("short row " + std::to_string(r) + " in " + path.string());
      }
      return row[static_cast<std::size_t>(c)];
    };
    panqa::PartialRanks p;
    p.candidate_id = cell(id);
    p.spectral = static_cast<int>(to_number(cell(pd[0]), "rank"));
    p.spectral_spatial1_i = static_cast<int>(to_number(cell(pd[1]), "rank"));
    p.spectral_spatial1_ii = static_cast<int>(to_number(cell(pd[2]), "rank"));
    p.spectral_spatial2 = static_cast<int>(to_number(cell(pd[3]), "rank"));
    p.spectral_spatial12 = static_cast<int>(to_number(cell(pd[4]), "rank"));
    if (time >= 0 && params >= 0) {
      p.process_time = static_cast<int>(to_number(cell(time), "rank"));
      p.process_free_parameters = static_cast<int>(to_number(cell(params), "rank"));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panqa: pansharpening quality assessment"};
  app.require_subcommand(1);

  // synth
  std::uint64_t seed = 1;
  std::size_t width = 256, height = 256;
  std::string synth_ms, synth_pan;
  auto* synth = app.add_subcommand("synth", "Generate a deterministic 4-band scene and its PAN band");
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--width", width, "Width (multiple of 4)");
  synth->add_option("--height", height, "Height (multiple of 4)");
  synth->add_option("--ms", synth_ms, "Output MS image")->required();
  synth->add_option("--pan", synth_pan, "Output PAN image")->required();

  // degrade
  std::string deg_in, deg_out, deg_kernel = "gaussian";
  int deg_ratio = 4;
  double deg_gain = panqa::kDefaultMsMtfGain;
  auto* degrade = app.add_subcommand("degrade", "MTF low-pass filter and decimate");
  degrade->add_option("--input", deg_in, "Input image")->required();
  degrade->add_option("--ratio", deg_ratio, "Decimation ratio");
  degrade->add_option("--mtf-gain", deg_gain, "Filter response at the low-resolution Nyquist frequency");
  degrade->add_option("--kernel", deg_kernel, "gaussian|box")->check(CLI::IsMember({"gaussian", "box"}));
  degrade->add_option("--out", deg_out, "Output image")->required();

  // fuse
  std::string fuse_method = "pca", fuse_ms, fuse_pan, fuse_resample = "bilinear", fuse_out, fuse_process;
  int fuse_levels = 2;
  int fuse_free = 0;
  bool fuse_no_clip = false;
  auto* fuse = app.add_subcommand("fuse", "Pansharpen an MS image with a PAN band");
  fuse->add_option("--method", fuse_method, "pca|cn|atwt")->check(CLI::IsMember({"pca", "cn", "atwt"}));
  fuse->add_option("--ms", fuse_ms, "Low-resolution MS image")->required();
  fuse->add_option("--pan", fuse_pan, "High-resolution PAN image")->required();
  fuse->add_option("--resample", fuse_resample, "nearest|bilinear|bicubic");
  fuse->add_option("--levels", fuse_levels, "Wavelet levels (atwt)");
  fuse->add_option("--free-params", fuse_free, "Declared free parameters (default depends on method)");
  fuse->add_option("--out", fuse_out, "Output image")->required();
  fuse->add_flag("--no-clip", fuse_no_clip, "Keep fused samples outside [0, 1]");
  fuse->add_option("--process", fuse_process, "Process metadata JSON (default <out>.process.json)");

  // eval
  std::string ev_ref, ev_cand, ev_out;
  int ev_ratio = 4;
  std::optional<double> ev_factor;
  std::size_t ev_gl = panqa::kDefaultGrayLevels, ev_block = panqa::kDefaultBlockSize;
  std::string ev_radii = "1,2,3";
  bool ev_no_ipcc = false;
  auto* eval = app.add_subcommand("eval", "Product costs of one candidate against a reference");
  eval->add_option("--reference", ev_ref, "Reference image")->required();
  eval->add_option("--candidate", ev_cand, "Candidate image")->required();
  eval->add_option("--ratio", ev_ratio, "PAN/MS scale ratio (ERGAS)");
  eval->add_option("--ergas-factor", ev_factor, "Override the ERGAS resolution factor");
  eval->add_option("--gl", ev_gl, "Gray levels");
  eval->add_option("--block-size", ev_block, "Q4 block size");
  eval->add_option("--radii", ev_radii, "GLCM ring radii, comma separated");
  eval->add_flag("--no-ipcc", ev_no_ipcc, "Skip the inverse-correlation cost");
  eval->add_option("--out", ev_out, "Output JSON")->required();

  // qnr
  std::string qnr_ms, qnr_pan, qnr_fused, qnr_out;
  double qnr_alpha = 1.0, qnr_beta = 1.0, qnr_pan_gain = panqa::kDefaultPanMtfGain;
  std::size_t qnr_block = panqa::kDefaultBlockSize;
  auto* qnr = app.add_subcommand("qnr", "No-reference quality of a fused product");
  qnr->add_option("--ms", qnr_ms, "Low-resolution MS image")->required();
  qnr->add_option("--pan", qnr_pan, "High-resolution PAN image")->required();
  qnr->add_option("--fused", qnr_fused, "Fused image")->required();
  qnr->add_option("--alpha", qnr_alpha, "Exponent of 1 - D_lambda");
  qnr->add_option("--beta", qnr_beta, "Exponent of 1 - D_s");
  qnr->add_option("--block-size", qnr_block, "Block size at low resolution");
  qnr->add_option("--pan-mtf-gain", qnr_pan_gain, "MTF gain used to degrade PAN");
  qnr->add_option("--out", qnr_out, "Output JSON")->required();

  // glcm3
  std::string gl_in, gl_out, gl_dump, gl_radii = "1,2,3";
  std::size_t gl_band = 0, gl_levels = panqa::kDefaultGrayLevels;
  auto* glcm3 = app.add_subcommand("glcm3", "Third-order multi-scale co-occurrence features of one band");
  glcm3->add_option("--input", gl_in, "Input image")->required();
  glcm3->add_option("--band", gl_band, "Band index (0-based)");
  glcm3->add_option("--gl", gl_levels, "Gray levels");
  glcm3->add_option("--radii", gl_radii, "Ring radii, comma separated");
  glcm3->add_option("--out", gl_out, "Output JSON")->required();
  glcm3->add_option("--dump-matrix", gl_dump, "Write nonzero cells as depth,row,col,count CSV");

  // quantize
  std::string q_in, q_out;
  auto* quantize = app.add_subcommand("quantize", "Three-level spectral label maps");
  quantize->add_option("--input", q_in, "Input image")->required();
  quantize->add_option("--out", q_out, "Output stack (u16 raster)")->required();

  // contours
  std::string c_a, c_b, c_out;
  auto* contours = app.add_subcommand("contours", "Contour and change costs between two label stacks");
  contours->add_option("--a", c_a, "First stack")->required();
  contours->add_option("--b", c_b, "Second stack")->required();
  contours->add_option("--out", c_out, "Output JSON")->required();

  // rank
  std::string r_manifest, r_partial, r_out_dir = ".";
  auto* rank = app.add_subcommand("rank", "Evaluate and rank the candidates of a run manifest");
  auto* r_manifest_opt = rank->add_option("--manifest", r_manifest, "Run manifest JSON");
  rank->add_option("--partial", r_partial, "Aggregate a CSV of partial ranks instead")
      ->excludes(r_manifest_opt);
  rank->add_option("--out-dir", r_out_dir, "Directory for ranks.csv and report.json");

  // srcc
  std::string s_table, s_a, s_b;
  bool s_uncorrected = false;
  auto* srcc = app.add_subcommand("srcc", "Spearman rank correlation between two CSV columns");
  srcc->add_option("--table", s_table, "CSV table")->required();
  srcc->add_option("--col-a", s_a, "First column")->required();
  srcc->add_option("--col-b", s_b, "Second column")->required();
  srcc->add_flag("--uncorrected", s_uncorrected, "Plain d^2 formula on the column values, no tie correction");

  // mos
  std::string m_scores, m_out;
  auto* mos = app.add_subcommand("mos", "Bin subjective scores into labels A..G");
  mos->add_option("--scores", m_scores, "CSV: candidate id, then one score column per subject")->required();
  mos->add_option("--out", m_out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      const auto scene = panqa::synthesize_scene(seed, width, height);
      panqa::save_image(scene.ms, synth_ms, panqa::SampleType::f32);
      panqa::save_image(scene.pan, synth_pan, panqa::SampleType::f32);
    } else if (*degrade) {
      const auto img = panqa::load_image(deg_in);
      const auto kernel =
          deg_kernel == "box" ? panqa::box_kernel(deg_ratio) : panqa::mtf_gaussian_kernel(deg_ratio, deg_gain);
      panqa::save_image(panqa::degrade(img, deg_ratio, kernel), deg_out, panqa::SampleType::f32);
    } else if (*fuse) {
      const auto ms = panqa::load_image(fuse_ms);
      const auto pan = panqa::load_image(fuse_pan);
      panqa::FusionConfig cfg;
      cfg.method = panqa::fusion_method_from_string(fuse_method);
      cfg.resampler = panqa::resampler_from_string(fuse_resample);
      cfg.wavelet_levels = fuse_levels;
      cfg.clip_to_unit = !fuse_no_clip;
      cfg.declared_free_parameters = fuse_free > 0 ? fuse_free : panqa::default_free_parameters(cfg.method);
      const auto t0 = std::chrono::steady_clock::now();
      const auto fused = panqa::pansharpen(ms, pan, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      panqa::save_image(fused, fuse_out, panqa::SampleType::f32);
      panqa::ProcessMetadata meta;
      meta.method = fuse_method;
      meta.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
      meta.declared_free_parameters = cfg.declared_free_parameters;
      meta.extra = {{"resampler", fuse_resample}, {"wavelet_levels", fuse_levels}, {"clipped", !fuse_no_clip}};
      const fs::path process_path = fuse_process.empty()
                                        ? fs::path(panqa::image_paths(fuse_out).header).replace_extension(".process.json")
                                        : fs::path(fuse_process);
      panqa::write_process_metadata(meta, process_path);
    } else if (*eval) {
      panqa::EvalOptions opts;
      opts.ratio = ev_ratio;
      opts.ergas_factor = ev_factor;
      opts.gl = ev_gl;
      opts.block_size = ev_block;
      opts.rings.radii = parse_radii(ev_radii);
      opts.rings.validate();
      opts.include_inverse_pcc = !ev_no_ipcc;
      const auto ref = panqa::load_image(ev_ref);
      const auto cand = panqa::load_image(ev_cand);
      const auto report = panqa::evaluate_candidate(ref, cand, fs::path(ev_cand).stem().string(), opts);
      write_json(panqa::to_json(report), ev_out);
    } else if (*qnr) {
      const auto ms = panqa::load_image(qnr_ms);
      const auto pan = panqa::load_image(qnr_pan);
      const auto fused = panqa::load_image(qnr_fused);
      if (ms.width() == 0 || fused.width() % ms.width() != 0) {
        throw panqa::InputError("qnr: fused width is not a multiple of the MS width");
      }
      const int ratio = static_cast<int>(fused.width() / ms.width());
      const auto pan_low = panqa::degrade(pan, ratio, panqa::mtf_gaussian_kernel(ratio, qnr_pan_gain));
      panqa::QnrParams params;
      params.alpha = qnr_alpha;
      params.beta = qnr_beta;
      params.blocks.block_size = qnr_block;
      const auto r = panqa::qnr(ms, fused, pan, pan_low, params);
      write_json({{"qnr", r.qnr}, {"d_lambda", r.d_lambda}, {"d_s", r.d_s}, {"ratio", ratio}}, qnr_out);
    } else if (*glcm3) {
      const auto img = panqa::load_image(gl_in);
      panqa::RingSpec rings{parse_radii(gl_radii)};
      rings.validate();
      const auto labels = panqa::quantize_gray_levels(img.band(gl_band), gl_levels);
      const auto m = panqa::tims_glcm(labels, gl_levels, rings);
      const auto f = panqa::glcm3_features(m);
      write_json({{"band", gl_band},
                  {"gl", gl_levels},
                  {"radii", rings.radii},
                  {"total_tuples", m.total_tuples()},
                  {"contrast", f.contrast},
                  {"energy", f.energy},
                  {"lne", f.lne}},
                 gl_out);
      if (!gl_dump.empty()) {
        std::ofstream out(gl_dump, std::ios::trunc);
        if (!out) throw panqa::InputError("cannot write " + gl_dump);
        out << "depth,row,col,count\n";
        for (const auto& c : m.cells()) out << c.depth << ',' << c.row << ',' << c.col << ',' << c.count << '\n';
      }
    } else if (*quantize) {
      panqa::save_stack(panqa::quantize_spectral(panqa::load_image(q_in)), q_out);
    } else if (*contours) {
      const auto a = panqa::load_stack(c_a);
      const auto b = panqa::load_stack(c_b);
      json j;
      j["binary_contour"] = panqa::binary_contour_cost(a, b);
      j["cross_aura"] = panqa::cross_aura_cost(a, b);
      j["cross_aura_mean_a"] = panqa::cross_aura(a).mean;
      j["cross_aura_mean_b"] = panqa::cross_aura(b).mean;
      for (auto level : {panqa::QuantizationLevel::fine, panqa::QuantizationLevel::intermediate,
                         panqa::QuantizationLevel::coarse}) {
        j["post_class_change"][panqa::to_string(level)] = panqa::post_classification_change_count(a, b, level);
      }
      write_json(j, c_out);
    } else if (*rank) {
      const fs::path dir(r_out_dir);
      fs::create_directories(dir);
      if (!r_partial.empty()) {
        const auto partial = read_partial_ranks(r_partial);
        const auto table = panqa::aggregate_partial_ranks(partial);
        std::ofstream csv(dir / "ranks.csv", std::ios::trunc);
        panqa::write_ranks_csv(table, csv);
      } else {
        if (r_manifest.empty()) throw panqa::InputError("rank: --manifest or --partial is required");
        const auto manifest = panqa::load_manifest(r_manifest);
        const auto result = panqa::run_pipeline(manifest);
        for (const auto& w : result.table.warnings) std::cerr << "warning: " << w << '\n';
        std::ofstream csv(dir / "ranks.csv", std::ios::trunc);
        if (!csv) throw panqa::InputError("cannot write " + (dir / "ranks.csv").string());
        panqa::write_ranks_csv(result.table, csv);
        write_json(panqa::pipeline_report(result), dir / "report.json");
      }
    } else if (*srcc) {
      const auto a = panqa::read_csv_column(s_table, s_a);
      const auto b = panqa::read_csv_column(s_table, s_b);
      const double r = s_uncorrected ? panqa::srcc_uncorrected(a, b) : panqa::srcc(a, b);
      std::cout << std::setprecision(6) << r << '\n';
    } else if (*mos) {
      const auto rows = read_csv(m_scores);
      std::vector<std::string> ids;
      std::vector<std::vector<double>> scores;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        ids.push_back(rows[r].front());
        std::vector<double> s;
        for (std::size_t c = 1; c < rows[r].size(); ++c) s.push_back(to_number(rows[r][c], "score"));
        scores.push_back(std::move(s));
      }
      const auto labels = panqa::bin_subjective_scores(scores);
      std::ostringstream out;
      out << "candidate_id,label\n";
      for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
      if (m_out.empty()) {
        std::cout << out.str();
      } else {
        std::ofstream f(m_out, std::ios::trunc);
        if (!f) throw panqa::InputError("cannot write " + m_out);
        f << out.str();
      }
    }
  } catch (const panqa::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const panqa::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
