// latent-lens: turn a manifest + embedding corpus into an interpreted 2-D
// expressiveness space: acoustic features, 2-D projection, per-feature
// plane fits with gradient arrows, affect probe, emotion codes, SVG figure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "latentlens/acoustics.hpp"
#include "latentlens/affect.hpp"
#include "latentlens/codes.hpp"
#include "latentlens/corpus.hpp"
#include "latentlens/interpret.hpp"
#include "latentlens/projection.hpp"
#include "latentlens/svg.hpp"
#include "latentlens/wav.hpp"

namespace ll = latentlens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitBadInput = 2;

int cmd_features(const std::string& manifest_path, const std::string& from_dir,
                 const std::string& speaker, const std::string& out_csv) {
  std::vector<ll::UtteranceRecord> records;
  try {
    if (!from_dir.empty()) {
      records = ll::scan_emov_tree(from_dir);
      if (!manifest_path.empty()) ll::write_manifest(manifest_path, records);
    } else {
      records = ll::parse_manifest(manifest_path);
    }
  } catch (const ll::Error& e) {
    std::cerr << "latent-lens: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (!speaker.empty())
    std::erase_if(records, [&](const auto& r) { return r.speaker != speaker; });
  if (records.empty()) {
    std::cerr << "latent-lens: no utterances to analyze\n";
    return kExitBadInput;
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  std::ofstream out(out_csv);
  if (!out) {
    std::cerr << "latent-lens: cannot write " << out_csv << '\n';
    return kExitBadInput;
  }
  out << ll::feature_csv_header() << '\n';
  std::size_t ok = 0;
  for (const auto& rec : records) {
    try {
      const ll::AudioBuffer buf = ll::load_wav(rec.wav_path);
      const ll::FeatureVector fv = ll::aggregate_features(buf);
      out << ll::feature_csv_row(rec.id, fv) << '\n';
      ++ok;
    } catch (const ll::Error& e) {
      std::cerr << "latent-lens: skipping " << rec.id << ": " << e.what() << '\n';
    }
  }
  if (ok == 0) {
    std::cerr << "latent-lens: feature extraction failed for every utterance\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_reduce(const std::string& embeddings_path, const std::string& method,
               std::size_t k, double min_dist, std::size_t epochs,
               std::optional<std::uint64_t> seed, bool zscore,
               const std::string& out_csv) {
  try {
    auto embeddings = ll::load_embeddings(embeddings_path);
    if (zscore && !embeddings.empty()) {
      const std::size_t d = embeddings.begin()->second.vector.size();
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col;
        for (const auto& [_, e] : embeddings) col.push_back(e.vector[j]);
        const double m = ll::mean(col), s = ll::stddev(col);
        for (auto& [_, e] : embeddings)
          e.vector[j] = s > 0.0 ? (e.vector[j] - m) / s : 0.0;
      }
    }
    ll::Projection2D proj;
    if (method == "pca") {
      proj = ll::pca_project(embeddings);
    } else if (method == "umap") {
      if (!seed) {
        std::cerr << "latent-lens: umap requires --seed (determinism is explicit)\n";
        return kExitBadInput;
      }
      proj = ll::umap_project(embeddings, k, min_dist, epochs, *seed);
    } else {
      std::cerr << "latent-lens: unknown method " << method << '\n';
      return kExitBadInput;
    }
    ll::write_projection_csv(out_csv, proj);
    ll::write_projection_provenance(out_csv + ".meta.json", method, k, min_dist,
                                    epochs, seed.value_or(0));
  } catch (const ll::Error& e) {
    std::cerr << "latent-lens: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_interpret(const std::string& projection_csv, const std::string& features_csv,
                  const std::string& out_report) {
  try {
    const ll::Projection2D proj = ll::read_projection_csv(projection_csv);
    const auto features = ll::read_feature_csv(features_csv);
    const ll::InterpretReport report = ll::interpret_features(proj, features);
    ll::write_report_csv(out_report, report);
  } catch (const ll::Error& e) {
    std::cerr << "latent-lens: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_render(const std::string& projection_csv, const std::string& manifest_path,
               const std::string& report_csv, std::size_t top_n,
               const std::string& out_svg) {
  try {
    const ll::Projection2D proj = ll::read_projection_csv(projection_csv);
    const auto records = ll::parse_manifest(manifest_path);
    std::map<std::string, ll::Emotion> emotions;
    for (const auto& rec : records) emotions[rec.id] = rec.emotion;
    const ll::InterpretReport report = ll::read_report_csv(report_csv);
    std::vector<ll::GradientArrow> arrows = report.arrows();
    if (arrows.size() > top_n) arrows.resize(top_n);  // report is r-sorted
    std::ofstream(out_svg) << ll::render_svg(proj, emotions, arrows);
  } catch (const ll::Error& e) {
    std::cerr << "latent-lens: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_codes(const std::string& code_text) {
  try {
    std::cout << ll::code_to_json(ll::parse_code(code_text)) << '\n';
  } catch (const ll::Error& e) {
    std::cerr << "latent-lens: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

int cmd_affect(const std::string& features_csv, const std::string& labels_path,
               const std::string& target_name, double lambda, std::size_t folds,
               std::uint64_t seed, const std::string& out_path) {
  try {
    const auto features = ll::read_feature_csv(features_csv);
    const auto labels = ll::load_affect_labels(labels_path);
    const ll::AffectTarget target = target_name == "valence"
                                        ? ll::AffectTarget::valence
                                        : ll::AffectTarget::arousal;
    const ll::AffectMetrics m =
        ll::evaluate_affect(features, labels, target, lambda, folds, seed);
    nlohmann::json obj;
    obj["target"] = target_name;
    obj["lambda"] = lambda;
    obj["folds"] = folds;
    obj["seed"] = seed;
    obj["pearson"] = m.pearson;
    obj["ccc"] = m.ccc;
    obj["rmse"] = m.rmse;
    if (out_path.empty())
      std::cout << obj.dump(2) << '\n';
    else
      std::ofstream(out_path) << obj.dump(2) << '\n';
  } catch (const ll::Error& e) {
    std::cerr << "latent-lens: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-lens: interpreted 2-D expressiveness space for speech corpora"};
  app.require_subcommand(1);

  // features
  std::string manifest, from_dir, speaker, out_csv;
  auto* features = app.add_subcommand("features", "Extract acoustic features to CSV");
  features->add_option("--manifest", manifest, "JSON-Lines corpus manifest");
  features->add_option("--from-dir", from_dir,
                       "Synthesize the manifest from an EmoV-DB-style directory tree");
  features->add_option("--speaker", speaker, "Only analyze this speaker");
  features->add_option("--out", out_csv, "Output feature CSV")->required();

  // reduce
  std::string embeddings_path, method = "umap", reduce_out;
  std::size_t k = 15, epochs = 200;
  double min_dist = 0.1;
  std::optional<std::uint64_t> seed;
  bool zscore = false;
  auto* reduce = app.add_subcommand("reduce", "Project embeddings to 2-D (pca or umap)");
  reduce->add_option("--embeddings", embeddings_path, "JSON-Lines embedding file")->required();
  reduce->add_option("--method", method, "pca or umap (default umap)");
  reduce->add_option("--k", k, "Neighborhood size (default 15)");
  reduce->add_option("--min-dist", min_dist, "UMAP min_dist (default 0.1)");
  reduce->add_option("--epochs", epochs, "Layout epochs (default 200)");
  reduce->add_option("--seed", seed, "PRNG seed, required for umap");
  reduce->add_flag("--zscore", zscore, "Z-score embedding dimensions first (default off)");
  reduce->add_option("--out", reduce_out, "Output projection CSV")->required();

  // interpret
  std::string proj_csv, feat_csv, report_out;
  auto* interpret = app.add_subcommand("interpret", "Fit per-feature planes over the projection");
  interpret->add_option("--projection", proj_csv, "Projection CSV from reduce")->required();
  interpret->add_option("--features", feat_csv, "Feature CSV from features")->required();
  interpret->add_option("--out", report_out, "Output report CSV")->required();

  // render
  std::string render_proj, render_manifest, render_report, svg_out;
  std::size_t top_n = 5;
  auto* render = app.add_subcommand("render", "Render the scatter + gradient-arrow SVG");
  render->add_option("--projection", render_proj, "Projection CSV")->required();
  render->add_option("--manifest", render_manifest, "Corpus manifest (for colors)")->required();
  render->add_option("--report", render_report, "Interpretation report CSV")->required();
  render->add_option("--top-n-arrows", top_n, "Arrows to draw, by descending r (default 5)");
  render->add_option("--out", svg_out, "Output SVG path")->required();

  // codes
  std::string code_text;
  auto* codes = app.add_subcommand("codes", "Validate and emit an emotion-intensity code");
  codes->add_option("--code", code_text,
                    "\"category:intensity\" or five comma-separated weights")->required();

  // affect
  std::string affect_features, affect_labels, affect_target = "valence", affect_out;
  double lambda = 1.0;
  std::size_t folds = 5;
  std::optional<std::uint64_t> affect_seed;
  auto* affect = app.add_subcommand("affect", "Cross-validated linear valence/arousal probe");
  affect->add_option("--features", affect_features, "Feature CSV")->required();
  affect->add_option("--labels", affect_labels, "JSON-Lines affect labels")->required();
  affect->add_option("--target", affect_target, "valence or arousal (default valence)");
  affect->add_option("--lambda", lambda, "Ridge coefficient (default 1.0)");
  affect->add_option("--folds", folds, "Cross-validation folds (default 5)");
  affect->add_option("--seed", affect_seed, "Fold-shuffle seed, required");
  affect->add_option("--out", affect_out, "Metrics JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  if (features->parsed()) {
    if (manifest.empty() && from_dir.empty()) {
      std::cerr << "latent-lens: features needs --manifest or --from-dir\n";
      return kExitBadInput;
    }
    return cmd_features(manifest, from_dir, speaker, out_csv);
  }
  if (reduce->parsed())
    return cmd_reduce(embeddings_path, method, k, min_dist, epochs, seed, zscore,
                      reduce_out);
  if (interpret->parsed()) return cmd_interpret(proj_csv, feat_csv, report_out);
  if (render->parsed())
    return cmd_render(render_proj, render_manifest, render_report, top_n, svg_out);
  if (codes->parsed()) return cmd_codes(code_text);
  if (affect->parsed()) {
    if (affect_target != "valence" && affect_target != "arousal") {
      std::cerr << "latent-lens: --target must be valence or arousal\n";
      return kExitBadInput;
    }
    if (!affect_seed) {
      std::cerr << "latent-lens: affect requires --seed (determinism is explicit)\n";
      return kExitBadInput;
    }
    return cmd_affect(affect_features, affect_labels, affect_target, lambda, folds,
                      *affect_seed, affect_out);
  }
  return kExitBadInput;
}
