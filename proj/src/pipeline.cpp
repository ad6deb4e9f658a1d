#include "forumnet/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "forumnet/heatmap.hpp"
#include "forumnet/parallel.hpp"
#include "forumnet/synth.hpp"

namespace forumnet {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string root) : root_(std::move(root)) {}

  bool enabled() const { return !root_.empty(); }

  template <class Fn>
  void write(const std::string& relative, Fn&& fill) {
    if (!enabled()) return;
    const fs::path path = fs::path(root_) / relative;
    fs::create_directories(path.parent_path());
    std::ostringstream buf;
    fill(buf);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
    out << buf.str();
    if (!out) throw RuntimeError("failed writing '" + path.string() + "'");
    files_.push_back(relative);
  }

  std::vector<std::string> files() const {
    auto f = files_;
    std::sort(f.begin(), f.end());
    return f;
  }

 private:
  std::string root_;
  std::vector<std::string> files_;
};

void write_bipartite(std::ostream& out, const BipartiteGraph& b) {
  out << "user,thread,posts\n";
  for (const auto& e : b.entries()) out << b.user_labels[e.user] << ',' << b.thread_labels[e.thread] << ',' << e.posts << '\n';
}

void write_window_csv(std::ostream& out, std::span<const WindowSlice> slices) {
  out << "label,start,end,posts,threads,users\n";
  for (const auto& w : slices) {
    const auto s = window_stats(w);
    out << w.label << ',' << format_timestamp(w.start) << ',' << format_timestamp(w.end) << ',' << s.posts << ','
        << s.threads << ',' << s.users << '\n';
  }
}

nlohmann::ordered_json mixing_json(const MixingMatrix& m) {
  nlohmann::ordered_json j;
  for (Sentiment t : {Sentiment::positive, Sentiment::neutral, Sentiment::negative})
    j[std::string(to_string(t))] = m.column(t);
  return j;
}

}  // namespace

std::vector<PostRecord> load_posts(const std::string& path, PostFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input '" + path + "'");
  return parse_posts(in, format);
}

ProjectionResult project_window(const WindowSlice& w, ProjectionMode mode) {
  const auto b = build_bipartite(w);
  return sparsify_threshold(project_users(b, mode));
}

DistanceMatrix compare_networks(std::span<const OrbitMatrix> networks, const std::vector<int>& orbit_ids,
                                ComparisonMode mode, double explained_variance, std::vector<std::string> labels,
                                unsigned workers) {
  const OrbitSet orbits(orbit_ids);
  if (mode == ComparisonMode::netemd) return netemd_matrix(networks, orbits, std::move(labels), workers);
  return pca_netemd_matrix(networks, orbits, explained_variance, std::move(labels), workers);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  auto posts = in_stage("ingest", [&] {
    if (!config.input.empty()) return load_posts(config.input, config.format);
    std::ifstream in(config.synth_script);
    if (!in) throw ValidationError("cannot open synth script '" + config.synth_script + "'");
    auto script = parse_regime_script(in);
    if (config.seed) script.seed = *config.seed;
    return generate_forum(script);
  });
  return run_pipeline(config, std::move(posts));
}

PipelineResult run_pipeline(const PipelineConfig& config, std::vector<PostRecord> posts) {
  config.validate();
  PipelineResult result;
  ArtifactWriter out(config.output);
  const auto format = config.format;

  result.posts = std::move(posts);
  in_stage("ingest", [&] {
    derive_threads(result.posts);
    out.write("posts" + std::string(format == PostFormat::csv ? ".csv" : ".jsonl"),
              [&](std::ostream& o) { write_posts(o, result.posts, format); });
    spdlog::info("ingest: {} posts", result.posts.size());
  });

  const auto slices = in_stage("windows", [&] {
    auto s = make_windows(result.posts, config.windows);
    if (s.size() < 2) throw ValidationError("window spec yields " + std::to_string(s.size()) + " windows; need at least 2");
    out.write("windows.csv", [&](std::ostream& o) { write_window_csv(o, s); });
    spdlog::info("windows: {}", s.size());
    return s;
  });

  const std::size_t n = slices.size();
  std::vector<std::string> labels;
  for (const auto& s : slices) labels.push_back(s.label);
  result.windows.resize(n);

  std::vector<ProjectionResult> projections(n);
  in_stage("projection", [&] {
    parallel_for(n, config.workers, [&](std::size_t i) {
      try {
        projections[i] = project_window(slices[i], config.projection);
      } catch (const ValidationError& e) {
        throw ValidationError("window " + slices[i].label + ": " + e.what());
      }
    });
    std::vector<ProjectionSummary> rows;
    for (std::size_t i = 0; i < n; ++i) {
      result.windows[i].label = slices[i].label;
      result.windows[i].stats = window_stats(slices[i]);
      result.windows[i].projection = summarize(slices[i].label, projections[i]);
      rows.push_back(result.windows[i].projection);
    }
    if (out.enabled()) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::string dir = "windows/" + slices[i].label + "/";
        const auto b = build_bipartite(slices[i]);
        out.write(dir + "bipartite.csv", [&](std::ostream& o) { write_bipartite(o, b); });
        out.write(dir + "projection.csv", [&](std::ostream& o) { write_edge_list(o, projections[i].weighted); });
        out.write(dir + "sparsified.csv", [&](std::ostream& o) { write_edge_list(o, projections[i].sparsified); });
      }
    }
    out.write("projection_summary.csv", [&](std::ostream& o) { write_projection_summary(o, rows); });
  });

  in_stage("orbits", [&] {
    parallel_for(n, config.workers, [&](std::size_t i) {
      result.windows[i].orbits = count_orbits(projections[i].sparsified, config.orbit_max_size, 1);
    });
    for (std::size_t i = 0; i < n; ++i)
      out.write("windows/" + slices[i].label + "/orbits.csv",
                [&](std::ostream& o) { write_orbit_csv(o, result.windows[i].orbits); });
  });

  in_stage("compare", [&] {
    std::vector<OrbitMatrix> matrices;
    for (const auto& w : result.windows) matrices.push_back(w.orbits);
    result.distances = compare_networks(matrices, config.orbit_ids(), config.comparison, config.explained_variance,
                                        labels, config.workers);
    out.write("distances.csv", [&](std::ostream& o) { write_distance_csv(o, result.distances); });
    const auto names = result.distances.feature_names();
    for (std::size_t f = 0; f < names.size(); ++f)
      out.write("distances_by_feature/" + names[f] + ".csv",
                [&](std::ostream& o) { write_feature_distance_csv(o, result.distances, f); });
    HeatmapOptions h = config.heatmap;
    if (h.title.empty()) h.title = to_string(config.comparison) + " distances";
    out.write("heatmap.svg", [&](std::ostream& o) { o << render_heatmap(result.distances, h); });
  });

  in_stage("detect", [&] {
    if (n < 3) {
      spdlog::warn("detect: fewer than 3 windows, no change flags");
      out.write("flags.json", [&](std::ostream& o) { write_flags_json(o, {}); });
      return;
    }
    result.flags = flag_changes(result.distances, config.jumps);
    out.write("flags.json", [&](std::ostream& o) { write_flags_json(o, result.flags); });
    spdlog::info("detect: {} flags", result.flags.size());
  });

  const auto& so = config.sentiment;
  if (so.metrics || so.inference) {
    in_stage("sentiment", [&] {
      for (const auto& s : slices) result.sentiment.push_back(sentiment_metrics(s));
      if (!so.metrics) return;
      result.zscores = zscore_series(result.sentiment);
      result.sentiment_flags = flag_sentiment_changes(*result.zscores, so.z_threshold, so.min_metrics);
      out.write("sentiment.csv", [&](std::ostream& o) { write_sentiment_csv(o, result.sentiment); });
      out.write("zscores.csv", [&](std::ostream& o) { write_zscore_csv(o, *result.zscores); });
      out.write("sentiment_flags.json",
                [&](std::ostream& o) { write_sentiment_flags_json(o, result.sentiment_flags); });
    });
  }

  if (so.discordance) {
    in_stage("discordance", [&] {
      for (const auto& s : slices) result.discordance.push_back(discordance_window_avg(s, so.discordance_params));
      out.write("discordance.csv", [&](std::ostream& o) { write_discordance_csv(o, result.discordance); });
    });
  }

  if (so.inference) {
    in_stage("inference", [&] {
      const auto sample = labeled_sample(result.posts);
      result.mixing = mixing_matrix(sample);
      result.inferred = infer_post_sentiment(result.sentiment, *result.mixing);
      const auto per_class = class_discordance(sample, so.discordance_params);
      std::array<double, kSentimentCount> avg{};
      for (std::size_t c = 0; c < kSentimentCount; ++c) {
        if (!per_class[c])
          throw ValidationError("no labeled " + std::string(to_string(static_cast<Sentiment>(c))) +
                                " thread with two or more labeled posts");
        avg[c] = *per_class[c];
      }
      result.inferred_discordance = infer_discordance(result.sentiment, avg);
      out.write("mixing.json", [&](std::ostream& o) { o << mixing_json(*result.mixing).dump(2) << '\n'; });
      out.write("inferred.csv",
                [&](std::ostream& o) { write_inferred_csv(o, result.inferred, result.inferred_discordance); });
    });
  }

  if (out.enabled()) {
    in_stage("report", [&] {
      nlohmann::ordered_json manifest;
      manifest["tool"] = "forumnet";
      manifest["version"] = kVersion;
      manifest["config"] = nlohmann::ordered_json::parse(config_to_json(config));
      manifest["windows"] = labels;
      manifest["artifacts"] = out.files();
      out.write("manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    });
  }
  result.files = out.files();
  return result;
}

}  // namespace forumnet
