#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forumnet/change.hpp"
#include "forumnet/config.hpp"
#include "forumnet/error.hpp"
#include "forumnet/netemd.hpp"
#include "forumnet/orbits.hpp"
#include "forumnet/projection.hpp"
#include "forumnet/sentiment.hpp"

namespace forumnet {

/// Runs fn, prefixing any error with the stage name; the error kind is kept.
template <class Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError("[" + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw RuntimeError("[" + stage + "] " + e.what());
  }
}

struct WindowResult {
  std::string label;
  WindowStats stats;
  ProjectionSummary projection;
  OrbitMatrix orbits;
};

struct PipelineResult {
  std::vector<PostRecord> posts;
  std::vector<WindowResult> windows;
  DistanceMatrix distances;
  std::vector<ChangeFlag> flags;
  std::vector<SentimentSummary> sentiment;
  std::optional<ZTable> zscores;
  std::vector<SentimentFlag> sentiment_flags;
  std::vector<WindowDiscordance> discordance;
  std::optional<MixingMatrix> mixing;
  std::vector<InferredPosts> inferred;
  std::vector<std::optional<double>> inferred_discordance;
  std::vector<std::string> files;  // written artifacts, relative to the output directory
};

std::vector<PostRecord> load_posts(const std::string& path, PostFormat format);

/// Bipartite graph, projection and threshold sparsification of one window.
ProjectionResult project_window(const WindowSlice& w, ProjectionMode mode);

DistanceMatrix compare_networks(std::span<const OrbitMatrix> networks, const std::vector<int>& orbit_ids,
                                ComparisonMode mode, double explained_variance,
                                std::vector<std::string> labels, unsigned workers);

/// ingest, windows, projection, orbit census, distances, change flags,
/// sentiment metrics, discordance, inference. Artifacts go to config.output
/// when it is set.
PipelineResult run_pipeline(const PipelineConfig& config);
/// Same, starting from records already in memory.
PipelineResult run_pipeline(const PipelineConfig& config, std::vector<PostRecord> posts);

}  // namespace forumnet
