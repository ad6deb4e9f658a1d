#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forumnet/forum.hpp"
#include "forumnet/heatmap.hpp"
#include "forumnet/projection.hpp"
#include "forumnet/sentiment.hpp"

namespace forumnet {

enum class ComparisonMode { netemd, pca_netemd };
ComparisonMode parse_comparison_mode(const std::string& name);
std::string to_string(ComparisonMode mode);

struct SentimentOptions {
  bool metrics = true;
  bool discordance = true;
  bool inference = true;
  double z_threshold = 1.0;
  std::size_t min_metrics = 2;
  DiscordanceParams discordance_params;
};

struct PipelineConfig {
  std::string input;  // posts file; empty when synth_script is set
  PostFormat format = PostFormat::csv;
  std::string synth_script;
  std::optional<std::uint64_t> seed;  // overrides the script's seed
  WindowSpec windows;
  ProjectionMode projection = ProjectionMode::weighted;
  int orbit_max_size = 4;
  std::vector<int> orbits;  // empty: every orbit up to orbit_max_size
  ComparisonMode comparison = ComparisonMode::pca_netemd;
  double explained_variance = 0.90;
  std::set<int> jumps = {1, 2};
  SentimentOptions sentiment;
  std::string output;  // empty: nothing is written
  unsigned workers = 0;
  HeatmapOptions heatmap;

  /// Throws ValidationError on the first inconsistency.
  void validate() const;
  /// Orbit ids actually compared.
  std::vector<int> orbit_ids() const;
};

/// Unknown keys are rejected; the result is validated.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);
/// Canonical JSON form, also embedded in the run manifest. Output directory
/// and worker count are left out so reruns elsewhere match.
std::string config_to_json(const PipelineConfig& config);

}  // namespace forumnet
