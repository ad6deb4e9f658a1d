#include "forumnet/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "forumnet/error.hpp"
#include "forumnet/orbits.hpp"

namespace forumnet {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(json obj, std::string where) : obj_(std::move(obj)), where_(std::move(where)) {
    if (!obj_.is_object()) throw ValidationError(where_ + " must be a JSON object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  template <typename T>
  T get(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) throw ValidationError(where_ + ": missing key '" + key + "'");
    try {
      T value = it->template get<T>();
      obj_.erase(it);
      return value;
    } catch (const json::exception&) {
      throw ValidationError(where_ + ": bad value for '" + key + "'");
    }
  }

  template <typename T>
  void maybe(const char* key, T& target) {
    if (has(key)) target = get<T>(key);
  }

  Reader child(const char* key) { return Reader(get<json>(key), where_ + "." + key); }

  void finish() const {
    if (!obj_.empty()) throw ValidationError(where_ + ": unknown key '" + obj_.begin().key() + "'");
  }

 private:
  json obj_;
  std::string where_;
};

}  // namespace

ComparisonMode parse_comparison_mode(const std::string& name) {
  if (name == "netemd") return ComparisonMode::netemd;
  if (name == "pca-netemd") return ComparisonMode::pca_netemd;
  throw ValidationError("unknown comparison mode '" + name + "' (expected netemd or pca-netemd)");
}

std::string to_string(ComparisonMode mode) { return mode == ComparisonMode::netemd ? "netemd" : "pca-netemd"; }

void PipelineConfig::validate() const {
  if (input.empty() && synth_script.empty()) throw ValidationError("config needs an input file or a synth script");
  if (!input.empty() && !synth_script.empty()) throw ValidationError("config cannot name both an input and a synth script");
  windows.validate();
  if (orbit_max_size < 2 || orbit_max_size > 4) throw ValidationError("orbit max size must be 2, 3 or 4");
  const auto allowed = orbits_up_to(orbit_max_size);
  for (int o : orbits)
    if (std::find(allowed.begin(), allowed.end(), o) == allowed.end())
      throw ValidationError("orbit " + std::to_string(o) + " is not available at max size " +
                            std::to_string(orbit_max_size));
  if (!(explained_variance > 0.0 && explained_variance <= 1.0))
    throw ValidationError("explained variance must lie in (0, 1]");
  if (jumps.empty()) throw ValidationError("at least one change-detection jump is required");
  for (int k : jumps)
    if (k < 1) throw ValidationError("change-detection jumps must be >= 1");
  if (!(sentiment.z_threshold > 0.0)) throw ValidationError("z threshold must be > 0");
  if (sentiment.min_metrics < 1 || sentiment.min_metrics > kMetricCount)
    throw ValidationError("min_metrics must be between 1 and 3");
  sentiment.discordance_params.validate();
  if (heatmap.cell_size < 1 || heatmap.label_every < 1) throw ValidationError("heatmap sizes must be positive");
}

std::vector<int> PipelineConfig::orbit_ids() const { return orbits.empty() ? orbits_up_to(orbit_max_size) : orbits; }

PipelineConfig parse_config(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  Reader r(std::move(root), "config");
  if (r.has("input")) {
    auto in_r = r.child("input");
    c.input = in_r.get<std::string>("path");
    if (in_r.has("format")) c.format = parse_post_format(in_r.get<std::string>("format"));
    in_r.finish();
  }
  r.maybe("synth_script", c.synth_script);
  if (r.has("seed")) c.seed = r.get<std::uint64_t>("seed");
  {
    auto w = r.child("windows");
    c.windows.start = parse_date(w.get<std::string>("start"));
    c.windows.end = parse_date(w.get<std::string>("end"));
    c.windows.span = CalendarStep::parse(w.get<std::string>("span"));
    c.windows.jump = CalendarStep::parse(w.get<std::string>("jump"));
    w.finish();
  }
  if (r.has("projection")) c.projection = parse_projection_mode(r.get<std::string>("projection"));
  r.maybe("orbit_max_size", c.orbit_max_size);
  r.maybe("orbits", c.orbits);
  if (r.has("comparison")) {
    auto cm = r.child("comparison");
    if (cm.has("mode")) c.comparison = parse_comparison_mode(cm.get<std::string>("mode"));
    cm.maybe("explained_variance", c.explained_variance);
    cm.finish();
  }
  if (r.has("jumps")) {
    auto jumps = r.get<std::vector<int>>("jumps");
    c.jumps = std::set<int>(jumps.begin(), jumps.end());
  }
  if (r.has("sentiment")) {
    auto s = r.child("sentiment");
    s.maybe("metrics", c.sentiment.metrics);
    s.maybe("discordance", c.sentiment.discordance);
    s.maybe("inference", c.sentiment.inference);
    s.maybe("z_threshold", c.sentiment.z_threshold);
    s.maybe("min_metrics", c.sentiment.min_metrics);
    if (s.has("discordance_params")) {
      auto d = s.child("discordance_params");
      auto& p = c.sentiment.discordance_params;
      d.maybe("min_window", p.min_window);
      d.maybe("max_window", p.max_window);
      d.maybe("same", p.same);
      d.maybe("neutral", p.neutral);
      d.maybe("opposite", p.opposite);
      if (d.has("normalization")) {
        auto n = d.get<std::string>("normalization");
        if (n == "attainable") p.normalization = DiscordanceParams::Normalization::attainable;
        else if (n == "pairwise") p.normalization = DiscordanceParams::Normalization::pairwise;
        else throw ValidationError("unknown discordance normalization '" + n + "'");
      }
      d.finish();
    }
    s.finish();
  }
  r.maybe("output", c.output);
  r.maybe("workers", c.workers);
  if (r.has("heatmap")) {
    auto h = r.child("heatmap");
    h.maybe("cell_size", c.heatmap.cell_size);
    h.maybe("label_every", c.heatmap.label_every);
    h.maybe("title", c.heatmap.title);
    h.finish();
  }
  r.finish();
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  return parse_config(in);
}

std::string config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  if (!c.input.empty()) {
    j["input"]["path"] = c.input;
    j["input"]["format"] = c.format == PostFormat::csv ? "csv" : "jsonl";
  }
  if (!c.synth_script.empty()) j["synth_script"] = c.synth_script;
  if (c.seed) j["seed"] = *c.seed;
  j["windows"]["start"] = format_date(c.windows.start);
  j["windows"]["end"] = format_date(c.windows.end);
  j["windows"]["span"] = c.windows.span.to_string();
  j["windows"]["jump"] = c.windows.jump.to_string();
  j["projection"] = to_string(c.projection);
  j["orbit_max_size"] = c.orbit_max_size;
  j["orbits"] = c.orbit_ids();
  j["comparison"]["mode"] = to_string(c.comparison);
  j["comparison"]["explained_variance"] = c.explained_variance;
  j["jumps"] = std::vector<int>(c.jumps.begin(), c.jumps.end());
  auto& s = j["sentiment"];
  s["metrics"] = c.sentiment.metrics;
  s["discordance"] = c.sentiment.discordance;
  s["inference"] = c.sentiment.inference;
  s["z_threshold"] = c.sentiment.z_threshold;
  s["min_metrics"] = c.sentiment.min_metrics;
  const auto& p = c.sentiment.discordance_params;
  s["discordance_params"]["min_window"] = p.min_window;
  s["discordance_params"]["max_window"] = p.max_window;
  s["discordance_params"]["same"] = p.same;
  s["discordance_params"]["neutral"] = p.neutral;
  s["discordance_params"]["opposite"] = p.opposite;
  s["discordance_params"]["normalization"] =
      p.normalization == DiscordanceParams::Normalization::attainable ? "attainable" : "pairwise";
  j["heatmap"]["cell_size"] = c.heatmap.cell_size;
  j["heatmap"]["label_every"] = c.heatmap.label_every;
  j["heatmap"]["title"] = c.heatmap.title;
  return j.dump(2);
}

}  // namespace forumnet
