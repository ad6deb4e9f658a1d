#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "forumnet/change.hpp"
#include "forumnet/config.hpp"
#include "forumnet/error.hpp"
#include "forumnet/heatmap.hpp"
#include "forumnet/netemd.hpp"
#include "forumnet/orbits.hpp"
#include "forumnet/pipeline.hpp"
#include "forumnet/projection.hpp"
#include "forumnet/sentiment.hpp"
#include "forumnet/synth.hpp"

using namespace forumnet;
namespace fs = std::filesystem;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("forumnet");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("FORUMNET_LOG")) {
    auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && std::string(level) != "off")
      spdlog::warn("unknown FORUMNET_LOG level '{}'", level);
    else
      spdlog::set_level(parsed);
  }
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& fill) {
  if (path.empty() || path == "-") {
    fill(std::cout);
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write '" + path + "'");
  fill(out);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

struct InputOptions {
  std::string path;
  std::string format = "csv";

  void add(CLI::App* app) {
    app->add_option("-i,--input", path, "Posts file")->required();
    app->add_option("--format", format, "csv or jsonl");
  }
  std::vector<PostRecord> load() const { return load_posts(path, parse_post_format(format)); }
};

struct WindowOptions {
  std::string start, end, span = "4m", jump = "1m";

  void add(CLI::App* app) {
    app->add_option("--start", start, "First window start, YYYY-MM-DD")->required();
    app->add_option("--end", end, "Windows must end on or before this date")->required();
    app->add_option("--span", span, "Window span (e.g. 4m, 2w, 10d, halfmonth)");
    app->add_option("--jump", jump, "Window jump");
  }
  WindowSpec spec() const {
    WindowSpec s{parse_date(start), parse_date(end), CalendarStep::parse(span), CalendarStep::parse(jump)};
    s.validate();
    return s;
  }
};

std::string stem_label(const std::string& path) {
  const fs::path p(path);
  const std::string parent = p.parent_path().filename().string();
  return p.stem() == "orbits" && !parent.empty() ? parent : p.stem().string();
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Forum interaction network analysis"};
  app.require_subcommand(1);
  std::function<void()> action;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic forum from a regime script");
  std::string synth_script, synth_out, synth_format = "csv";
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--script", synth_script, "Regime script (JSON)")->required();
  synth->add_option("--seed", synth_seed, "Override the script seed");
  synth->add_option("-o,--output", synth_out, "Posts file (default stdout)");
  synth->add_option("--format", synth_format, "csv or jsonl");
  synth->callback([&] {
    action = [&] {
      auto in = open_input(synth_script);
      auto script = parse_regime_script(in);
      if (synth_seed) script.seed = *synth_seed;
      const auto posts = generate_forum(script);
      const auto format = parse_post_format(synth_format);
      emit(synth_out, [&](std::ostream& o) { write_posts(o, posts, format); });
    };
  });

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a posts file");
  InputOptions ingest_in;
  std::string ingest_out, ingest_out_format = "csv";
  ingest_in.add(ingest);
  ingest->add_option("-o,--output", ingest_out, "Normalized posts file");
  ingest->add_option("--output-format", ingest_out_format, "csv or jsonl");
  ingest->callback([&] {
    action = [&] {
      const auto posts = ingest_in.load();
      const auto threads = derive_threads(posts);
      std::set<std::string> users;
      for (const auto& p : posts) users.insert(p.user_id);
      if (!ingest_out.empty())
        emit(ingest_out, [&](std::ostream& o) { write_posts(o, posts, parse_post_format(ingest_out_format)); });
      nlohmann::ordered_json j;
      j["posts"] = posts.size();
      j["threads"] = threads.size();
      j["users"] = users.size();
      std::cout << j.dump() << '\n';
    };
  });

  // windows
  auto* windows = app.add_subcommand("windows", "Slice posts into rolling windows");
  InputOptions windows_in;
  WindowOptions windows_spec;
  std::string windows_out;
  windows_in.add(windows);
  windows_spec.add(windows);
  windows->add_option("-o,--output", windows_out, "Window table CSV");
  windows->callback([&] {
    action = [&] {
      const auto slices = make_windows(windows_in.load(), windows_spec.spec());
      emit(windows_out, [&](std::ostream& o) {
        o << "label,start,end,posts,threads,users\n";
        for (const auto& w : slices) {
          const auto s = window_stats(w);
          o << w.label << ',' << format_timestamp(w.start) << ',' << format_timestamp(w.end) << ',' << s.posts
            << ',' << s.threads << ',' << s.users << '\n';
        }
      });
    };
  });

  // project
  auto* project = app.add_subcommand("project", "Project each window onto users and sparsify");
  InputOptions project_in;
  WindowOptions project_spec;
  std::string project_mode = "weighted", project_out;
  project_in.add(project);
  project_spec.add(project);
  project->add_option("--mode", project_mode, "weighted or plain");
  project->add_option("-o,--output", project_out, "Output directory")->required();
  project->callback([&] {
    action = [&] {
      const auto mode = parse_projection_mode(project_mode);
      const auto slices = make_windows(project_in.load(), project_spec.spec());
      std::vector<ProjectionSummary> rows;
      for (const auto& w : slices) {
        const auto r = project_window(w, mode);
        rows.push_back(summarize(w.label, r));
        emit(project_out + "/" + w.label + "/sparsified.csv", [&](std::ostream& o) { write_edge_list(o, r.sparsified); });
        emit(project_out + "/" + w.label + "/projection.csv", [&](std::ostream& o) { write_edge_list(o, r.weighted); });
      }
      emit(project_out + "/projection_summary.csv", [&](std::ostream& o) { write_projection_summary(o, rows); });
    };
  });

  // orbits
  auto* orbits = app.add_subcommand("orbits", "Count node orbits of an edge list");
  std::string orbits_edges, orbits_out;
  int orbits_max = 4;
  unsigned orbits_workers = 0;
  orbits->add_option("--edges", orbits_edges, "Edge list (u v [w])")->required();
  orbits->add_option("--max-size", orbits_max, "Largest graphlet size (2, 3 or 4)");
  orbits->add_option("--workers", orbits_workers, "Worker threads (0 = all cores)");
  orbits->add_option("-o,--output", orbits_out, "Orbit CSV (default stdout)");
  orbits->callback([&] {
    action = [&] {
      auto in = open_input(orbits_edges);
      const auto list = read_edge_list(in);
      const auto g = build_graph(list.node_count, list.pairs);
      const auto m = count_orbits(g, orbits_max, orbits_workers);
      emit(orbits_out, [&](std::ostream& o) { write_orbit_csv(o, m); });
    };
  });

  // compare
  auto* compare = app.add_subcommand("compare", "All-pairs NetEmd between orbit tables");
  std::vector<std::string> compare_files, compare_labels;
  std::vector<int> compare_orbits;
  std::string compare_mode = "pca-netemd", compare_out, compare_by_feature;
  double compare_ev = 0.90;
  unsigned compare_workers = 0;
  compare->add_option("--orbits", compare_files, "Orbit CSV files, in window order")->required();
  compare->add_option("--labels", compare_labels, "Labels (default: file or directory names)");
  compare->add_option("--orbit-ids", compare_orbits, "Orbit ids to compare (default: all in the files)");
  compare->add_option("--mode", compare_mode, "netemd or pca-netemd");
  compare->add_option("--explained-variance", compare_ev, "PCA explained variance");
  compare->add_option("--workers", compare_workers, "Worker threads (0 = all cores)");
  compare->add_option("-o,--output", compare_out, "Distance CSV (default stdout)");
  compare->add_option("--by-feature", compare_by_feature, "Directory for per-orbit distance CSVs");
  compare->callback([&] {
    action = [&] {
      std::vector<OrbitMatrix> ms;
      for (const auto& f : compare_files) {
        auto in = open_input(f);
        ms.push_back(read_orbit_csv(in));
      }
      auto labels = compare_labels;
      if (labels.empty())
        for (const auto& f : compare_files) labels.push_back(stem_label(f));
      if (labels.size() != ms.size()) throw ValidationError("need one label per orbit file");
      std::vector<int> ids = compare_orbits;
      if (ids.empty()) ids.assign(ms.front().orbit_ids().begin(), ms.front().orbit_ids().end());
      const auto d = compare_networks(ms, ids, parse_comparison_mode(compare_mode), compare_ev, labels, compare_workers);
      emit(compare_out, [&](std::ostream& o) { write_distance_csv(o, d); });
      if (!compare_by_feature.empty())
        for (std::size_t f = 0; f < d.feature_names().size(); ++f)
          emit(compare_by_feature + "/" + d.feature_names()[f] + ".csv",
               [&](std::ostream& o) { write_feature_distance_csv(o, d, f); });
    };
  });

  // detect
  auto* detect = app.add_subcommand("detect", "Flag structural changes with the median rule");
  std::string detect_in, detect_out;
  std::vector<int> detect_jumps = {1, 2};
  detect->add_option("--distances", detect_in, "Distance CSV")->required();
  detect->add_option("--jumps", detect_jumps, "Window offsets to test");
  detect->add_option("-o,--output", detect_out, "Flags JSON (default stdout)");
  detect->callback([&] {
    action = [&] {
      auto in = open_input(detect_in);
      const auto d = read_distance_csv(in);
      const auto flags = flag_changes(d, std::set<int>(detect_jumps.begin(), detect_jumps.end()));
      emit(detect_out, [&](std::ostream& o) { write_flags_json(o, flags); });
    };
  });

  // sentiment
  auto* sentiment = app.add_subcommand("sentiment", "Per-window sentiment metrics, z-scores and flags");
  InputOptions sentiment_in;
  WindowOptions sentiment_spec;
  std::string sentiment_out;
  double sentiment_z = 1.0;
  std::size_t sentiment_min = 2;
  sentiment_in.add(sentiment);
  sentiment_spec.add(sentiment);
  sentiment->add_option("--z-threshold", sentiment_z, "|Z| needed per metric");
  sentiment->add_option("--min-metrics", sentiment_min, "Metrics that must agree");
  sentiment->add_option("-o,--output", sentiment_out, "Output directory")->required();
  sentiment->callback([&] {
    action = [&] {
      std::vector<SentimentSummary> rows;
      for (const auto& w : make_windows(sentiment_in.load(), sentiment_spec.spec()))
        rows.push_back(sentiment_metrics(w));
      const auto table = zscore_series(rows);
      const auto flags = flag_sentiment_changes(table, sentiment_z, sentiment_min);
      emit(sentiment_out + "/sentiment.csv", [&](std::ostream& o) { write_sentiment_csv(o, rows); });
      emit(sentiment_out + "/zscores.csv", [&](std::ostream& o) { write_zscore_csv(o, table); });
      emit(sentiment_out + "/sentiment_flags.json", [&](std::ostream& o) { write_sentiment_flags_json(o, flags); });
    };
  });

  // discordance
  auto* discordance = app.add_subcommand("discordance", "Average thread discordance per window");
  InputOptions discordance_in;
  WindowOptions discordance_spec;
  DiscordanceParams dparams;
  std::string discordance_out, discordance_norm = "attainable";
  discordance_in.add(discordance);
  discordance_spec.add(discordance);
  discordance->add_option("--min-window", dparams.min_window, "Smallest post window D");
  discordance->add_option("--max-window", dparams.max_window, "Largest post window D");
  discordance->add_option("--normalization", discordance_norm, "attainable or pairwise");
  discordance->add_option("-o,--output", discordance_out, "Discordance CSV (default stdout)");
  discordance->callback([&] {
    action = [&] {
      if (discordance_norm == "pairwise") dparams.normalization = DiscordanceParams::Normalization::pairwise;
      else if (discordance_norm != "attainable") throw ValidationError("unknown normalization '" + discordance_norm + "'");
      dparams.validate();
      std::vector<WindowDiscordance> rows;
      for (const auto& w : make_windows(discordance_in.load(), discordance_spec.spec()))
        rows.push_back(discordance_window_avg(w, dparams));
      emit(discordance_out, [&](std::ostream& o) { write_discordance_csv(o, rows); });
    };
  });

  // infer
  auto* infer = app.add_subcommand("infer", "Infer post sentiment and discordance from thread labels");
  InputOptions infer_in;
  WindowOptions infer_spec;
  std::string infer_sample, infer_out;
  infer_in.add(infer);
  infer_spec.add(infer);
  infer->add_option("--sample", infer_sample, "Labeled sample posts (default: the input)");
  infer->add_option("-o,--output", infer_out, "Inferred CSV (default stdout)");
  infer->callback([&] {
    action = [&] {
      const auto posts = infer_in.load();
      const auto sample_posts =
          infer_sample.empty() ? posts : load_posts(infer_sample, parse_post_format(infer_in.format));
      const auto sample = labeled_sample(sample_posts);
      const auto mixing = mixing_matrix(sample);
      std::vector<SentimentSummary> rows;
      for (const auto& w : make_windows(posts, infer_spec.spec())) rows.push_back(sentiment_metrics(w));
      const auto per_class = class_discordance(sample);
      std::array<double, kSentimentCount> avg{};
      for (std::size_t c = 0; c < kSentimentCount; ++c) {
        if (!per_class[c]) throw ValidationError("sample lacks a qualifying thread of every sentiment");
        avg[c] = *per_class[c];
      }
      const auto inferred = infer_post_sentiment(rows, mixing);
      const auto disc = infer_discordance(rows, avg);
      emit(infer_out, [&](std::ostream& o) { write_inferred_csv(o, inferred, disc); });
    };
  });

  // report
  auto* report = app.add_subcommand("report", "Render a distance matrix as an SVG heatmap");
  std::string report_in, report_out;
  HeatmapOptions hopts;
  report->add_option("--distances", report_in, "Distance CSV")->required();
  report->add_option("--label-every", hopts.label_every, "Draw every n-th axis label");
  report->add_option("--cell-size", hopts.cell_size, "Cell size in pixels");
  report->add_option("--title", hopts.title, "Title");
  report->add_option("-o,--output", report_out, "SVG file (default stdout)");
  report->callback([&] {
    action = [&] {
      auto in = open_input(report_in);
      const auto d = read_distance_csv(in);
      emit(report_out, [&](std::ostream& o) { o << render_heatmap(d, hopts); });
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
  std::string run_config, run_input, run_output, run_mode;
  std::optional<unsigned> run_workers;
  std::optional<std::uint64_t> run_seed;
  run->add_option("-c,--config", run_config, "Pipeline config (JSON)")->required();
  run->add_option("-i,--input", run_input, "Override the input posts file");
  run->add_option("-o,--output", run_output, "Override the output directory");
  run->add_option("--mode", run_mode, "Override the comparison mode");
  run->add_option("--workers", run_workers, "Override the worker count");
  run->add_option("--seed", run_seed, "Override the synth seed");
  run->callback([&] {
    action = [&] {
      auto config = load_config(run_config);
      if (!run_input.empty()) {
        config.input = run_input;
        config.synth_script.clear();
      }
      if (!run_output.empty()) config.output = run_output;
      if (!run_mode.empty()) config.comparison = parse_comparison_mode(run_mode);
      if (run_workers) config.workers = *run_workers;
      if (run_seed) config.seed = *run_seed;
      if (config.output.empty()) throw ValidationError("no output directory given");
      const auto result = run_pipeline(config);
      std::cout << "wrote " << result.files.size() << " artifacts to " << config.output << '\n';
      for (const auto& f : result.flags)
        if (!f.shadowed)
          std::cout << "change " << f.from << " -> " << f.to << " (k=" << f.jump << ", d=" << f.distance << ")\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (action) action();
    return 0;
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}
