// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "forumnet/change.hpp"
#include "forumnet/distribution.hpp"
#include "forumnet/netemd.hpp"
#include "forumnet/orbits.hpp"
#include "forumnet/pipeline.hpp"
#include "forumnet/projection.hpp"
#include "forumnet/sentiment.hpp"
#include "forumnet/synth.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace forumnet;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and limits.
constexpr double kOrbitOracleSeconds = 60.0;
constexpr double kOrbitScaleSeconds = 60.0;
constexpr double kSymmetryTol = 1e-8;
constexpr double kAffineTol = 1e-8;
constexpr double kGridTol = 1e-6;
constexpr double kRelabelTol = 1e-12;
constexpr double kSpotTol = 1e-6;
constexpr double kThresholdNudge = 1e-12;
constexpr double kTableDecimals = 5e-4;
constexpr double kInferTol = 1e-9;
constexpr int kRegimeSeeds = 100;
constexpr int kBoundaryFlagMin = 95;
constexpr int kSentimentFlagMin = 90;
constexpr int kOrbitElevatedMin = 90;
constexpr double kRegimeSeconds = 600.0;
constexpr std::size_t kBoundaryWindow = 7;  // first post-shift window, 0-based
constexpr double kFlagOverlapMin = 0.90;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::cout << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << name << ": " << o.detail
            << std::endl;
  if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::vector<double> random_samples(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3), size(2, 60);
  std::vector<double> v(static_cast<std::size_t>(size(rng)));
  switch (kind(rng)) {
    case 0: {
      std::normal_distribution<double> d(0.0, 2.0);
      for (double& x : v) x = d(rng);
      break;
    }
    case 1: {
      std::poisson_distribution<int> d(3.0);
      for (double& x : v) x = d(rng);
      break;
    }
    case 2: {
      std::geometric_distribution<int> d(0.3);
      for (double& x : v) x = d(rng);
      break;
    }
    default: {
      std::exponential_distribution<double> d(1.0);
      for (double& x : v) x = d(rng);
    }
  }
  return v;
}

Outcome orbit_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(4, 60);
  const double densities[] = {0.05, 0.1, 0.25, 0.5};
  int mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const auto g = fixtures::random_graph(size(rng), densities[i % 4], rng);
    if (!(count_orbits(g, 4) == count_orbits_bruteforce(g, 4))) ++mismatches;
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < kOrbitOracleSeconds, fmt("%d/200 mismatches, %.1f s", mismatches, s)};
}

Outcome orbit_scale() {
  std::mt19937_64 rng(102);
  const std::size_t n = 5000;
  const auto g = fixtures::random_graph(n, 50.0 / static_cast<double>(n - 1), rng);
  const auto t0 = Clock::now();
  const auto m = count_orbits(g, 4);
  const double s = seconds_since(t0);
  const double avg = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(n);
  return {m.node_count() == n && s < kOrbitScaleSeconds, fmt("n=%zu, average degree %.1f, %.2f s", n, avg, s)};
}

Outcome metric_properties() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> scale(0.05, 20.0), shift(-50.0, 50.0);
  double worst_sym = 0.0, worst_affine = 0.0, worst_grid = 0.0, most_negative = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_samples(rng), b = random_samples(rng);
    const auto pa = make_distribution(a), pb = make_distribution(b);
    const double ab = emd_star(pa, pb).distance, ba = emd_star(pb, pa).distance;
    worst_sym = std::max(worst_sym, std::abs(ab - ba));
    most_negative = std::min(most_negative, ab);
    worst_affine = std::max(worst_affine, emd_star(pa, pa.affine(scale(rng), shift(rng))).distance);
    worst_grid = std::max(worst_grid, std::abs(ab - fixtures::emd_star_oracle(a, b)));
  }
  double worst_relabel = 0.0;
  const auto g = fixtures::random_graph(80, 0.1, rng);
  const auto base = count_orbits(g, 4);
  for (int i = 0; i < 100; ++i) {
    const auto p = fixtures::random_permutation(g.node_count(), rng);
    worst_relabel = std::max(worst_relabel, netemd(base, count_orbits(fixtures::permute(g, p), 4), OrbitSet()).total);
  }
  const bool pass = worst_sym <= kSymmetryTol && most_negative >= 0.0 && worst_affine <= kAffineTol &&
                    worst_grid <= kGridTol && worst_relabel <= kRelabelTol;
  return {pass, fmt("symmetry %.1e, min %.1e, affine %.1e, grid gap %.1e, relabel %.1e", worst_sym, most_negative,
                    worst_affine, worst_grid, worst_relabel)};
}

Outcome spot_value() {
  const std::vector<NodePair> tri = {{0, 1}, {1, 2}, {0, 2}}, path = {{0, 1}, {1, 2}};
  const double d = netemd(count_orbits(build_graph(3, tri), 4), count_orbits(build_graph(3, path), 4),
                          OrbitSet(std::vector<int>{0}))
                       .total;
  const double oracle = fixtures::emd_star_oracle({2, 2, 2}, {1, 2, 1});
  const double target = 1.0 / std::sqrt(2.0);
  return {std::abs(d - target) <= kSpotTol && std::abs(oracle - target) <= kSpotTol,
          fmt("netemd %.9f, grid oracle %.9f, 1/sqrt2 %.9f", d, oracle, target)};
}

Outcome projection() {
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<std::size_t> users(2, 40), threads(1, 30);
  int product_mismatch = 0;
  for (int i = 0; i < 100; ++i) {
    const auto b = fixtures::random_bipartite(users(rng), threads(rng), 0.15, rng);
    const auto g = project_users(b, ProjectionMode::plain);
    const auto a = fixtures::dense_projection(b);
    const std::size_t n = b.user_count();
    std::vector<double> got(n * n, 0.0);
    for (const auto& e : g.edges()) got[e.u * n + e.v] = got[e.v * n + e.u] = e.weight;
    if (got != a) ++product_mismatch;
  }
  const BipartiteGraph hand(2, 1, {{0, 0, 2}, {1, 0, 1}});
  const auto weighted = project_users(hand, ProjectionMode::weighted);
  const bool hand_ok = weighted.edge_count() == 1 && weighted.edges()[0].weight == 2.0 / 3.0;

  int threshold_bad = 0, isolated_bad = 0, nudge_bad = 0, tested = 0;
  while (tested < 100) {
    const auto g = fixtures::random_weighted_graph(10 + static_cast<std::size_t>(tested % 40), 0.12, rng);
    if (g.edge_count() == 0) continue;
    ++tested;
    const auto r = sparsify_threshold(g);
    const auto max_incident = g.max_incident_weights();
    double closed = std::numeric_limits<double>::infinity();
    for (double w : max_incident)
      if (w > 0.0) closed = std::min(closed, w);
    if (r.threshold != closed || r.threshold != fixtures::threshold_by_sweep(g)) ++threshold_bad;
    if (graph_stats(r.sparsified).isolated != 0) ++isolated_bad;
    if (fixtures::isolated_after(g, r.threshold + kThresholdNudge) == 0) ++nudge_bad;
  }
  return {product_mismatch == 0 && hand_ok && threshold_bad == 0 && isolated_bad == 0 && nudge_bad == 0,
          fmt("product mismatches %d/100, hand case %s, threshold mismatches %d/100, isolated %d, "
              "nudge without isolation %d",
              product_mismatch, hand_ok ? "2/3" : "wrong", threshold_bad, isolated_bad, nudge_bad)};
}

Outcome windowing() {
  const auto vaccine = window_bounds({parse_date("2009-07-01"), parse_date("2019-07-01"), CalendarStep::parse("4m"),
                                      CalendarStep::parse("2m")});
  const bool vaccine_ok = vaccine.size() == 59 && format_date(vaccine[0].first) == "2009-07-01" &&
                          format_date(vaccine[0].second) == "2009-11-01";
  const auto covid = window_bounds({parse_date("2020-11-01"), parse_date("2021-06-01"), CalendarStep::parse("1m"),
                                    CalendarStep::parse("halfmonth")});
  std::string starts;
  for (std::size_t i = 0; i < std::min<std::size_t>(4, covid.size()); ++i)
    starts += (i ? " " : "") + format_date(covid[i].first);
  const bool covid_ok = starts == "2020-11-01 2020-11-15 2020-12-01 2020-12-15";
  return {vaccine_ok && covid_ok, fmt("vaccine %zu windows, first [%s, %s); covid starts %s", vaccine.size(),
                                      format_date(vaccine.at(0).first).c_str(),
                                      format_date(vaccine.at(0).second).c_str(), starts.c_str())};
}

Outcome table_one() {
  const std::array<std::array<int, 3>, 3> table = {{{517, 420, 63}, {190, 769, 41}, {225, 473, 302}}};
  // Two threads per class whose proportions straddle the Table 1 column.
  const std::array<std::array<int, 3>, 3> tilt = {{{100, -100, 0}, {-50, 80, -30}, {60, -90, 30}}};
  std::vector<PostRecord> posts;
  auto t = Timestamp{parse_date("2021-01-01")};
  int thread_no = 0, post_no = 0;
  auto post = [&](const std::string& thread, Sentiment s, bool original) {
    PostRecord p;
    p.post_id = "p" + std::to_string(post_no++);
    p.thread_id = thread;
    p.user_id = "u" + std::to_string(post_no % 37);
    p.timestamp = t += std::chrono::seconds(1);
    p.is_original = original;
    p.sentiment = s;
    posts.push_back(p);
  };
  for (std::size_t cls = 0; cls < 3; ++cls)
    for (int sign : {1, -1}) {
      // The original post carries the class label and counts towards it.
      const std::string thread = "t" + std::to_string(thread_no++);
      post(thread, static_cast<Sentiment>(cls), true);
      for (std::size_t s = 0; s < 3; ++s) {
        const int count = table[cls][s] + sign * tilt[cls][s] - (s == cls ? 1 : 0);
        for (int k = 0; k < count; ++k) post(thread, static_cast<Sentiment>(s), false);
      }
    }
  const auto sample = labeled_sample(posts);
  const auto m = mixing_matrix(sample);
  double worst = 0.0;
  for (std::size_t cls = 0; cls < 3; ++cls)
    for (std::size_t s = 0; s < 3; ++s) worst = std::max(worst, std::abs(m.m[s][cls] - table[cls][s] / 1000.0));

  const auto paper = MixingMatrix::from_columns({0.517, 0.42, 0.063}, {0.19, 0.769, 0.041}, {0.225, 0.473, 0.302});
  SentimentSummary neutral_window;
  neutral_window.posts = {0, 500, 0};
  const std::vector<SentimentSummary> rows = {neutral_window};
  const auto inferred = infer_post_sentiment(rows, paper).at(0).shares.value();
  const double infer_gap = std::max({std::abs(inferred[0] - 0.190), std::abs(inferred[1] - 0.769),
                                     std::abs(inferred[2] - 0.041)});
  return {worst < kTableDecimals && infer_gap <= kInferTol,
          fmt("mixing max gap %.1e, all-neutral window (%.1f%%, %.1f%%, %.1f%%) gap %.1e", worst, 100 * inferred[0],
              100 * inferred[1], 100 * inferred[2], infer_gap)};
}

// Adjacent-pair maximizer: alternate the larger of positive/negative with the
// smaller, then spend neutrals as separators for leftover majority posts and
// at the two ends.
std::vector<Sentiment> alternating(std::size_t pos, std::size_t neu, std::size_t neg) {
  const bool pos_major = pos >= neg;
  const Sentiment major = pos_major ? Sentiment::positive : Sentiment::negative;
  const Sentiment minor = pos_major ? Sentiment::negative : Sentiment::positive;
  std::size_t a = pos_major ? pos : neg, b = pos_major ? neg : pos, n = neu;
  if (a == 0) return std::vector<Sentiment>(n, Sentiment::neutral);
  std::vector<Sentiment> seq;
  for (std::size_t i = 0; i < b; ++i) seq.insert(seq.end(), {major, minor});
  a -= b;
  if (a > 0) seq.push_back(major), --a;
  for (; a > 0 && n > 0; --a, --n) seq.insert(seq.end(), {Sentiment::neutral, major});
  if (n > 0) seq.insert(seq.begin(), Sentiment::neutral), --n;
  seq.insert(seq.end(), n, Sentiment::neutral);
  seq.insert(seq.end(), a, major);
  return seq;
}

Outcome discordance() {
  using S = Sentiment;
  DiscordanceParams pairs;
  pairs.min_window = pairs.max_window = 2;
  const double block = discordance_thread(std::vector<S>{S::negative, S::negative, S::negative, S::positive,
                                                         S::positive, S::positive},
                                          pairs);
  const double interleaved = discordance_thread(std::vector<S>{S::negative, S::positive, S::negative, S::positive,
                                                               S::negative, S::positive},
                                                pairs);
  const bool contrast = block == 0.2 && interleaved == 1.0;

  std::mt19937_64 rng(108);
  std::uniform_int_distribution<int> label(0, 2), length(1, 40);
  int out_of_range = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<S> s(static_cast<std::size_t>(length(rng)));
    for (auto& x : s) x = static_cast<S>(label(rng));
    const double d = discordance_thread(s);
    if (!(d >= 0.0 && d <= 1.0)) ++out_of_range;
  }

  int multisets = 0, not_max = 0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t p = 0; p <= n; ++p)
      for (std::size_t g = 0; p + g <= n; ++g) {
        const std::size_t u = n - p - g;
        std::vector<S> seq(p, S::positive);
        seq.insert(seq.end(), u, S::neutral);
        seq.insert(seq.end(), g, S::negative);
        double best = 0.0;
        do best = std::max(best, discordance_thread(seq, pairs));
        while (std::next_permutation(seq.begin(), seq.end()));
        ++multisets;
        if (discordance_thread(alternating(p, u, g), pairs) != best) ++not_max;
      }
  return {contrast && out_of_range == 0 && not_max == 0,
          fmt("block %.3f, interleaved %.3f, out of range %d/10000, alternating below max %d/%d", block, interleaved,
              out_of_range, not_max, multisets)};
}

struct RegimeTally {
  int boundary = 0;
  int sentiment = 0;
  int orbit3 = 0;
  int orbit14 = 0;
  std::size_t overlap = 0;
  std::size_t either = 0;
  std::size_t pca_flags = 0;
  double seconds = 0.0;
  std::string problem;
};

RegimeScript regime_script() {
  std::ifstream in(std::string(FORUMNET_SOURCE_DIR) + "/configs/regime_shift.json");
  return parse_regime_script(in);
}

double pre_shift_median(const DistanceMatrix& d, std::size_t feature) {
  std::vector<double> v;
  for (std::size_t i = 0; i < kBoundaryWindow; ++i)
    for (std::size_t j = i + 1; j < kBoundaryWindow; ++j) v.push_back(d.feature(feature, i, j));
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

RegimeTally regime_runs() {
  RegimeTally tally;
  auto script = regime_script();
  PipelineConfig config;
  config.synth_script = "configs/regime_shift.json";
  config.windows = {script.start, script.end(), script.unit, script.unit};
  const auto t0 = Clock::now();
  for (int seed = 1; seed <= kRegimeSeeds; ++seed) {
    script.seed = static_cast<std::uint64_t>(seed);
    const auto r = run_pipeline(config, generate_forum(script));
    if (r.windows.size() != 12) {
      tally.problem = fmt("seed %d produced %zu windows", seed, r.windows.size());
      return tally;
    }
    for (const auto& f : r.flags)
      if (f.jump == 1 && f.from_index == kBoundaryWindow - 1 && f.to_index == kBoundaryWindow) {
        ++tally.boundary;
        break;
      }
    for (const auto& f : r.sentiment_flags)
      if (f.window == kBoundaryWindow && f.metrics.size() >= 2) {
        ++tally.sentiment;
        break;
      }

    std::vector<OrbitMatrix> orbits;
    for (const auto& w : r.windows) orbits.push_back(w.orbits);
    const auto plain = netemd_matrix(orbits, OrbitSet());
    tally.orbit3 += plain.feature(3, kBoundaryWindow - 1, kBoundaryWindow) > pre_shift_median(plain, 3);
    tally.orbit14 += plain.feature(14, kBoundaryWindow - 1, kBoundaryWindow) > pre_shift_median(plain, 14);

    std::set<std::pair<std::size_t, std::size_t>> a, b;
    for (const auto& f : r.flags) a.insert({f.from_index, f.to_index});
    for (const auto& f : flag_changes(plain, config.jumps)) b.insert({f.from_index, f.to_index});
    std::set<std::pair<std::size_t, std::size_t>> both;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
    for (const auto& p : a) tally.overlap += b.count(p);
    tally.either += both.size();
    tally.pca_flags += a.size();
  }
  tally.seconds = seconds_since(t0);
  return tally;
}

Outcome determinism() {
  PipelineConfig config;
  config.synth_script = std::string(FORUMNET_SOURCE_DIR) + "/configs/regime_shift.json";
  const auto script = regime_script();
  config.windows = {script.start, script.end(), script.unit, script.unit};
  config.seed = 3;
  std::vector<std::map<std::string, std::string>> trees;
  for (unsigned workers : {1u, 4u, 4u}) {
    config.workers = workers;
    const auto dir = fixtures::fresh_directory("forumnet-accept-" + std::to_string(trees.size()));
    config.output = dir.string();
    run_pipeline(config);
    trees.push_back(fixtures::read_tree(dir));
    std::filesystem::remove_all(dir);
  }
  int differing = 0;
  for (std::size_t k = 1; k < trees.size(); ++k)
    for (const auto& [name, content] : trees[0]) {
      const auto it = trees[k].find(name);
      if (it == trees[k].end() || it->second != content) ++differing;
    }
  const bool same_names = trees[0].size() == trees[1].size() && trees[0].size() == trees[2].size();
  return {differing == 0 && same_names && !trees[0].empty(),
          fmt("%zu artifacts, %d differing across workers {1, 4} and reruns", trees[0].size(), differing)};
}

void guarded(int id, const std::string& name, const std::function<Outcome()>& run) {
  try {
    report(id, name, run());
  } catch (const std::exception& e) {
    report(id, name, {false, std::string("error: ") + e.what()});
  }
}

}  // namespace

int main() {
  guarded(1, "orbit oracle equivalence", orbit_oracle);
  guarded(2, "orbit performance at paper scale", orbit_scale);
  guarded(3, "EMD* and NetEmd metric properties", metric_properties);
  guarded(4, "analytic spot value", spot_value);
  guarded(5, "projection correctness", projection);
  guarded(6, "windowing anchors", windowing);
  guarded(7, "Table 1 round trip", table_one);
  guarded(8, "discordance contrast", discordance);

  RegimeTally tally;
  try {
    tally = regime_runs();
  } catch (const std::exception& e) {
    tally.problem = e.what();
  }
  if (!tally.problem.empty()) {
    report(9, "synthetic regime detection", {false, "error: " + tally.problem});
    report(10, "PCA-NetEmd consistency", {false, "error: " + tally.problem});
  } else {
    const bool a = tally.boundary >= kBoundaryFlagMin, b = tally.sentiment >= kSentimentFlagMin;
    const bool c = tally.orbit3 >= kOrbitElevatedMin && tally.orbit14 >= kOrbitElevatedMin;
    const bool fast = tally.seconds < kRegimeSeconds;
    report(9, "synthetic regime detection",
           {a && b && c && fast,
            fmt("(a) boundary flag %d/%d, (b) sentiment flag %d/%d, (c) orbit 3 elevated %d/%d, orbit 14 elevated "
                "%d/%d, %.0f s",
                tally.boundary, kRegimeSeeds, tally.sentiment, kRegimeSeeds, tally.orbit3, kRegimeSeeds,
                tally.orbit14, kRegimeSeeds, tally.seconds)});
    const double jaccard = tally.either ? static_cast<double>(tally.overlap) / static_cast<double>(tally.either) : 1.0;
    const double covered =
        tally.pca_flags ? static_cast<double>(tally.overlap) / static_cast<double>(tally.pca_flags) : 1.0;
    report(10, "PCA-NetEmd consistency",
           {jaccard >= kFlagOverlapMin,
            fmt("shared %zu of %zu flagged pairs (%.1f%%); %.1f%% of pca-netemd flags also raised by netemd",
                tally.overlap, tally.either, 100 * jaccard, 100 * covered)});
  }
  guarded(11, "determinism", determinism);
  std::cout << (failures == 0 ? "all criteria passed" : fmt("%d criteria failed", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
