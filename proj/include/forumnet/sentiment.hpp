#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forumnet/forum.hpp"

namespace forumnet {

using SentimentCounts = std::array<std::size_t, kSentimentCount>;
using SentimentShares = std::array<double, kSentimentCount>;

/// Bit mask over sentiments (bit 0 positive, 1 neutral, 2 negative); the
/// seven non-empty masks index user combination counts.
inline constexpr unsigned sentiment_bit(Sentiment s) { return 1u << static_cast<unsigned>(s); }
std::string combination_name(unsigned mask);

struct SentimentSummary {
  std::string label;
  SentimentCounts threads{};           // labeled threads with an in-window post
  std::size_t unlabeled_threads = 0;
  SentimentCounts posts{};             // in-window posts by their thread's sentiment
  std::size_t unlabeled_posts = 0;
  std::array<std::size_t, 8> user_combinations{};  // index = mask, [0] unused

  SentimentShares thread_shares() const;
  SentimentShares post_shares() const;
  std::array<double, 8> user_combination_shares() const;
  /// Users whose threads all carry sentiment s ("posting only in s threads").
  std::size_t users_only(Sentiment s) const { return user_combinations[sentiment_bit(s)]; }
};

SentimentSummary sentiment_metrics(const WindowSlice& w);

enum class Metric { threads = 0, posts = 1, users = 2 };
inline constexpr std::size_t kMetricCount = 3;
std::string_view to_string(Metric m);

/// Ratios tracked per metric: positive -> pos/neg, negative -> neg/pos,
/// neutral -> neu/(pos+neg).
std::optional<double> sentiment_ratio(const std::array<double, kSentimentCount>& amounts, Sentiment direction);

/// Z-scores over the defined entries of a series (population std). A series
/// with no variation scores 0; undefined entries stay undefined.
std::vector<std::optional<double>> zscores(std::span<const std::optional<double>> series);

struct ZSeries {
  Metric metric;
  Sentiment direction;
  std::vector<std::optional<double>> ratio;
  std::vector<std::optional<double>> z;  // empty when no ratio is defined
};

struct ZTable {
  std::vector<std::string> labels;
  std::vector<ZSeries> series;  // metric-major: threads{pos,neu,neg}, posts{...}, users{...}

  const ZSeries& get(Metric m, Sentiment direction) const;
};

ZTable zscore_series(std::span<const SentimentSummary> summaries);

struct SentimentFlag {
  std::size_t window = 0;
  std::string label;
  Sentiment direction = Sentiment::neutral;
  int sign = 0;                  // +1 increase, -1 decrease
  std::vector<Metric> metrics;   // metrics with |Z| > 1 in that sign
};

/// A window is flagged for a direction when at least two metrics have
/// |Z| > threshold with the same sign.
std::vector<SentimentFlag> flag_sentiment_changes(const ZTable& table, double threshold = 1.0,
                                                  std::size_t min_metrics = 2);

struct DiscordanceParams {
  enum class Normalization {
    attainable,  // M(D) = opposite * floor(D/2) * ceil(D/2)
    pairwise,    // M(D) = opposite * D(D-1)/2
  };
  int min_window = 2;
  int max_window = 5;
  double same = 0.0;
  double neutral = 1.0;     // neutral vs. positive or negative
  double opposite = 2.0;    // positive vs. negative
  Normalization normalization = Normalization::attainable;

  void validate() const;
};

double discordance_thread(std::span<const Sentiment> sentiments, const DiscordanceParams& params = {});

struct WindowDiscordance {
  std::string label;
  std::optional<double> average;
  std::size_t threads = 0;
};

/// Mean discordance over threads with at least two labeled in-window posts.
WindowDiscordance discordance_window_avg(const WindowSlice& w, const DiscordanceParams& params = {});

/// Rows are post sentiment, columns thread sentiment; columns sum to 1.
struct MixingMatrix {
  std::array<std::array<double, kSentimentCount>, kSentimentCount> m{};

  double operator()(Sentiment post, Sentiment thread) const {
    return m[static_cast<std::size_t>(post)][static_cast<std::size_t>(thread)];
  }
  static MixingMatrix identity();
  /// Validates non-negativity and column sums (1e-9).
  static MixingMatrix from_columns(const SentimentShares& positive, const SentimentShares& neutral,
                                   const SentimentShares& negative);
  SentimentShares column(Sentiment thread) const;
  SentimentShares apply(const SentimentShares& by_thread_class) const;
};

struct LabeledThread {
  Sentiment sentiment = Sentiment::neutral;
  std::vector<Sentiment> posts;
};

/// Labeled threads from a corpus: thread label from the original post, post
/// labels from every labeled post in the thread. Threads without a label or
/// labeled posts are skipped.
std::vector<LabeledThread> labeled_sample(std::span<const PostRecord> posts);

/// Column s is the unweighted mean over threads labeled s of their post
/// sentiment proportions.
MixingMatrix mixing_matrix(std::span<const LabeledThread> sample);

struct InferredPosts {
  std::string label;
  std::optional<SentimentShares> shares;  // absent when the window has no labeled-thread posts
};

std::vector<InferredPosts> infer_post_sentiment(std::span<const SentimentSummary> summaries,
                                                const MixingMatrix& m);
/// Z-scored ratios of the inferred post proportions, one series per direction.
std::vector<ZSeries> zscore_inferred(std::span<const InferredPosts> inferred);

/// Mean discordance per thread sentiment over a labeled sample; absent for
/// classes with no qualifying thread.
std::array<std::optional<double>, kSentimentCount> class_discordance(std::span<const LabeledThread> sample,
                                                                     const DiscordanceParams& params = {});

/// sum_s threads_s * avg_s / sum_s threads_s per window.
std::vector<std::optional<double>> infer_discordance(std::span<const SentimentSummary> summaries,
                                                     const std::array<double, kSentimentCount>& per_class_avg);

double cohen_kappa(std::span<const Sentiment> a, std::span<const Sentiment> b);

void write_sentiment_csv(std::ostream& out, std::span<const SentimentSummary> summaries);
void write_zscore_csv(std::ostream& out, const ZTable& table);
void write_sentiment_flags_json(std::ostream& out, std::span<const SentimentFlag> flags);
void write_discordance_csv(std::ostream& out, std::span<const WindowDiscordance> rows);
void write_inferred_csv(std::ostream& out, std::span<const InferredPosts> inferred,
                        std::span<const std::optional<double>> discordance);

}  // namespace forumnet
