#include "forumnet/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "forumnet/error.hpp"

namespace forumnet {

namespace {

constexpr std::array<Sentiment, kSentimentCount> kAll = {Sentiment::positive, Sentiment::neutral,
                                                         Sentiment::negative};

std::size_t idx(Sentiment s) { return static_cast<std::size_t>(s); }

template <std::size_t N>
std::array<double, N> shares_of(const std::array<std::size_t, N>& counts, std::size_t first = 0) {
  std::array<double, N> out{};
  std::size_t total = 0;
  for (std::size_t i = first; i < N; ++i) total += counts[i];
  if (total == 0) return out;
  for (std::size_t i = first; i < N; ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

}  // namespace

std::string combination_name(unsigned mask) {
  std::string out;
  const char* names[] = {"pos", "neu", "neg"};
  for (unsigned b = 0; b < 3; ++b)
    if (mask & (1u << b)) {
      if (!out.empty()) out += '+';
      out += names[b];
    }
  return out;
}

SentimentShares SentimentSummary::thread_shares() const { return shares_of(threads); }
SentimentShares SentimentSummary::post_shares() const { return shares_of(posts); }
std::array<double, 8> SentimentSummary::user_combination_shares() const { return shares_of(user_combinations, 1); }

SentimentSummary sentiment_metrics(const WindowSlice& w) {
  SentimentSummary s;
  s.label = w.label;
  for (const auto& [id, t] : w.threads) {
    if (t.sentiment) ++s.threads[idx(*t.sentiment)];
    else ++s.unlabeled_threads;
  }
  std::map<std::string_view, unsigned> user_masks;
  for (const auto& p : w.posts) {
    const auto& t = w.threads.at(p.thread_id);
    if (!t.sentiment) {
      ++s.unlabeled_posts;
      continue;
    }
    ++s.posts[idx(*t.sentiment)];
    user_masks[p.user_id] |= sentiment_bit(*t.sentiment);
  }
  for (const auto& [user, mask] : user_masks) ++s.user_combinations[mask];
  return s;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::threads: return "threads";
    case Metric::posts: return "posts";
    case Metric::users: return "users";
  }
  return "threads";
}

std::optional<double> sentiment_ratio(const std::array<double, kSentimentCount>& a, Sentiment direction) {
  const double pos = a[0], neu = a[1], neg = a[2];
  double num = 0.0, den = 0.0;
  switch (direction) {
    case Sentiment::positive: num = pos; den = neg; break;
    case Sentiment::negative: num = neg; den = pos; break;
    case Sentiment::neutral: num = neu; den = pos + neg; break;
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::vector<std::optional<double>> zscores(std::span<const std::optional<double>> series) {
  std::vector<double> defined;
  for (const auto& v : series)
    if (v) defined.push_back(*v);
  if (defined.empty()) return {};
  const double n = static_cast<double>(defined.size());
  const double mean = std::accumulate(defined.begin(), defined.end(), 0.0) / n;
  double var = 0.0;
  for (double v : defined) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  std::vector<std::optional<double>> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i]) out[i] = sd > 0.0 ? (*series[i] - mean) / sd : 0.0;
  return out;
}

const ZSeries& ZTable::get(Metric m, Sentiment direction) const {
  for (const auto& s : series)
    if (s.metric == m && s.direction == direction) return s;
  throw ValidationError("z-score table lacks the requested series");
}

ZTable zscore_series(std::span<const SentimentSummary> summaries) {
  if (summaries.size() < 2) throw ValidationError("z-scores need at least 2 windows");
  ZTable table;
  for (const auto& s : summaries) table.labels.push_back(s.label);
  for (std::size_t mi = 0; mi < kMetricCount; ++mi) {
    const auto metric = static_cast<Metric>(mi);
    for (Sentiment dir : kAll) {
      ZSeries zs{metric, dir, {}, {}};
      for (const auto& s : summaries) {
        std::array<double, kSentimentCount> amounts{};
        for (Sentiment x : kAll) {
          std::size_t v = 0;
          switch (metric) {
            case Metric::threads: v = s.threads[idx(x)]; break;
            case Metric::posts: v = s.posts[idx(x)]; break;
            case Metric::users: v = s.users_only(x); break;
          }
          amounts[idx(x)] = static_cast<double>(v);
        }
        zs.ratio.push_back(sentiment_ratio(amounts, dir));
      }
      zs.z = zscores(zs.ratio);
      table.series.push_back(std::move(zs));
    }
  }
  return table;
}

std::vector<SentimentFlag> flag_sentiment_changes(const ZTable& table, double threshold, std::size_t min_metrics) {
  std::vector<SentimentFlag> flags;
  for (std::size_t w = 0; w < table.labels.size(); ++w) {
    for (Sentiment dir : kAll) {
      for (int sign : {+1, -1}) {
        SentimentFlag f{w, table.labels[w], dir, sign, {}};
        for (std::size_t mi = 0; mi < kMetricCount; ++mi) {
          const auto& s = table.get(static_cast<Metric>(mi), dir);
          if (s.z.empty() || !s.z[w]) continue;
          if (sign * *s.z[w] > threshold) f.metrics.push_back(static_cast<Metric>(mi));
        }
        if (f.metrics.size() >= min_metrics) flags.push_back(std::move(f));
      }
    }
  }
  return flags;
}

void DiscordanceParams::validate() const {
  if (min_window < 2 || max_window < min_window) throw ValidationError("discordance window lengths must satisfy 2 <= min <= max");
  if (!(opposite > 0.0) || neutral < 0.0 || same < 0.0) throw ValidationError("discordance distances must be non-negative");
}

double discordance_thread(std::span<const Sentiment> sentiments, const DiscordanceParams& params) {
  params.validate();
  const int n = static_cast<int>(sentiments.size());
  auto distance = [&](Sentiment a, Sentiment b) {
    if (a == b) return params.same;
    if (a == Sentiment::neutral || b == Sentiment::neutral) return params.neutral;
    return params.opposite;
  };
  double score_sum = 0.0;
  int lengths = 0;
  for (int d = params.min_window; d <= std::min(params.max_window, n); ++d) {
    double total = 0.0;
    for (int start = 0; start + d <= n; ++start)
      for (int a = start; a < start + d; ++a)
        for (int b = a + 1; b < start + d; ++b) total += distance(sentiments[a], sentiments[b]);
    const double max_window =
        params.normalization == DiscordanceParams::Normalization::attainable
            ? params.opposite * static_cast<double>(d / 2) * static_cast<double>((d + 1) / 2)
            : params.opposite * static_cast<double>(d * (d - 1) / 2);
    score_sum += total / (static_cast<double>(n - d + 1) * max_window);
    ++lengths;
  }
  return lengths == 0 ? 0.0 : score_sum / lengths;
}

WindowDiscordance discordance_window_avg(const WindowSlice& w, const DiscordanceParams& params) {
  // w.posts is in timestamp order; keep that order within each thread.
  std::map<std::string_view, std::vector<Sentiment>> by_thread;
  for (const auto& p : w.posts)
    if (p.sentiment) by_thread[p.thread_id].push_back(*p.sentiment);
  WindowDiscordance out{w.label, std::nullopt, 0};
  double sum = 0.0;
  for (const auto& [id, seq] : by_thread) {
    if (seq.size() < 2) continue;
    sum += discordance_thread(seq, params);
    ++out.threads;
  }
  if (out.threads > 0) out.average = sum / static_cast<double>(out.threads);
  return out;
}

MixingMatrix MixingMatrix::identity() {
  MixingMatrix m;
  for (std::size_t i = 0; i < kSentimentCount; ++i) m.m[i][i] = 1.0;
  return m;
}

MixingMatrix MixingMatrix::from_columns(const SentimentShares& positive, const SentimentShares& neutral,
                                        const SentimentShares& negative) {
  MixingMatrix out;
  const std::array<SentimentShares, 3> cols = {positive, neutral, negative};
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < 3; ++r) {
      if (cols[c][r] < 0.0) throw ValidationError("mixing matrix entries must be non-negative");
      out.m[r][c] = cols[c][r];
      sum += cols[c][r];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("mixing matrix columns must sum to 1");
  }
  return out;
}

SentimentShares MixingMatrix::column(Sentiment thread) const {
  SentimentShares c{};
  for (std::size_t r = 0; r < 3; ++r) c[r] = m[r][idx(thread)];
  return c;
}

SentimentShares MixingMatrix::apply(const SentimentShares& v) const {
  SentimentShares out{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) out[r] += m[r][c] * v[c];
  return out;
}

std::vector<LabeledThread> labeled_sample(std::span<const PostRecord> posts) {
  std::vector<PostRecord> sorted(posts.begin(), posts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const PostRecord& a, const PostRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.post_id < b.post_id;
  });
  std::map<std::string, LabeledThread> threads;
  std::map<std::string, bool> has_label;
  for (const auto& p : sorted) {
    auto& t = threads[p.thread_id];
    if (p.is_original && p.sentiment) {
      t.sentiment = *p.sentiment;
      has_label[p.thread_id] = true;
    }
    if (p.sentiment) t.posts.push_back(*p.sentiment);
  }
  std::vector<LabeledThread> out;
  for (auto& [id, t] : threads)
    if (has_label[id] && !t.posts.empty()) out.push_back(std::move(t));
  return out;
}

MixingMatrix mixing_matrix(std::span<const LabeledThread> sample) {
  std::array<SentimentShares, 3> sums{};
  std::array<std::size_t, 3> counts{};
  for (const auto& t : sample) {
    if (t.posts.empty()) continue;
    SentimentCounts c{};
    for (Sentiment s : t.posts) ++c[idx(s)];
    const auto shares = shares_of(c);
    for (std::size_t r = 0; r < 3; ++r) sums[idx(t.sentiment)][r] += shares[r];
    ++counts[idx(t.sentiment)];
  }
  MixingMatrix out;
  for (Sentiment col : kAll) {
    const auto c = idx(col);
    if (counts[c] == 0)
      throw ValidationError("mixing matrix needs at least one " + std::string(to_string(col)) + " thread");
    for (std::size_t r = 0; r < 3; ++r) out.m[r][c] = sums[c][r] / static_cast<double>(counts[c]);
  }
  return out;
}

std::vector<InferredPosts> infer_post_sentiment(std::span<const SentimentSummary> summaries, const MixingMatrix& m) {
  std::vector<InferredPosts> out;
  for (const auto& s : summaries) {
    InferredPosts row{s.label, std::nullopt};
    SentimentShares counts{};
    double total = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      counts[c] = static_cast<double>(s.posts[c]);
      total += counts[c];
    }
    if (total > 0.0) {
      auto inferred = m.apply(counts);
      const double sum = inferred[0] + inferred[1] + inferred[2];
      for (double& v : inferred) v /= sum;
      row.shares = inferred;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ZSeries> zscore_inferred(std::span<const InferredPosts> inferred) {
  std::vector<ZSeries> out;
  for (Sentiment dir : kAll) {
    ZSeries zs{Metric::posts, dir, {}, {}};
    for (const auto& row : inferred)
      zs.ratio.push_back(row.shares ? sentiment_ratio(*row.shares, dir) : std::nullopt);
    zs.z = zscores(zs.ratio);
    out.push_back(std::move(zs));
  }
  return out;
}

std::array<std::optional<double>, kSentimentCount> class_discordance(std::span<const LabeledThread> sample,
                                                                     const DiscordanceParams& params) {
  std::array<double, 3> sums{};
  std::array<std::size_t, 3> counts{};
  for (const auto& t : sample) {
    if (t.posts.size() < 2) continue;
    sums[idx(t.sentiment)] += discordance_thread(t.posts, params);
    ++counts[idx(t.sentiment)];
  }
  std::array<std::optional<double>, kSentimentCount> out{};
  for (std::size_t c = 0; c < 3; ++c)
    if (counts[c] > 0) out[c] = sums[c] / static_cast<double>(counts[c]);
  return out;
}

std::vector<std::optional<double>> infer_discordance(std::span<const SentimentSummary> summaries,
                                                     const std::array<double, kSentimentCount>& per_class_avg) {
  std::vector<std::optional<double>> out;
  for (const auto& s : summaries) {
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      num += static_cast<double>(s.threads[c]) * per_class_avg[c];
      den += static_cast<double>(s.threads[c]);
    }
    out.push_back(den > 0.0 ? std::optional<double>(num / den) : std::nullopt);
  }
  return out;
}

double cohen_kappa(std::span<const Sentiment> a, std::span<const Sentiment> b) {
  if (a.size() != b.size()) throw ValidationError("label sequences differ in length");
  if (a.empty()) throw ValidationError("label sequences are empty");
  const double n = static_cast<double>(a.size());
  std::array<double, 3> ma{}, mb{};
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[idx(a[i])] += 1.0;
    mb[idx(b[i])] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (std::size_t c = 0; c < 3; ++c) pe += (ma[c] / n) * (mb[c] / n);
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

void write_sentiment_csv(std::ostream& out, std::span<const SentimentSummary> summaries) {
  std::ostringstream buf;
  buf << "label";
  for (const char* metric : {"threads", "posts"}) {
    for (Sentiment s : kAll) buf << ',' << metric << '_' << to_string(s);
    for (Sentiment s : kAll) buf << ',' << metric << "_share_" << to_string(s);
  }
  buf << ",threads_unlabeled,posts_unlabeled";
  for (unsigned mask = 1; mask < 8; ++mask) buf << ",users_" << combination_name(mask);
  for (unsigned mask = 1; mask < 8; ++mask) buf << ",users_share_" << combination_name(mask);
  buf << '\n';
  for (const auto& s : summaries) {
    buf << s.label;
    for (std::size_t c = 0; c < 3; ++c) buf << ',' << s.threads[c];
    for (double v : s.thread_shares()) buf << ',' << fmt(v);
    for (std::size_t c = 0; c < 3; ++c) buf << ',' << s.posts[c];
    for (double v : s.post_shares()) buf << ',' << fmt(v);
    buf << ',' << s.unlabeled_threads << ',' << s.unlabeled_posts;
    for (unsigned mask = 1; mask < 8; ++mask) buf << ',' << s.user_combinations[mask];
    const auto shares = s.user_combination_shares();
    for (unsigned mask = 1; mask < 8; ++mask) buf << ',' << fmt(shares[mask]);
    buf << '\n';
  }
  out << buf.str();
}

void write_zscore_csv(std::ostream& out, const ZTable& table) {
  std::ostringstream buf;
  buf << "label";
  for (const auto& s : table.series) buf << ',' << to_string(s.metric) << '_' << to_string(s.direction) << "_ratio";
  for (const auto& s : table.series) buf << ',' << to_string(s.metric) << '_' << to_string(s.direction) << "_z";
  buf << '\n';
  for (std::size_t w = 0; w < table.labels.size(); ++w) {
    buf << table.labels[w];
    for (const auto& s : table.series) buf << ',' << fmt(s.ratio[w]);
    for (const auto& s : table.series) buf << ',' << (s.z.empty() ? std::string{} : fmt(s.z[w]));
    buf << '\n';
  }
  out << buf.str();
}

void write_sentiment_flags_json(std::ostream& out, std::span<const SentimentFlag> flags) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : flags) {
    nlohmann::ordered_json j;
    j["window"] = f.label;
    j["direction"] = std::string(to_string(f.direction));
    j["sign"] = f.sign;
    auto metrics = nlohmann::ordered_json::array();
    for (Metric m : f.metrics) metrics.push_back(std::string(to_string(m)));
    j["metrics"] = std::move(metrics);
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

void write_discordance_csv(std::ostream& out, std::span<const WindowDiscordance> rows) {
  std::ostringstream buf;
  buf << "label,avg_discordance,n_threads\n";
  for (const auto& r : rows) buf << r.label << ',' << fmt(r.average) << ',' << r.threads << '\n';
  out << buf.str();
}

void write_inferred_csv(std::ostream& out, std::span<const InferredPosts> inferred,
                        std::span<const std::optional<double>> discordance) {
  std::ostringstream buf;
  buf << "label,inferred_positive,inferred_neutral,inferred_negative,inferred_discordance\n";
  for (std::size_t i = 0; i < inferred.size(); ++i) {
    buf << inferred[i].label;
    for (std::size_t c = 0; c < 3; ++c)
      buf << ',' << (inferred[i].shares ? fmt((*inferred[i].shares)[c]) : std::string{});
    buf << ',' << (i < discordance.size() ? fmt(discordance[i]) : std::string{}) << '\n';
  }
  out << buf.str();
}

}  // namespace forumnet
