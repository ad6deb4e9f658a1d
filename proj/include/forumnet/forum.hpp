#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forumnet {

enum class Sentiment : std::uint8_t { positive = 0, neutral = 1, negative = 2 };
inline constexpr std::size_t kSentimentCount = 3;

std::string_view to_string(Sentiment s);
/// Accepts positive|neutral|negative, pos|neu|neg, and `deleted` (neutral).
/// Returns nullopt for the empty string; throws on anything else.
std::optional<Sentiment> parse_sentiment(std::string_view token);

using Timestamp = std::chrono::sys_seconds;

/// ISO-8601 UTC: `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM:SS` with optional `Z` or
/// `+00:00`, or a space in place of `T`.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);
std::chrono::sys_days parse_date(std::string_view text);
std::string format_date(std::chrono::sys_days d);

struct PostRecord {
  std::string post_id;
  std::string thread_id;
  std::string user_id;
  Timestamp timestamp{};
  bool is_original = false;
  std::optional<Sentiment> sentiment;

  bool operator==(const PostRecord&) const = default;
};

enum class PostFormat { csv, jsonl };
PostFormat parse_post_format(std::string_view name);

/// Records come back sorted by timestamp, ties by post_id. Malformed rows raise
/// a ValidationError naming the line.
std::vector<PostRecord> parse_posts(std::istream& in, PostFormat format);
void write_posts(std::ostream& out, std::span<const PostRecord> posts, PostFormat format);

struct ThreadRecord {
  std::string thread_id;
  Timestamp created{};
  std::size_t posts = 0;  // φ_t
  std::size_t users = 0;  // υ_t
  std::optional<Sentiment> sentiment;
};

/// Thread sentiment is the original post's label. Every thread must have
/// exactly one original post.
std::map<std::string, ThreadRecord> derive_threads(std::span<const PostRecord> posts);

/// A calendar step: whole days, weeks or months, or the half-month step that
/// alternates between the 1st and the 15th of each month.
struct CalendarStep {
  enum class Unit { day, week, month, half_month };
  Unit unit = Unit::month;
  int count = 1;

  /// `4m`, `1m`, `2w`, `10d`, `halfmonth`.
  static CalendarStep parse(std::string_view text);
  std::string to_string() const;
  /// Nominal length in days, used only to compare steps.
  double nominal_days() const;
  std::chrono::sys_days advance(std::chrono::sys_days from) const;

  bool operator==(const CalendarStep&) const = default;
};

struct WindowSpec {
  std::chrono::sys_days start{};
  std::chrono::sys_days end{};
  CalendarStep span;
  CalendarStep jump;

  /// Throws ValidationError when jump > span or end precedes start.
  void validate() const;
};

struct WindowSlice {
  std::string label;  // start date, YYYY-MM-DD
  Timestamp start{};
  Timestamp end{};    // exclusive
  std::vector<PostRecord> posts;
  /// Counts restricted to this window's posts; sentiment from the original post.
  std::map<std::string, ThreadRecord> threads;
};

/// Window starts advance by the jump; a window [s, s + span) is emitted while
/// s + span <= spec.end.
std::vector<WindowSlice> make_windows(std::span<const PostRecord> posts, const WindowSpec& spec);

/// Window boundaries only, without assigning posts.
std::vector<std::pair<std::chrono::sys_days, std::chrono::sys_days>> window_bounds(const WindowSpec& spec);

struct WindowStats {
  std::size_t posts = 0;
  std::size_t threads = 0;
  std::size_t users = 0;
  bool operator==(const WindowStats&) const = default;
};

WindowStats window_stats(const WindowSlice& w);

}  // namespace forumnet
