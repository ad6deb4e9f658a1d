#include "forumnet/forum.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "forumnet/error.hpp"

namespace forumnet {

using namespace std::chrono;

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::positive: return "positive";
    case Sentiment::neutral: return "neutral";
    case Sentiment::negative: return "negative";
  }
  return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (token == "positive" || token == "pos") return Sentiment::positive;
  if (token == "neutral" || token == "neu" || token == "deleted") return Sentiment::neutral;
  if (token == "negative" || token == "neg") return Sentiment::negative;
  throw ValidationError("unknown sentiment token '" + std::string(token) + "'");
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > text.size()) throw ValidationError("unparseable timestamp '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc{} || ptr != text.data() + pos + len)
    throw ValidationError("unparseable timestamp '" + std::string(whole) + "'");
  return value;
}

}  // namespace

sys_days parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw ValidationError("unparseable date '" + std::string(text) + "'");
  year_month_day ymd{year{read_int(text, 0, 4, text)}, month{static_cast<unsigned>(read_int(text, 5, 2, text))},
                     day{static_cast<unsigned>(read_int(text, 8, 2, text))}};
  if (!ymd.ok()) throw ValidationError("invalid calendar date '" + std::string(text) + "'");
  return sys_days{ymd};
}

std::string format_date(sys_days d) {
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  if (text.size() < 10) throw ValidationError("unparseable timestamp '" + std::string(text) + "'");
  sys_days date = parse_date(text.substr(0, 10));
  if (text.size() == 10) return Timestamp{date};
  if (text[10] != 'T' && text[10] != ' ')
    throw ValidationError("unparseable timestamp '" + std::string(text) + "'");
  auto rest = text.substr(11);
  if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':')
    throw ValidationError("unparseable timestamp '" + std::string(text) + "'");
  int h = read_int(rest, 0, 2, text), m = read_int(rest, 3, 2, text), s = read_int(rest, 6, 2, text);
  if (h > 23 || m > 59 || s > 60) throw ValidationError("unparseable timestamp '" + std::string(text) + "'");
  auto zone = rest.substr(8);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00"))
    throw ValidationError("timestamp '" + std::string(text) + "' is not UTC");
  return Timestamp{date} + hours{h} + minutes{m} + seconds{s};
}

std::string format_timestamp(Timestamp t) {
  auto date = floor<days>(t);
  hh_mm_ss tod{t - date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()));
  return format_date(date) + buf;
}

PostFormat parse_post_format(std::string_view name) {
  if (name == "csv") return PostFormat::csv;
  if (name == "jsonl") return PostFormat::jsonl;
  throw ValidationError("unknown post format '" + std::string(name) + "' (expected csv or jsonl)");
}

namespace {

const std::vector<std::string> kColumns = {"post_id", "thread_id", "user_id", "timestamp", "is_original", "sentiment"};

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw ValidationError("line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cell));
  return cells;
}

bool parse_flag(std::string_view text, std::size_t line_no) {
  if (text == "true" || text == "1" || text == "True" || text == "TRUE") return true;
  if (text == "false" || text == "0" || text == "False" || text == "FALSE") return false;
  throw ValidationError("line " + std::to_string(line_no) + ": is_original must be true/false, got '" +
                        std::string(text) + "'");
}

template <class F>
auto at_line(std::size_t line_no, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<PostRecord> parse_posts(std::istream& in, PostFormat format) {
  std::vector<PostRecord> posts;
  std::string line;
  std::size_t line_no = 0;
  if (format == PostFormat::csv) {
    if (!std::getline(in, line)) return posts;
    ++line_no;
    auto header = split_csv_line(line, line_no);
    std::vector<std::size_t> index(kColumns.size());
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      auto it = std::find(header.begin(), header.end(), kColumns[c]);
      if (it == header.end()) throw ValidationError("line 1: missing required field '" + kColumns[c] + "'");
      index[c] = static_cast<std::size_t>(it - header.begin());
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      auto cells = split_csv_line(line, line_no);
      if (cells.size() != header.size())
        throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(cells.size()));
      PostRecord p;
      p.post_id = cells[index[0]];
      p.thread_id = cells[index[1]];
      p.user_id = cells[index[2]];
      for (std::size_t c = 0; c < 3; ++c)
        if (cells[index[c]].empty())
          throw ValidationError("line " + std::to_string(line_no) + ": missing required field '" + kColumns[c] + "'");
      p.timestamp = at_line(line_no, [&] { return parse_timestamp(cells[index[3]]); });
      p.is_original = parse_flag(cells[index[4]], line_no);
      p.sentiment = at_line(line_no, [&] { return parse_sentiment(cells[index[5]]); });
      posts.push_back(std::move(p));
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        throw ValidationError("line " + std::to_string(line_no) + ": invalid JSON");
      }
      if (!j.is_object()) throw ValidationError("line " + std::to_string(line_no) + ": expected a JSON object");
      auto text_field = [&](const std::string& key) {
        if (!j.contains(key) || j[key].is_null())
          throw ValidationError("line " + std::to_string(line_no) + ": missing required field '" + key + "'");
        if (j[key].is_string()) return j[key].get<std::string>();
        if (j[key].is_number_integer()) return std::to_string(j[key].get<long long>());
        throw ValidationError("line " + std::to_string(line_no) + ": field '" + key + "' must be a string");
      };
      PostRecord p;
      p.post_id = text_field("post_id");
      p.thread_id = text_field("thread_id");
      p.user_id = text_field("user_id");
      auto ts = text_field("timestamp");
      p.timestamp = at_line(line_no, [&] { return parse_timestamp(ts); });
      if (!j.contains("is_original")) throw ValidationError("line " + std::to_string(line_no) + ": missing required field 'is_original'");
      const auto& flag = j["is_original"];
      if (flag.is_boolean()) p.is_original = flag.get<bool>();
      else if (flag.is_string()) p.is_original = parse_flag(flag.get<std::string>(), line_no);
      else if (flag.is_number_integer()) p.is_original = parse_flag(std::to_string(flag.get<long long>()), line_no);
      else throw ValidationError("line " + std::to_string(line_no) + ": is_original must be boolean");
      if (j.contains("sentiment") && !j["sentiment"].is_null()) {
        if (!j["sentiment"].is_string()) throw ValidationError("line " + std::to_string(line_no) + ": sentiment must be a string");
        auto token = j["sentiment"].get<std::string>();
        p.sentiment = at_line(line_no, [&] { return parse_sentiment(token); });
      }
      posts.push_back(std::move(p));
    }
  }
  std::stable_sort(posts.begin(), posts.end(), [](const PostRecord& a, const PostRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.post_id < b.post_id;
  });
  return posts;
}

void write_posts(std::ostream& out, std::span<const PostRecord> posts, PostFormat format) {
  if (format == PostFormat::csv) {
    out << "post_id,thread_id,user_id,timestamp,is_original,sentiment\n";
    for (const auto& p : posts) {
      out << csv_cell(p.post_id) << ',' << csv_cell(p.thread_id) << ',' << csv_cell(p.user_id) << ','
          << format_timestamp(p.timestamp) << ',' << (p.is_original ? "true" : "false") << ','
          << (p.sentiment ? to_string(*p.sentiment) : std::string_view{}) << '\n';
    }
  } else {
    for (const auto& p : posts) {
      nlohmann::ordered_json j;
      j["post_id"] = p.post_id;
      j["thread_id"] = p.thread_id;
      j["user_id"] = p.user_id;
      j["timestamp"] = format_timestamp(p.timestamp);
      j["is_original"] = p.is_original;
      j["sentiment"] = p.sentiment ? nlohmann::ordered_json(std::string(to_string(*p.sentiment))) : nullptr;
      out << j.dump() << '\n';
    }
  }
}

std::map<std::string, ThreadRecord> derive_threads(std::span<const PostRecord> posts) {
  std::map<std::string, ThreadRecord> threads;
  std::map<std::string, std::set<std::string>> users;
  std::map<std::string, std::size_t> originals;
  for (const auto& p : posts) {
    auto& t = threads[p.thread_id];
    t.thread_id = p.thread_id;
    ++t.posts;
    users[p.thread_id].insert(p.user_id);
    if (p.is_original) {
      if (++originals[p.thread_id] > 1)
        throw ValidationError("thread '" + p.thread_id + "' has more than one original post");
      t.created = p.timestamp;
      t.sentiment = p.sentiment;
    }
  }
  for (auto& [id, t] : threads) {
    if (originals[id] == 0) throw ValidationError("thread '" + id + "' has no original post");
    t.users = users[id].size();
  }
  return threads;
}

CalendarStep CalendarStep::parse(std::string_view text) {
  if (text == "halfmonth" || text == "half-month") return {Unit::half_month, 1};
  if (text.size() < 2) throw ValidationError("invalid calendar step '" + std::string(text) + "'");
  int count = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size() - 1, count);
  if (ec != std::errc{} || ptr != text.data() + text.size() - 1 || count < 1)
    throw ValidationError("invalid calendar step '" + std::string(text) + "'");
  switch (text.back()) {
    case 'd': return {Unit::day, count};
    case 'w': return {Unit::week, count};
    case 'm': return {Unit::month, count};
    default: throw ValidationError("invalid calendar step '" + std::string(text) + "' (units: d, w, m, halfmonth)");
  }
}

std::string CalendarStep::to_string() const {
  switch (unit) {
    case Unit::day: return std::to_string(count) + "d";
    case Unit::week: return std::to_string(count) + "w";
    case Unit::month: return std::to_string(count) + "m";
    case Unit::half_month: return "halfmonth";
  }
  return {};
}

double CalendarStep::nominal_days() const {
  switch (unit) {
    case Unit::day: return count;
    case Unit::week: return 7.0 * count;
    case Unit::month: return 30.436875 * count;
    case Unit::half_month: return 15.2184375 * count;
  }
  return 0.0;
}

sys_days CalendarStep::advance(sys_days from) const {
  switch (unit) {
    case Unit::day: return from + days{count};
    case Unit::week: return from + weeks{count};
    case Unit::month: {
      year_month_day ymd{from};
      year_month_day next = ymd + months{count};
      if (!next.ok()) next = next.year() / next.month() / last;
      return sys_days{next};
    }
    case Unit::half_month: {
      sys_days at = from;
      for (int i = 0; i < count; ++i) {
        year_month_day ymd{at};
        if (ymd.day() < day{15}) at = sys_days{ymd.year() / ymd.month() / day{15}};
        else at = sys_days{(ymd.year() / ymd.month() / day{1}) + months{1}};
      }
      return at;
    }
  }
  return from;
}

void WindowSpec::validate() const {
  if (end < start) throw ValidationError("window end " + format_date(end) + " precedes start " + format_date(start));
  bool jump_longer = (span.unit == jump.unit) ? jump.count > span.count : jump.nominal_days() > span.nominal_days();
  if (jump_longer)
    throw ValidationError("window jump " + jump.to_string() + " exceeds span " + span.to_string());
}

std::vector<std::pair<sys_days, sys_days>> window_bounds(const WindowSpec& spec) {
  spec.validate();
  std::vector<std::pair<sys_days, sys_days>> out;
  for (sys_days s = spec.start;;) {
    sys_days e = spec.span.advance(s);
    if (e > spec.end) break;
    out.emplace_back(s, e);
    sys_days next = spec.jump.advance(s);
    if (next <= s) throw ValidationError("window jump does not advance");
    s = next;
  }
  return out;
}

std::vector<WindowSlice> make_windows(std::span<const PostRecord> posts, const WindowSpec& spec) {
  auto bounds = window_bounds(spec);
  auto global = derive_threads(posts);
  std::vector<PostRecord> sorted(posts.begin(), posts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const PostRecord& a, const PostRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.post_id < b.post_id;
  });
  std::vector<WindowSlice> out;
  out.reserve(bounds.size());
  for (auto [s, e] : bounds) {
    WindowSlice w;
    w.label = format_date(s);
    w.start = Timestamp{s};
    w.end = Timestamp{e};
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), w.start,
                               [](const PostRecord& p, Timestamp t) { return p.timestamp < t; });
    auto hi = std::lower_bound(lo, sorted.end(), w.end,
                               [](const PostRecord& p, Timestamp t) { return p.timestamp < t; });
    w.posts.assign(lo, hi);
    std::map<std::string, std::set<std::string>> users;
    for (const auto& p : w.posts) {
      auto& t = w.threads[p.thread_id];
      if (t.posts == 0) {
        const auto& g = global.at(p.thread_id);
        t.thread_id = g.thread_id;
        t.created = g.created;
        t.sentiment = g.sentiment;
      }
      ++t.posts;
      users[p.thread_id].insert(p.user_id);
    }
    for (auto& [id, t] : w.threads) t.users = users[id].size();
    out.push_back(std::move(w));
  }
  return out;
}

WindowStats window_stats(const WindowSlice& w) {
  std::set<std::string_view> threads, users;
  for (const auto& p : w.posts) {
    threads.insert(p.thread_id);
    users.insert(p.user_id);
  }
  return {w.posts.size(), threads.size(), users.size()};
}

}  // namespace forumnet
