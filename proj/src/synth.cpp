#include "forumnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "forumnet/error.hpp"

namespace forumnet {

namespace {

using nlohmann::json;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t categorical(const SentimentShares& p, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

std::string padded(char prefix, std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, value);
  return buf;
}

void check_shares(const SentimentShares& p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError(what + " must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(what + " must sum to 1");
}

template <typename T>
T take(json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing key '" + key + "'");
  try {
    T value = it->template get<T>();
    obj.erase(it);
    return value;
  } catch (const json::exception&) {
    throw ValidationError(where + ": bad value for '" + key + "'");
  }
}

void reject_rest(const json& obj, const std::string& where) {
  if (!obj.empty()) throw ValidationError(where + ": unknown key '" + obj.begin().key() + "'");
}

SentimentShares shares_from(const std::vector<double>& v, const std::string& what) {
  if (v.size() != kSentimentCount) throw ValidationError(what + " needs 3 entries");
  return {v[0], v[1], v[2]};
}

}  // namespace

ZipfSampler::ZipfSampler(std::size_t n, double s) {
  if (n == 0) throw ValidationError("Zipf sampler needs at least one rank");
  if (!(s >= 0.0)) throw ValidationError("Zipf exponent must be >= 0");
  cumulative_.resize(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -s);
    cumulative_[r] = acc;
  }
}

double ZipfSampler::probability(std::size_t rank) const {
  const double prev = rank == 0 ? 0.0 : cumulative_[rank - 1];
  return (cumulative_[rank] - prev) / cumulative_.back();
}

std::size_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

void RegimeScript::validate() const {
  if (segments.empty()) throw ValidationError("regime script has no segments");
  if (thread_lifetime_days < 1) throw ValidationError("thread lifetime must be at least 1 day");
  if (unit.count < 1) throw ValidationError("script unit must be positive");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (s.duration < 1) throw ValidationError(where + ": duration must be >= 1");
    if (s.users < 1) throw ValidationError(where + ": user pool must be non-empty");
    if (!(s.threads_per_day > 0.0) || !(s.posts_per_day > 0.0))
      throw ValidationError(where + ": rates must be > 0");
    if (s.posts_per_day < s.threads_per_day)
      throw ValidationError(where + ": posts per day cannot be below threads per day");
    if (!(s.thread_zipf >= 0.0) || !(s.user_zipf >= 0.0))
      throw ValidationError(where + ": Zipf exponents must be >= 0");
    check_shares(s.thread_sentiment, where + ": thread sentiment");
    for (Sentiment c : {Sentiment::positive, Sentiment::neutral, Sentiment::negative})
      check_shares(s.mixing.column(c), where + ": mixing column");
  }
}

std::chrono::sys_days RegimeScript::end() const {
  auto day = start;
  for (const auto& s : segments)
    for (int i = 0; i < s.duration; ++i) day = unit.advance(day);
  return day;
}

RegimeScript parse_regime_script(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("script is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("script must be a JSON object");
  RegimeScript script;
  script.start = parse_date(take<std::string>(root, "start", "script"));
  if (root.contains("unit")) script.unit = CalendarStep::parse(take<std::string>(root, "unit", "script"));
  if (root.contains("seed")) script.seed = take<std::uint64_t>(root, "seed", "script");
  if (root.contains("thread_lifetime_days"))
    script.thread_lifetime_days = take<int>(root, "thread_lifetime_days", "script");
  auto segments = take<std::vector<json>>(root, "segments", "script");
  reject_rest(root, "script");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto& j = segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (!j.is_object()) throw ValidationError(where + ": must be an object");
    RegimeSegment s;
    s.duration = take<int>(j, "duration", where);
    s.users = take<std::size_t>(j, "users", where);
    s.threads_per_day = take<double>(j, "threads_per_day", where);
    s.posts_per_day = take<double>(j, "posts_per_day", where);
    s.thread_zipf = take<double>(j, "thread_zipf", where);
    s.user_zipf = take<double>(j, "user_zipf", where);
    s.thread_sentiment = shares_from(take<std::vector<double>>(j, "thread_sentiment", where), where);
    if (j.contains("mixing")) {
      auto m = take<json>(j, "mixing", where);
      const std::string mw = where + " mixing";
      auto pos = shares_from(take<std::vector<double>>(m, "positive", mw), mw);
      auto neu = shares_from(take<std::vector<double>>(m, "neutral", mw), mw);
      auto neg = shares_from(take<std::vector<double>>(m, "negative", mw), mw);
      reject_rest(m, mw);
      s.mixing = MixingMatrix::from_columns(pos, neu, neg);
    }
    reject_rest(j, where);
    script.segments.push_back(s);
  }
  script.validate();
  return script;
}

void write_regime_script(std::ostream& out, const RegimeScript& script) {
  nlohmann::ordered_json root;
  root["start"] = format_date(script.start);
  root["unit"] = script.unit.to_string();
  root["seed"] = script.seed;
  root["thread_lifetime_days"] = script.thread_lifetime_days;
  root["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : script.segments) {
    nlohmann::ordered_json j;
    j["duration"] = s.duration;
    j["users"] = s.users;
    j["threads_per_day"] = s.threads_per_day;
    j["posts_per_day"] = s.posts_per_day;
    j["thread_zipf"] = s.thread_zipf;
    j["user_zipf"] = s.user_zipf;
    j["thread_sentiment"] = s.thread_sentiment;
    j["mixing"]["positive"] = s.mixing.column(Sentiment::positive);
    j["mixing"]["neutral"] = s.mixing.column(Sentiment::neutral);
    j["mixing"]["negative"] = s.mixing.column(Sentiment::negative);
    root["segments"].push_back(std::move(j));
  }
  out << root.dump(2) << '\n';
}

std::vector<PostRecord> generate_forum(const RegimeScript& script) {
  script.validate();
  std::mt19937_64 rng(script.seed);

  struct Thread {
    std::size_t id;
    long created_day;
    std::chrono::seconds created_at;
    Sentiment sentiment;
    std::size_t posts;
  };
  struct Event {
    PostRecord record;
    std::size_t order;
  };

  std::vector<Thread> threads;
  std::vector<Event> events;
  std::size_t active_from = 0;  // threads are created in day order
  std::map<std::pair<std::size_t, double>, ZipfSampler> samplers;
  auto sampler = [&](std::size_t n, double s) -> const ZipfSampler& {
    auto key = std::make_pair(n, s);
    auto it = samplers.find(key);
    if (it == samplers.end()) it = samplers.emplace(key, ZipfSampler(n, s)).first;
    return it->second;
  };

  auto emit = [&](std::size_t thread, std::chrono::sys_days day, std::chrono::seconds at,
                  std::size_t user, bool original, Sentiment s) {
    PostRecord r;
    r.thread_id = padded('t', thread, 7);
    r.user_id = padded('u', user, 6);
    r.timestamp = std::chrono::sys_seconds(day) + at;
    r.is_original = original;
    r.sentiment = s;
    events.push_back({std::move(r), events.size()});
  };

  auto day = script.start;
  long day_index = 0;
  for (const auto& seg : script.segments) {
    auto seg_end = day;
    for (int i = 0; i < seg.duration; ++i) seg_end = script.unit.advance(seg_end);
    const ZipfSampler& users = sampler(seg.users, seg.user_zipf);
    std::poisson_distribution<long> new_threads(seg.threads_per_day);
    std::poisson_distribution<long> replies(seg.posts_per_day - seg.threads_per_day);

    for (; day < seg_end; day += std::chrono::days{1}, ++day_index) {
      while (active_from < threads.size() && threads[active_from].created_day + script.thread_lifetime_days <= day_index)
        ++active_from;

      const long created = new_threads(rng);
      for (long i = 0; i < created; ++i) {
        const auto at = std::chrono::seconds(static_cast<long>(uniform01(rng) * 86400.0));
        const auto s = static_cast<Sentiment>(categorical(seg.thread_sentiment, rng));
        const std::size_t user = users(rng);
        threads.push_back({threads.size(), day_index, at, s, 1});
        emit(threads.back().id, day, at, user, true, s);
      }

      const std::size_t active = threads.size() - active_from;
      if (active == 0) continue;
      // Popularity rank fixed for the day: most posts first, older first on ties.
      std::vector<std::size_t> ranked(active);
      std::iota(ranked.begin(), ranked.end(), active_from);
      std::stable_sort(ranked.begin(), ranked.end(),
                       [&](std::size_t a, std::size_t b) { return threads[a].posts > threads[b].posts; });
      const ZipfSampler& pick = sampler(active, seg.thread_zipf);
      const long count = replies(rng);
      for (long i = 0; i < count; ++i) {
        Thread& t = threads[ranked[pick(rng)]];
        std::chrono::seconds at{0};
        if (t.created_day == day_index) {
          const long lo = t.created_at.count();
          at = std::chrono::seconds(lo + static_cast<long>(uniform01(rng) * static_cast<double>(86400 - lo)));
        } else {
          at = std::chrono::seconds(static_cast<long>(uniform01(rng) * 86400.0));
        }
        const std::size_t user = users(rng);
        const auto s = static_cast<Sentiment>(categorical(seg.mixing.column(t.sentiment), rng));
        ++t.posts;
        emit(t.id, day, at, user, false, s);
      }
    }
  }

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.record.timestamp != b.record.timestamp) return a.record.timestamp < b.record.timestamp;
    return a.order < b.order;
  });
  std::vector<PostRecord> out;
  out.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].record.post_id = padded('p', i, 8);
    out.push_back(std::move(events[i].record));
  }
  return out;
}

}  // namespace forumnet
