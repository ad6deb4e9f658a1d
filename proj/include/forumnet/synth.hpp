#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "forumnet/forum.hpp"
#include "forumnet/sentiment.hpp"

namespace forumnet {

/// Rank sampler with P(rank r) proportional to 1 / r^s, ranks 0-based.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s);
  std::size_t size() const { return cumulative_.size(); }
  double probability(std::size_t rank) const;
  std::size_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<double> cumulative_;
};

struct RegimeSegment {
  int duration = 1;  // in units of RegimeScript::unit
  std::size_t users = 100;
  double threads_per_day = 5.0;
  double posts_per_day = 50.0;  // originals included
  double thread_zipf = 1.0;
  double user_zipf = 1.0;
  SentimentShares thread_sentiment{1.0 / 3, 1.0 / 3, 1.0 / 3};
  MixingMatrix mixing = MixingMatrix::identity();
};

struct RegimeScript {
  std::chrono::sys_days start{};
  CalendarStep unit{CalendarStep::Unit::month, 1};
  std::uint64_t seed = 1;
  int thread_lifetime_days = 30;  // older threads receive no replies
  std::vector<RegimeSegment> segments;

  void validate() const;
  /// First day after the last segment.
  std::chrono::sys_days end() const;
};

/// Unknown keys are rejected.
RegimeScript parse_regime_script(std::istream& in);
void write_regime_script(std::ostream& out, const RegimeScript& script);

/// Day by day: Poisson thread creations, then Poisson replies. Replies pick
/// an active thread Zipf-by-rank of its post count so far and a user
/// Zipf-by-rank of a fixed activity order. One seeded stream, fixed order.
std::vector<PostRecord> generate_forum(const RegimeScript& script);

}  // namespace forumnet
