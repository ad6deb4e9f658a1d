#include "forumnet/change.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "forumnet/error.hpp"

namespace forumnet {

double upper_triangle_median(const DistanceMatrix& d) {
  std::vector<double> values;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) values.push_back(d(i, j));
  if (values.empty()) throw ValidationError("distance matrix has no off-diagonal entries");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<ChangeFlag> flag_changes(const DistanceMatrix& d, const std::set<int>& jumps) {
  if (d.size() < 3) throw ValidationError("change detection needs at least 3 windows, got " + std::to_string(d.size()));
  for (int k : jumps)
    if (k < 1) throw ValidationError("jump sizes must be positive");
  const double median = upper_triangle_median(d);
  std::vector<ChangeFlag> flags;
  std::vector<bool> consecutive(d.size(), false);  // consecutive[i]: i -> i+1 flagged
  for (int k : jumps) {
    const auto step = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i + step < d.size(); ++i) {
      const double value = d(i, i + step);
      if (!(value > median)) continue;
      ChangeFlag f;
      f.from = d.labels()[i];
      f.to = d.labels()[i + step];
      f.from_index = i;
      f.to_index = i + step;
      f.jump = k;
      f.distance = value;
      f.median = median;
      if (k == 1) consecutive[i] = true;
      else f.shadowed = std::any_of(consecutive.begin() + static_cast<std::ptrdiff_t>(i),
                                    consecutive.begin() + static_cast<std::ptrdiff_t>(i + step),
                                    [](bool b) { return b; });
      flags.push_back(std::move(f));
    }
  }
  return flags;
}

void write_flags_json(std::ostream& out, const std::vector<ChangeFlag>& flags) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : flags) {
    nlohmann::ordered_json j;
    j["from"] = f.from;
    j["to"] = f.to;
    j["k"] = f.jump;
    j["distance"] = f.distance;
    j["median"] = f.median;
    j["shadowed"] = f.shadowed;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace forumnet
