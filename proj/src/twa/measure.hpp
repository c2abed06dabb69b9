#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "num.hpp"

namespace twa {

/// Finitely supported probability measure over integer point ids. Entries are
/// kept sorted by id with strictly positive masses; total mass is 1 (within
/// tolerance::measure_sum in float mode, exactly in rational mode).
/// Immutable after make().
template <class R>
class Measure {
 public:
  using Entry = std::pair<uint32_t, R>;

  // Duplicate ids are summed; zero-mass entries are dropped. Arithmetic never
  // re-normalizes: a sum away from 1 is the caller's bug and is reported.
  static Measure make(std::vector<Entry> pairs) {
    for (const auto& [id, mass] : pairs) {
      if (mass < R(0)) {
        fail(errc::negative_mass, "negative mass at point " + std::to_string(id));
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Measure m;
    for (auto& [id, mass] : pairs) {
      if (!m.entries_.empty() && m.entries_.back().first == id) {
        m.entries_.back().second += mass;
      } else {
        m.entries_.emplace_back(id, std::move(mass));
      }
    }
    std::erase_if(m.entries_, [](const Entry& e) { return e.second == R(0); });
    R total = m.total();
    if (!near(total, R(1), tolerance::measure_sum)) {
      fail(errc::not_normalized, "masses sum to " + std::to_string(to_double(total)) + ", expected 1");
    }
    return m;
  }

  std::span<const Entry> entries() const { return entries_; }
  size_t support_size() const { return entries_.size(); }

  R total() const {
    R sum(0);
    for (const auto& [id, mass] : entries_) sum += mass;
    return sum;
  }

  R mass_at(uint32_t id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const Entry& e, uint32_t key) { return e.first < key; });
    if (it != entries_.end() && it->first == id) return it->second;
    return R(0);
  }

  uint32_t max_point_id() const { return entries_.empty() ? 0 : entries_.back().first; }

  bool operator==(const Measure& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Image measure under the total map point -> f[point]; f[p] == k_unmapped
/// (or p outside f) is an error. Mass of y is the sum over the preimage.
inline constexpr uint32_t k_unmapped = UINT32_MAX;

template <class R>
Measure<R> pushforward(std::span<const uint32_t> f, const Measure<R>& m) {
  std::vector<typename Measure<R>::Entry> pairs;
  pairs.reserve(m.support_size());
  for (const auto& [p, mass] : m.entries()) {
    if (p >= f.size() || f[p] == k_unmapped) {
      fail(errc::unmapped_point, "point " + std::to_string(p) + " has no image under the map");
    }
    pairs.emplace_back(f[p], mass);
  }
  return Measure<R>::make(std::move(pairs));
}

}  // namespace twa
