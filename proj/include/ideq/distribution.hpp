#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ideq/rational.hpp"

namespace ideq {

/// Probability distribution over integer-identified elements (states or
/// actions). Entries are kept sorted by element, zero entries are dropped, and
/// construction checks nonnegativity and that the total is exactly 1.
template <class Id>
class Distribution {
 public:
  using Entry = std::pair<Id, Rational>;

  Distribution() = default;

  explicit Distribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Rational total = 0;
    std::vector<Entry> kept;
    kept.reserve(entries_.size());
    for (auto& [id, p] : entries_) {
      if (p < 0) throw std::invalid_argument("distribution has a negative probability");
      if (!kept.empty() && kept.back().first == id) throw std::invalid_argument("duplicate distribution entry");
      total += p;
      if (p > 0) kept.emplace_back(id, p);
    }
    if (total != 1) throw std::invalid_argument("distribution does not sum to 1");
    if (kept.empty()) throw std::invalid_argument("distribution has empty support");
    entries_ = std::move(kept);
  }

  static Distribution dirac(Id id) { return Distribution({{id, Rational(1)}}); }

  const std::vector<Entry>& entries() const { return entries_; }

  Rational prob(Id id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const Entry& e, Id v) { return e.first < v; });
    if (it == entries_.end() || it->first != id) return Rational(0);
    return it->second;
  }

  std::vector<Id> support() const {
    std::vector<Id> out;
    out.reserve(entries_.size());
    for (auto& [id, p] : entries_) out.push_back(id);
    return out;
  }

  bool is_dirac() const { return entries_.size() == 1; }

  bool operator==(const Distribution& other) const { return entries_ == other.entries_; }
  bool operator!=(const Distribution& other) const { return !(*this == other); }

  /// p*this + (1-p)*other, exact.
  Distribution mix(const Rational& p, const Distribution& other) const {
    std::vector<Entry> out;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
      if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
        out.emplace_back(a->first, p * a->second);
        ++a;
      } else if (a == entries_.end() || b->first < a->first) {
        out.emplace_back(b->first, (1 - p) * b->second);
        ++b;
      } else {
        out.emplace_back(a->first, p * a->second + (1 - p) * b->second);
        ++a;
        ++b;
      }
    }
    return Distribution(std::move(out));
  }

 private:
  std::vector<Entry> entries_;
};

}  // namespace ideq
