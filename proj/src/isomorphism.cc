/*
 * Copyright (c) 2026, The dpsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include "dpsim/analysis/isomorphism.hh"

#include <algorithm>
#include <tuple>

#include "dpsim/error.hh"

namespace dpsim {

namespace {

// Guest-book entries replaced by dense ranks; 0 stays "never used".
std::vector<std::uint64_t> Ranks(const std::vector<std::uint64_t>& last_use) {
  std::vector<std::uint64_t> sorted = last_use;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint64_t> out;
  for (std::uint64_t v : last_use) {
    if (v == 0) {
      out.push_back(0);
    } else {
      auto rank = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
      out.push_back(static_cast<std::uint64_t>(rank) + (sorted.front() == 0 ? 0 : 1));
    }
  }
  return out;
}

PhilosopherState Swapped(PhilosopherState s) {
  if (s.committed) s.committed = Other(*s.committed);
  std::swap(s.holds_left, s.holds_right);
  return s;
}

auto Signature(const PhilosopherState& s, bool episodes) {
  return std::make_tuple(s.line, s.held_count(), s.committed.has_value(), s.hungry,
                         s.eat_remaining, s.inserted, s.think_remaining,
                         episodes ? s.think_episode : 0);
}

class Search {
 public:
  Search(const Configuration& a, const Configuration& b, std::uint64_t cap)
      : a_(a), b_(b), ta_(a.topo()), tb_(b.topo()), cap_(cap) {
    episodes_ = !a.hunger->always_hungry();
    const int n = a.n();
    fork_map_.assign(a.k(), -1);
    fork_used_.assign(b.k(), false);
    phil_map_.assign(n, -1);
    phil_used_.assign(n, false);
    swapped_.assign(n, false);
    // Visit philosophers so that each one after the first shares a fork with
    // an earlier one where possible.
    std::vector<bool> seen(n, false);
    for (int root = 0; root < n; ++root) {
      if (seen[root]) continue;
      std::vector<int> queue{root};
      seen[root] = true;
      for (std::size_t i = 0; i < queue.size(); ++i) {
        order_.push_back(queue[i]);
        for (Side s : {Side::kLeft, Side::kRight}) {
          for (PhilosopherId q : ta_.incident(ta_.fork(PhilosopherId(queue[i]), s))) {
            if (!seen[q.index()]) {
              seen[q.index()] = true;
              queue.push_back(q.value());
            }
          }
        }
      }
    }
  }

  std::optional<Isomorphism> Find() {
    if (!Assign(0)) return std::nullopt;
    Isomorphism iso;
    iso.map.fork = fork_map_;
    iso.map.philosopher = phil_map_;
    iso.swapped = swapped_;
    return iso;
  }

 private:
  bool MapFork(int fa, int fb, std::vector<int>& undo) {
    if (fork_map_[fa] >= 0) return fork_map_[fa] == fb;
    if (fork_used_[fb]) return false;
    if (ta_.degree(ForkId(fa)) != tb_.degree(ForkId(fb))) return false;
    const ForkState& x = a_.forks[fa];
    const ForkState& y = b_.forks[fb];
    if (x.label != y.label || x.holder.has_value() != y.holder.has_value()) return false;
    fork_map_[fa] = fb;
    fork_used_[fb] = true;
    undo.push_back(fa);
    return true;
  }

  bool Assign(std::size_t depth) {
    if (++nodes_ > cap_) {
      throw CapExceeded("isomorphism search exceeded " + std::to_string(cap_) + " nodes");
    }
    if (depth == order_.size()) return FinishForks();
    const int p = order_[depth];
    const PhilosopherId pa(p);
    const PhilosopherState& sa = a_.philosophers[p];
    for (int q = 0; q < b_.n(); ++q) {
      if (phil_used_[q]) continue;
      const PhilosopherState& sb = b_.philosophers[q];
      if (Signature(sa, episodes_) != Signature(sb, episodes_)) continue;
      for (bool swap : {false, true}) {
        if (!Matches(sa, sb, swap)) continue;
        const PhilosopherId pb(q);
        std::vector<int> undo;
        Side to_left = swap ? Side::kRight : Side::kLeft;
        bool ok = MapFork(ta_.fork(pa, Side::kLeft).value(), tb_.fork(pb, to_left).value(), undo) &&
                  MapFork(ta_.fork(pa, Side::kRight).value(), tb_.fork(pb, Other(to_left)).value(),
                          undo);
        if (ok) {
          phil_map_[p] = q;
          phil_used_[q] = true;
          swapped_[p] = swap;
          if (Assign(depth + 1)) return true;
          phil_map_[p] = -1;
          phil_used_[q] = false;
          swapped_[p] = false;
        }
        for (int f : undo) {
          fork_used_[fork_map_[f]] = false;
          fork_map_[f] = -1;
        }
        // A philosopher whose two forks coincide in b would be tried twice.
        if (tb_.fork(pb, Side::kLeft) == tb_.fork(pb, Side::kRight)) break;
      }
    }
    return false;
  }

  bool Matches(PhilosopherState sa, const PhilosopherState& sb, bool swap) const {
    if (swap) sa = Swapped(sa);
    if (!episodes_) sa.think_episode = sb.think_episode;
    return sa == sb;
  }

  // Every philosopher is placed; check the fork states under the mapping.
  bool FinishForks() {
    for (int fa = 0; fa < a_.k(); ++fa) {
      if (fork_map_[fa] < 0) return false;  // forks without philosophers are not supported
      const ForkState& x = a_.forks[fa];
      const ForkState& y = b_.forks[fork_map_[fa]];
      if (x.holder && phil_map_[x.holder->index()] != y.holder->value()) return false;
      auto incident_a = ta_.incident(ForkId(fa));
      auto incident_b = tb_.incident(ForkId(fork_map_[fa]));
      std::vector<std::uint64_t> rank_a = Ranks(x.last_use), rank_b = Ranks(y.last_use);
      for (std::size_t i = 0; i < incident_a.size(); ++i) {
        int image = phil_map_[incident_a[i].index()];
        auto it = std::find(incident_b.begin(), incident_b.end(), PhilosopherId(image));
        if (it == incident_b.end()) return false;
        std::size_t j = static_cast<std::size_t>(it - incident_b.begin());
        if (x.requested[i] != y.requested[j] || rank_a[i] != rank_b[j]) return false;
      }
    }
    return true;
  }

  const Configuration& a_;
  const Configuration& b_;
  const Topology& ta_;
  const Topology& tb_;
  std::uint64_t cap_;
  std::uint64_t nodes_ = 0;
  bool episodes_ = false;
  std::vector<int> order_;
  std::vector<int> fork_map_;
  std::vector<bool> fork_used_;
  std::vector<int> phil_map_;
  std::vector<bool> phil_used_;
  std::vector<bool> swapped_;
};

}  // namespace

std::optional<Isomorphism> ConfigurationIsomorphic(const Configuration& a, const Configuration& b,
                                                   std::uint64_t node_cap) {
  if (a.algorithm != b.algorithm || a.label_bound != b.label_bound ||
      a.options.eat_steps != b.options.eat_steps) {
    return std::nullopt;
  }
  if (a.n() != b.n() || a.k() != b.k()) return std::nullopt;
  return Search(a, b, node_cap).Find();
}

}  // namespace dpsim
