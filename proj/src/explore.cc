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

#include "dpsim/analysis/explore.hh"

#include <algorithm>
#include <deque>
#include <string>
#include <unordered_map>

#include "dpsim/error.hh"

namespace dpsim {

namespace {

// Replaces guest-book entries by their dense rank at each fork. Cond only
// compares entries at one fork, and a new entry is always the largest, so the
// behaviour is unchanged.
void Canonicalize(Configuration& c) {
  for (ForkState& f : c.forks) {
    std::vector<std::uint64_t> sorted = f.last_use;
    sorted.push_back(0);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (auto& v : f.last_use) {
      v = static_cast<std::uint64_t>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                     sorted.begin());
    }
    f.use_clock = sorted.size() - 1;
  }
  if (c.hunger->always_hungry()) {
    for (PhilosopherState& s : c.philosophers) s.think_episode = 0;
  }
}

using Key = std::basic_string<std::int32_t>;

Key Encode(const Configuration& c) {
  Key k;
  for (const ForkState& f : c.forks) {
    k.push_back(f.holder ? f.holder->value() + 1 : 0);
    k.push_back(f.label);
    for (char r : f.requested) k.push_back(r);
    for (std::uint64_t v : f.last_use) k.push_back(static_cast<std::int32_t>(v));
  }
  for (const PhilosopherState& s : c.philosophers) {
    k.push_back(s.line);
    k.push_back(s.committed ? static_cast<int>(*s.committed) + 1 : 0);
    k.push_back(s.holds_left | (s.holds_right << 1) | (s.hungry << 2) | (s.inserted << 3));
    k.push_back(s.eat_remaining);
    k.push_back(s.think_remaining);
    k.push_back(s.think_episode);
  }
  return k;
}

Configuration Decode(const Key& k, const Configuration& shape) {
  Configuration c = shape;
  std::size_t i = 0;
  for (ForkState& f : c.forks) {
    int holder = k[i++];
    f.holder = holder ? std::optional<PhilosopherId>(PhilosopherId(holder - 1)) : std::nullopt;
    f.label = k[i++];
    for (char& r : f.requested) r = static_cast<char>(k[i++]);
    std::uint64_t top = 0;
    for (auto& v : f.last_use) top = std::max<std::uint64_t>(top, v = k[i++]);
    f.use_clock = top;
  }
  for (PhilosopherState& s : c.philosophers) {
    s.line = k[i++];
    int committed = k[i++];
    s.committed = committed ? std::optional<Side>(static_cast<Side>(committed - 1)) : std::nullopt;
    int bits = k[i++];
    s.holds_left = bits & 1;
    s.holds_right = bits & 2;
    s.hungry = bits & 4;
    s.inserted = (bits >> 3) & 1;
    s.eat_remaining = k[i++];
    s.think_remaining = k[i++];
    s.think_episode = k[i++];
  }
  return c;
}

// Answers the first draw of a step with a chosen outcome and remembers how
// many outcomes there were.
class BranchDraws : public DrawSource {
 public:
  explicit BranchDraws(int choice) : choice_(choice) {}

  Side DrawSide(PhilosopherId, double) override {
    outcomes_ = 2;
    return choice_ == 0 ? Side::kLeft : Side::kRight;
  }
  int DrawLabel(PhilosopherId, int m) override {
    outcomes_ = m;
    return choice_ + 1;
  }
  int outcomes() const { return outcomes_; }

 private:
  int choice_;
  int outcomes_ = 1;
};

struct Edge {
  std::uint32_t to;
  StepEvent event;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int32_t v : k) h = (h ^ static_cast<std::uint32_t>(v)) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

ExploreReport ExploreNoEatCycles(const Configuration& initial, const ExploreCaps& caps) {
  const int n = initial.n();
  std::unordered_map<Key, std::uint32_t, KeyHash> index;
  std::vector<Key> keys;
  std::vector<std::vector<Edge>> edges;
  std::size_t expanded = 0;
  auto intern = [&](Configuration c) {
    Canonicalize(c);
    Key k = Encode(c);
    auto [it, fresh] = index.emplace(k, static_cast<std::uint32_t>(keys.size()));
    if (fresh) {
      if (keys.size() >= caps.max_states) {
        throw CapExceeded("state space exceeds " + std::to_string(caps.max_states) +
                          " configurations (" + std::to_string(expanded) +
                          " expanded when the cap was hit)");
      }
      keys.push_back(std::move(k));
      edges.emplace_back();
    }
    return it->second;
  };

  ExploreReport report;
  intern(initial);
  for (std::size_t s = 0; s < keys.size(); ++s, ++expanded) {
    const Configuration c = Decode(keys[s], initial);
    for (int p = 0; p < n; ++p) {
      const PhilosopherId pid(p);
      if (!Enabled(c, pid)) continue;
      int outcomes = 1;
      for (int choice = 0; choice < outcomes; ++choice) {
        Configuration next = c;
        BranchDraws draws(choice);
        StepEvent e = StepInPlace(next, pid, draws);
        outcomes = draws.outcomes();
        std::uint32_t to = intern(std::move(next));
        edges[s].push_back({to, e});
        ++report.transitions;
      }
    }
  }
  report.states = keys.size();

  // Actions are (state, philosopher) pairs; their edges are the draw
  // outcomes. An action stays usable while none of its outcomes eats or
  // leaves the strongly connected component of its state. Pruning to a fixed
  // point leaves the maximal end components of the no-eat graph: sets the
  // scheduler can keep the system in forever whatever the draws do.
  const std::uint32_t N = static_cast<std::uint32_t>(keys.size());
  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::vector<char>> usable(N);
  for (std::uint32_t v = 0; v < N; ++v) {
    usable[v].assign(n, 1);
    for (const Edge& e : edges[v]) {
      if (IsEatingEvent(e.event)) usable[v][e.event.actor.index()] = 0;
    }
  }
  auto edge_ok = [&](std::uint32_t v, const Edge& e) { return usable[v][e.event.actor.index()]; };

  std::vector<std::uint32_t> comp(N, kUnset);
  std::uint32_t components = 0;
  auto tarjan = [&] {
    std::vector<std::uint32_t> order(N, kUnset), low(N, 0);
    std::vector<std::uint32_t> stack;
    std::vector<bool> on_stack(N, false);
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;
    std::uint32_t counter = 0;
    components = 0;
    for (std::uint32_t root = 0; root < N; ++root) {
      if (order[root] != kUnset) continue;
      frames.push_back({root, 0});
      order[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!frames.empty()) {
        auto& [v, i] = frames.back();
        if (i < edges[v].size()) {
          const Edge& e = edges[v][i++];
          if (!edge_ok(v, e)) continue;
          std::uint32_t w = e.to;
          if (order[w] == kUnset) {
            order[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            frames.push_back({w, 0});
          } else if (on_stack[w]) {
            low[v] = std::min(low[v], order[w]);
          }
          continue;
        }
        const std::uint32_t done = v;
        if (low[done] == order[done]) {
          std::uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = components;
          } while (w != done);
          ++components;
        }
        frames.pop_back();
        if (!frames.empty()) {
          std::uint32_t parent = frames.back().first;
          low[parent] = std::min(low[parent], low[done]);
        }
      }
    }
  };
  for (bool changed = true; changed;) {
    tarjan();
    changed = false;
    for (std::uint32_t v = 0; v < N; ++v) {
      for (const Edge& e : edges[v]) {
        if (edge_ok(v, e) && comp[e.to] != comp[v]) {
          usable[v][e.event.actor.index()] = 0;
          changed = true;
        }
      }
    }
  }

  // Per component: size, and a state where each philosopher has a usable
  // action.
  struct Info {
    std::size_t size = 0;
    bool closed = false;
    std::vector<std::uint32_t> by_actor;
  };
  std::vector<Info> info(components);
  for (std::uint32_t v = 0; v < N; ++v) {
    Info& in = info[comp[v]];
    ++in.size;
    if (in.by_actor.empty()) in.by_actor.assign(n, kUnset);
    for (int p = 0; p < n; ++p) {
      if (!usable[v][p]) continue;
      in.closed = true;
      if (in.by_actor[p] == kUnset) in.by_actor[p] = v;
    }
  }

  // Shortest path inside a component, as (state, edge index) steps.
  auto path = [&](std::uint32_t from, std::uint32_t to, std::uint32_t c) {
    std::vector<std::pair<std::uint32_t, std::size_t>> steps;
    if (from == to) return steps;
    std::unordered_map<std::uint32_t, std::pair<std::uint32_t, std::size_t>> parent;
    std::deque<std::uint32_t> queue{from};
    parent[from] = {from, 0};
    while (!queue.empty() && !parent.count(to)) {
      std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < edges[v].size(); ++i) {
        const Edge& e = edges[v][i];
        if (!edge_ok(v, e) || comp[e.to] != c || parent.count(e.to)) continue;
        parent[e.to] = {v, i};
        queue.push_back(e.to);
      }
    }
    for (std::uint32_t v = to; v != from; v = parent[v].first) steps.push_back(parent[v]);
    std::reverse(steps.begin(), steps.end());
    return steps;
  };

  for (std::uint32_t c = 0; c < components; ++c) {
    const Info& in = info[c];
    if (!in.closed) continue;
    ++report.components;
    if (std::find(in.by_actor.begin(), in.by_actor.end(), kUnset) != in.by_actor.end()) continue;
    Witness w;
    w.component_size = in.size;
    const std::uint32_t start = in.by_actor[0];
    w.start = Decode(keys[start], initial);
    std::uint32_t at = start;
    auto take = [&](std::uint32_t v, std::size_t i) {
      w.walk.push_back({v, edges[v][i].event});
      at = edges[v][i].to;
    };
    for (int p = 0; p < n; ++p) {
      const std::uint32_t v = in.by_actor[p];
      for (auto [u, j] : path(at, v, c)) take(u, j);
      for (std::size_t i = 0; i < edges[v].size(); ++i) {
        if (edges[v][i].event.actor.value() == p) {
          take(v, i);
          break;
        }
      }
    }
    for (auto [u, j] : path(at, start, c)) take(u, j);
    report.witnesses.push_back(std::move(w));
  }
  return report;
}

nlohmann::ordered_json ToJson(const Configuration& c) {
  nlohmann::ordered_json j;
  auto& forks = j["forks"] = nlohmann::ordered_json::array();
  for (const ForkState& f : c.forks) {
    nlohmann::ordered_json jf;
    jf["holder"] = f.holder ? nlohmann::ordered_json(f.holder->value()) : nlohmann::ordered_json();
    jf["nr"] = f.label;
    if (UsesRequests(c.algorithm)) {
      jf["requested"] = std::vector<int>(f.requested.begin(), f.requested.end());
      jf["guest_book"] = f.last_use;
    }
    forks.push_back(std::move(jf));
  }
  auto& phils = j["philosophers"] = nlohmann::ordered_json::array();
  for (const PhilosopherState& s : c.philosophers) {
    nlohmann::ordered_json jp;
    jp["line"] = s.line;
    jp["committed"] = s.committed ? nlohmann::ordered_json(ToString(*s.committed))
                                  : nlohmann::ordered_json();
    jp["holds"] = s.held_count();
    phils.push_back(std::move(jp));
  }
  return j;
}

nlohmann::ordered_json ExploreReport::ToJson() const {
  nlohmann::ordered_json j;
  j["states"] = states;
  j["transitions"] = transitions;
  j["no_eat_components"] = components;
  j["witness_count"] = witnesses.size();
  auto& arr = j["witnesses"] = nlohmann::ordered_json::array();
  for (const Witness& w : witnesses) {
    nlohmann::ordered_json jw;
    jw["component_size"] = w.component_size;
    jw["start"] = dpsim::ToJson(w.start);
    auto& walk = jw["walk"] = nlohmann::ordered_json::array();
    for (const WitnessStep& s : w.walk) {
      walk.push_back({{"state", s.state},
                      {"philosopher", s.event.actor.value()},
                      {"action", ToString(s.event.action)},
                      {"outcome", s.event.Outcome()}});
    }
    arr.push_back(std::move(jw));
  }
  return j;
}

}  // namespace dpsim
