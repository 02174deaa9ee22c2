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

#ifndef DPSIM_TOPOLOGY_HH_
#define DPSIM_TOPOLOGY_HH_

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dpsim {

/**
 * Dense integer index tagged with the kind of object it names, so that fork
 * and philosopher indices cannot be mixed up.
 */
template <class Tag>
class Index {
 public:
  constexpr Index() = default;
  constexpr explicit Index(int value) : value_(value) {}

  constexpr int value() const { return value_; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(value_); }

  friend constexpr auto operator<=>(const Index&, const Index&) = default;

 private:
  int value_ = 0;
};

using ForkId = Index<struct ForkTag>;
using PhilosopherId = Index<struct PhilosopherTag>;

enum class Side { kLeft, kRight };

constexpr Side Other(Side s) { return s == Side::kLeft ? Side::kRight : Side::kLeft; }
const char* ToString(Side s);

struct Arc {
  ForkId left;
  ForkId right;

  ForkId fork(Side s) const { return s == Side::kLeft ? left : right; }
  friend bool operator==(const Arc&, const Arc&) = default;
};

/**
 * A system of forks (nodes) and philosophers (arcs). Parallel arcs are
 * allowed. Construction does not validate; see Validate().
 */
class Topology {
 public:
  Topology(int fork_count, std::vector<Arc> arcs, std::string name = "custom");

  int fork_count() const { return fork_count_; }
  int philosopher_count() const { return static_cast<int>(arcs_.size()); }
  const std::string& name() const { return name_; }

  const Arc& arc(PhilosopherId p) const { return arcs_[p.index()]; }
  std::span<const Arc> arcs() const { return arcs_; }
  ForkId fork(PhilosopherId p, Side s) const { return arc(p).fork(s); }

  // Philosophers adjacent to f, in increasing index order. A philosopher whose
  // two endpoints coincide would appear twice.
  std::span<const PhilosopherId> incident(ForkId f) const { return incident_[f.index()]; }
  int degree(ForkId f) const { return static_cast<int>(incident_[f.index()].size()); }

  // Position of p inside incident(fork(p, s)).
  int slot(PhilosopherId p, Side s) const {
    return s == Side::kLeft ? slots_[p.index()].first : slots_[p.index()].second;
  }

  // Side of p attached to f; f must be one of p's forks.
  Side SideOf(PhilosopherId p, ForkId f) const;

  // Philosophers sharing at least one fork with p, excluding p.
  std::vector<PhilosopherId> Neighbours(PhilosopherId p) const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.fork_count_ == b.fork_count_ && a.arcs_ == b.arcs_;
  }

 private:
  int fork_count_;
  std::vector<Arc> arcs_;
  std::string name_;
  std::vector<std::vector<PhilosopherId>> incident_;
  std::vector<std::pair<int, int>> slots_;
};

Topology Ring(int size);

/**
 * Triangle with every edge doubled. Arc order (0-based index: left, right):
 *   0: (0,2)  1: (1,2)  2: (0,1)  3: (0,2)  4: (1,2)  5: (0,1)
 * so that arcs i and i+3 are parallel.
 */
Topology DoubledTriangle();

// Ring of ring_size forks plus pendant fork g = ring_size attached to fork 0
// by arc ring_size, oriented (0, g).
Topology RingWithPendant(int ring_size);

/**
 * Two hubs A = fork 0 and B = fork 1 joined by three internally disjoint
 * paths. Interior forks are numbered consecutively from 2, path by path; arcs
 * are listed path by path from A towards B. Each arc's lower-numbered endpoint
 * is its left fork.
 */
Topology Theta(int len1, int len2, int len3);

// Throws TopologyError describing the first violated invariant.
void Validate(const Topology& t);

// Returns an empty string when valid, otherwise the first violation.
std::string Check(const Topology& t);

struct Cycle {
  std::vector<PhilosopherId> arcs;  // in traversal order
  std::vector<ForkId> forks;        // forks[i] joins arcs[i-1] and arcs[i]

  friend bool operator==(const Cycle&, const Cycle&) = default;
};

constexpr int kDefaultCycleForkCap = 16;

// All simple cycles containing arc p. Each cycle starts with p and continues
// from p's right fork.
std::vector<Cycle> CyclesThrough(const Topology& t, PhilosopherId p,
                                 int fork_cap = kDefaultCycleForkCap);

// Every simple cycle of t exactly once, each starting at its lowest arc.
std::vector<Cycle> AllCycles(const Topology& t, int fork_cap = kDefaultCycleForkCap);

/**
 * Renaming of forks and philosophers: fork[f] is the image of fork f and
 * philosopher[p] the image of philosopher p.
 */
struct Relabeling {
  std::vector<int> fork;
  std::vector<int> philosopher;

  static Relabeling Identity(int forks, int philosophers);

  ForkId operator()(ForkId f) const { return ForkId(fork[f.index()]); }
  PhilosopherId operator()(PhilosopherId p) const {
    return PhilosopherId(philosopher[p.index()]);
  }

  friend bool operator==(const Relabeling&, const Relabeling&) = default;
};

// (a * b)(x) = a(b(x)).
Relabeling Compose(const Relabeling& a, const Relabeling& b);
Relabeling Inverse(const Relabeling& r);

// True iff r maps every arc of `from` onto the matching arc of `to` (sides
// may be swapped).
bool PreservesIncidence(const Topology& from, const Topology& to, const Relabeling& r);

// Copy of t with forks and philosophers renamed by r; sides of the arcs listed
// in `swap_sides` are exchanged.
Topology Relabel(const Topology& t, const Relabeling& r,
                 const std::vector<bool>& swap_sides = {});

Topology ParseTopology(const std::string& text);
std::string FormatTopology(const Topology& t);
Topology LoadTopology(const std::string& path);

}  // namespace dpsim

template <class Tag>
struct std::hash<dpsim::Index<Tag>> {
  std::size_t operator()(const dpsim::Index<Tag>& i) const noexcept {
    return std::hash<int>()(i.value());
  }
};

#endif /* DPSIM_TOPOLOGY_HH_ */
