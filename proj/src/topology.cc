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

#include "dpsim/topology.hh"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dpsim/error.hh"

namespace dpsim {

const char* ToString(Side s) { return s == Side::kLeft ? "left" : "right"; }

Topology::Topology(int fork_count, std::vector<Arc> arcs, std::string name)
    : fork_count_(fork_count),
      arcs_(std::move(arcs)),
      name_(std::move(name)),
      incident_(std::max(fork_count, 0)),
      slots_(arcs_.size(), {-1, -1}) {
  auto in_range = [&](ForkId f) { return f.value() >= 0 && f.value() < fork_count_; };
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const Arc& a = arcs_[i];
    PhilosopherId p(static_cast<int>(i));
    if (in_range(a.left)) {
      slots_[i].first = static_cast<int>(incident_[a.left.index()].size());
      incident_[a.left.index()].push_back(p);
    }
    if (in_range(a.right)) {
      slots_[i].second = static_cast<int>(incident_[a.right.index()].size());
      incident_[a.right.index()].push_back(p);
    }
  }
}

Side Topology::SideOf(PhilosopherId p, ForkId f) const {
  const Arc& a = arc(p);
  if (a.left == f) return Side::kLeft;
  if (a.right == f) return Side::kRight;
  throw std::logic_error("fork " + std::to_string(f.value()) +
                         " is not adjacent to philosopher " +
                         std::to_string(p.value()));
}

std::vector<PhilosopherId> Topology::Neighbours(PhilosopherId p) const {
  std::vector<PhilosopherId> out;
  for (Side s : {Side::kLeft, Side::kRight}) {
    for (PhilosopherId q : incident(fork(p, s))) {
      if (q != p) out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Topology Ring(int size) {
  if (size < 2) {
    throw TopologyError("ring needs at least 2 forks, got " + std::to_string(size));
  }
  std::vector<Arc> arcs;
  for (int i = 0; i < size; ++i) arcs.push_back({ForkId(i), ForkId((i + 1) % size)});
  return Topology(size, std::move(arcs), "ring(" + std::to_string(size) + ")");
}

Topology DoubledTriangle() {
  std::vector<Arc> arcs;
  for (int copy = 0; copy < 2; ++copy) {
    arcs.push_back({ForkId(0), ForkId(2)});
    arcs.push_back({ForkId(1), ForkId(2)});
    arcs.push_back({ForkId(0), ForkId(1)});
  }
  return Topology(3, std::move(arcs), "doubled-triangle");
}

Topology RingWithPendant(int ring_size) {
  if (ring_size < 3) {
    throw TopologyError("ring-with-pendant needs a ring of at least 3 forks, got " +
                        std::to_string(ring_size));
  }
  std::vector<Arc> arcs;
  for (int i = 0; i < ring_size; ++i) {
    arcs.push_back({ForkId(i), ForkId((i + 1) % ring_size)});
  }
  arcs.push_back({ForkId(0), ForkId(ring_size)});
  return Topology(ring_size + 1, std::move(arcs),
                  "ring-with-pendant(" + std::to_string(ring_size) + ")");
}

Topology Theta(int len1, int len2, int len3) {
  const int lens[3] = {len1, len2, len3};
  int ones = 0;
  for (int len : lens) {
    if (len < 1) throw TopologyError("theta path lengths must be at least 1");
    if (len == 1) ++ones;
  }
  if (ones > 1) {
    throw TopologyError("theta allows at most one path of length 1");
  }
  std::vector<Arc> arcs;
  int next = 2;
  for (int len : lens) {
    int prev = 0;
    for (int j = 1; j <= len; ++j) {
      int cur = j == len ? 1 : next++;
      arcs.push_back({ForkId(std::min(prev, cur)), ForkId(std::max(prev, cur))});
      prev = cur;
    }
  }
  std::ostringstream name;
  name << "theta(" << len1 << "," << len2 << "," << len3 << ")";
  return Topology(next, std::move(arcs), name.str());
}

std::string Check(const Topology& t) {
  if (t.fork_count() < 2) {
    return "at least 2 forks required, got " + std::to_string(t.fork_count());
  }
  if (t.philosopher_count() < 1) return "at least 1 philosopher required";
  for (int i = 0; i < t.philosopher_count(); ++i) {
    const Arc& a = t.arc(PhilosopherId(i));
    for (ForkId f : {a.left, a.right}) {
      if (f.value() < 0 || f.value() >= t.fork_count()) {
        return "philosopher " + std::to_string(i) + ": dangling fork reference " +
               std::to_string(f.value());
      }
    }
    if (a.left == a.right) {
      return "philosopher " + std::to_string(i) + ": philosopher with identical forks";
    }
  }
  return "";
}

void Validate(const Topology& t) {
  std::string problem = Check(t);
  if (!problem.empty()) throw TopologyError(problem);
}

namespace {

void RequireCycleCap(const Topology& t, int fork_cap) {
  Validate(t);
  if (t.fork_count() > fork_cap) {
    throw CapExceeded("cycle enumeration limited to " + std::to_string(fork_cap) +
                      " forks, topology has " + std::to_string(t.fork_count()));
  }
}

// Depth-first search for simple paths from the start arc's right fork back to
// its left fork, using only arcs with index >= min_arc.
class CycleSearch {
 public:
  CycleSearch(const Topology& t, PhilosopherId start, int min_arc)
      : t_(t), start_(start), min_arc_(min_arc), visited_(t.fork_count(), false) {}

  std::vector<Cycle> Run() {
    const Arc& a = t_.arc(start_);
    target_ = a.left;
    path_arcs_ = {start_};
    path_forks_ = {a.left};
    visited_[a.right.index()] = true;
    Extend(a.right);
    return std::move(found_);
  }

 private:
  void Extend(ForkId at) {
    for (PhilosopherId q : t_.incident(at)) {
      if (q == start_ || q.value() < min_arc_) continue;
      const Arc& a = t_.arc(q);
      ForkId next = a.left == at ? a.right : a.left;
      if (next == target_) {
        Cycle c;
        c.arcs = path_arcs_;
        c.arcs.push_back(q);
        c.forks = path_forks_;
        c.forks.push_back(at);
        found_.push_back(std::move(c));
        continue;
      }
      if (visited_[next.index()]) continue;
      visited_[next.index()] = true;
      path_arcs_.push_back(q);
      path_forks_.push_back(at);
      Extend(next);
      path_forks_.pop_back();
      path_arcs_.pop_back();
      visited_[next.index()] = false;
    }
  }

  const Topology& t_;
  PhilosopherId start_;
  int min_arc_;
  ForkId target_;
  std::vector<bool> visited_;
  std::vector<PhilosopherId> path_arcs_;
  std::vector<ForkId> path_forks_;
  std::vector<Cycle> found_;
};

}  // namespace

std::vector<Cycle> CyclesThrough(const Topology& t, PhilosopherId p, int fork_cap) {
  RequireCycleCap(t, fork_cap);
  return CycleSearch(t, p, 0).Run();
}

std::vector<Cycle> AllCycles(const Topology& t, int fork_cap) {
  RequireCycleCap(t, fork_cap);
  std::vector<Cycle> all;
  for (int i = 0; i < t.philosopher_count(); ++i) {
    auto cycles = CycleSearch(t, PhilosopherId(i), i + 1).Run();
    all.insert(all.end(), cycles.begin(), cycles.end());
  }
  return all;
}

Relabeling Relabeling::Identity(int forks, int philosophers) {
  Relabeling r;
  for (int i = 0; i < forks; ++i) r.fork.push_back(i);
  for (int i = 0; i < philosophers; ++i) r.philosopher.push_back(i);
  return r;
}

Relabeling Compose(const Relabeling& a, const Relabeling& b) {
  Relabeling r;
  for (int f : b.fork) r.fork.push_back(a.fork[f]);
  for (int p : b.philosopher) r.philosopher.push_back(a.philosopher[p]);
  return r;
}

Relabeling Inverse(const Relabeling& r) {
  Relabeling inv;
  inv.fork.resize(r.fork.size());
  inv.philosopher.resize(r.philosopher.size());
  for (std::size_t i = 0; i < r.fork.size(); ++i) inv.fork[r.fork[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < r.philosopher.size(); ++i) {
    inv.philosopher[r.philosopher[i]] = static_cast<int>(i);
  }
  return inv;
}

bool PreservesIncidence(const Topology& from, const Topology& to, const Relabeling& r) {
  if (from.fork_count() != to.fork_count() ||
      from.philosopher_count() != to.philosopher_count()) {
    return false;
  }
  for (int i = 0; i < from.philosopher_count(); ++i) {
    const Arc& a = from.arc(PhilosopherId(i));
    const Arc& b = to.arc(r(PhilosopherId(i)));
    ForkId l = r(a.left), rr = r(a.right);
    if (!((b.left == l && b.right == rr) || (b.left == rr && b.right == l))) return false;
  }
  return true;
}

Topology Relabel(const Topology& t, const Relabeling& r, const std::vector<bool>& swap_sides) {
  std::vector<Arc> arcs(t.philosopher_count());
  for (int i = 0; i < t.philosopher_count(); ++i) {
    const Arc& a = t.arc(PhilosopherId(i));
    Arc b{r(a.left), r(a.right)};
    if (!swap_sides.empty() && swap_sides[i]) std::swap(b.left, b.right);
    arcs[r.philosopher[i]] = b;
  }
  return Topology(t.fork_count(), std::move(arcs), t.name());
}

Topology ParseTopology(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int forks = -1;
  std::vector<Arc> arcs;
  auto fail = [&](const std::string& msg) {
    throw TopologyError("topology line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword)) continue;
    if (keyword == "forks") {
      if (forks >= 0) fail("duplicate 'forks' line");
      if (!(fields >> forks) || forks < 0) fail("expected 'forks <count>'");
    } else if (keyword == "arc") {
      if (forks < 0) fail("'arc' before 'forks'");
      int l, r;
      if (!(fields >> l >> r)) fail("expected 'arc <left> <right>'");
      arcs.push_back({ForkId(l), ForkId(r)});
    } else {
      fail("unknown keyword '" + keyword + "'");
    }
    std::string extra;
    if (fields >> extra) fail("unexpected trailing text '" + extra + "'");
  }
  if (forks < 0) throw TopologyError("topology text has no 'forks' line");
  Topology t(forks, std::move(arcs), "file");
  Validate(t);
  return t;
}

std::string FormatTopology(const Topology& t) {
  std::ostringstream out;
  out << "forks " << t.fork_count() << "\n";
  for (const Arc& a : t.arcs()) out << "arc " << a.left.value() << " " << a.right.value() << "\n";
  return out.str();
}

Topology LoadTopology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open topology file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseTopology(buf.str());
}

}  // namespace dpsim
