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

#include "dpsim/analysis/predicates.hh"

#include <cctype>
#include <vector>

#include "dpsim/error.hh"

namespace dpsim {

namespace {

bool IsTrying(const Configuration& c, const PhilosopherState& s) {
  const ProgramLayout& L = c.layout();
  return s.line > L.think && s.line <= L.take_second;
}

bool AllArcsDistinct(const Configuration& c, const Cycle& cycle) {
  const Topology& t = c.topo();
  for (PhilosopherId p : cycle.arcs) {
    if (c.fork(t.fork(p, Side::kLeft)).label == c.fork(t.fork(p, Side::kRight)).label) {
      return false;
    }
  }
  return true;
}

StatePredicate CountCycles(std::string name, std::vector<Cycle> cycles, int r) {
  auto shared = std::make_shared<const std::vector<Cycle>>(std::move(cycles));
  return {std::move(name), [shared, r](const Configuration& c) {
            int count = 0;
            for (const Cycle& cycle : *shared) {
              if (AllArcsDistinct(c, cycle) && ++count >= r) return true;
            }
            return r <= 0;
          }};
}

}  // namespace

StatePredicate Trying() {
  return {"T", [](const Configuration& c) {
            for (const PhilosopherState& s : c.philosophers) {
              if (IsTrying(c, s)) return true;
            }
            return false;
          }};
}

StatePredicate Eating() {
  return {"E", [](const Configuration& c) {
            for (int i = 0; i < c.n(); ++i) {
              if (c.Eating(PhilosopherId(i))) return true;
            }
            return false;
          }};
}

StatePredicate Trying(PhilosopherId p) {
  return {"T[" + std::to_string(p.value()) + "]",
          [p](const Configuration& c) { return IsTrying(c, c.phil(p)); }};
}

StatePredicate Eating(PhilosopherId p) {
  return {"E[" + std::to_string(p.value()) + "]",
          [p](const Configuration& c) { return c.Eating(p); }};
}

StatePredicate DistinctCycles(const Topology& t, int r) {
  return CountCycles("C[" + std::to_string(r) + "]", AllCycles(t), r);
}

StatePredicate DistinctCycles(const Topology& t, PhilosopherId p, int r) {
  return CountCycles("C[" + std::to_string(p.value()) + "," + std::to_string(r) + "]",
                     CyclesThrough(t, p), r);
}

StatePredicate Waiting(const Topology& t, PhilosopherId p, int s) {
  auto neighbours = std::make_shared<const std::vector<PhilosopherId>>(t.Neighbours(p));
  return {"W[" + std::to_string(p.value()) + "," + std::to_string(s) + "]",
          [neighbours, s](const Configuration& c) {
            int count = 0;
            for (PhilosopherId q : *neighbours) {
              bool eaten = false, blocked = false;
              for (Side side : {Side::kLeft, Side::kRight}) {
                ForkId f = c.topo().fork(q, side);
                eaten = eaten || c.LastUse(f, q) > 0;
                blocked = blocked || !Cond(c, f, q);
              }
              if (eaten && blocked) ++count;
            }
            return count >= s;
          }};
}

StatePredicate And(StatePredicate a, StatePredicate b) {
  std::string name = "(" + a.name + " & " + b.name + ")";
  return {name, [a = std::move(a), b = std::move(b)](const Configuration& c) {
            return a(c) && b(c);
          }};
}

StatePredicate Or(StatePredicate a, StatePredicate b) {
  std::string name = "(" + a.name + " | " + b.name + ")";
  return {name, [a = std::move(a), b = std::move(b)](const Configuration& c) {
            return a(c) || b(c);
          }};
}

StatePredicate Not(StatePredicate a) {
  std::string name = "!" + a.name;
  return {name, [a = std::move(a)](const Configuration& c) { return !a(c); }};
}

namespace {

class PredicateParser {
 public:
  PredicateParser(const std::string& text, const Topology& t) : text_(text), t_(t) {}

  StatePredicate Parse() {
    StatePredicate p = Disjunction();
    Skip();
    if (pos_ != text_.size()) Fail("unexpected '" + text_.substr(pos_) + "'");
    return p;
  }

 private:
  [[noreturn]] void Fail(const std::string& why) const {
    throw ConfigurationError("predicate \"" + text_ + "\": " + why);
  }

  void Skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool Accept(char ch) {
    Skip();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  StatePredicate Disjunction() {
    StatePredicate p = Conjunction();
    while (Accept('|')) p = Or(std::move(p), Conjunction());
    return p;
  }

  StatePredicate Conjunction() {
    StatePredicate p = Atom();
    while (Accept('&')) p = And(std::move(p), Atom());
    return p;
  }

  int Number() {
    Skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) Fail("expected a number");
    return std::stoi(text_.substr(start, pos_ - start));
  }

  PhilosopherId Philosopher(int i) const {
    if (i >= t_.philosopher_count()) Fail("no philosopher " + std::to_string(i));
    return PhilosopherId(i);
  }

  StatePredicate Atom() {
    if (Accept('!')) return Not(Atom());
    if (Accept('(')) {
      StatePredicate p = Disjunction();
      if (!Accept(')')) Fail("missing ')'");
      return p;
    }
    Skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string word = text_.substr(start, pos_ - start);
    std::vector<int> args;
    if (Accept('[')) {
      do {
        args.push_back(Number());
      } while (Accept(','));
      if (!Accept(']')) Fail("missing ']'");
    }
    auto arity = [&](std::size_t n) {
      if (args.size() != n) Fail(word + " takes " + std::to_string(n) + " index(es)");
    };
    if (word == "true" || word == "false") {
      arity(0);
      bool v = word == "true";
      return {word, [v](const Configuration&) { return v; }};
    }
    if (word == "T" || word == "E") {
      if (args.empty()) return word == "T" ? Trying() : Eating();
      arity(1);
      PhilosopherId p = Philosopher(args[0]);
      return word == "T" ? Trying(p) : Eating(p);
    }
    if (word == "C") {
      if (args.size() == 1) return DistinctCycles(t_, args[0]);
      arity(2);
      return DistinctCycles(t_, Philosopher(args[0]), args[1]);
    }
    if (word == "W") {
      arity(2);
      return Waiting(t_, Philosopher(args[0]), args[1]);
    }
    Fail(word.empty() ? "expected a predicate" : "unknown predicate '" + word + "'");
  }

  std::string text_;
  const Topology& t_;
  std::size_t pos_ = 0;
};

}  // namespace

StatePredicate ParsePredicate(const std::string& text, const Topology& t) {
  return PredicateParser(text, t).Parse();
}

void UnlessMonitor::Observe(const Configuration& c) {
  const bool in_s = s_(c);
  const bool in_s2 = s2_(c);
  if (armed_ && !in_s && !in_s2 && !violation_) violation_ = index_;
  armed_ = in_s && !in_s2;
  ++index_;
}

bool CheckUnless(const History& history, const StatePredicate& s, const StatePredicate& s2) {
  UnlessMonitor monitor(s, s2);
  Configuration c = history.initial();
  monitor.Observe(c);
  for (const StepEvent& e : history.events()) {
    ReplayEvent(c, e);
    monitor.Observe(c);
  }
  return monitor.holds();
}

}  // namespace dpsim
