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

#include "dpsim/config.hh"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dpsim/error.hh"

namespace dpsim {

namespace {

std::string Trim(const std::string& s) {
  const char* ws = " \t\r\n";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string> Words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <class T>
T Number(const std::string& text, int line, const std::string& key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::vector<int> IntList(const std::string& text, int line, const std::string& key) {
  std::string spaced = text;
  for (char& ch : spaced) {
    if (ch == ',') ch = ' ';
  }
  std::vector<int> out;
  for (const std::string& w : Words(spaced)) out.push_back(Number<int>(w, line, key));
  return out;
}

const std::set<std::string> kKeys = {
    "command",   "topology", "algorithm", "adversary", "budget",     "patience", "adversary_seed",
    "seed",      "trials",   "horizon",   "workers",   "m",          "eat_steps", "draw_bias",
    "labels",    "hunger",   "statistic", "source",    "target",     "scope",    "rounds",
    "unless",    "checked",  "full_horizon", "oracle", "max_states", "out"};

const std::set<std::string> kCommands = {"run", "estimate", "verify", "explore", "oracle"};
const std::set<std::string> kStatistics = {"progress", "no-eat", "eat-all", "eat-any"};

}  // namespace

std::shared_ptr<const Topology> MakeTopology(const std::string& text) {
  std::vector<std::string> w = Words(text);
  if (w.empty()) throw ConfigurationError("empty topology");
  auto arg = [&](std::size_t i) {
    if (i >= w.size()) throw ConfigurationError("topology '" + text + "' is missing parameters");
    int v = 0;
    auto [ptr, ec] = std::from_chars(w[i].data(), w[i].data() + w[i].size(), v);
    if (ec != std::errc() || ptr != w[i].data() + w[i].size()) {
      throw ConfigurationError("topology parameter '" + w[i] + "' is not an integer");
    }
    return v;
  };
  auto arity = [&](std::size_t n) {
    if (w.size() != n + 1) {
      throw ConfigurationError("topology " + w[0] + " takes " + std::to_string(n) + " parameter(s)");
    }
  };
  if (w[0] == "ring") {
    arity(1);
    return std::make_shared<const Topology>(Ring(arg(1)));
  }
  if (w[0] == "doubled-triangle") {
    arity(0);
    return std::make_shared<const Topology>(DoubledTriangle());
  }
  if (w[0] == "ring-with-pendant") {
    arity(1);
    return std::make_shared<const Topology>(RingWithPendant(arg(1)));
  }
  if (w[0] == "theta") {
    arity(3);
    return std::make_shared<const Topology>(Theta(arg(1), arg(2), arg(3)));
  }
  if (w[0] == "file") {
    arity(1);
    return std::make_shared<const Topology>(LoadTopology(w[1]));
  }
  throw ConfigurationError("unknown topology '" + w[0] +
                           "'; available: ring, doubled-triangle, ring-with-pendant, theta, file");
}

ExperimentConfig ParseConfig(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  int line_no = 0;
  std::string algorithm_text;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    // "unless" values contain "=>", so split on the first '=' only.
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (!kKeys.count(key)) throw ParseError(line_no, "unknown key '" + key + "'");
    if (key != "unless" && seen.count(key)) {
      throw ParseError(line_no, "'" + key + "' already set on line " + std::to_string(seen[key]));
    }
    seen[key] = line_no;
    if (value.empty()) throw ParseError(line_no, key + ": missing value");

    try {
      if (key == "command") {
        if (!kCommands.count(value)) {
          throw ParseError(line_no, "unknown command '" + value +
                                        "'; available: run, estimate, verify, explore, oracle");
        }
        cfg.command = value;
      } else if (key == "topology") {
        cfg.topology_text = value;
        cfg.spec.topology = MakeTopology(value);
      } else if (key == "algorithm") {
        algorithm_text = value;
        cfg.spec.algorithm = ParseAlgorithm(value);
      } else if (key == "adversary") {
        std::vector<std::string> w = Words(value);
        AdversarySpec& a = cfg.spec.adversary;
        std::size_t i = 0;
        if (w[0] == "fairize") {
          a.fairize = true;
          if (w.size() < 2) throw ParseError(line_no, "fairize needs a strategy");
          i = 1;
        }
        a.kind = w[i];
        a.params.clear();
        for (std::size_t j = i + 1; j < w.size(); ++j) a.params.push_back(Number<int>(w[j], line_no, key));
      } else if (key == "budget") {
        std::vector<std::string> w = Words(value);
        if (w[0] == "union-bound" && w.size() == 1) {
          cfg.spec.adversary.budget_extra.reset();
        } else if (w[0] == "linear" && w.size() == 2) {
          cfg.spec.adversary.budget_extra = Number<int>(w[1], line_no, key);
        } else {
          throw ParseError(line_no, "budget: expected 'union-bound' or 'linear EXTRA'");
        }
      } else if (key == "patience") {
        cfg.spec.adversary.patience = Number<int>(value, line_no, key);
      } else if (key == "adversary_seed") {
        cfg.spec.adversary.seed = Number<std::uint64_t>(value, line_no, key);
      } else if (key == "seed") {
        cfg.spec.seed = Number<std::uint64_t>(value, line_no, key);
      } else if (key == "trials") {
        cfg.trials = Number<std::uint64_t>(value, line_no, key);
        if (cfg.trials < 1) throw ParseError(line_no, "trials must be at least 1");
      } else if (key == "horizon") {
        cfg.spec.horizon = Number<std::size_t>(value, line_no, key);
        if (cfg.spec.horizon < 1) throw ParseError(line_no, "horizon must be at least 1");
      } else if (key == "workers") {
        cfg.workers = Number<int>(value, line_no, key);
        if (cfg.workers < 1) throw ParseError(line_no, "workers must be at least 1");
      } else if (key == "m") {
        cfg.spec.m = Number<int>(value, line_no, key);
        if (cfg.spec.m < 1) throw ParseError(line_no, "m must be at least 1");
      } else if (key == "eat_steps") {
        cfg.spec.eat_steps = Number<int>(value, line_no, key);
        if (cfg.spec.eat_steps < 1) throw ParseError(line_no, "eat_steps must be at least 1");
      } else if (key == "draw_bias") {
        cfg.spec.draw_bias = ParseRational(value);
        if (cfg.spec.draw_bias <= 0 || cfg.spec.draw_bias >= 1) {
          throw ParseError(line_no, "draw_bias must lie strictly between 0 and 1");
        }
      } else if (key == "labels") {
        cfg.spec.labels = IntList(value, line_no, key);
      } else if (key == "hunger") {
        cfg.spec.hunger = HungerModel{};
        if (value != "always") {
          std::string rest = value;
          for (std::size_t pos; (pos = rest.find(';')) != std::string::npos;) {
            cfg.spec.hunger.think_durations.push_back(IntList(rest.substr(0, pos), line_no, key));
            rest = rest.substr(pos + 1);
          }
          cfg.spec.hunger.think_durations.push_back(IntList(rest, line_no, key));
        }
      } else if (key == "statistic") {
        if (!kStatistics.count(value)) {
          throw ParseError(line_no, "unknown statistic '" + value +
                                        "'; available: progress, no-eat, eat-all, eat-any");
        }
        cfg.statistic = value;
      } else if (key == "source") {
        cfg.source = value;
      } else if (key == "target") {
        cfg.target = value;
      } else if (key == "scope") {
        cfg.scope = IntList(value, line_no, key);
      } else if (key == "rounds") {
        cfg.rounds = Number<int>(value, line_no, key);
        if (*cfg.rounds < 1) throw ParseError(line_no, "rounds must be at least 1");
      } else if (key == "unless") {
        std::size_t arrow = value.find("=>");
        if (arrow == std::string::npos) throw ParseError(line_no, "unless: expected 'S => S2'");
        cfg.unless.emplace_back(Trim(value.substr(0, arrow)), Trim(value.substr(arrow + 2)));
      } else if (key == "checked") {
        if (value != "true" && value != "false") throw ParseError(line_no, "checked: true or false");
        cfg.checked = value == "true";
      } else if (key == "full_horizon") {
        if (value != "true" && value != "false") {
          throw ParseError(line_no, "full_horizon: true or false");
        }
        cfg.full_horizon = value == "true";
      } else if (key == "oracle") {
        cfg.oracle = Words(value);
      } else if (key == "max_states") {
        cfg.max_states = Number<std::size_t>(value, line_no, key);
      } else if (key == "out") {
        cfg.out = value;
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }

  auto where = [&](const std::string& key) { return seen.count(key) ? seen[key] : line_no; };
  if (cfg.command.empty()) throw ParseError(line_no, "missing required key 'command'");
  if (cfg.command == "oracle") {
    if (cfg.oracle.empty()) throw ParseError(line_no, "oracle command needs 'oracle'");
    return cfg;
  }
  if (!cfg.spec.topology) throw ParseError(line_no, "missing required key 'topology'");
  if (algorithm_text.empty()) throw ParseError(line_no, "missing required key 'algorithm'");
  const int k = cfg.spec.topology->fork_count();
  if (UsesLabels(cfg.spec.algorithm) && cfg.spec.m != 0 && cfg.spec.m < k) {
    throw ParseError(where("m"), "m = " + std::to_string(cfg.spec.m) + " is below the fork count " +
                                     std::to_string(k) + "; " + algorithm_text + " needs m >= k");
  }
  for (int p : cfg.scope) {
    if (p < 0 || p >= cfg.spec.topology->philosopher_count()) {
      throw ParseError(where("scope"), "scope names philosopher " + std::to_string(p) +
                                           ", which does not exist");
    }
  }
  try {
    Validate(cfg.spec);
    MakeAdversary(cfg.spec);
  } catch (const Error& e) {
    // Blame the line of the key the message is about, if it names one.
    const std::string what = e.what();
    int line = line_no;
    if (dynamic_cast<const StrategyMismatch*>(&e) && seen.count("adversary")) {
      throw ParseError(seen["adversary"], what);
    }
    for (const char* key : {"hunger", "labels", "draw_bias", "eat_steps", "horizon", "topology"}) {
      if (seen.count(key) && what.find(key) != std::string::npos) {
        line = seen[key];
        break;
      }
    }
    if (line == line_no && seen.count("adversary")) line = seen["adversary"];
    throw ParseError(line, what);
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

}  // namespace dpsim
