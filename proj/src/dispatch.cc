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

#include "dpsim/dispatch.hh"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dpsim/analysis/estimate.hh"
#include "dpsim/analysis/explore.hh"
#include "dpsim/analysis/oracles.hh"
#include "dpsim/analysis/verify.hh"
#include "dpsim/error.hh"

namespace dpsim {

namespace {

using Json = nlohmann::ordered_json;

std::ofstream Open(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  std::filesystem::path path = std::filesystem::path(cfg.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError("cannot write " + path.string());
  return f;
}

void WriteJson(const ExperimentConfig& cfg, const std::string& name, const Json& j) {
  Open(cfg, name) << j.dump(2) << '\n';
}

// Everything needed to replay the numbers in a report.
Json Header(const ExperimentConfig& cfg) {
  const RunSpec& s = cfg.spec;
  Json j;
  j["command"] = cfg.command;
  j["topology"] = s.topology->name();
  j["algorithm"] = ToString(s.algorithm);
  j["adversary"] = s.adversary.Describe();
  j["m"] = s.label_bound();
  j["eat_steps"] = s.eat_steps;
  j["draw_bias"] = ToString(s.draw_bias);
  if (s.labels) j["labels"] = *s.labels;
  j["horizon"] = s.horizon;
  Json seeds;
  seeds["seed"] = s.seed;
  if (cfg.command == "estimate") {
    seeds["trials"] = cfg.trials;
    seeds["trial_seed"] = "DeriveSeed(seed, 2^33 + t) for trial t";
  }
  seeds["philosopher_stream"] = "DeriveSeed(run seed, i) for philosopher i";
  seeds["adversary_stream"] = s.adversary.seed ? std::to_string(*s.adversary.seed)
                                               : "DeriveSeed(run seed, 2^32)";
  seeds["derive_seed"] = "Mix64(parent ^ Mix64(index + 0x9e3779b97f4a7c15)), Mix64 = SplitMix64";
  j["seeds"] = seeds;
  return j;
}

Json IntervalJson(const Interval& ci) { return Json{{"low", ci.low}, {"high", ci.high}}; }

std::vector<std::pair<StatePredicate, StatePredicate>> UnlessPairs(const ExperimentConfig& cfg) {
  const Topology& t = *cfg.spec.topology;
  std::vector<std::pair<StatePredicate, StatePredicate>> out;
  for (const auto& [s, s2] : cfg.unless) {
    if (s.find("[*]") == std::string::npos && s2.find("[*]") == std::string::npos) {
      out.emplace_back(ParsePredicate(s, t), ParsePredicate(s2, t));
      continue;
    }
    auto expand = [](std::string text, int i) {
      for (std::size_t pos; (pos = text.find("[*]")) != std::string::npos;) {
        text.replace(pos, 3, "[" + std::to_string(i) + "]");
      }
      return text;
    };
    for (int i = 0; i < t.philosopher_count(); ++i) {
      out.emplace_back(ParsePredicate(expand(s, i), t), ParsePredicate(expand(s2, i), t));
    }
  }
  return out;
}

std::vector<PhilosopherId> Scope(const ExperimentConfig& cfg) {
  std::vector<PhilosopherId> out;
  for (int p : cfg.scope) out.push_back(PhilosopherId(p));
  return out;
}

int DoRun(const ExperimentConfig& cfg, std::ostream& out) {
  RunOptions options;
  options.checked = cfg.checked;
  Trace trace = Run(cfg.spec, options);
  RunMetrics metrics = Metrics(trace);
  {
    auto f = Open(cfg, "trace.tsv");
    WriteTraceTsv(trace.history, f);
  }
  {
    auto f = Open(cfg, "metrics.csv");
    WriteMetricsCsv(metrics, f);
  }
  Json j = Header(cfg);
  j["steps"] = trace.size();
  j["fairness_window"] = trace.stated_window ? Json(*trace.stated_window) : Json();
  j["fairness_violations"] = metrics.fairness_violations.size();
  std::vector<int> eats;
  int total = 0;
  for (const auto& pm : metrics.philosophers) {
    eats.push_back(pm.eat_count);
    total += pm.eat_count;
  }
  j["eat_counts"] = eats;
  Json unless = Json::array();
  for (const auto& [s, s2] : UnlessPairs(cfg)) {
    unless.push_back({{"s", s.name}, {"s2", s2.name}, {"holds", CheckUnless(trace.history, s, s2)}});
  }
  if (!unless.empty()) j["unless"] = unless;
  WriteJson(cfg, "report.json", j);
  out << "run: " << trace.size() << " steps, " << total << " meals, "
      << metrics.fairness_violations.size() << " fairness violations\n";
  return kExitOk;
}

int DoEstimate(const ExperimentConfig& cfg, std::ostream& out) {
  Json j = Header(cfg);
  j["statistic"] = cfg.statistic;
  auto csv = Open(cfg, "estimate.csv");
  csv << "statistic,trials,successes,estimate,ci_low,ci_high\n";
  auto row = [&](std::uint64_t trials, std::uint64_t successes, double estimate, Interval ci) {
    j["trials"] = trials;
    j["successes"] = successes;
    j["estimate"] = estimate;
    j["ci95"] = IntervalJson(ci);
    csv << cfg.statistic << ',' << trials << ',' << successes << ',' << estimate << ',' << ci.low
        << ',' << ci.high << '\n';
    out << "estimate " << cfg.statistic << ": " << successes << "/" << trials << " = " << estimate
        << " [" << ci.low << ", " << ci.high << "]\n";
  };
  EstimateOptions options;
  options.workers = cfg.workers;
  options.checked = cfg.checked;
  options.unless = UnlessPairs(cfg);
  options.full_horizon = cfg.full_horizon;

  if (cfg.statistic == "progress") {
    const Topology& t = *cfg.spec.topology;
    ProgressStatement ps{ParsePredicate(cfg.source, t), ParsePredicate(cfg.target, t), 1};
    EstimateReport r = EstimateProgress(ps, cfg.spec, cfg.trials, cfg.spec.horizon, options);
    j["source"] = r.source;
    j["target"] = r.target;
    j["skipped"] = r.skipped;
    j["unless_failures"] = r.unless_failures;
    row(r.trials, r.successes, r.estimate, r.ci);
  } else if (cfg.statistic == "no-eat") {
    NoProgressOptions np;
    np.rounds = cfg.rounds.value_or(20);
    np.workers = cfg.workers;
    np.checked = cfg.checked;
    np.scope = Scope(cfg);
    NoProgressReport r = EstimateNoProgress(cfg.spec, cfg.trials, np);
    j["rounds"] = np.rounds;
    j["rounds_completed"] = r.rounds_completed;
    j["max_half_round"] = r.max_half_round;
    j["max_full_round"] = r.max_full_round;
    j["max_scheduling_gap"] = r.max_gap;
    j["fairness_violations"] = r.fairness_violations;
    j["guest_book_violations"] = r.guest_book_violations;
    row(r.trials, r.successes, r.estimate, r.ci);
  } else {
    EatReport r = EstimateEating(cfg.spec, cfg.trials, Scope(cfg), cfg.statistic == "eat-all",
                                 options);
    j["unless_failures"] = r.unless_failures;
    j["fairness_violations"] = r.fairness_violations;
    j["max_steps"] = r.max_steps;
    row(r.trials, r.successes, r.estimate, r.ci);
  }
  WriteJson(cfg, "estimate.json", j);
  return kExitOk;
}

int DoVerify(const ExperimentConfig& cfg, std::ostream& out) {
  VerifyReport r = VerifyCounterexample(cfg.spec, cfg.rounds.value_or(3));
  Json j = Header(cfg);
  j["verification"] = r.ToJson();
  WriteJson(cfg, "verify.json", j);
  out << "verify " << r.strategy << ": " << (r.passed() ? "passed" : "FAILED")
      << ", setup probability " << ToString(r.setup_probability) << "\n";
  return r.passed() ? kExitOk : kExitVerificationFailed;
}

int DoExplore(const ExperimentConfig& cfg, std::ostream& out) {
  ExploreCaps caps;
  caps.max_states = cfg.max_states;
  ExploreReport r = ExploreNoEatCycles(InitialConfiguration(cfg.spec), caps);
  Json j = Header(cfg);
  j.erase("horizon");
  j.erase("seeds");
  j["exploration"] = r.ToJson();
  WriteJson(cfg, "explore.json", j);
  out << "explore: " << r.states << " states, " << r.witnesses.size() << " witnesses\n";
  return kExitOk;
}

int DoOracle(const std::vector<std::string>& args, std::ostream& out) {
  auto need = [&](std::size_t n) {
    if (args.size() != n + 1) {
      throw ConfigurationError("oracle " + args[0] + " takes " + std::to_string(n) + " arguments");
    }
  };
  auto integer = [](const std::string& s) {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw ConfigurationError("not an integer: " + s);
    return v;
  };
  if (args.empty()) throw ConfigurationError("oracle needs a name");
  try {
    if (args[0] == "distinct" || args[0] == "enumerate") {
      need(2);
      int m = static_cast<int>(integer(args[1])), k = static_cast<int>(integer(args[2]));
      Rational r = args[0] == "distinct" ? DistinctValueProbability(m, k)
                                         : DistinctValueEnumerate(m, k);
      out << ToString(r) << '\n';
    } else if (args[0] == "product") {
      need(2);
      ProductBound b = ProductLowerBound(ParseRational(args[1]), static_cast<int>(integer(args[2])));
      out << "product " << ToString(b.product) << '\n'
          << "bound " << ToString(b.bound) << '\n'
          << "limit " << ToString(b.limit) << '\n';
    } else if (args[0] == "wilson") {
      need(2);
      Interval w = Wilson(integer(args[1]), integer(args[2]));
      out << w.low << ' ' << w.high << '\n';
    } else {
      throw ConfigurationError("unknown oracle '" + args[0] +
                               "'; available: distinct, enumerate, product, wilson");
    }
  } catch (const std::invalid_argument&) {
    throw ConfigurationError("oracle arguments must be numbers");
  } catch (const std::out_of_range&) {
    throw ConfigurationError("oracle argument out of range");
  }
  return kExitOk;
}

}  // namespace

int Dispatch(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.command == "oracle") return DoOracle(cfg.oracle, out);
  if (cfg.command == "run") return DoRun(cfg, out);
  if (cfg.command == "estimate") return DoEstimate(cfg, out);
  if (cfg.command == "verify") return DoVerify(cfg, out);
  if (cfg.command == "explore") return DoExplore(cfg, out);
  throw ConfigurationError("unknown command '" + cfg.command + "'");
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ConfigurationError*>(&e) ||
      dynamic_cast<const TopologyError*>(&e) || dynamic_cast<const StrategyMismatch*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return kExitConfigError;
  }
  if (dynamic_cast<const CapExceeded*>(&e) || dynamic_cast<const ExperimentAborted*>(&e)) {
    return kExitAborted;
  }
  return kExitInternalError;
}

}  // namespace dpsim
