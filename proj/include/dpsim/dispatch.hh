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

#ifndef DPSIM_DISPATCH_HH_
#define DPSIM_DISPATCH_HH_

#include <iosfwd>

#include "dpsim/config.hh"

namespace dpsim {

// Process exit codes of the dpsim tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,  // verify found a broken expectation
  kExitConfigError = 2,         // unreadable or invalid config, bad flags
  kExitInternalError = 3,       // invariant violation or other bug
  kExitAborted = 4,             // experiment could not be carried out (caps, setup)
};

/**
 * Executes the configured command, writing its artifacts into cfg.out and a
 * short summary to `out`. Returns kExitOk or kExitVerificationFailed; other
 * failures are thrown.
 *
 *   run       trace.tsv, metrics.csv, report.json
 *   estimate  estimate.csv, estimate.json
 *   verify    verify.json
 *   explore   explore.json
 *   oracle    result on `out` only
 */
int Dispatch(const ExperimentConfig& cfg, std::ostream& out);

// Maps an exception from ParseConfig or Dispatch to an exit code.
int ExitCodeFor(const std::exception& e);

}  // namespace dpsim

#endif /* DPSIM_DISPATCH_HH_ */
