// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DCA_EXPERIMENT_H_
#define DCA_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dca/config.h"
#include "dca/dataset.h"

namespace dca {

struct RunOptions {
  std::size_t seeds = 0;            // 0 uses config.seeds
  std::vector<std::string> ladder;  // empty uses config.variants or the default
  std::size_t threads = 1;
  bool quiet = true;
  std::string out_dir;  // empty writes no artifacts
};

// Train/evaluation data for one run.
struct RunData {
  std::vector<Utterance> train;
  std::vector<Utterance> eval;
  std::vector<Trial> trials;
};

// Run i uses seed config.seed + i for synthesized data, initialization and
// batching; manifest-backed data is shared by every run.
RunData PrepareRunData(const ExperimentConfig& config, std::uint64_t run_seed);

// Trains and evaluates every ladder entry for every seed. Writes
// report.json, config.json, scores/<entry>.seed<k>.txt and
// det/<entry>.seed<k>.csv under out_dir. Timing lives only in
// "wall_seconds" and "timings" fields.
nlohmann::json RunExperiment(const ExperimentConfig& config,
                             const RunOptions& options);

// Copy of a report without its timing fields.
nlohmann::json StripTimings(const nlohmann::json& report);

// DCA_THREADS if set and positive, else 1.
std::size_t ThreadsFromEnv();

struct GradSuiteEntry {
  Variant variant;
  std::size_t points = 0;
  double max_error = 0.0;
};

// Gradient check of the full training loss of each variant wrt every
// parameter at `points` random models and inputs.
std::vector<GradSuiteEntry> RunGradientSuite(const std::vector<Variant>& variants,
                                             std::size_t points,
                                             std::uint64_t seed);

}  // namespace dca

#endif  // DCA_EXPERIMENT_H_
