#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "farm/attribution.hpp"
#include "farm/backend.hpp"
#include "farm/core.hpp"
#include "farm/foveation.hpp"
#include "farm/rationalization.hpp"
#include "farm/uncertainty.hpp"

namespace farm {

// Everything a full run needs beyond the wired-up backend and retriever.
struct RunConfig {
  std::string model_id;
  // Absent retriever = the no-knowledge baseline: skip foveation and
  // attribution, rationalize with an empty knowledge block.
  std::optional<RetrieverConfig> retriever;
  int foveation_shot_count = 16;
  int rationale_shot_count = 0;  // 0: derive from source kind and transform_n
  int fov_samples = 0;           // >1: sample foveations, keep the most likely
  int max_foveation_attempts = 5;
  int workers = 1;
  int limit = 0;  // >0: stop after this many samples (also simulates a kill)
  std::filesystem::path output_dir;  // empty: keep outcomes in memory only
  GenerationParams params;           // greedy defaults

  void validate() const;  // throws Config on inconsistent settings
};

// Per-scenario record carrying every stage artifact. Serialized one per line
// to outcomes.jsonl; an interrupted run resumes by reusing finished lines.
struct FarmOutcome {
  std::string scenario_id;
  std::optional<Label> gold_label;

  std::vector<Foveation> foveations;  // every attempt; the last one retrieved
  AttributedKnowledge knowledge;
  std::optional<RationaleResult> rationale;

  bool parse_failure = false;
  bool retry_exhausted = false;
  std::string error;  // non-empty when the sample failed outright

  std::optional<double> entropy_nats;
  std::optional<double> perplexity;
  int backend_token_count = 0;
  int reference_token_count = 0;

  int rationale_shots_used = 0;
  bool rationale_shots_reduced = false;

  // Label the run would act on; nullopt for parse failures and hard errors.
  std::optional<Label> predicted() const;
  bool correct() const;  // predicted matches gold; false when either is absent

  nlohmann::json to_json() const;
  static FarmOutcome from_json(const nlohmann::json& j);
};

struct RunResult {
  std::vector<FarmOutcome> outcomes;
  int reused = 0;     // samples taken verbatim from an earlier run's file
  int computed = 0;   // samples processed this run
  std::filesystem::path outcomes_path;  // empty when nothing was persisted
};

// Runs the pipeline over the dataset with a bounded worker pool, persisting
// outcomes incrementally in dataset order. Per-sample failures are recorded
// in the outcome, never fatal; only configuration errors abort the run.
// `retriever` may be null when config.retriever is absent (baseline).
RunResult run_pipeline(const std::vector<SafetyScenario>& dataset, const RunConfig& config,
                       CompletionBackend& backend, Retriever* retriever,
                       const FoveationExampleBank& fov_bank, const RationaleExampleBank& rat_bank);

// Runs one scenario through foveate -> attribute -> rationalize -> uncertainty.
FarmOutcome run_scenario(const SafetyScenario& scenario, const RunConfig& config,
                         CompletionBackend& backend, Retriever* retriever,
                         const FoveationExampleBank& fov_bank,
                         const RationaleExampleBank& rat_bank);

// Reads an outcomes.jsonl file back; unparseable trailing lines are dropped
// (a killed writer can leave at most one).
std::vector<FarmOutcome> load_outcomes(const std::filesystem::path& path);

std::vector<UncertaintyRecord> uncertainty_records(const std::vector<FarmOutcome>& outcomes);

}  // namespace farm
