#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "farm/backend.hpp"
#include "farm/core.hpp"

namespace farm {

struct FoveationExample {
  std::string question;
  std::string foveation;
};

// Few-shot examples guiding the foveation generation; at most 16, and kept
// disjoint from the evaluation scenarios.
struct FoveationExampleBank {
  std::vector<FoveationExample> examples;
};

// Bank file schema: {"examples": [{"question": ..., "foveation": ...}, ...]}.
FoveationExampleBank load_foveation_bank(const std::filesystem::path& path);
FoveationExampleBank foveation_bank_from_json(const nlohmann::json& j);

// Throws Config when any bank question exactly matches a dataset question.
void ensure_bank_disjoint(const std::vector<std::string>& bank_questions,
                          const std::vector<SafetyScenario>& scenarios,
                          const std::string& bank_name);

struct FoveationOptions {
  int shot_count = 16;
  int max_attempts = 5;   // generation attempts including imaginative retries
  int samples = 0;        // >1: sample that many candidates and keep the most likely
  GenerationParams params;  // greedy defaults; stop tokens are added internally
};

// Instruction header + shot_count "Q:/A:" example blocks + the scenario's
// question with a dangling "A:". Deterministic bytes.
std::string build_foveation_prompt(const SafetyScenario& scenario,
                                   const FoveationExampleBank& bank, int shot_count);

// Stop sequences preventing the model from generating further example blocks.
std::vector<std::string> foveation_stop_tokens();

// Greedy foveation (attempt 1). With options.samples > 1, draws that many
// temperature-1 candidates and keeps the one with the highest sequence
// log-likelihood.
Foveation foveate(const SafetyScenario& scenario, CompletionBackend& backend,
                  const std::string& model_id, const FoveationExampleBank& bank,
                  const FoveationOptions& options);

// Imaginative retry after failed retrieval: temperature 1, both penalties 2.
// Regenerates until the text differs from every prior foveation (case-folded
// exact match); throws RetryExhausted after options.max_attempts tries.
Foveation refoveate(const SafetyScenario& scenario, CompletionBackend& backend,
                    const std::string& model_id, const FoveationExampleBank& bank,
                    const FoveationOptions& options, const std::vector<Foveation>& prior);

}  // namespace farm
