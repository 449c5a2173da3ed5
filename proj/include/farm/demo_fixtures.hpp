#pragma once

#include <filesystem>
#include <vector>

#include "farm/foveation.hpp"
#include "farm/pipeline.hpp"
#include "farm/rationalization.hpp"

namespace farm {

// A fully scripted 3-scenario run: dataset, completion scripts for a mock
// backend, and canned search results. Exercises the credible-source pipeline
// end to end with no network and byte-reproducible outputs.
struct DemoFixtures {
  std::filesystem::path dataset_path;
  std::filesystem::path backend_dir;
  std::filesystem::path retrieval_dir;
  std::string model_id;
};

std::vector<SafetyScenario> demo_scenarios();

// Writes dataset.jsonl, backend/, and retrieval/ under root. The scripts are
// keyed by the exact prompts the pipeline will build from the given banks.
DemoFixtures write_demo_fixtures(const std::filesystem::path& root,
                                 const FoveationExampleBank& fov_bank,
                                 const RationaleExampleBank& rat_bank);

// The run configuration the fixtures were scripted for (credible web source,
// top-3 snippets, greedy decoding, single worker).
RunConfig demo_run_config(const std::filesystem::path& output_dir);

}  // namespace farm
