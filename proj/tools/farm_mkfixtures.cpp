#include <iostream>

#include <CLI11.hpp>

#include "farm/demo_fixtures.hpp"

// Writes the scripted 3-scenario demo: a dataset, completion scripts for the
// mock backend, and canned search results, all keyed to the shipped example
// banks. A run against them needs no network and reproduces byte-identical
// outputs.
int main(int argc, char** argv) {
  CLI::App app{"Write the scripted demo fixture set"};
  std::string out_dir;
  std::string fov_bank = "data/foveation_bank.json";
  std::string rationale_bank = "data/rationale_bank.json";
  app.add_option("out", out_dir, "directory to write fixtures into")->required();
  app.add_option("--fov-bank", fov_bank, "foveation example bank JSON");
  app.add_option("--rationale-bank", rationale_bank, "rationale example bank JSON");
  CLI11_PARSE(app, argc, argv);

  try {
    farm::DemoFixtures fixtures = farm::write_demo_fixtures(
        out_dir, farm::load_foveation_bank(fov_bank), farm::load_rationale_bank(rationale_bank));
    std::cout << "dataset:   " << fixtures.dataset_path.string() << '\n'
              << "backend:   " << fixtures.backend_dir.string() << '\n'
              << "retrieval: " << fixtures.retrieval_dir.string() << '\n'
              << "model:     mock:" << fixtures.model_id << '\n';
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
