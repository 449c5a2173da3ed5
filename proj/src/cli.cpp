#include "farm/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "farm/annotations.hpp"
#include "farm/dataset.hpp"
#include "farm/errors.hpp"
#include "farm/report.hpp"
#include "farm/scoring.hpp"
#include "farm/settings.hpp"

namespace farm {

namespace {

// Usage and configuration problems exit 2; runtime failures exit 1.
int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Config:
    case Errc::InvalidN:
    case Errc::EmptyBank:
    case Errc::ParseError:
    case Errc::DuplicateId:
      return 2;
    default:
      return 1;
  }
}

struct CacheBox {
  std::optional<FileCache> cache;

  FileCache* open(const std::string& dir) {
    if (dir.empty()) return nullptr;
    cache.emplace(dir);
    return &*cache;
  }
};

SafetyScenario scenario_from_flags(const std::string& prompt, const std::string& action) {
  nlohmann::json record = {{"id", "cli"}, {"prompt", prompt}, {"action", action}};
  return validate_scenario(record);
}

nlohmann::json foveation_json(const Foveation& f) {
  return {{"text", f.text}, {"log_likelihood", f.log_likelihood}, {"attempt", f.attempt}};
}

// Records joinable to a gold label; aggregate() rejects any other.
std::vector<UncertaintyRecord> scorable_records(const std::vector<FarmOutcome>& outcomes,
                                                const std::map<std::string, Label>& gold) {
  std::vector<UncertaintyRecord> records = uncertainty_records(outcomes);
  std::vector<UncertaintyRecord> kept;
  for (auto& r : records) {
    if (gold.count(r.scenario_id) > 0) kept.push_back(std::move(r));
  }
  return kept;
}

int run_command(const Settings& settings, const std::string& dataset_path) {
  CacheBox box;
  Wiring wiring = wire_up(settings, box.open(settings.cache_dir));
  FoveationExampleBank fov_bank = load_foveation_bank(settings.fov_bank);
  RationaleExampleBank rat_bank = load_rationale_bank(settings.rationale_bank);
  std::vector<SafetyScenario> dataset = load_dataset(dataset_path);

  RunConfig config = run_config_from_settings(settings);
  RunResult result =
      run_pipeline(dataset, config, *wiring.backend, wiring.retriever.get(), fov_bank, rat_bank);

  AccuracyReport accuracy = score(result.outcomes, dataset);
  auto gold = gold_labels(dataset);
  UncertaintyReport uncertainty = aggregate(scorable_records(result.outcomes, gold), gold);

  ReportMeta meta;
  meta.model_id = config.model_id;
  meta.source_kind = settings.source;
  meta.transform_n = config.retriever ? config.retriever->transform_n : 0;
  meta.samples = static_cast<int>(result.outcomes.size());
  write_report(config.output_dir, meta, accuracy, uncertainty);
  std::cout << render_report_text(meta, accuracy, uncertainty);
  if (result.reused > 0) {
    std::cout << "\nresumed: reused " << result.reused << " stored samples, computed "
              << result.computed << '\n';
  }

  bool failures = accuracy.parse_failures > 0 || accuracy.retry_exhausted > 0 ||
                  accuracy.errors > 0;
  return failures ? 1 : 0;
}

int foveate_command(const Settings& settings, const std::string& prompt,
                    const std::string& action) {
  CacheBox box;
  Wiring wiring = wire_up(settings, box.open(settings.cache_dir));
  FoveationExampleBank bank = load_foveation_bank(settings.fov_bank);
  SafetyScenario scenario = scenario_from_flags(prompt, action);
  FoveationOptions options;
  options.shot_count = settings.fov_shots;
  options.max_attempts = settings.max_attempts;
  options.samples = settings.fov_samples;
  Foveation foveation = foveate(scenario, *wiring.backend, wiring.model_id, bank, options);
  std::cout << foveation_json(foveation).dump(2) << '\n';
  return 0;
}

int attribute_command(const Settings& settings, const std::string& prompt,
                      const std::string& action) {
  CacheBox box;
  Wiring wiring = wire_up(settings, box.open(settings.cache_dir));
  if (!wiring.retriever) {
    throw Error(Errc::Config, "attribution needs a retrieval source other than none");
  }
  FoveationExampleBank bank = load_foveation_bank(settings.fov_bank);
  SafetyScenario scenario = scenario_from_flags(prompt, action);
  FoveationOptions options;
  options.shot_count = settings.fov_shots;
  options.max_attempts = settings.max_attempts;
  options.samples = settings.fov_samples;
  RunConfig config = run_config_from_settings(settings);
  Attribution attribution = attribute(scenario, *wiring.backend, wiring.model_id, bank, options,
                                      *wiring.retriever, *config.retriever);
  nlohmann::json out = {{"foveation", foveation_json(attribution.foveation)},
                        {"knowledge",
                         {{"snippets", snippets_to_json(attribution.knowledge.snippets)},
                          {"transform_n", attribution.knowledge.transform_n},
                          {"source_kind", source_kind_name(attribution.knowledge.source_kind)}}}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int rationalize_command(const Settings& settings, const std::string& prompt,
                        const std::string& action) {
  CacheBox box;
  Wiring wiring = wire_up(settings, box.open(settings.cache_dir));
  FoveationExampleBank fov_bank = load_foveation_bank(settings.fov_bank);
  RationaleExampleBank rat_bank = load_rationale_bank(settings.rationale_bank);
  SafetyScenario scenario = scenario_from_flags(prompt, action);
  RunConfig config = run_config_from_settings(settings);
  config.output_dir.clear();
  FarmOutcome outcome = run_scenario(scenario, config, *wiring.backend, wiring.retriever.get(),
                                     fov_bank, rat_bank);
  std::cout << outcome.to_json().dump(2) << '\n';
  return outcome.error.empty() && !outcome.parse_failure ? 0 : 1;
}

int eval_command(const std::string& outcomes_path, const std::string& dataset_path,
                 const std::string& out_dir) {
  std::vector<FarmOutcome> outcomes = load_outcomes(outcomes_path);
  std::vector<SafetyScenario> dataset = load_dataset(dataset_path);
  AccuracyReport accuracy = score(outcomes, dataset);
  auto gold = gold_labels(dataset);
  UncertaintyReport uncertainty = aggregate(scorable_records(outcomes, gold), gold);
  ReportMeta meta;
  meta.model_id = "(from stored outcomes)";
  meta.samples = static_cast<int>(outcomes.size());
  if (!out_dir.empty()) write_report(out_dir, meta, accuracy, uncertainty);
  std::cout << render_accuracy_table(accuracy) << '\n' << render_uncertainty_table(uncertainty);
  return 0;
}

int export_command(const std::string& outcomes_path, const std::string& dataset_path,
                   const std::string& kind_name, const std::string& out_file,
                   const std::string& ratings_file) {
  AnnotationKind kind;
  if (kind_name == "foveation") kind = AnnotationKind::FoveationRating;
  else if (kind_name == "rationale") kind = AnnotationKind::RationaleRating;
  else throw Error(Errc::Config, "kind must be foveation or rationale, got " + kind_name);

  if (!ratings_file.empty()) {
    RatingDistribution dist = import_annotations(ratings_file, kind);
    nlohmann::json out;
    if (kind == AnnotationKind::FoveationRating) {
      out = {{"SE", dist.percent("SE")}, {"GE", dist.percent("GE")}, {"CF", dist.percent("CF")}};
    } else {
      out = {{"factuality_error", dist.percent("factuality_error")},
             {"entailment_error", dist.percent("entailment_error")},
             {"attribution_error", dist.percent("attribution_error")}};
    }
    out["rated"] = dist.rated;
    out["rows"] = dist.total_rows;
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  if (outcomes_path.empty() || out_file.empty()) {
    throw Error(Errc::Config, "export needs --outcomes and --out (or --ratings to tally)");
  }
  std::vector<FarmOutcome> outcomes = load_outcomes(outcomes_path);
  std::vector<SafetyScenario> dataset =
      dataset_path.empty() ? std::vector<SafetyScenario>{} : load_dataset(dataset_path);
  std::filesystem::path written = export_annotations(outcomes, dataset, kind, out_file);
  std::cout << written.string() << '\n';
  return 0;
}

void add_backend_flags(CLI::App* cmd, Settings& s, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file; flags given here override it");
  cmd->add_option("--model", s.model, "model id, or mock:<name> replayed from --fixtures");
  cmd->add_option("--fixtures", s.fixtures, "directory of scripted responses for mock models");
  cmd->add_option("--cache-dir", s.cache_dir, "content-addressed response cache directory");
  cmd->add_option("--fov-bank", s.fov_bank, "foveation example bank JSON");
  cmd->add_option("--rationale-bank", s.rationale_bank, "rationale example bank JSON");
}

void add_retrieval_flags(CLI::App* cmd, Settings& s, bool allow_none) {
  std::vector<std::string> sources = {"base", "credible", "wiki"};
  if (allow_none) sources.push_back("none");
  cmd->add_option("--source", s.source, "knowledge source")
      ->check(CLI::IsMember(sources));
  cmd->add_option("--snippets", s.snippets, "snippets kept by the top-n transform")
      ->check(CLI::IsMember({1, 3, 5}));
  cmd->add_option("--page-size", s.page_size, "raw results requested per search");
  cmd->add_option("--max-attempts", s.max_attempts, "foveation attempts before giving up");
}

}  // namespace

int execute(std::vector<std::string> argv) {
  // The config file seeds the defaults, so flags parsed afterwards win.
  Settings settings;
  try {
    for (std::size_t i = 1; i < argv.size(); ++i) {
      if (argv[i] == "--config" && i + 1 < argv.size()) {
        settings = load_settings(argv[i + 1]);
        break;
      }
      if (argv[i].rfind("--config=", 0) == 0) {
        settings = load_settings(argv[i].substr(9));
        break;
      }
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Foveate, attribute, and rationalize safety questions about everyday actions"};
  app.require_subcommand(1);
  std::string config_path;
  std::string prompt;
  std::string action;
  std::string dataset_path;
  std::string outcomes_path;
  std::string out_file;
  std::string ratings_file;
  std::string kind_name = "foveation";
  int exit_code = 0;

  CLI::App* fov = app.add_subcommand("foveate", "Generate the knowledge query for one scenario");
  add_backend_flags(fov, settings, config_path);
  fov->add_option("--prompt", prompt, "scenario situation text")->required();
  fov->add_option("--action", action, "scenario action text")->required();
  fov->add_option("--shots", settings.fov_shots, "few-shot example count");
  fov->add_option("--samples", settings.fov_samples, "sampled candidates (0 = greedy)");
  fov->callback([&] { exit_code = foveate_command(settings, prompt, action); });

  CLI::App* att = app.add_subcommand("attribute", "Retrieve knowledge for one scenario");
  add_backend_flags(att, settings, config_path);
  add_retrieval_flags(att, settings, false);
  att->add_option("--prompt", prompt, "scenario situation text")->required();
  att->add_option("--action", action, "scenario action text")->required();
  att->add_option("--shots", settings.fov_shots, "few-shot example count");
  att->add_option("--samples", settings.fov_samples, "sampled candidates (0 = greedy)");
  att->callback([&] { exit_code = attribute_command(settings, prompt, action); });

  CLI::App* rat = app.add_subcommand("rationalize", "Classify and explain one scenario");
  add_backend_flags(rat, settings, config_path);
  add_retrieval_flags(rat, settings, true);
  rat->add_option("--prompt", prompt, "scenario situation text")->required();
  rat->add_option("--action", action, "scenario action text")->required();
  rat->add_option("--shots", settings.fov_shots, "foveation few-shot example count");
  rat->add_option("--rationale-shots", settings.rationale_shots,
                  "rationale few-shot count (0 = derive from source)");
  rat->callback([&] { exit_code = rationalize_command(settings, prompt, action); });

  CLI::App* run = app.add_subcommand("run", "Run the pipeline over a dataset");
  add_backend_flags(run, settings, config_path);
  add_retrieval_flags(run, settings, true);
  run->add_option("--dataset", dataset_path, "JSONL dataset of scenarios")->required();
  run->add_option("--out", settings.out_dir, "output directory for outcomes and reports");
  run->add_option("--workers", settings.workers, "parallel samples in flight");
  run->add_option("--limit", settings.limit, "process only the first N samples");
  run->add_option("--shots", settings.fov_shots, "foveation few-shot example count");
  run->add_option("--rationale-shots", settings.rationale_shots,
                  "rationale few-shot count (0 = derive from source)");
  run->add_option("--samples", settings.fov_samples, "sampled foveation candidates (0 = greedy)");
  run->callback([&] { exit_code = run_command(settings, dataset_path); });

  CLI::App* ev = app.add_subcommand("eval", "Score a stored outcomes file");
  ev->add_option("--config", config_path, "JSON config file (unused keys ignored here)");
  ev->add_option("--outcomes", outcomes_path, "outcomes.jsonl from a run")->required();
  ev->add_option("--dataset", dataset_path, "JSONL dataset with gold labels")->required();
  ev->add_option("--out", out_file, "directory to re-emit report files into");
  ev->callback([&] { exit_code = eval_command(outcomes_path, dataset_path, out_file); });

  CLI::App* ex = app.add_subcommand("export", "Write or tally annotation sheets");
  ex->add_option("--config", config_path, "JSON config file (unused keys ignored here)");
  ex->add_option("--outcomes", outcomes_path, "outcomes.jsonl from a run");
  ex->add_option("--dataset", dataset_path, "JSONL dataset for question text");
  ex->add_option("--kind", kind_name, "foveation or rationale")
      ->check(CLI::IsMember({"foveation", "rationale"}));
  ex->add_option("--out", out_file, "CSV file to write");
  ex->add_option("--ratings", ratings_file, "filled-in CSV to tally instead of exporting");
  ex->callback([&] {
    exit_code = export_command(outcomes_path, dataset_path, kind_name, out_file, ratings_file);
  });

  std::vector<char*> cargv;
  cargv.reserve(argv.size());
  for (auto& arg : argv) cargv.push_back(arg.data());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    auto parsed = app.get_subcommands();
    std::cout << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return exit_code;
}

}  // namespace farm
