#include "farm/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "farm/errors.hpp"
#include "farm/retrievers.hpp"

namespace farm {

using nlohmann::json;

void RunConfig::validate() const {
  if (model_id.empty()) throw Error(Errc::Config, "run config needs a model id");
  if (workers < 1) throw Error(Errc::Config, "workers must be at least 1");
  if (limit < 0) throw Error(Errc::Config, "limit cannot be negative");
  if (foveation_shot_count < 1 || foveation_shot_count > 16) {
    throw Error(Errc::Config, "foveation shot count must be between 1 and 16");
  }
  if (fov_samples < 0) throw Error(Errc::Config, "foveation sample count cannot be negative");
  if (max_foveation_attempts < 1) {
    throw Error(Errc::Config, "max foveation attempts must be at least 1");
  }
  params.validate();
  if (retriever) {
    retriever->validate();
    bool needs_short = retriever->source_kind == SourceKind::Encyclopedia ||
                       retriever->transform_n == 5;
    if (needs_short && rationale_shot_count > 10) {
      throw Error(Errc::Config,
                  "encyclopedia and 5-snippet runs use at most 10 rationale shots");
    }
  }
  if (rationale_shot_count < 0 || rationale_shot_count > 16) {
    throw Error(Errc::Config, "rationale shot count must be between 0 and 16");
  }
}

namespace {

json tlp_to_json(const std::vector<TokenLogprob>& tokens) {
  json arr = json::array();
  for (const auto& t : tokens) arr.push_back({{"token", t.token}, {"logprob", t.logprob}});
  return arr;
}

std::vector<TokenLogprob> tlp_from_json(const json& j) {
  std::vector<TokenLogprob> out;
  for (const auto& item : j) {
    out.push_back({item.at("token").get<std::string>(), item.at("logprob").get<double>()});
  }
  return out;
}

}  // namespace

std::optional<Label> FarmOutcome::predicted() const {
  if (!error.empty() || parse_failure || !rationale) return std::nullopt;
  return rationale->label;
}

bool FarmOutcome::correct() const {
  auto p = predicted();
  return p && gold_label && *p == *gold_label;
}

json FarmOutcome::to_json() const {
  json j;
  j["scenario_id"] = scenario_id;
  j["gold_label"] = gold_label ? json(label_name(*gold_label)) : json(nullptr);
  json fovs = json::array();
  for (const auto& f : foveations) {
    fovs.push_back(
        {{"text", f.text}, {"log_likelihood", f.log_likelihood}, {"attempt", f.attempt}});
  }
  j["foveations"] = fovs;
  j["knowledge"] = {{"snippets", snippets_to_json(knowledge.snippets)},
                    {"transform_n", knowledge.transform_n},
                    {"source_kind", source_kind_name(knowledge.source_kind)}};
  if (rationale) {
    j["rationale"] = {{"label", label_name(rationale->label)},
                      {"cited_source", rationale->cited_source},
                      {"explanation", rationale->explanation},
                      {"raw_text", rationale->raw_text},
                      {"tokens", tlp_to_json(rationale->token_logprobs)},
                      {"first_token_alternatives", tlp_to_json(rationale->first_token_alternatives)}};
  } else {
    j["rationale"] = nullptr;
  }
  j["parse_failure"] = parse_failure;
  j["retry_exhausted"] = retry_exhausted;
  j["error"] = error;
  j["entropy_nats"] = entropy_nats ? json(*entropy_nats) : json(nullptr);
  j["perplexity"] = perplexity ? json(*perplexity) : json(nullptr);
  j["backend_token_count"] = backend_token_count;
  j["reference_token_count"] = reference_token_count;
  j["rationale_shots_used"] = rationale_shots_used;
  j["rationale_shots_reduced"] = rationale_shots_reduced;
  return j;
}

FarmOutcome FarmOutcome::from_json(const json& j) {
  FarmOutcome out;
  out.scenario_id = j.at("scenario_id").get<std::string>();
  if (!j.at("gold_label").is_null()) {
    out.gold_label = label_from_string(j.at("gold_label").get<std::string>());
  }
  for (const auto& f : j.at("foveations")) {
    out.foveations.push_back({f.at("text").get<std::string>(),
                              f.at("log_likelihood").get<double>(), f.at("attempt").get<int>()});
  }
  const json& k = j.at("knowledge");
  out.knowledge.snippets = snippets_from_json(k.at("snippets"));
  out.knowledge.transform_n = k.at("transform_n").get<int>();
  out.knowledge.source_kind = source_kind_from_string(k.at("source_kind").get<std::string>());
  if (!j.at("rationale").is_null()) {
    const json& r = j.at("rationale");
    RationaleResult result;
    result.label = label_from_string(r.at("label").get<std::string>());
    result.cited_source = r.at("cited_source").get<std::string>();
    result.explanation = r.at("explanation").get<std::string>();
    result.raw_text = r.at("raw_text").get<std::string>();
    result.token_logprobs = tlp_from_json(r.at("tokens"));
    result.first_token_alternatives = tlp_from_json(r.at("first_token_alternatives"));
    out.rationale = std::move(result);
  }
  out.parse_failure = j.at("parse_failure").get<bool>();
  out.retry_exhausted = j.at("retry_exhausted").get<bool>();
  out.error = j.at("error").get<std::string>();
  if (!j.at("entropy_nats").is_null()) out.entropy_nats = j.at("entropy_nats").get<double>();
  if (!j.at("perplexity").is_null()) out.perplexity = j.at("perplexity").get<double>();
  out.backend_token_count = j.at("backend_token_count").get<int>();
  out.reference_token_count = j.at("reference_token_count").get<int>();
  out.rationale_shots_used = j.at("rationale_shots_used").get<int>();
  out.rationale_shots_reduced = j.at("rationale_shots_reduced").get<bool>();
  return out;
}

FarmOutcome run_scenario(const SafetyScenario& scenario, const RunConfig& config,
                         CompletionBackend& backend, Retriever* retriever,
                         const FoveationExampleBank& fov_bank,
                         const RationaleExampleBank& rat_bank) {
  FarmOutcome out;
  out.scenario_id = scenario.id;
  out.gold_label = scenario.gold_label;
  try {
    if (config.retriever && retriever != nullptr) {
      FoveationOptions fopts;
      fopts.shot_count = config.foveation_shot_count;
      fopts.max_attempts = config.max_foveation_attempts;
      fopts.samples = config.fov_samples;
      fopts.params = config.params;
      try {
        Attribution attribution = attribute(scenario, backend, config.model_id, fov_bank, fopts,
                                            *retriever, *config.retriever);
        out.foveations = {attribution.foveation};
        out.knowledge = attribution.knowledge;
      } catch (const RetryExhaustedError& e) {
        // Flag the sample and fall back to the no-knowledge baseline.
        out.foveations = e.tried();
        out.retry_exhausted = true;
      }
    }

    RationaleOptions ropts;
    ropts.shot_count = config.rationale_shot_count;
    ropts.params = config.params;
    RationaleTrace trace;
    try {
      out.rationale = rationalize(scenario, out.knowledge, backend, config.model_id, rat_bank,
                                  ropts, &trace);
    } catch (const ParseFailureError& e) {
      out.parse_failure = true;
      RationaleResult kept;
      kept.raw_text = e.completion().text;
      kept.token_logprobs = e.completion().tokens;
      kept.first_token_alternatives = e.completion().first_token_alternatives;
      out.rationale = std::move(kept);
    }
    out.rationale_shots_used = trace.shot_count_used;
    out.rationale_shots_reduced = trace.shots_reduced;

    if (out.rationale) {
      const RationaleResult& r = *out.rationale;
      if (!r.first_token_alternatives.empty()) {
        out.entropy_nats = first_token_entropy(r.first_token_alternatives);
      }
      out.backend_token_count = static_cast<int>(r.token_logprobs.size());
      Completion completion;
      completion.text = r.raw_text;
      completion.tokens = r.token_logprobs;
      out.reference_token_count = whitespace_token_counter()(completion);
      if (out.backend_token_count > 0) {
        out.perplexity = perplexity(completion, out.backend_token_count);
      }
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

namespace {

// Finished lines from a previous (possibly interrupted) run, keyed by id.
// A single unparseable trailing line — a killed writer's residue — is skipped.
std::map<std::string, std::string> lines_by_id(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      out[j.at("scenario_id").get<std::string>()] = line;
    } catch (const json::exception&) {
      continue;
    }
  }
  return out;
}

}  // namespace

RunResult run_pipeline(const std::vector<SafetyScenario>& dataset, const RunConfig& config,
                       CompletionBackend& backend, Retriever* retriever,
                       const FoveationExampleBank& fov_bank, const RationaleExampleBank& rat_bank) {
  config.validate();
  if (config.retriever && retriever == nullptr) {
    throw Error(Errc::Config, "retrieval configured but no retriever wired up");
  }
  {
    std::vector<std::string> questions;
    for (const auto& ex : fov_bank.examples) questions.push_back(ex.question);
    ensure_bank_disjoint(questions, dataset, "foveation bank");
    questions.clear();
    for (const auto& ex : rat_bank.examples) questions.push_back(ex.question);
    ensure_bank_disjoint(questions, dataset, "rationale bank");
  }

  std::size_t count = dataset.size();
  if (config.limit > 0) count = std::min<std::size_t>(count, static_cast<std::size_t>(config.limit));

  RunResult result;
  std::map<std::string, std::string> previous;
  std::ofstream out_file;
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    result.outcomes_path = config.output_dir / "outcomes.jsonl";
    if (std::filesystem::exists(result.outcomes_path)) previous = lines_by_id(result.outcomes_path);
    out_file.open(result.outcomes_path, std::ios::trunc);
    if (!out_file) {
      throw Error(Errc::StoreUnavailable, "cannot write " + result.outcomes_path.string());
    }
  }

  std::vector<FarmOutcome> outcomes(count);
  std::vector<std::string> lines(count);
  std::vector<char> done(count, 0);
  std::atomic<std::size_t> next{0};
  std::mutex flush_mutex;
  std::size_t flushed = 0;
  int reused = 0;
  int computed = 0;

  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      const SafetyScenario& scenario = dataset[i];
      FarmOutcome outcome;
      std::string line;
      bool from_previous = false;
      auto it = previous.find(scenario.id);
      if (it != previous.end()) {
        try {
          outcome = FarmOutcome::from_json(json::parse(it->second));
          line = it->second;
          from_previous = true;
        } catch (const std::exception&) {
          from_previous = false;  // recompute a record we cannot read back
        }
      }
      if (!from_previous) {
        outcome = run_scenario(scenario, config, backend, retriever, fov_bank, rat_bank);
        line = outcome.to_json().dump();
      }

      std::lock_guard<std::mutex> lock(flush_mutex);
      outcomes[i] = std::move(outcome);
      lines[i] = std::move(line);
      done[i] = 1;
      from_previous ? ++reused : ++computed;
      if (out_file.is_open()) {
        // Persist the contiguous finished prefix so a kill loses at most the
        // in-flight samples, never reorders the file.
        while (flushed < count && done[flushed] != 0) {
          out_file << lines[flushed] << '\n';
          out_file.flush();
          ++flushed;
        }
      }
    }
  };

  if (config.workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    int width = std::min<int>(config.workers, static_cast<int>(count));
    for (int w = 0; w < width; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  result.outcomes = std::move(outcomes);
  result.reused = reused;
  result.computed = computed;
  return result;
}

std::vector<FarmOutcome> load_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open outcomes file: " + path.string());
  std::vector<FarmOutcome> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      out.push_back(FarmOutcome::from_json(json::parse(line)));
    } catch (const std::exception& e) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // killed writer's last line
      throw Error(Errc::ParseError, path.filename().string() + " line " +
                                        std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<UncertaintyRecord> uncertainty_records(const std::vector<FarmOutcome>& outcomes) {
  std::vector<UncertaintyRecord> out;
  for (const auto& o : outcomes) {
    if (!o.entropy_nats || !o.perplexity) continue;
    UncertaintyRecord r;
    r.scenario_id = o.scenario_id;
    r.entropy_nats = *o.entropy_nats;
    r.perplexity = *o.perplexity;
    r.token_count = o.backend_token_count;
    r.correct = o.correct();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace farm
