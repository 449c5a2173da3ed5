#include "farm/uncertainty.hpp"

#include <cmath>
#include <sstream>

#include "farm/errors.hpp"

namespace farm {

using nlohmann::json;

double first_token_entropy(const std::vector<TokenLogprob>& alternatives) {
  if (alternatives.empty()) {
    throw Error(Errc::EmptyDistribution, "no first-token alternatives to compute entropy over");
  }
  double total = 0.0;
  for (const auto& alt : alternatives) total += std::exp(alt.logprob);
  if (total <= 0.0) {
    throw Error(Errc::EmptyDistribution, "first-token alternatives have zero total mass");
  }
  double entropy = 0.0;
  for (const auto& alt : alternatives) {
    double p = std::exp(alt.logprob) / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  // Clamp the tiny negative residue a one-element distribution can leave.
  return entropy < 0.0 ? 0.0 : entropy;
}

double perplexity(const Completion& completion, int token_count) {
  if (token_count < 1) {
    throw Error(Errc::NonPositiveCount,
                "perplexity needs a positive token count, got " + std::to_string(token_count));
  }
  double sum = sequence_log_likelihood(completion);  // throws EmptySequence
  return std::exp(-sum / static_cast<double>(token_count));
}

TokenCounter backend_token_counter() {
  return [](const Completion& completion) { return static_cast<int>(completion.tokens.size()); };
}

TokenCounter whitespace_token_counter() {
  return [](const Completion& completion) {
    std::istringstream in(completion.text);
    std::string word;
    int count = 0;
    while (in >> word) ++count;
    return count;
  };
}

json UncertaintyRecord::to_json() const {
  return {{"scenario_id", scenario_id},
          {"entropy_nats", entropy_nats},
          {"perplexity", perplexity},
          {"token_count", token_count},
          {"correct", correct}};
}

UncertaintyRecord UncertaintyRecord::from_json(const json& j) {
  UncertaintyRecord r;
  r.scenario_id = j.at("scenario_id").get<std::string>();
  r.entropy_nats = j.at("entropy_nats").get<double>();
  r.perplexity = j.at("perplexity").get<double>();
  r.token_count = j.at("token_count").get<int>();
  r.correct = j.at("correct").get<bool>();
  return r;
}

namespace {

json cell_to_json(const std::optional<UncertaintyCell>& cell) {
  if (!cell) return nullptr;
  return {{"count", cell->count},
          {"mean_entropy", cell->mean_entropy},
          {"mean_perplexity", cell->mean_perplexity}};
}

struct CellAccumulator {
  int count = 0;
  double entropy_sum = 0.0;
  double perplexity_sum = 0.0;

  void add(const UncertaintyRecord& r) {
    ++count;
    entropy_sum += r.entropy_nats;
    perplexity_sum += r.perplexity;
  }

  std::optional<UncertaintyCell> finish() const {
    if (count == 0) return std::nullopt;
    return UncertaintyCell{count, entropy_sum / count, perplexity_sum / count};
  }
};

}  // namespace

json UncertaintyReport::to_json() const {
  // Fixed cell order: safe-correct, safe-incorrect, unsafe-correct, unsafe-incorrect.
  json out = json::object();
  out["safe_correct"] = cell_to_json(safe_correct);
  out["safe_incorrect"] = cell_to_json(safe_incorrect);
  out["unsafe_correct"] = cell_to_json(unsafe_correct);
  out["unsafe_incorrect"] = cell_to_json(unsafe_incorrect);
  return out;
}

UncertaintyReport aggregate(const std::vector<UncertaintyRecord>& records,
                            const std::map<std::string, Label>& gold_labels) {
  CellAccumulator cells[4];  // safe-correct, safe-incorrect, unsafe-correct, unsafe-incorrect
  for (const auto& record : records) {
    auto it = gold_labels.find(record.scenario_id);
    if (it == gold_labels.end()) {
      throw Error(Errc::JoinFailure, "no gold label for scenario " + record.scenario_id);
    }
    int base = it->second == Label::Safe ? 0 : 2;
    cells[base + (record.correct ? 0 : 1)].add(record);
  }
  UncertaintyReport report;
  report.safe_correct = cells[0].finish();
  report.safe_incorrect = cells[1].finish();
  report.unsafe_correct = cells[2].finish();
  report.unsafe_incorrect = cells[3].finish();
  return report;
}

}  // namespace farm
