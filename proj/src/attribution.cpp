#include "farm/attribution.hpp"

#include <algorithm>
#include <cctype>

#include "farm/text.hpp"

namespace farm {

void RetrieverConfig::validate() const {
  if (transform_n != 1 && transform_n != 3 && transform_n != 5) {
    throw Error(Errc::InvalidN, "transform_n must be 1, 3, or 5 (got " +
                                    std::to_string(transform_n) + ")");
  }
  if (result_page_size < transform_n) {
    throw Error(Errc::Config, "result_page_size must be >= transform_n");
  }
  if (snippet_char_budget < 1) throw Error(Errc::Config, "snippet_char_budget must be >= 1");
}

std::optional<std::string> host_of(const std::string& url) {
  std::string rest = text::trim(url);
  if (rest.empty()) return std::nullopt;

  if (const auto scheme_pos = rest.find("://"); scheme_pos != std::string::npos) {
    rest = rest.substr(scheme_pos + 3);
  }
  // Authority ends at the first path/query/fragment delimiter.
  if (const auto end = rest.find_first_of("/?#"); end != std::string::npos) {
    rest = rest.substr(0, end);
  }
  if (const auto at = rest.rfind('@'); at != std::string::npos) {
    rest = rest.substr(at + 1);
  }
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    rest = rest.substr(0, colon);
  }
  if (rest.empty()) return std::nullopt;

  std::string host = text::to_lower(rest);
  if (host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;

  // Hostname labels: alphanumeric plus hyphen, dot-separated, no empties.
  bool label_open = false;
  for (char c : host) {
    if (c == '.') {
      if (!label_open) return std::nullopt;
      label_open = false;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
      label_open = true;
    } else {
      return std::nullopt;
    }
  }
  if (!label_open) return std::nullopt;
  return host;
}

namespace {

bool credible_label(const std::string& label) {
  return label == "org" || label == "edu" || label == "gov";
}

bool all_alpha(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalpha(c) != 0; });
}

std::vector<std::string> split_labels(const std::string& host) {
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (start <= host.size()) {
    const auto dot = host.find('.', start);
    if (dot == std::string::npos) {
      labels.push_back(host.substr(start));
      break;
    }
    labels.push_back(host.substr(start, dot - start));
    start = dot + 1;
  }
  return labels;
}

}  // namespace

bool is_credible_url(const std::string& url) {
  const auto host = host_of(url);
  if (!host) return false;
  const auto labels = split_labels(*host);
  if (labels.size() < 2) return false;
  const std::string& last = labels.back();
  if (credible_label(last)) return true;
  // Country-code variants: gov.uk, edu.au, org.nz, ...
  if (last.size() == 2 && all_alpha(last) && credible_label(labels[labels.size() - 2])) {
    return true;
  }
  return false;
}

std::vector<KnowledgeSnippet> filter_credible(const std::vector<KnowledgeSnippet>& snippets) {
  std::vector<KnowledgeSnippet> kept;
  for (const auto& snippet : snippets) {
    if (!is_credible_url(snippet.source_url)) continue;
    KnowledgeSnippet survivor = snippet;
    survivor.rank = static_cast<int>(kept.size()) + 1;
    kept.push_back(std::move(survivor));
  }
  return kept;
}

AttributedKnowledge top_n(const std::vector<KnowledgeSnippet>& snippets, int n, SourceKind kind) {
  if (n != 1 && n != 3 && n != 5) {
    throw Error(Errc::InvalidN, "top_n requires n in {1, 3, 5}, got " + std::to_string(n));
  }
  AttributedKnowledge knowledge;
  knowledge.transform_n = n;
  knowledge.source_kind = kind;
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(n), snippets.size());
  knowledge.snippets.assign(snippets.begin(), snippets.begin() + static_cast<std::ptrdiff_t>(keep));
  return knowledge;
}

namespace {

std::vector<KnowledgeSnippet> truncate_snippets(std::vector<KnowledgeSnippet> snippets,
                                                int budget) {
  for (auto& snippet : snippets) {
    snippet.text = text::truncate_utf8(snippet.text, static_cast<std::size_t>(budget));
  }
  return snippets;
}

}  // namespace

Attribution attribute(const SafetyScenario& scenario, CompletionBackend& backend,
                      const std::string& model_id, const FoveationExampleBank& bank,
                      const FoveationOptions& fov_options, Retriever& retriever,
                      const RetrieverConfig& config) {
  config.validate();

  std::vector<Foveation> tried;
  Foveation current = foveate(scenario, backend, model_id, bank, fov_options);
  tried.push_back(current);

  for (;;) {
    std::vector<KnowledgeSnippet> snippets =
        retriever.search(current.text, config.result_page_size);
    if (config.source_kind == SourceKind::WebCredible) {
      snippets = filter_credible(snippets);
    }
    snippets = truncate_snippets(std::move(snippets), config.snippet_char_budget);
    AttributedKnowledge knowledge = top_n(snippets, config.transform_n, config.source_kind);
    if (!knowledge.empty()) {
      return {current, knowledge};
    }
    if (static_cast<int>(tried.size()) >= fov_options.max_attempts) {
      throw RetryExhaustedError("retrieval empty for every foveation of scenario '" +
                                    scenario.id + "'",
                                tried);
    }
    current = refoveate(scenario, backend, model_id, bank, fov_options, tried);
    tried.push_back(current);
  }
}

}  // namespace farm
