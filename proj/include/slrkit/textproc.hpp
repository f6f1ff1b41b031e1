#pragma once

#include "slrkit/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slrkit::textproc {

struct PipelineConfig {
  std::set<std::string> stopwords = default_stopwords();
  std::size_t min_token_len = 2;
  double multiword_pmi_threshold = 3.0;
  long multiword_min_count = 3;

  bool expand_acronyms = true;
  bool join_multiwords = true;
  bool stem = true;
  bool remove_stopwords = true;

  /// Throws ConfigError on negative thresholds or non-lowercase stopwords.
  void validate() const;

  static std::set<std::string> default_stopwords();
};

/// One term per line, UTF-8; blank lines and `#` comments ignored.
std::set<std::string> parse_stopwords(std::string_view text);
std::set<std::string> load_stopwords(const std::filesystem::path& path);

/// NFKC, lowercase, non-word characters to spaces, split, drop short and letterless tokens.
std::vector<std::string> normalize_and_tokenize(std::string_view raw, const PipelineConfig& config);

// --- acronyms ---

struct AcronymDefinition {
  std::string acronym;    // as written, e.g. "SRA"
  std::string long_form;  // as written, e.g. "Systematic Review Automation"
  CharSpan span;          // whole definition in the raw text
};

/// Finds "Long Form (LF)" and "LF (Long Form)" definitions whose initials match.
std::vector<AcronymDefinition> find_acronym_definitions(std::string_view raw);

/// Shortest suffix of `candidate` (starting at a word) whose letters cover the
/// acronym's letters in order, the first one at a word start. nullopt if none.
std::optional<std::string> match_long_form(std::string_view acronym, std::string_view candidate);

bool is_acronym_shaped(std::string_view word);

struct AcronymEntry {
  std::string acronym;  // token form
  std::string long_form;
  std::vector<std::string> long_form_tokens;
  std::string doc_id;
  CharSpan span;
};

struct AcronymTable {
  std::map<std::string, AcronymEntry> entries;  // keyed by token form
  std::vector<std::string> warnings;

  /// Adds definitions; a second, different long form for a known acronym is
  /// dropped with a warning.
  void add(const std::vector<AcronymDefinition>& defs, const std::string& doc_id, const PipelineConfig& config);
};

/// Replaces each token equal to a known acronym by its long-form tokens.
std::vector<std::string> expand_acronyms(const std::vector<std::string>& tokens, const AcronymTable& table);

std::pair<AcronymTable, std::vector<std::string>> detect_and_expand_acronyms(
    std::string_view raw, const std::vector<std::string>& tokens, const PipelineConfig& config,
    const std::string& doc_id = {});

// --- multiwords ---

struct MultiwordEntry {
  long count = 0;
  double pmi = 0.0;
};

struct MultiwordLexicon {
  std::map<std::pair<std::string, std::string>, MultiwordEntry> entries;

  static std::string joined(const std::string& a, const std::string& b) { return a + "_" + b; }
};

/// PMI over adjacent bigrams within each token list; bigrams touching a stopword are not candidates.
MultiwordLexicon detect_multiwords(const std::vector<std::vector<std::string>>& corpus_tokens,
                                   const PipelineConfig& config);

/// Left-to-right, non-overlapping rewrite of lexicon bigrams into `a_b`.
std::vector<std::string> apply_multiwords(const std::vector<std::string>& tokens, const MultiwordLexicon& lexicon);

// --- stemming ---

/// Rule-driven suffix stemmer; the rule table format is documented in data/stem_rules.txt.
class Stemmer {
 public:
  /// Throws IntegrityError on malformed rule text.
  explicit Stemmer(std::string_view rule_text);

  /// Stemmer over the shipped rule table.
  static const Stemmer& standard();

  /// Stems a lowercase token. Segments separated by `-` or `_` are stemmed
  /// independently; segments that are not plain a-z are left alone.
  std::string stem(std::string_view token) const;

  /// One pass of the step sequence over a plain a-z word.
  std::string stem_once(std::string word) const;

 private:
  struct Atom;
  struct Rule;
  struct Step;
  std::string stem_word(std::string word) const;
  bool apply_step(const std::string& name, std::string& word) const;

  std::vector<std::string> order_;
  std::map<std::string, std::shared_ptr<const Step>> steps_;
};

std::string stem(std::string_view token);

// --- pipeline ---

struct CorpusLexicons {
  AcronymTable acronyms;
  MultiwordLexicon multiwords;
};

/// Full token pipeline for one text: tokenize, expand acronyms, join
/// multiwords, stem, drop stopwords.
std::vector<std::string> process_text(std::string_view raw, const PipelineConfig& config,
                                      const MultiwordLexicon& lexicon, const AcronymTable& acronyms);

BagOfWords count_tokens(const std::vector<std::string>& tokens);

/// Throws Error naming the document if it has no text.
BagOfWords build_bow(const Document& doc, const PipelineConfig& config, const MultiwordLexicon& lexicon,
                     const AcronymTable& acronyms);

/// Corpus-level reduce: acronym table in document order, then multiword
/// lexicon over acronym-expanded tokens.
CorpusLexicons build_lexicons(const std::vector<Document>& corpus, const PipelineConfig& config);

/// Runs the pipeline over every document with text and attaches the bags.
/// Returns the per-document token sequences (empty for documents without text).
std::vector<std::vector<std::string>> attach_bags(std::vector<Document>& corpus, const PipelineConfig& config,
                                                  const CorpusLexicons& lexicons);

/// Normalizes a keyword phrase the way document text is normalized. Multi-token
/// phrases become one `_`-joined term. Returns empty if nothing survives.
std::string normalize_term(std::string_view phrase, const PipelineConfig& config);

void to_json(nlohmann::json& j, const AcronymTable& t);
void to_json(nlohmann::json& j, const MultiwordLexicon& l);
void to_json(nlohmann::json& j, const BagOfWords& b);
void from_json(const nlohmann::json& j, BagOfWords& b);

}  // namespace slrkit::textproc

namespace slrkit {
using textproc::from_json;
using textproc::to_json;
}  // namespace slrkit
