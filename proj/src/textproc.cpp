#include "slrkit/textproc.hpp"

#include "slrkit/embedded_data.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/unicode.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace slrkit::textproc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// config

std::set<std::string> PipelineConfig::default_stopwords() {
  static const std::set<std::string> words = parse_stopwords(*data::embedded_file("stopwords_en.txt"));
  return words;
}

void PipelineConfig::validate() const {
  std::vector<std::string> problems;
  if (multiword_pmi_threshold < 0) problems.emplace_back("multiword_pmi_threshold must be >= 0");
  if (multiword_min_count < 0) problems.emplace_back("multiword_min_count must be >= 0");
  for (const auto& w : stopwords) {
    if (unicode::lower(w) != w) problems.push_back("stopword '" + w + "' is not lowercase");
  }
  if (!problems.empty()) throw ConfigError(join(problems, "; "));
}

std::set<std::string> parse_stopwords(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.insert(unicode::fold(t));
  }
  return out;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) { return parse_stopwords(read_utf8_file(path)); }

// ---------------------------------------------------------------------------
// tokenize

std::vector<std::string> normalize_and_tokenize(std::string_view raw, const PipelineConfig& config) {
  const std::string filtered = unicode::keep_word_chars(unicode::fold(raw));
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < filtered.size()) {
    while (i < filtered.size() && std::isspace(static_cast<unsigned char>(filtered[i]))) ++i;
    const std::size_t b = i;
    while (i < filtered.size() && !std::isspace(static_cast<unsigned char>(filtered[i]))) ++i;
    std::string_view tok(filtered.data() + b, i - b);
    while (!tok.empty() && (tok.front() == '-' || tok.front() == '_')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == '-' || tok.back() == '_')) tok.remove_suffix(1);
    if (tok.empty() || !unicode::has_letter(tok)) continue;
    if (unicode::length(tok) < config.min_token_len) continue;
    tokens.emplace_back(tok);
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// acronyms

bool is_acronym_shaped(std::string_view word) {
  const std::u32string cps = unicode::to_code_points(word);
  if (cps.size() < 2 || cps.size() > 10) return false;
  std::size_t letters = 0;
  std::size_t upper = 0;
  for (char32_t c : cps) {
    if (!unicode::is_alnum_cp(c)) return false;
    if (unicode::is_alpha_cp(c)) {
      ++letters;
      if (unicode::is_upper_cp(c)) ++upper;
    }
  }
  return letters >= 1 && upper >= 2 && upper * 2 > letters;
}

std::optional<std::string> match_long_form(std::string_view acronym, std::string_view candidate) {
  const std::u32string s = unicode::to_code_points(acronym);
  const std::u32string l = unicode::to_code_points(candidate);
  long si = static_cast<long>(s.size()) - 1;
  long li = static_cast<long>(l.size()) - 1;
  bool matched_any = false;
  while (si >= 0) {
    const char32_t c = unicode::lower_cp(s[static_cast<std::size_t>(si)]);
    if (!unicode::is_alnum_cp(c)) {
      --si;
      continue;
    }
    while ((li >= 0 && unicode::lower_cp(l[static_cast<std::size_t>(li)]) != c) ||
           (si == 0 && li > 0 && unicode::is_alnum_cp(l[static_cast<std::size_t>(li - 1)]))) {
      --li;
    }
    if (li < 0) return std::nullopt;
    matched_any = true;
    --li;
    --si;
  }
  if (!matched_any) return std::nullopt;
  std::size_t start = static_cast<std::size_t>(li + 1);
  while (start > 0 && !unicode::is_space_cp(l[start - 1])) --start;
  return unicode::from_code_points(std::u32string_view(l).substr(start));
}

namespace {

constexpr std::string_view kBoundaries = ".;:!?()[]{},\"";

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

std::size_t alnum_count(std::string_view s) {
  std::size_t n = 0;
  for (char32_t c : unicode::to_code_points(s)) n += unicode::is_alnum_cp(c) ? 1 : 0;
  return n;
}

bool contains_word(std::string_view text, std::string_view word) {
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) {
    if (unicode::fold(w) == unicode::fold(word)) return true;
  }
  return false;
}

}  // namespace

std::vector<AcronymDefinition> find_acronym_definitions(std::string_view raw) {
  std::vector<AcronymDefinition> out;
  std::size_t pos = 0;
  while ((pos = raw.find('(', pos)) != std::string_view::npos) {
    const std::size_t open = pos++;
    const std::size_t close = raw.find(')', open + 1);
    if (close == std::string_view::npos || close - open > 200) continue;
    const std::string_view inner_raw = raw.substr(open + 1, close - open - 1);
    if (inner_raw.find('(') != std::string_view::npos) continue;
    const std::string inner = collapse_ws(inner_raw);
    if (inner.empty()) continue;
    const bool single_word = inner.find(' ') == std::string::npos;

    if (single_word && is_acronym_shaped(inner)) {
      // Long Form (LF)
      std::size_t b = open;
      while (b > 0 && kBoundaries.find(raw[b - 1]) == std::string_view::npos) --b;
      std::vector<std::pair<std::size_t, std::size_t>> words;
      for (std::size_t i = b; i < open;) {
        while (i < open && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        const std::size_t ws = i;
        while (i < open && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        if (i > ws) words.emplace_back(ws, i);
      }
      if (words.empty()) continue;
      const std::size_t letters = alnum_count(inner);
      const std::size_t max_words = std::min(letters + 5, letters * 2);
      const std::size_t first = words.size() > max_words ? words.size() - max_words : 0;
      const std::size_t cand_start = words[first].first;
      const std::size_t cand_end = words.back().second;
      const std::string_view candidate = raw.substr(cand_start, cand_end - cand_start);
      const auto lf = match_long_form(inner, candidate);
      if (!lf) continue;
      const std::string long_form = collapse_ws(*lf);
      if (unicode::length(long_form) <= unicode::length(inner) || contains_word(long_form, inner)) continue;
      const std::size_t lf_start = cand_end - lf->size();
      out.push_back({inner, long_form, {lf_start, close + 1}});
    } else if (!single_word) {
      // LF (Long Form)
      std::size_t e = open;
      while (e > 0 && (raw[e - 1] == ' ' || raw[e - 1] == '\t')) --e;
      std::size_t b = e;
      while (b > 0 && !std::isspace(static_cast<unsigned char>(raw[b - 1])) &&
             kBoundaries.find(raw[b - 1]) == std::string_view::npos) {
        --b;
      }
      const std::string_view shortf = raw.substr(b, e - b);
      if (shortf.empty() || !is_acronym_shaped(shortf)) continue;
      const std::size_t letters = alnum_count(shortf);
      const std::size_t words = static_cast<std::size_t>(std::count(inner.begin(), inner.end(), ' ')) + 1;
      if (words > std::min(letters + 5, letters * 2)) continue;
      const auto lf = match_long_form(shortf, inner);
      if (!lf || contains_word(*lf, shortf)) continue;
      out.push_back({std::string(shortf), collapse_ws(*lf), {b, close + 1}});
    }
  }
  return out;
}

void AcronymTable::add(const std::vector<AcronymDefinition>& defs, const std::string& doc_id,
                       const PipelineConfig& config) {
  for (const auto& d : defs) {
    const auto key_tokens = normalize_and_tokenize(d.acronym, config);
    if (key_tokens.size() != 1) continue;
    const std::string& key = key_tokens.front();
    auto lf_tokens = normalize_and_tokenize(d.long_form, config);
    if (lf_tokens.empty()) continue;
    const auto it = entries.find(key);
    if (it != entries.end()) {
      if (it->second.long_form_tokens != lf_tokens) {
        warnings.push_back("ambiguous acronym '" + key + "': keeping '" + it->second.long_form + "'" +
                           (it->second.doc_id.empty() ? "" : " (" + it->second.doc_id + ")") + ", ignoring '" +
                           d.long_form + "'" + (doc_id.empty() ? "" : " (" + doc_id + ")"));
      }
      continue;
    }
    entries.emplace(key, AcronymEntry{key, d.long_form, std::move(lf_tokens), doc_id, d.span});
  }
}

std::vector<std::string> expand_acronyms(const std::vector<std::string>& tokens, const AcronymTable& table) {
  if (table.entries.empty()) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto it = table.entries.find(t);
    if (it == table.entries.end()) {
      out.push_back(t);
    } else {
      out.insert(out.end(), it->second.long_form_tokens.begin(), it->second.long_form_tokens.end());
    }
  }
  return out;
}

std::pair<AcronymTable, std::vector<std::string>> detect_and_expand_acronyms(std::string_view raw,
                                                                             const std::vector<std::string>& tokens,
                                                                             const PipelineConfig& config,
                                                                             const std::string& doc_id) {
  AcronymTable table;
  table.add(find_acronym_definitions(raw), doc_id, config);
  auto expanded = expand_acronyms(tokens, table);
  return {std::move(table), std::move(expanded)};
}

// ---------------------------------------------------------------------------
// multiwords

MultiwordLexicon detect_multiwords(const std::vector<std::vector<std::string>>& corpus_tokens,
                                   const PipelineConfig& config) {
  std::map<std::string, long> unigrams;
  std::map<std::pair<std::string, std::string>, long> bigrams;
  long total_bigrams = 0;
  for (const auto& doc : corpus_tokens) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      ++unigrams[doc[i]];
      if (i + 1 < doc.size()) {
        ++bigrams[{doc[i], doc[i + 1]}];
        ++total_bigrams;
      }
    }
  }
  MultiwordLexicon lex;
  if (total_bigrams == 0) return lex;
  const double w = static_cast<double>(total_bigrams);
  for (const auto& [pair, n_ab] : bigrams) {
    if (n_ab < config.multiword_min_count) continue;
    if (config.stopwords.count(pair.first) || config.stopwords.count(pair.second)) continue;
    const double pmi = std::log(static_cast<double>(n_ab) * w /
                                (static_cast<double>(unigrams[pair.first]) * static_cast<double>(unigrams[pair.second])));
    if (pmi >= config.multiword_pmi_threshold) lex.entries.emplace(pair, MultiwordEntry{n_ab, pmi});
  }
  return lex;
}

std::vector<std::string> apply_multiwords(const std::vector<std::string>& tokens, const MultiwordLexicon& lexicon) {
  if (lexicon.entries.empty()) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size();) {
    if (i + 1 < tokens.size() && lexicon.entries.count({tokens[i], tokens[i + 1]})) {
      out.push_back(MultiwordLexicon::joined(tokens[i], tokens[i + 1]));
      i += 2;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// stemming

struct Stemmer::Atom {
  enum Kind { measure_gt, measure_eq, has_vowel, double_consonant, cvc, ends_with } kind;
  int n = 0;
  char letter = 0;
  bool negate = false;
};

struct Stemmer::Rule {
  std::string suffix;
  bool any = false;
  enum class Action { replace, drop_last, append_e } action = Action::replace;
  std::string replacement;
  std::vector<std::vector<Atom>> condition;  // OR of ANDs; empty = always
  std::string then;
};

struct Stemmer::Step {
  std::vector<Rule> rules;
};

namespace {

bool is_consonant(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    case 'y':
      return i == 0 || !is_consonant(w, i - 1);
    default:
      return true;
  }
}

int measure(const std::string& w) {
  int m = 0;
  std::size_t i = 0;
  const std::size_t n = w.size();
  while (i < n && is_consonant(w, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(w, i)) ++i;
    if (i >= n) break;
    while (i < n && is_consonant(w, i)) ++i;
    ++m;
  }
  return m;
}

bool contains_vowel(const std::string& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_consonant(w, i)) return true;
  }
  return false;
}

bool ends_double_consonant(const std::string& w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

bool ends_cvc(const std::string& w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
  const char c = w[n - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

bool is_plain_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

Stemmer::Stemmer(std::string_view rule_text) {
  std::istringstream in{std::string(rule_text)};
  std::string line;
  int line_no = 0;
  std::vector<std::string> errors;
  std::map<std::string, std::shared_ptr<Step>> building;
  const auto fail = [&](const std::string& msg) { errors.push_back("line " + std::to_string(line_no) + ": " + msg); };

  const auto parse_atom = [&](std::string tok, Atom& atom) {
    if (!tok.empty() && tok.front() == '!') {
      atom.negate = true;
      tok.erase(0, 1);
    }
    if (tok.size() >= 3 && tok[0] == 'm' && (tok[1] == '>' || tok[1] == '=')) {
      atom.kind = tok[1] == '>' ? Atom::measure_gt : Atom::measure_eq;
      try {
        atom.n = std::stoi(tok.substr(2));
      } catch (...) {
        return false;
      }
      return true;
    }
    if (tok == "v") atom.kind = Atom::has_vowel;
    else if (tok == "d") atom.kind = Atom::double_consonant;
    else if (tok == "o") atom.kind = Atom::cvc;
    else if (tok.size() == 3 && tok.rfind("e:", 0) == 0) {
      atom.kind = Atom::ends_with;
      atom.letter = tok[2];
    } else {
      return false;
    }
    return true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ls{std::string(t)};
    std::vector<std::string> cols;
    std::string c;
    while (ls >> c) cols.push_back(c);
    if (cols.front() == "STEPS") {
      order_.assign(cols.begin() + 1, cols.end());
      continue;
    }
    if (cols.size() < 4 || cols.size() > 5) {
      fail("expected 4 or 5 columns");
      continue;
    }
    Rule r;
    r.any = cols[1] == "*";
    if (!r.any) r.suffix = cols[1];
    if (cols[2] == "<") r.action = Rule::Action::drop_last;
    else if (cols[2] == "+e") r.action = Rule::Action::append_e;
    else if (cols[2] != "-") r.replacement = cols[2];
    if (cols[3] != "-") {
      for (const auto& alt : split(cols[3], '|')) {
        std::vector<Atom> conj;
        for (const auto& a : split(alt, '&')) {
          Atom atom{};
          if (!parse_atom(a, atom)) fail("bad condition atom '" + a + "'");
          conj.push_back(atom);
        }
        r.condition.push_back(std::move(conj));
      }
    }
    if (cols.size() == 5) {
      if (cols[4].rfind("then=", 0) != 0) fail("fifth column must be then=<step>");
      else r.then = cols[4].substr(5);
    }
    auto& step = building[cols[0]];
    if (!step) step = std::make_shared<Step>();
    step->rules.push_back(std::move(r));
  }
  if (order_.empty()) errors.emplace_back("missing STEPS line");
  for (const auto& name : order_) {
    if (!building.count(name)) errors.push_back("STEPS names unknown step '" + name + "'");
  }
  for (const auto& [name, step] : building) {
    for (const auto& r : step->rules) {
      if (!r.then.empty() && !building.count(r.then)) errors.push_back("then= names unknown step '" + r.then + "'");
    }
    steps_.emplace(name, step);
  }
  if (!errors.empty()) throw IntegrityError("malformed stemming rule table: " + join(errors, "; "), errors);
}

const Stemmer& Stemmer::standard() {
  static const Stemmer s(*data::embedded_file("stem_rules.txt"));
  return s;
}

bool Stemmer::apply_step(const std::string& name, std::string& word) const {
  const Step& step = *steps_.at(name);
  const auto holds = [](const Rule& r, const std::string& stem) {
    if (r.condition.empty()) return true;
    for (const auto& conj : r.condition) {
      bool all = true;
      for (const auto& a : conj) {
        bool v = false;
        switch (a.kind) {
          case Atom::measure_gt: v = measure(stem) > a.n; break;
          case Atom::measure_eq: v = measure(stem) == a.n; break;
          case Atom::has_vowel: v = contains_vowel(stem); break;
          case Atom::double_consonant: v = ends_double_consonant(stem); break;
          case Atom::cvc: v = ends_cvc(stem); break;
          case Atom::ends_with: v = !stem.empty() && stem.back() == a.letter; break;
        }
        if (v == a.negate) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  };

  const Rule* best = nullptr;
  for (const auto& r : step.rules) {
    if (r.any || r.suffix.size() > word.size()) continue;
    if (word.compare(word.size() - r.suffix.size(), r.suffix.size(), r.suffix) != 0) continue;
    if (best == nullptr || r.suffix.size() > best->suffix.size()) best = &r;
  }
  const Rule* fired = nullptr;
  if (best != nullptr) {
    const std::string stem = word.substr(0, word.size() - best->suffix.size());
    if (holds(*best, stem)) {
      word = stem + best->replacement;
      fired = best;
    }
  } else {
    for (const auto& r : step.rules) {
      if (!r.any || !holds(r, word)) continue;
      if (r.action == Rule::Action::drop_last) word.pop_back();
      else if (r.action == Rule::Action::append_e) word += 'e';
      else word += r.replacement;
      fired = &r;
      break;
    }
  }
  if (fired != nullptr && !fired->then.empty()) apply_step(fired->then, word);
  return fired != nullptr;
}

std::string Stemmer::stem_once(std::string word) const {
  if (word.size() <= 2) return word;
  for (const auto& name : order_) {
    if (word.size() <= 1) break;
    apply_step(name, word);
  }
  return word;
}

std::string Stemmer::stem_word(std::string word) const {
  for (int pass = 0; pass < 64; ++pass) {
    std::string next = stem_once(word);
    if (next == word) break;
    word = std::move(next);
  }
  return word;
}

std::string Stemmer::stem(std::string_view token) const {
  std::string out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= token.size(); ++i) {
    if (i == token.size() || token[i] == '-' || token[i] == '_') {
      const std::string_view seg = token.substr(b, i - b);
      out += is_plain_word(seg) ? stem_word(std::string(seg)) : std::string(seg);
      if (i < token.size()) out += token[i];
      b = i + 1;
    }
  }
  return out;
}

std::string stem(std::string_view token) { return Stemmer::standard().stem(token); }

// ---------------------------------------------------------------------------
// pipeline

std::vector<std::string> process_text(std::string_view raw, const PipelineConfig& config,
                                      const MultiwordLexicon& lexicon, const AcronymTable& acronyms) {
  std::vector<std::string> tokens = normalize_and_tokenize(raw, config);
  if (config.expand_acronyms) tokens = expand_acronyms(tokens, acronyms);
  if (config.join_multiwords) tokens = apply_multiwords(tokens, lexicon);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  const Stemmer& stemmer = Stemmer::standard();
  for (const auto& t : tokens) {
    std::string s = config.stem ? stemmer.stem(t) : t;
    if (config.remove_stopwords && (config.stopwords.count(t) || config.stopwords.count(s))) continue;
    out.push_back(std::move(s));
  }
  return out;
}

BagOfWords count_tokens(const std::vector<std::string>& tokens) {
  BagOfWords bow;
  for (const auto& t : tokens) ++bow.counts[t];
  bow.total_tokens = static_cast<long>(tokens.size());
  return bow;
}

BagOfWords build_bow(const Document& doc, const PipelineConfig& config, const MultiwordLexicon& lexicon,
                     const AcronymTable& acronyms) {
  if (!doc.raw_text) throw Error("document " + doc.id() + " has no text");
  return count_tokens(process_text(*doc.raw_text, config, lexicon, acronyms));
}

CorpusLexicons build_lexicons(const std::vector<Document>& corpus, const PipelineConfig& config) {
  CorpusLexicons lex;
  if (config.expand_acronyms) {
    std::vector<std::vector<AcronymDefinition>> defs(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
      if (corpus[i].raw_text) defs[i] = find_acronym_definitions(*corpus[i].raw_text);
    });
    for (std::size_t i = 0; i < corpus.size(); ++i) lex.acronyms.add(defs[i], corpus[i].id(), config);
  }
  if (config.join_multiwords) {
    std::vector<std::vector<std::string>> tokens(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
      if (!corpus[i].raw_text) return;
      tokens[i] = normalize_and_tokenize(*corpus[i].raw_text, config);
      if (config.expand_acronyms) tokens[i] = expand_acronyms(tokens[i], lex.acronyms);
    });
    lex.multiwords = detect_multiwords(tokens, config);
  }
  return lex;
}

std::vector<std::vector<std::string>> attach_bags(std::vector<Document>& corpus, const PipelineConfig& config,
                                                  const CorpusLexicons& lexicons) {
  std::vector<std::vector<std::string>> tokens(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    if (!corpus[i].raw_text) return;
    tokens[i] = process_text(*corpus[i].raw_text, config, lexicons.multiwords, lexicons.acronyms);
    corpus[i].attach_bow(count_tokens(tokens[i]));
  });
  return tokens;
}

std::string normalize_term(std::string_view phrase, const PipelineConfig& config) {
  const auto tokens = normalize_and_tokenize(phrase, config);
  std::vector<std::string> parts;
  for (const auto& t : tokens) {
    std::string s = config.stem ? Stemmer::standard().stem(t) : t;
    if (config.remove_stopwords && (config.stopwords.count(t) || config.stopwords.count(s))) continue;
    parts.push_back(std::move(s));
  }
  return join(parts, "_");
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const AcronymTable& t) {
  json entries = json::array();
  for (const auto& [key, e] : t.entries) {
    entries.push_back({{"acronym", e.acronym},
                       {"long_form", e.long_form},
                       {"long_form_tokens", e.long_form_tokens},
                       {"doc_id", e.doc_id},
                       {"char_span", {e.span.start, e.span.end}}});
  }
  j = json{{"entries", entries}, {"warnings", t.warnings}};
}

void to_json(json& j, const MultiwordLexicon& l) {
  json entries = json::array();
  for (const auto& [pair, e] : l.entries) {
    entries.push_back({{"a", pair.first},
                       {"b", pair.second},
                       {"joined", MultiwordLexicon::joined(pair.first, pair.second)},
                       {"count", e.count},
                       {"pmi", e.pmi}});
  }
  j = json{{"entries", entries}};
}

void to_json(json& j, const BagOfWords& b) { j = json{{"counts", b.counts}, {"total_tokens", b.total_tokens}}; }

void from_json(const json& j, BagOfWords& b) {
  b.counts = j.at("counts").get<std::map<std::string, long>>();
  b.total_tokens = j.at("total_tokens").get<long>();
}

}  // namespace slrkit::textproc
