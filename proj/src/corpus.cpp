#include "slrkit/corpus.hpp"

#include "slrkit/errors.hpp"
#include "slrkit/unicode.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <unordered_map>

namespace slrkit::corpus {

using nlohmann::json;

BibFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = ascii_lower(path.extension().string());
  if (ext == ".bib" || ext == ".bibtex") return BibFormat::bibtex;
  if (ext == ".json") return BibFormat::csl_json;
  throw ConfigError("cannot infer bibliography format from extension of " + path.string());
}

Bibliography parse_bibliography(const std::filesystem::path& path, BibFormat format) {
  const std::string text = read_utf8_file(path);
  try {
    return format == BibFormat::bibtex ? parse_bibtex(text) : parse_csl_json(text);
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception& e) {
    throw IngestError(path.string(), e.what());
  }
}

std::optional<std::string> normalize_doi(std::string_view raw) {
  std::string s(trim(raw));
  static constexpr std::string_view prefixes[] = {
      "https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/",
      "doi.org/", "dx.doi.org/", "doi:"};
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (auto p : prefixes) {
      if (starts_with_ci(s, p)) {
        s = std::string(trim(std::string_view(s).substr(p.size())));
        stripped = true;
      }
    }
  }
  s = ascii_lower(s);
  static const std::regex re(R"(^10\.[0-9]+/\S+$)");
  if (!std::regex_match(s, re)) return std::nullopt;
  return s;
}

std::string slug_id(std::string_view title, std::optional<int> year) {
  const std::string ascii = ascii_lower(unicode::to_ascii(unicode::nfkc(title)));
  std::string slug;
  for (char c : ascii) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      slug += c;
    } else if (!slug.empty() && slug.back() != '-') {
      slug += '-';
    }
  }
  constexpr std::size_t kMaxLen = 80;
  if (slug.size() > kMaxLen) slug.resize(kMaxLen);
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  if (slug.empty()) slug = "untitled";
  if (year) slug += "-" + std::to_string(*year);
  return slug;
}

void assign_ids(std::vector<Metadata>& entries) {
  std::set<std::string> used;
  for (auto& m : entries) {
    const std::string base = slug_id(m.title, m.year);
    std::string id = base;
    for (int n = 2; used.count(id); ++n) id = base + "-" + std::to_string(n);
    used.insert(id);
    m.id = id;
  }
}

// ---------------------------------------------------------------------------
// BibTeX

namespace {

struct BibParseFailure {
  std::string reason;
};

char32_t accent_mark(char c) {
  switch (c) {
    case '\'': return U'\u0301';
    case '`': return U'\u0300';
    case '^': return U'\u0302';
    case '"': return U'\u0308';
    case '~': return U'\u0303';
    case '=': return U'\u0304';
    case '.': return U'\u0307';
    default: return 0;
  }
}

std::string clean_latex(std::string_view v) {
  std::string out;
  bool accented = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const char c = v[i];
    if (c == '\\' && i + 1 < v.size()) {
      const char n = v[i + 1];
      if (std::string_view("&%_$#{}").find(n) != std::string_view::npos) {
        out += n;
        ++i;
      } else if (const auto mark = accent_mark(n)) {
        ++i;
        std::size_t j = i + 1;
        const bool braced = j < v.size() && v[j] == '{';
        if (braced) ++j;
        if (j < v.size() && std::isalpha(static_cast<unsigned char>(v[j]))) {
          out += v[j];
          out += unicode::from_code_points(std::u32string(1, mark));
          accented = true;
          i = j;
          if (braced && i + 1 < v.size() && v[i + 1] == '}') ++i;
        }
      } else if (std::isalpha(static_cast<unsigned char>(n))) {
        ++i;
        while (i + 1 < v.size() && std::isalpha(static_cast<unsigned char>(v[i + 1]))) ++i;
        if (i + 1 < v.size() && v[i + 1] == ' ') ++i;
      } else {
        out += ' ';
      }
    } else if (c == '{' || c == '}') {
      continue;
    } else if (c == '~') {
      out += ' ';
    } else {
      out += c;
    }
  }
  std::string collapsed;
  bool space = false;
  for (char c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !collapsed.empty()) collapsed += ' ';
      space = false;
      collapsed += c;
    }
  }
  return accented ? unicode::nfkc(collapsed) : collapsed;
}

/// Splits a raw author field on top-level ` and `.
std::vector<std::string> split_authors(std::string_view raw) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '{') ++depth;
    if (raw[i] == '}') --depth;
    if (depth == 0 && i + 5 <= raw.size() && std::isspace(static_cast<unsigned char>(raw[i])) &&
        starts_with_ci(raw.substr(i + 1), "and") && i + 4 < raw.size() &&
        std::isspace(static_cast<unsigned char>(raw[i + 4]))) {
      out.emplace_back(raw.substr(start, i - start));
      start = i + 5;
      i += 4;
    }
  }
  out.emplace_back(raw.substr(start));
  std::vector<std::string> names;
  for (const auto& piece : out) {
    const std::string name = clean_latex(piece);
    if (name.empty()) continue;
    auto parts = split(name, ',');
    for (auto& p : parts) p = std::string(trim(p));
    if (parts.size() == 2) {
      names.push_back(parts[1].empty() ? parts[0] : parts[1] + " " + parts[0]);
    } else if (parts.size() == 3) {
      names.push_back(parts[2] + " " + parts[0] + " " + parts[1]);
    } else {
      names.push_back(name);
    }
  }
  return names;
}

std::optional<int> parse_year(std::string_view raw) {
  const std::string s(trim(raw));
  static const std::regex plain(R"(^(\d{4})$)");
  static const std::regex dated(R"(^(\d{4})-\d{2}(-\d{2})?$)");
  std::smatch m;
  if (std::regex_match(s, m, plain) || std::regex_match(s, m, dated)) return std::stoi(m[1].str());
  return std::nullopt;
}

class BibtexReader {
 public:
  explicit BibtexReader(std::string_view text) : s_(text) {
    static constexpr const char* months[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                             "jul", "aug", "sep", "oct", "nov", "dec"};
    for (const char* m : months) macros_[m] = m;
  }

  Bibliography run() {
    Bibliography out;
    std::size_t entry_no = 0;
    while (true) {
      pos_ = s_.find('@', pos_);
      if (pos_ == std::string_view::npos) break;
      const std::size_t start = pos_;
      ++pos_;
      const std::string type = ascii_lower(read_identifier());
      if (type.empty()) continue;
      if (type == "comment" || type == "preamble") {
        try {
          skip_block();
        } catch (const BibParseFailure&) {
          pos_ = start + 1;
        }
        continue;
      }
      if (type == "string") {
        try {
          parse_string_macro();
        } catch (const BibParseFailure& f) {
          out.report.warnings.push_back("@string at offset " + std::to_string(start) + ": " + f.reason);
          resync(start);
        }
        continue;
      }
      ++entry_no;
      try {
        auto [key, fields] = parse_entry();
        if (auto meta = to_metadata(key, fields, out.report)) {
          out.entries.push_back(std::move(*meta));
        } else {
          out.report.skipped.push_back("entry " + std::to_string(entry_no) + " (" + key + "): missing title");
        }
      } catch (const BibParseFailure& f) {
        out.report.skipped.push_back("entry " + std::to_string(entry_no) + " at line " +
                                     std::to_string(line_of(start)) + ": " + f.reason);
        resync(start);
      }
    }
    assign_ids(out.entries);
    return out;
  }

 private:
  using Fields = std::vector<std::pair<std::string, std::string>>;

  std::size_t line_of(std::size_t offset) const {
    return 1 + static_cast<std::size_t>(std::count(s_.begin(), s_.begin() + static_cast<long>(offset), '\n'));
  }

  // Next '@' that starts a line after the failed entry.
  void resync(std::size_t start) {
    std::size_t p = start + 1;
    while (true) {
      p = s_.find('@', p);
      if (p == std::string_view::npos) {
        pos_ = s_.size();
        return;
      }
      std::size_t back = p;
      while (back > 0 && (s_[back - 1] == ' ' || s_[back - 1] == '\t')) --back;
      if (back == 0 || s_[back - 1] == '\n') {
        pos_ = p;
        return;
      }
      ++p;
    }
  }

  bool eof() const { return pos_ >= s_.size(); }

  void skip_ws() {
    while (!eof()) {
      const char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (!eof() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string read_identifier() {
    skip_ws();
    const std::size_t b = pos_;
    while (!eof()) {
      const char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || std::string_view("_-:.+/").find(c) != std::string_view::npos) {
        ++pos_;
      } else {
        break;
      }
    }
    return std::string(s_.substr(b, pos_ - b));
  }

  char expect_open() {
    skip_ws();
    if (eof() || (s_[pos_] != '{' && s_[pos_] != '(')) throw BibParseFailure{"expected '{' or '('"};
    return s_[pos_++] == '{' ? '}' : ')';
  }

  void skip_block() {
    const char close = expect_open();
    int depth = 1;
    while (!eof() && depth > 0) {
      const char c = s_[pos_++];
      if (c == '{' || (close == ')' && c == '(')) ++depth;
      if (c == '}' || (close == ')' && c == ')')) --depth;
    }
    if (depth != 0) throw BibParseFailure{"unbalanced block"};
  }

  std::string braced() {
    // pos_ is just after '{'
    int depth = 1;
    const std::size_t b = pos_;
    while (!eof()) {
      const char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < s_.size()) {
        pos_ += 2;
        continue;
      }
      if (c == '@' && depth == 1 && pos_ > 0 && s_[pos_ - 1] == '\n') {
        throw BibParseFailure{"unbalanced braces in field value"};
      }
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) {
        std::string v(s_.substr(b, pos_ - b));
        ++pos_;
        return v;
      }
      ++pos_;
    }
    throw BibParseFailure{"unterminated braced value"};
  }

  std::string quoted() {
    int depth = 0;
    const std::size_t b = pos_;
    while (!eof()) {
      const char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < s_.size()) {
        pos_ += 2;
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}') --depth;
      if (c == '"' && depth == 0) {
        std::string v(s_.substr(b, pos_ - b));
        ++pos_;
        return v;
      }
      if (c == '\n' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '@') break;
      ++pos_;
    }
    throw BibParseFailure{"unterminated quoted value"};
  }

  std::string value() {
    std::string out;
    while (true) {
      skip_ws();
      if (eof()) throw BibParseFailure{"unexpected end of input in value"};
      const char c = s_[pos_];
      if (c == '{') {
        ++pos_;
        out += braced();
      } else if (c == '"') {
        ++pos_;
        out += quoted();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        const std::size_t b = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        out += s_.substr(b, pos_ - b);
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::string name = ascii_lower(read_identifier());
        const auto it = macros_.find(name);
        if (it == macros_.end()) throw BibParseFailure{"undefined macro '" + name + "'"};
        out += it->second;
      } else {
        throw BibParseFailure{std::string("unexpected character '") + c + "' in value"};
      }
      skip_ws();
      if (!eof() && s_[pos_] == '#') {
        ++pos_;
        continue;
      }
      return out;
    }
  }

  void parse_string_macro() {
    const char close = expect_open();
    const std::string name = ascii_lower(read_identifier());
    skip_ws();
    if (name.empty() || eof() || s_[pos_] != '=') throw BibParseFailure{"malformed @string"};
    ++pos_;
    macros_[name] = value();
    skip_ws();
    if (eof() || s_[pos_] != close) throw BibParseFailure{"malformed @string"};
    ++pos_;
  }

  std::pair<std::string, Fields> parse_entry() {
    const char close = expect_open();
    skip_ws();
    const std::size_t kb = pos_;
    while (!eof() && s_[pos_] != ',' && s_[pos_] != close && s_[pos_] != '\n') ++pos_;
    const std::string key(trim(s_.substr(kb, pos_ - kb)));
    if (key.empty() || key.find_first_of("= \t{}\"") != std::string::npos) {
      throw BibParseFailure{"missing or invalid citation key"};
    }
    skip_ws();
    if (eof()) throw BibParseFailure{"unexpected end of input"};
    Fields fields;
    if (s_[pos_] == close) {
      ++pos_;
      return {key, fields};
    }
    if (s_[pos_] != ',') throw BibParseFailure{"expected ',' after citation key"};
    ++pos_;
    while (true) {
      skip_ws();
      if (eof()) throw BibParseFailure{"unexpected end of input"};
      if (s_[pos_] == close) {
        ++pos_;
        break;
      }
      const std::string name = ascii_lower(read_identifier());
      if (name.empty()) throw BibParseFailure{std::string("unexpected character '") + s_[pos_] + "'"};
      skip_ws();
      if (eof() || s_[pos_] != '=') throw BibParseFailure{"expected '=' after field '" + name + "'"};
      ++pos_;
      fields.emplace_back(name, value());
      skip_ws();
      if (eof()) throw BibParseFailure{"unexpected end of input"};
      if (s_[pos_] == ',') {
        ++pos_;
      } else if (s_[pos_] != close) {
        throw BibParseFailure{"expected ',' or end of entry after field '" + name + "'"};
      }
    }
    return {key, fields};
  }

  static std::optional<Metadata> to_metadata(const std::string& key, const Fields& fields, ParseReport& report) {
    std::map<std::string, std::string> f;
    for (const auto& [k, v] : fields) f.emplace(k, v);  // first occurrence wins
    const auto get = [&](const char* name) -> const std::string* {
      const auto it = f.find(name);
      return it == f.end() ? nullptr : &it->second;
    };
    Metadata m;
    m.citation_key = key;
    if (const auto* t = get("title")) m.title = clean_latex(*t);
    if (m.title.empty()) return std::nullopt;
    if (const auto* a = get("author")) {
      m.authors = split_authors(*a);
    } else if (const auto* e = get("editor")) {
      m.authors = split_authors(*e);
    }
    const std::string* year_raw = get("year");
    if (year_raw == nullptr) year_raw = get("date");
    if (year_raw == nullptr) {
      report.warnings.push_back(key + ": missing year");
    } else if (!(m.year = parse_year(clean_latex(*year_raw)))) {
      report.warnings.push_back(key + ": unparseable year '" + clean_latex(*year_raw) + "'");
    }
    for (const char* name : {"journal", "journaltitle", "booktitle", "school", "institution", "howpublished"}) {
      if (const auto* v = get(name)) {
        const std::string venue = clean_latex(*v);
        if (!venue.empty()) {
          m.venue = venue;
          break;
        }
      }
    }
    const std::string* doi_raw = get("doi");
    if (doi_raw != nullptr) {
      m.doi = normalize_doi(clean_latex(*doi_raw));
      if (!m.doi) report.warnings.push_back(key + ": invalid DOI '" + clean_latex(*doi_raw) + "'");
    } else if (const auto* url = get("url"); url != nullptr && url->find("doi.org/") != std::string::npos) {
      m.doi = normalize_doi(*url);
    }
    for (const char* name : {"language", "langid"}) {
      if (const auto* v = get(name)) {
        m.language = ascii_lower(clean_latex(*v));
        break;
      }
    }
    if (const auto* kw = get("keywords")) m.keywords = split_list(clean_latex(*kw));
    return m;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> macros_;
};

std::string json_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array() && !v.empty() && v.front().is_string()) return v.front().get<std::string>();
  return {};
}

}  // namespace

Bibliography parse_bibtex(std::string_view text) { return BibtexReader(text).run(); }

Bibliography parse_csl_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("invalid CSL-JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("items")) root = root["items"];
  if (!root.is_array()) throw Error("CSL-JSON bibliography must be an array of items");
  Bibliography out;
  std::size_t n = 0;
  for (const auto& item : root) {
    ++n;
    const std::string label = "item " + std::to_string(n);
    if (!item.is_object()) {
      out.report.skipped.push_back(label + ": not an object");
      continue;
    }
    Metadata m;
    m.citation_key = item.contains("id") ? (item["id"].is_string() ? item["id"].get<std::string>() : item["id"].dump()) : "";
    const std::string tag = m.citation_key.empty() ? label : m.citation_key;
    m.title = item.contains("title") ? std::string(trim(json_text(item["title"]))) : "";
    if (m.title.empty()) {
      out.report.skipped.push_back(label + " (" + tag + "): missing title");
      continue;
    }
    if (item.contains("author")) {
      if (!item["author"].is_array()) {
        out.report.skipped.push_back(label + " (" + tag + "): author is not a list");
        continue;
      }
      for (const auto& a : item["author"]) {
        if (a.contains("literal") && a["literal"].is_string()) {
          m.authors.push_back(a["literal"].get<std::string>());
          continue;
        }
        std::string given = a.contains("given") && a["given"].is_string() ? a["given"].get<std::string>() : "";
        std::string family = a.contains("family") && a["family"].is_string() ? a["family"].get<std::string>() : "";
        const std::string name = std::string(trim(given + " " + family));
        if (!name.empty()) m.authors.push_back(name);
      }
    }
    if (item.contains("issued") && item["issued"].is_object()) {
      const auto& issued = item["issued"];
      if (issued.contains("date-parts") && issued["date-parts"].is_array() && !issued["date-parts"].empty() &&
          issued["date-parts"][0].is_array() && !issued["date-parts"][0].empty()) {
        const auto& y = issued["date-parts"][0][0];
        if (y.is_number_integer()) {
          m.year = y.get<int>();
        } else if (y.is_string()) {
          m.year = parse_year(y.get<std::string>());
        }
      } else if (issued.contains("raw") && issued["raw"].is_string()) {
        m.year = parse_year(issued["raw"].get<std::string>());
      }
      if (!m.year) out.report.warnings.push_back(tag + ": unparseable year");
    } else {
      out.report.warnings.push_back(tag + ": missing year");
    }
    if (item.contains("container-title")) {
      const std::string v(trim(json_text(item["container-title"])));
      if (!v.empty()) m.venue = v;
    }
    if (item.contains("DOI") && item["DOI"].is_string()) {
      m.doi = normalize_doi(item["DOI"].get<std::string>());
      if (!m.doi) out.report.warnings.push_back(tag + ": invalid DOI");
    }
    if (item.contains("language") && item["language"].is_string()) m.language = ascii_lower(item["language"].get<std::string>());
    if (item.contains("keyword") && item["keyword"].is_string()) m.keywords = split_list(item["keyword"].get<std::string>());
    out.entries.push_back(std::move(m));
  }
  assign_ids(out.entries);
  return out;
}

// ---------------------------------------------------------------------------
// Chapters

namespace {

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool ws = std::isspace(static_cast<unsigned char>(c));
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

std::optional<int> heading_level(std::string_view line) {
  const std::string_view t = trim(line);
  if (t.empty() || t.size() > 100) return std::nullopt;

  std::size_t hashes = 0;
  while (hashes < t.size() && t[hashes] == '#') ++hashes;
  if (hashes > 0) {
    if (hashes <= 6 && hashes < t.size() && (t[hashes] == ' ' || t[hashes] == '\t') && !trim(t.substr(hashes)).empty()) {
      return static_cast<int>(hashes);
    }
    return std::nullopt;
  }

  static const std::regex numbered(R"(^(\d{1,3})((?:\.\d{1,3})*)(\.?)[ \t]+(\S.*)$)");
  const std::string s(t);
  std::smatch m;
  if (std::regex_match(s, m, numbered)) {
    const std::string dotted = m[2].str();
    const bool trailing_dot = m[3].length() > 0;
    const std::string title = m[4].str();
    const int depth = 1 + static_cast<int>(std::count(dotted.begin(), dotted.end(), '.'));
    if ((dotted.empty() && !trailing_dot)) return std::nullopt;
    if (!unicode::has_letter(title.substr(0, 1)) || title.back() == '.' || word_count(title) > 12) return std::nullopt;
    return depth;
  }

  if (word_count(t) <= 12 && unicode::is_all_caps(t, 3)) return 1;
  return std::nullopt;
}

std::string strip_one_newline(std::string_view s) {
  if (!s.empty() && s.back() == '\n') s.remove_suffix(1);
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

std::vector<Chapter> segment_chapters(std::string_view raw) {
  struct Heading {
    std::size_t line_start;
    std::size_t body_start;
    std::string text;
    int level;
  };
  std::vector<Heading> headings;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    const std::size_t next = eol == std::string_view::npos ? raw.size() : eol + 1;
    if (eol == std::string_view::npos) eol = raw.size();
    std::string_view line = raw.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto level = heading_level(line)) headings.push_back({pos, next, std::string(trim(line)), *level});
    pos = next;
  }

  std::vector<Chapter> out;
  const std::size_t first = headings.empty() ? raw.size() : headings.front().line_start;
  if (first > 0 || headings.empty()) {
    out.push_back({"", 0, strip_one_newline(raw.substr(0, first)), {0, first}});
  }
  for (std::size_t i = 0; i < headings.size(); ++i) {
    const std::size_t end = i + 1 < headings.size() ? headings[i + 1].line_start : raw.size();
    const auto& h = headings[i];
    out.push_back({h.text, h.level, strip_one_newline(raw.substr(h.body_start, end - h.body_start)), {h.line_start, end}});
  }
  return out;
}

std::string_view chapter_text(std::string_view raw, const Chapter& chapter) {
  return raw.substr(chapter.span.start, chapter.span.size());
}

std::vector<Document> load_corpus(std::vector<Metadata> entries, const std::filesystem::path& corpus_dir) {
  std::vector<Document> docs(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) {
    Document d(std::move(entries[i]));
    auto path = corpus_dir / (d.meta.id + ".txt");
    if (!std::filesystem::exists(path) && !d.meta.citation_key.empty()) {
      path = corpus_dir / (d.meta.citation_key + ".txt");
    }
    if (std::filesystem::exists(path)) {
      d.raw_text = read_utf8_file(path);
      if (!d.raw_text->empty()) d.chapters = segment_chapters(*d.raw_text);
    }
    docs[i] = std::move(d);
  });
  return docs;
}

// ---------------------------------------------------------------------------
// Duplicates

std::string normalize_title(std::string_view title) {
  const std::string stripped = unicode::strip_punctuation(unicode::fold(title));
  std::string out;
  bool space = false;
  for (char c : stripped) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

double trigram_jaccard(std::string_view a, std::string_view b) {
  const auto grams = [](std::string_view s) {
    const std::u32string cps = unicode::to_code_points(s);
    std::set<std::u32string> g;
    if (cps.empty()) return g;
    if (cps.size() < 3) {
      g.insert(cps);
      return g;
    }
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) g.insert(cps.substr(i, 3));
    return g;
  };
  const auto ga = grams(a);
  const auto gb = grams(b);
  if (ga.empty() && gb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& g : ga) inter += gb.count(g);
  const std::size_t uni = ga.size() + gb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string to_string(DuplicateEvidenceKind kind) {
  switch (kind) {
    case DuplicateEvidenceKind::doi_match:
      return "doi-match";
    case DuplicateEvidenceKind::title_exact:
      return "title-exact";
    case DuplicateEvidenceKind::title_fuzzy:
      return "title-fuzzy";
  }
  return "unknown";
}

DuplicateReport detect_duplicates(const std::vector<Document>& corpus, double fuzzy_threshold) {
  // Sort by id so pair evidence does not depend on input order.
  std::vector<const Document*> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(), [](const Document* x, const Document* y) { return x->id() < y->id(); });

  std::vector<std::string> titles;
  std::vector<std::optional<std::string>> dois;
  for (const auto* d : docs) {
    titles.push_back(normalize_title(d->meta.title));
    dois.push_back(d->meta.doi ? normalize_doi(*d->meta.doi) : std::nullopt);
  }

  std::vector<std::size_t> parent(docs.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::vector<std::pair<std::size_t, DuplicateEvidence>> evidence;  // keyed by left index
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = i + 1; j < docs.size(); ++j) {
      std::optional<DuplicateEvidence> ev;
      if (dois[i] && dois[j] && *dois[i] == *dois[j]) {
        ev = DuplicateEvidence{docs[i]->id(), docs[j]->id(), DuplicateEvidenceKind::doi_match, 1.0};
      } else if (!titles[i].empty() && titles[i] == titles[j]) {
        ev = DuplicateEvidence{docs[i]->id(), docs[j]->id(), DuplicateEvidenceKind::title_exact, 1.0};
      } else {
        const double score = trigram_jaccard(titles[i], titles[j]);
        if (score >= fuzzy_threshold) {
          ev = DuplicateEvidence{docs[i]->id(), docs[j]->id(), DuplicateEvidenceKind::title_fuzzy, score};
        }
      }
      if (ev) {
        evidence.emplace_back(i, std::move(*ev));
        parent[find(i)] = find(j);
      }
    }
  }

  std::map<std::size_t, DuplicateGroup> by_root;
  for (std::size_t i = 0; i < docs.size(); ++i) by_root[find(i)].members.push_back(docs[i]->id());
  for (auto& [left, ev] : evidence) by_root[find(left)].evidence.push_back(std::move(ev));

  DuplicateReport report;
  for (auto& [root, group] : by_root) {
    if (group.members.size() < 2) continue;
    std::sort(group.members.begin(), group.members.end());
    std::sort(group.evidence.begin(), group.evidence.end(),
              [](const auto& x, const auto& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    report.groups.push_back(std::move(group));
  }
  std::sort(report.groups.begin(), report.groups.end(),
            [](const auto& x, const auto& y) { return x.members.front() < y.members.front(); });
  return report;
}

// ---------------------------------------------------------------------------
// Coverage

GapReport coverage_report(const std::vector<Document>& corpus, const std::vector<RqKeywords>& rqs) {
  std::set<std::string> seen;
  for (const auto& d : corpus) {
    if (!d.bow()) continue;
    for (const auto& [term, count] : d.bow()->counts) {
      if (count > 0) seen.insert(term);
    }
  }
  GapReport report;
  for (const auto& rq : rqs) {
    std::vector<std::string> gaps;
    for (const auto& t : rq.terms) {
      if (!seen.count(t) && std::find(gaps.begin(), gaps.end(), t) == gaps.end()) gaps.push_back(t);
    }
    report.keyword_gaps.emplace_back(rq.rq_id, std::move(gaps));
  }
  for (const auto& d : corpus) {
    std::vector<std::string> missing;
    if (!d.meta.year) missing.emplace_back("year");
    if (!d.meta.venue) missing.emplace_back("venue");
    if (!d.meta.doi) missing.emplace_back("doi");
    if (!missing.empty()) report.missing_metadata.emplace_back(d.id(), std::move(missing));
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const Metadata& m) {
  j = json::object();
  j["id"] = m.id;
  j["citation_key"] = m.citation_key;
  j["title"] = m.title;
  j["authors"] = m.authors;
  j["year"] = m.year ? json(*m.year) : json(nullptr);
  j["venue"] = m.venue ? json(*m.venue) : json(nullptr);
  j["doi"] = m.doi ? json(*m.doi) : json(nullptr);
  j["language"] = m.language ? json(*m.language) : json(nullptr);
  j["keywords"] = m.keywords;
}

void from_json(const json& j, Metadata& m) {
  m.id = j.at("id").get<std::string>();
  m.citation_key = j.value("citation_key", "");
  m.title = j.at("title").get<std::string>();
  m.authors = j.value("authors", std::vector<std::string>{});
  const auto opt_str = [&](const char* k) -> std::optional<std::string> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    return j[k].get<std::string>();
  };
  m.year = j.contains("year") && !j["year"].is_null() ? std::optional<int>(j["year"].get<int>()) : std::nullopt;
  m.venue = opt_str("venue");
  m.doi = opt_str("doi");
  m.language = opt_str("language");
  m.keywords = j.value("keywords", std::vector<std::string>{});
}

void to_json(json& j, const Chapter& c) {
  j = json{{"heading", c.heading}, {"level", c.level}, {"body", c.body}, {"char_span", {c.span.start, c.span.end}}};
}

void from_json(const json& j, Chapter& c) {
  c.heading = j.at("heading").get<std::string>();
  c.level = j.at("level").get<int>();
  c.body = j.at("body").get<std::string>();
  c.span = {j.at("char_span").at(0).get<std::size_t>(), j.at("char_span").at(1).get<std::size_t>()};
}

void to_json(json& j, const ParseReport& r) { j = json{{"warnings", r.warnings}, {"skipped", r.skipped}}; }

void to_json(json& j, const DuplicateReport& r) {
  json groups = json::array();
  for (const auto& g : r.groups) {
    json ev = json::array();
    for (const auto& e : g.evidence) {
      ev.push_back({{"a", e.a}, {"b", e.b}, {"kind", to_string(e.kind)}, {"score", e.score}});
    }
    groups.push_back({{"members", g.members}, {"evidence", ev}});
  }
  j = json{{"groups", groups}};
}

void to_json(json& j, const GapReport& r) {
  json kw = json::array();
  for (const auto& [rq, terms] : r.keyword_gaps) kw.push_back({{"rq_id", rq}, {"keywords", terms}});
  json md = json::array();
  for (const auto& [doc, fields] : r.missing_metadata) md.push_back({{"doc_id", doc}, {"missing", fields}});
  j = json{{"keyword_gaps", kw}, {"missing_metadata", md}};
}

}  // namespace slrkit::corpus
