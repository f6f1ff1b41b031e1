#include "slrkit/assess.hpp"

#include "slrkit/embedded_data.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace slrkit::assess {

using nlohmann::json;

namespace {

std::string expected_stage(int task) {
  if (task <= 2) return "I";
  if (task <= 5) return "II";
  if (task <= 7) return "III";
  return "IV";
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

int parse_answer(std::string_view cell) {
  std::string c = ascii_lower(trim(cell));
  if (c.empty()) return kNoAnswer;
  if (c.front() == 'a') c.erase(0, 1);
  int v = 0;
  try {
    v = parse_int(c);
  } catch (const std::exception&) {
    throw ValidationError({"Likert answer '" + std::string(cell) + "' is not A1..A10"});
  }
  if (v < 1 || v > kNoAnswer) throw ValidationError({"Likert answer '" + std::string(cell) + "' is not A1..A10"});
  return v;
}

std::optional<double> median_of(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  return quantile7(v, 0.5);
}

}  // namespace

const Requirement& RequirementCatalog::at(int id) const {
  if (id < 1 || id > static_cast<int>(entries.size())) throw NotFoundError("no requirement R" + std::to_string(id));
  return entries[static_cast<std::size_t>(id - 1)];
}

std::vector<int> RequirementCatalog::task_ids() const {
  std::set<int> s;
  for (const auto& r : entries) s.insert(r.task);
  return {s.begin(), s.end()};
}

std::vector<std::string> RequirementCatalog::stages() const {
  std::vector<std::string> out;
  for (const auto& r : entries) {
    if (std::find(out.begin(), out.end(), r.stage) == out.end()) out.push_back(r.stage);
  }
  return out;
}

std::string RequirementCatalog::text_checksum() const {
  std::string all;
  for (const auto& r : entries) all += r.text + "\n";
  return sha256_hex(all);
}

RequirementCatalog parse_catalog(std::string_view tsv) {
  RequirementCatalog cat;
  std::vector<std::string> failing;
  std::istringstream in{std::string(tsv)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, '\t');
    Requirement r;
    try {
      if (f.size() != 8) throw std::invalid_argument("columns");
      r.id = parse_int(f[0]);
      r.stage = f[1];
      r.task = parse_int(f[2]);
      r.task_name = f[3];
      r.step_no = parse_int(f[4]);
      r.step = f[5];
      r.result = f[6];
      r.text = f[7];
    } catch (const std::exception&) {
      failing.push_back(f.empty() ? "?" : f[0]);
      continue;
    }
    if (r.task < 1 || r.task > 8 || r.stage != expected_stage(r.task) || r.text.empty()) {
      failing.push_back(std::to_string(r.id));
      continue;
    }
    cat.entries.push_back(std::move(r));
  }
  std::sort(cat.entries.begin(), cat.entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::set<int> present;
  for (const auto& r : cat.entries) {
    if (!present.insert(r.id).second) failing.push_back(std::to_string(r.id));
  }
  for (int id = 1; id <= kRequirementCount; ++id) {
    if (!present.count(id)) failing.push_back(std::to_string(id));
  }
  for (const int id : present) {
    if (id < 1 || id > kRequirementCount) failing.push_back(std::to_string(id));
  }
  if (!failing.empty()) {
    std::sort(failing.begin(), failing.end());
    failing.erase(std::unique(failing.begin(), failing.end()), failing.end());
    throw IntegrityError("requirement catalog is corrupted; failing ids: " + join(failing, ", "), failing);
  }
  return cat;
}

const RequirementCatalog& load_catalog() {
  static const RequirementCatalog catalog = [] {
    const auto text = data::embedded_file("requirements.tsv");
    if (!text) throw IntegrityError("requirement catalog missing from build", {});
    return parse_catalog(*text);
  }();
  return catalog;
}

std::vector<LikertResponse> parse_likert_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) return {};
  const auto& head = rows.front();
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < head.size(); ++i) col[ascii_lower(trim(head[i]))] = i;
  std::vector<std::string> errors;
  for (const char* need : {"respondent", "tool"}) {
    if (!col.count(need)) errors.push_back(std::string("Likert CSV lacks column '") + need + "'");
  }
  if (!errors.empty()) throw ValidationError(errors);

  std::vector<LikertResponse> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    const auto cell = [&](std::size_t i) { return i < row.size() ? std::string(trim(row[i])) : std::string(); };
    LikertResponse resp;
    resp.respondent = cell(col["respondent"]);
    resp.tool = cell(col["tool"]);
    if (col.count("duration") && !cell(col["duration"]).empty()) {
      try {
        resp.duration_minutes = std::stod(cell(col["duration"]));
      } catch (const std::exception&) {
        errors.push_back("row " + std::to_string(r + 1) + ": bad duration");
      }
    }
    for (int q = 1; q <= kRequirementCount; ++q) {
      const auto it = col.find("r" + std::to_string(q));
      try {
        resp.answers[static_cast<std::size_t>(q - 1)] = it == col.end() ? kNoAnswer : parse_answer(cell(it->second));
      } catch (const ValidationError& e) {
        errors.push_back("row " + std::to_string(r + 1) + ", R" + std::to_string(q) + ": " + e.what());
      }
    }
    out.push_back(std::move(resp));
  }
  if (!errors.empty()) throw ValidationError(errors);
  return out;
}

std::vector<LikertResponse> load_likert_csv(const std::filesystem::path& path) {
  return parse_likert_csv(read_utf8_file(path));
}

double quantile7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

AgreementStats box_stats(std::vector<double> values) {
  AgreementStats s;
  s.n = static_cast<long>(values.size());
  if (values.empty()) {
    s.no_data = true;
    return s;
  }
  std::sort(values.begin(), values.end());
  s.q1 = quantile7(values, 0.25);
  s.median = quantile7(values, 0.5);
  s.q3 = quantile7(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  bool have_low = false;
  for (const double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!have_low) {
      s.whisker_low = v;
      have_low = true;
    }
    s.whisker_high = v;
  }
  return s;
}

AgreementStats aggregate_likert(const std::vector<LikertResponse>& responses, int requirement) {
  if (requirement < 1 || requirement > kRequirementCount) throw NotFoundError("no requirement R" + std::to_string(requirement));
  std::vector<double> values;
  for (const auto& r : responses) {
    const int a = r.answers[static_cast<std::size_t>(requirement - 1)];
    if (a >= 1 && a <= 9) values.push_back(a);
  }
  AgreementStats s = box_stats(std::move(values));
  s.requirement = requirement;
  return s;
}

Descriptive descriptive_stats(const std::vector<double>& values) {
  if (values.empty()) throw Error("descriptive statistics of empty input");
  Descriptive d;
  double m2 = 0.0;
  d.min = d.max = values.front();
  for (const double x : values) {
    ++d.n;
    const double delta = x - d.mean;
    d.mean += delta / static_cast<double>(d.n);
    m2 += delta * (x - d.mean);
    d.min = std::min(d.min, x);
    d.max = std::max(d.max, x);
  }
  d.sd = d.n > 1 ? std::sqrt(m2 / static_cast<double>(d.n - 1)) : 0.0;
  return d;
}

CoverageMatrix coverage_matrix(const std::vector<LikertResponse>& responses, const RequirementCatalog& catalog) {
  CoverageMatrix m;
  std::map<std::string, std::vector<const LikertResponse*>> by_tool;
  for (const auto& r : responses) by_tool[r.tool].push_back(&r);
  for (const auto& [tool, rs] : by_tool) {
    m.tools.push_back(tool);
    auto& row = m.medians[tool];
    std::map<int, std::vector<double>> per_task;
    for (int q = 1; q <= kRequirementCount; ++q) {
      std::vector<double> values;
      for (const auto* r : rs) {
        const int a = r->answers[static_cast<std::size_t>(q - 1)];
        if (a >= 1 && a <= 9) values.push_back(a);
      }
      auto& task_values = per_task[catalog.at(q).task];
      task_values.insert(task_values.end(), values.begin(), values.end());
      row[static_cast<std::size_t>(q - 1)] = median_of(std::move(values));
    }
    for (auto& [task, values] : per_task) m.task_medians[tool][task] = median_of(std::move(values));
  }
  return m;
}

std::string coverage_csv(const CoverageMatrix& m) {
  std::string out = "tool";
  for (int q = 1; q <= kRequirementCount; ++q) out += ",R" + std::to_string(q);
  for (int t = 1; t <= 8; ++t) out += ",T" + std::to_string(t);
  out += "\r\n";
  const auto cell = [](const std::optional<double>& v) { return v ? format_fixed(*v, 2) : std::string("NA"); };
  for (const auto& tool : m.tools) {
    out += csv_field(tool);
    for (const auto& v : m.medians.at(tool)) out += "," + cell(v);
    const auto& tasks = m.task_medians.at(tool);
    for (int t = 1; t <= 8; ++t) {
      const auto it = tasks.find(t);
      out += "," + cell(it == tasks.end() ? std::nullopt : it->second);
    }
    out += "\r\n";
  }
  return out;
}

json boxplot_json(const std::vector<LikertResponse>& responses) {
  json reqs = json::array();
  for (int q = 1; q <= kRequirementCount; ++q) reqs.push_back(aggregate_likert(responses, q));
  std::vector<double> durations;
  for (const auto& r : responses) {
    if (r.duration_minutes) durations.push_back(*r.duration_minutes);
  }
  json duration = nullptr;
  if (!durations.empty()) {
    const auto d = descriptive_stats(durations);
    duration = {{"n", d.n}, {"mean", d.mean}, {"sd", d.sd}, {"min", d.min}, {"max", d.max}};
  }
  return json{{"respondents", responses.size()}, {"scale", "A1 = 1 = strongest agreement, A9 = 9, A10 = no answer"},
              {"requirements", reqs}, {"duration_minutes", duration}};
}

void to_json(json& j, const AgreementStats& s) {
  j = json{{"requirement", s.requirement}, {"n", s.n}, {"no_data", s.no_data}};
  if (s.no_data) return;
  j["median"] = s.median;
  j["q1"] = s.q1;
  j["q3"] = s.q3;
  j["whisker_low"] = s.whisker_low;
  j["whisker_high"] = s.whisker_high;
  j["outliers"] = s.outliers;
}

void to_json(json& j, const Requirement& r) {
  j = json{{"id", r.id},           {"stage", r.stage}, {"task", r.task},     {"task_name", r.task_name},
           {"step_no", r.step_no}, {"step", r.step},   {"result", r.result}, {"text", r.text}};
}

}  // namespace slrkit::assess
