#pragma once

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slrkit::assess {

inline constexpr int kRequirementCount = 65;
inline constexpr int kNoAnswer = 10;  // A10

struct Requirement {
  int id = 0;
  std::string stage;  // I..IV
  int task = 0;       // 1..8
  std::string task_name;
  int step_no = 0;
  std::string step;
  std::string result;
  std::string text;
};

struct RequirementCatalog {
  std::vector<Requirement> entries;  // ordered by id

  const Requirement& at(int id) const;
  std::vector<int> task_ids() const;
  std::vector<std::string> stages() const;
  /// SHA-256 over the requirement texts in id order, newline separated.
  std::string text_checksum() const;
};

/// Parses and checks catalog text; throws IntegrityError naming failing ids.
RequirementCatalog parse_catalog(std::string_view tsv);
/// The shipped catalog.
const RequirementCatalog& load_catalog();

/// Answers hold 1..9 for A1..A9 and kNoAnswer for A10. Lower is stronger agreement.
struct LikertResponse {
  std::string respondent;
  std::string tool;
  std::optional<double> duration_minutes;
  std::array<int, kRequirementCount> answers{};
};

/// Columns: respondent, tool, duration, R1..R65. Cells hold A1..A10, 1..10 or blank (A10).
std::vector<LikertResponse> parse_likert_csv(std::string_view csv);
std::vector<LikertResponse> load_likert_csv(const std::filesystem::path& path);

/// Type-7 quantile of sorted data.
double quantile7(const std::vector<double>& sorted, double p);

struct AgreementStats {
  int requirement = 0;
  long n = 0;
  bool no_data = false;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;  // ascending
};

/// Box statistics over the non-A10 answers; whiskers reach the most extreme
/// observations within 1.5 IQR of the quartiles.
AgreementStats box_stats(std::vector<double> values);
AgreementStats aggregate_likert(const std::vector<LikertResponse>& responses, int requirement);

struct Descriptive {
  long n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample; 0 for a single value
  double min = 0.0;
  double max = 0.0;
};

/// Throws Error on empty input.
Descriptive descriptive_stats(const std::vector<double>& values);

struct CoverageMatrix {
  std::vector<std::string> tools;
  std::map<std::string, std::array<std::optional<double>, kRequirementCount>> medians;
  std::map<std::string, std::map<int, std::optional<double>>> task_medians;  // tool -> task -> median
};

/// Median agreement per tool and requirement; task rollups take the median over
/// every answer given for the task's requirements. Empty cells mean no data.
CoverageMatrix coverage_matrix(const std::vector<LikertResponse>& responses,
                               const RequirementCatalog& catalog = load_catalog());

/// Rows are tools; no-data cells hold "NA".
std::string coverage_csv(const CoverageMatrix& m);
nlohmann::json boxplot_json(const std::vector<LikertResponse>& responses);

void to_json(nlohmann::json& j, const AgreementStats& s);
void to_json(nlohmann::json& j, const Requirement& r);

}  // namespace slrkit::assess
