#include "slrkit/export.hpp"

#include "slrkit/errors.hpp"
#include "slrkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slrkit::emit {

using nlohmann::json;

namespace {

std::string md_cell(std::string_view s) {
  std::string out;
  for (const char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string cell_text(const std::vector<screen::CellValue>* cell) {
  if (!cell || cell->empty()) return "n/a";
  std::vector<std::string> values;
  for (const auto& v : *cell) values.push_back(v.value);
  return join(values, "; ");
}

json optional_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::string decision_of(const screen::DecisionLog& log, const std::string& id) {
  const auto eff = log.effective(id);
  return screen::to_string(eff ? eff->decision : screen::Decision::deferred);
}

const query::Ranking* ranking_for(const std::vector<query::Ranking>& rankings, const std::string& rq_id) {
  for (const auto& r : rankings) {
    if (r.rq_id == rq_id) return &r;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> write_files(const std::filesystem::path& root, const std::vector<OutputFile>& files) {
  std::vector<std::string> failures;
  for (const auto& f : files) {
    try {
      write_file(root / f.path, f.contents);
    } catch (const std::exception& e) {
      failures.push_back(f.path + ": " + e.what());
    }
  }
  return failures;
}

std::set<std::string> exportable_ids(const std::vector<Document>& corpus, const screen::DecisionLog& log) {
  const auto eff = log.effective_all();
  std::set<std::string> out;
  for (const auto& d : corpus) {
    const auto it = eff.find(d.id());
    if (it == eff.end() || it->second.decision != screen::Decision::excluded) out.insert(d.id());
  }
  return out;
}

// ---------------------------------------------------------------------------
// vault

double round4(double x) {
  const double r = std::round(x * 10000.0) / 10000.0;
  return r == 0.0 ? 0.0 : r;
}

std::string emit_front_matter(const FrontMatter& fm) {
  std::string out = "---\n";
  out += "id: " + json(fm.id).dump() + "\n";
  out += "title: " + json(fm.title).dump() + "\n";
  out += "authors: " + json(fm.authors).dump() + "\n";
  out += "year: " + (fm.year ? std::to_string(*fm.year) : std::string("null")) + "\n";
  out += "venue: " + optional_json(fm.venue).dump() + "\n";
  out += "doi: " + optional_json(fm.doi).dump() + "\n";
  out += "decision: " + json(fm.decision).dump() + "\n";
  if (fm.scores.empty()) {
    out += "scores: {}\n";
  } else {
    out += "scores:\n";
    for (const auto& [rq, s] : fm.scores) out += "  " + json(rq).dump() + ": " + format_fixed(s, 4) + "\n";
  }
  return out + "---\n";
}

FrontMatter parse_front_matter(std::string_view note) {
  std::istringstream in{std::string(note)};
  std::string line;
  if (!std::getline(in, line) || line != "---") throw Error("note has no front matter");
  FrontMatter fm;
  bool in_scores = false;
  bool closed = false;
  try {
    while (std::getline(in, line)) {
      if (line == "---") {
        closed = true;
        break;
      }
      if (in_scores && line.rfind("  ", 0) == 0) {
        const auto body = line.substr(2);
        const auto end_key = json::parse(body.substr(0, body.find("\": ") + 1));
        fm.scores[end_key.get<std::string>()] = std::stod(body.substr(body.find("\": ") + 3));
        continue;
      }
      in_scores = false;
      const auto colon = line.find(": ");
      const std::string key = line.substr(0, line.find(':'));
      const std::string raw = colon == std::string::npos ? std::string() : line.substr(colon + 2);
      if (key == "scores") {
        in_scores = raw.empty();
        continue;
      }
      const json v = json::parse(raw);
      if (key == "id") fm.id = v.get<std::string>();
      else if (key == "title") fm.title = v.get<std::string>();
      else if (key == "authors") fm.authors = v.get<std::vector<std::string>>();
      else if (key == "year") fm.year = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "venue") fm.venue = v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
      else if (key == "doi") fm.doi = v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
      else if (key == "decision") fm.decision = v.get<std::string>();
      else throw Error("unknown front matter key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed front matter: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error("malformed front matter score");
  }
  if (!closed) throw Error("unterminated front matter");
  return fm;
}

std::vector<OutputFile> emit_vault(const std::vector<Document>& corpus, const std::vector<query::ResearchQuestion>& rqs,
                                   const std::vector<query::Ranking>& rankings,
                                   const vectorize::SimilarityMatrix& similarity, const screen::DecisionLog& decisions,
                                   const VaultOptions& options) {
  const auto keep = exportable_ids(corpus, decisions);
  std::vector<const Document*> docs;
  for (const auto& d : corpus) {
    if (keep.count(d.id())) docs.push_back(&d);
  }
  std::sort(docs.begin(), docs.end(), [](const auto* a, const auto* b) { return a->id() < b->id(); });

  std::vector<OutputFile> out;
  for (const auto* d : docs) {
    FrontMatter fm{d->id(), d->meta.title, d->meta.authors, d->meta.year, d->meta.venue, d->meta.doi,
                   decision_of(decisions, d->id()), {}};
    for (const auto& r : rankings) {
      const auto* s = r.find(d->id());
      fm.scores[r.rq_id] = round4(s ? s->score : 0.0);
    }
    std::string note = emit_front_matter(fm);
    note += "\n# " + d->meta.title + "\n\n## Outline\n\n";
    bool any_heading = false;
    for (const auto& ch : d->chapters) {
      if (ch.level < 1) continue;
      any_heading = true;
      note += std::string(static_cast<std::size_t>(2 * (ch.level - 1)), ' ') + "- " + ch.heading + "\n";
    }
    if (!any_heading) note += "_No chapters detected._\n";

    std::vector<std::pair<double, std::string>> similar;
    for (const auto* other : docs) {
      if (other == d) continue;
      const double s = similarity.get(d->id(), other->id());
      if (s >= options.sim_threshold) similar.emplace_back(s, other->id());
    }
    std::sort(similar.begin(), similar.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (similar.size() > static_cast<std::size_t>(std::max(options.k, 0))) {
      similar.resize(static_cast<std::size_t>(std::max(options.k, 0)));
    }
    note += "\n## Similar documents\n\n";
    for (const auto& [s, id] : similar) note += "- [[" + id + "]] " + format_fixed(s, 4) + "\n";
    if (similar.empty()) note += "_No similar documents above the threshold._\n";
    out.push_back({d->id() + ".md", std::move(note)});
  }

  for (const auto& rq : rqs) {
    std::string note = "---\nrq: " + json(rq.id).dump() + "\ntext: " + json(rq.text).dump() + "\n---\n\n";
    note += "# " + rq.id + "\n\n" + rq.text + "\n\n";
    note += "Query: `" + query::compile_boolean_query(rq) + "`\n\n";
    const auto* ranking = ranking_for(rankings, rq.id);
    std::vector<const query::RelevanceScore*> rows;
    if (ranking) {
      for (const auto& s : ranking->scores) {
        if (keep.count(s.doc_id)) rows.push_back(&s);
      }
    }
    if (rows.empty()) {
      note += "_No ranked documents._\n";
    } else {
      note += "| Rank | Document | Score |\n|---:|---|---:|\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        note += "| " + std::to_string(i + 1) + " | [[" + rows[i]->doc_id + "]] | " + format_fixed(rows[i]->score, 4) +
                " |\n";
      }
    }
    out.push_back({rq.id + ".md", std::move(note)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// graph

json emit_graph(const std::vector<Document>& corpus, const vectorize::SimilarityMatrix& similarity,
                const std::vector<query::Ranking>& rankings, const screen::DecisionLog& decisions,
                double edge_threshold) {
  const auto keep = exportable_ids(corpus, decisions);
  std::map<std::string, const Document*> docs;
  for (const auto& d : corpus) {
    if (keep.count(d.id())) docs[d.id()] = &d;
  }
  json nodes = json::array();
  for (const auto& [id, d] : docs) {
    json relevance = json::object();
    double sum = 0.0;
    for (const auto& r : rankings) {
      const auto* s = r.find(id);
      const double v = s ? s->score : 0.0;
      relevance[r.rq_id] = v;
      sum += v;
    }
    const double average = rankings.empty() ? 0.0 : sum / static_cast<double>(rankings.size());
    nodes.push_back({{"id", id}, {"label", d->meta.title}, {"relevance", relevance}, {"average", average}});
  }
  json links = json::array();
  for (const auto& [key, s] : similarity.pairs) {
    if (!docs.count(key.first) || !docs.count(key.second) || s < edge_threshold) continue;
    links.push_back({{"source", key.first}, {"target", key.second}, {"similarity", s}});
  }
  return json{{"nodes", nodes}, {"links", links}, {"edge_threshold", edge_threshold}};
}

// ---------------------------------------------------------------------------
// comparison

std::string comparison_markdown(const screen::ComparisonTable& table) {
  std::string out = "| Property |";
  std::string rule = "|---|";
  for (const auto& d : table.contributions) {
    out += " " + md_cell(d) + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (const auto& p : table.properties) {
    out += "| " + md_cell(p) + " |";
    for (const auto& d : table.contributions) out += " " + md_cell(cell_text(table.cell(p, d))) + " |";
    out += "\n";
  }
  return out;
}

std::string comparison_csv(const screen::ComparisonTable& table) {
  std::string out = "property";
  for (const auto& d : table.contributions) out += "," + csv_field(d);
  out += "\r\n";
  for (const auto& p : table.properties) {
    out += csv_field(p);
    for (const auto& d : table.contributions) out += "," + csv_field(cell_text(table.cell(p, d)));
    out += "\r\n";
  }
  return out;
}

std::string patterns_markdown(const std::map<std::string, std::vector<std::pair<std::string, long>>>& patterns) {
  if (patterns.empty()) return "_No annotated values._\n";
  std::string out = "| Property | Value | Count |\n|---|---|---:|\n";
  for (const auto& [property, hist] : patterns) {
    for (const auto& [value, count] : hist) {
      out += "| " + md_cell(property) + " | " + md_cell(value) + " | " + std::to_string(count) + " |\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// report

std::string emit_report_skeleton(const ReportInputs& in) {
  const auto effective = in.decisions.effective_all();
  std::set<std::string> excluded;
  std::vector<std::string> deferred;
  for (const auto& id : in.doc_ids) {
    const auto it = effective.find(id);
    const auto d = it == effective.end() ? screen::Decision::deferred : it->second.decision;
    if (d == screen::Decision::excluded) excluded.insert(id);
    if (d == screen::Decision::deferred) deferred.push_back(id);
  }
  std::sort(deferred.begin(), deferred.end());
  const auto counts = screen::count_decisions(in.doc_ids, in.decisions);

  std::set<std::string> invalid_claims;
  for (const auto& v : in.claim_violations) invalid_claims.insert(v.claim_id);
  std::map<std::string, const screen::Annotation*> annotations;
  for (const auto& a : in.annotations) annotations[a.id] = &a;

  std::ostringstream out;
  out << "# Literature review report\n\n";
  out << "## Methods\n\n### Research questions\n\n";
  if (in.rqs.empty()) out << "_No research questions defined._\n";
  for (const auto& rq : in.rqs) {
    out << "- **" << rq.id << "**: " << rq.text << "\n";
    out << "  - Query: `" << query::compile_boolean_query(rq) << "`\n";
  }

  out << "\n### Screening criteria\n\n";
  if (in.criteria.empty()) out << "_No criteria defined._\n";
  for (const auto& c : in.criteria) {
    std::string field = screen::to_string(c.field);
    if (c.field == screen::Field::relevance) field += "(" + c.rq_id + ")";
    out << "- `" << c.id << "` " << (c.kind == screen::CriterionKind::exclude ? "exclude" : "include") << " when "
        << field << " " << screen::to_string(c.op) << " " << c.value.dump() << ": " << c.rationale << "\n";
  }

  out << "\n### Screening counts\n\n";
  out << "| Screened | Included | Excluded | Deferred |\n|---:|---:|---:|---:|\n";
  out << "| " << in.doc_ids.size() << " | " << counts.included << " | " << counts.excluded << " | " << counts.deferred
      << " |\n";

  out << "\n### Partitions\n\n";
  if (in.partitions.empty()) out << "_No partitions defined._\n";
  for (const auto& p : in.partitions) {
    std::map<std::string, long> sizes;
    for (const auto& [id, label] : p.assignment) {
      if (!excluded.count(id)) ++sizes[label];
    }
    std::vector<std::string> parts;
    for (const auto& [label, n] : sizes) parts.push_back(label + " (" + std::to_string(n) + ")");
    out << "- " << p.name << ": " << (parts.empty() ? std::string("empty") : join(parts, ", ")) << "\n";
  }

  const auto claims_section = [&](const std::string& rq_id) {
    bool any = false;
    for (const auto& c : in.claims) {
      if (c.rq_id != rq_id || invalid_claims.count(c.id)) continue;
      any = true;
      out << "- **" << c.id << "**: " << c.statement << "\n";
      out << "  - Warrant: " << c.warrant << "\n";
      std::vector<std::string> cites;
      for (const auto& e : c.evidence) {
        const auto it = annotations.find(e);
        cites.push_back(it == annotations.end() ? e : "[[" + it->second->doc_id + "]] (" + e + ")");
      }
      out << "  - Evidence: " << join(cites, ", ") << "\n";
    }
    if (!any) out << "_No validated claims._\n";
  };

  for (const auto& rq : in.rqs) {
    out << "\n## " << rq.id << ": " << rq.text << "\n\n### Comparison\n\n";
    const auto it = in.comparisons.find(rq.id);
    if (it == in.comparisons.end()) {
      out << "_No comparison for this research question._\n";
    } else {
      out << comparison_markdown(it->second);
    }
    out << "\n### Claims\n\n";
    claims_section(rq.id);
  }
  if (std::any_of(in.claims.begin(), in.claims.end(), [&](const auto& c) {
        return !invalid_claims.count(c.id) &&
               std::none_of(in.rqs.begin(), in.rqs.end(), [&](const auto& rq) { return rq.id == c.rq_id; });
      })) {
    out << "\n## Further claims\n\n";
    std::set<std::string> known;
    for (const auto& rq : in.rqs) known.insert(rq.id);
    std::set<std::string> other_rqs;
    for (const auto& c : in.claims) {
      if (!known.count(c.rq_id)) other_rqs.insert(c.rq_id);
    }
    for (const auto& r : other_rqs) claims_section(r);
  }

  out << "\n## Appendix: audit checklist\n\n";
  std::vector<const screen::Conflict*> open;
  for (const auto& c : in.conflicts) {
    if (!c.resolution && !excluded.count(c.contribution)) open.push_back(&c);
  }
  out << "- [" << (open.empty() ? "x" : " ") << "] Unresolved conflicts: " << open.size() << "\n";
  for (const auto* c : open) {
    out << "  - " << c->property << " / [[" << c->contribution << "]]: " << join(c->values, " vs ") << "\n";
  }
  out << "- [" << (deferred.empty() ? "x" : " ") << "] Deferred documents: " << deferred.size() << "\n";
  for (const auto& id : deferred) out << "  - [[" << id << "]]\n";
  out << "- [" << (invalid_claims.empty() ? "x" : " ") << "] Claims failing validation: " << invalid_claims.size()
      << "\n";
  for (const auto& id : invalid_claims) {
    std::set<std::string> kinds;
    for (const auto& v : in.claim_violations) {
      if (v.claim_id == id) kinds.insert(v.kind);
    }
    out << "  - " << id << ": " << join({kinds.begin(), kinds.end()}, ", ") << "\n";
  }
  if (in.gaps) {
    long gap_terms = 0;
    for (const auto& [rq, terms] : in.gaps->keyword_gaps) gap_terms += static_cast<long>(terms.size());
    long missing = 0;
    for (const auto& [doc, fields] : in.gaps->missing_metadata) {
      if (!excluded.count(doc)) ++missing;
    }
    out << "- [" << (gap_terms == 0 ? "x" : " ") << "] Keyword gaps: " << gap_terms << "\n";
    for (const auto& [rq, terms] : in.gaps->keyword_gaps) {
      if (!terms.empty()) out << "  - " << rq << ": " << join(terms, ", ") << "\n";
    }
    out << "- [" << (missing == 0 ? "x" : " ") << "] Documents with missing metadata: " << missing << "\n";
  } else {
    out << "- [ ] Gap report: not available\n";
  }
  return out.str();
}

}  // namespace slrkit::emit
