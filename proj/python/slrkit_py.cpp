#include "slrkit/assess.hpp"
#include "slrkit/corpus.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/project.hpp"
#include "slrkit/query.hpp"
#include "slrkit/textproc.hpp"
#include "slrkit/vectorize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace slrkit;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

const textproc::PipelineConfig kPipeline;

struct Processed {
  std::map<std::string, DocVector> tfidf;
  vectorize::TermIndex index;
};

Processed process(const std::map<std::string, std::string>& texts) {
  std::vector<Document> docs;
  for (const auto& [id, text] : texts) {
    Metadata m;
    m.id = id;
    m.title = id;
    docs.emplace_back(m, text);
  }
  textproc::attach_bags(docs, kPipeline, textproc::build_lexicons(docs, kPipeline));
  vectorize::Bags bags;
  for (const auto& d : docs) bags[d.id()] = *d.bow();
  Processed p;
  p.index = vectorize::build_index(bags);
  p.tfidf = vectorize::tfidf_vectors(p.index, bags).vectors;
  return p;
}

project::ProjectConfig config_for(const std::filesystem::path& root, const std::map<std::string, std::string>& overrides) {
  return project::load_config(root, std::nullopt, overrides);
}

void raise(const char* type, const std::exception& e, const char* attr = nullptr, py::object value = py::none()) {
  py::object cls = py::module_::import("slrkit._slrkit").attr(type);
  py::object exc = cls(e.what());
  if (attr) exc.attr(attr) = std::move(value);
  PyErr_SetObject(cls.ptr(), exc.ptr());
}

}  // namespace

PYBIND11_MODULE(_slrkit, m) {
  m.doc() = "Bindings for the slrkit C++ core";
  m.attr("__version__") = "0.1.0";

  py::object base = py::reinterpret_borrow<py::object>(PyExc_RuntimeError);
  auto error = py::exception<Error>(m, "Error", base);
  for (const char* name : {"IngestError", "ConfigError", "ValidationError", "NotFoundError", "PrerequisiteError",
                           "LockError", "IntegrityError"}) {
    m.attr(name) = py::exception<Error>(m, name, error);
  }
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      raise("ValidationError", e, "violations", py::cast(e.violations()));
    } catch (const PrerequisiteError& e) {
      raise("PrerequisiteError", e, "stage", py::cast(e.stage()));
    } catch (const IntegrityError& e) {
      raise("IntegrityError", e, "failing", py::cast(e.failing()));
    } catch (const IngestError& e) {
      raise("IngestError", e);
    } catch (const ConfigError& e) {
      raise("ConfigError", e);
    } catch (const NotFoundError& e) {
      raise("NotFoundError", e);
    } catch (const LockError& e) {
      raise("LockError", e);
    } catch (const Error& e) {
      raise("Error", e);
    }
  });

  m.def("tokenize", [](const std::string& text) { return textproc::normalize_and_tokenize(text, kPipeline); },
        py::arg("text"), "Normalized tokens of a text before stemming.");
  m.def("stem", [](const std::string& word) { return textproc::stem(word); }, py::arg("word"),
        "Porter stem, iterated to a fixpoint.");
  m.def(
      "find_acronyms",
      [](const std::string& text) {
        py::dict out;
        for (const auto& d : textproc::find_acronym_definitions(text)) out[py::str(d.acronym)] = d.long_form;
        return out;
      },
      py::arg("text"), "Acronym definitions found in a text, acronym to long form.");

  m.def(
      "tfidf",
      [](const std::map<std::string, std::string>& texts) {
        std::map<std::string, std::map<std::string, double>> out;
        for (const auto& [id, v] : process(texts).tfidf) out[id] = v.weights;
        return out;
      },
      py::arg("texts"), "L2-normalized tf-idf vectors for a mapping of document id to text.");
  m.def(
      "similarity",
      [](const std::map<std::string, std::string>& texts) {
        const auto p = process(texts);
        const auto sim = vectorize::similarity_matrix(p.tfidf);
        std::map<std::string, std::map<std::string, double>> out;
        for (const auto& [a, va] : p.tfidf) {
          for (const auto& [b, vb] : p.tfidf) out[a][b] = sim.get(a, b);
        }
        return out;
      },
      py::arg("texts"), "Pairwise cosine similarity of the tf-idf vectors.");
  m.def(
      "rank",
      [](const std::string& rqs, const std::map<std::string, std::string>& texts) {
        const auto p = process(texts);
        json out = json::array();
        for (const auto& rq : query::parse_research_questions(rqs, kPipeline)) {
          out.push_back(query::rank_documents(rq, p.index, p.tfidf));
        }
        return to_py(out);
      },
      py::arg("rqs"), py::arg("texts"), "Rankings for research questions given in the RQ file format.");
  m.def(
      "detect_duplicates",
      [](const std::map<std::string, std::string>& titles, double threshold) {
        std::vector<Document> docs;
        for (const auto& [id, title] : titles) {
          Metadata meta;
          meta.id = id;
          meta.title = title;
          docs.emplace_back(meta);
        }
        return to_py(corpus::detect_duplicates(docs, threshold));
      },
      py::arg("titles"), py::arg("threshold") = corpus::kDefaultFuzzyThreshold,
      "Duplicate groups for a mapping of document id to title.");

  m.def(
      "catalog", [] { return to_py(assess::load_catalog().entries); }, "The 65-entry requirement catalog.");
  m.def(
      "box_stats", [](std::vector<double> values) { return to_py(assess::box_stats(std::move(values))); },
      py::arg("values"), "Boxplot statistics with type-7 quartiles and 1.5 IQR whiskers.");

  m.def(
      "stages",
      [] {
        std::vector<std::string> out;
        for (const auto s : project::all_stages()) out.push_back(project::to_string(s));
        return out;
      },
      "Stage names in execution order.");
  m.def(
      "config_hash",
      [](const std::filesystem::path& project, const std::map<std::string, std::string>& overrides) {
        return config_for(project, overrides).hash();
      },
      py::arg("project"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Hash of the effective configuration of a project.");
  m.def(
      "run_stage",
      [](const std::filesystem::path& project, const std::string& stage,
         const std::map<std::string, std::string>& overrides) {
        const auto config = config_for(project, overrides);
        project::RunManifest manifest;
        {
          py::gil_scoped_release release;
          manifest = project::run_stage(project::stage_from_string(stage), config);
        }
        return to_py(project::manifest_json(manifest));
      },
      py::arg("project"), py::arg("stage"), py::arg("overrides") = std::map<std::string, std::string>{},
      "Runs one stage and returns its manifest.");
}
