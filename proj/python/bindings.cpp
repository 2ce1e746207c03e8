#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "provclass/backend.hpp"
#include "provclass/corpus.hpp"
#include "provclass/errors.hpp"
#include "provclass/evalstat.hpp"
#include "provclass/model_output.hpp"
#include "provclass/pipeline.hpp"
#include "provclass/prompt.hpp"
#include "provclass/segmenter.hpp"
#include "provclass/taxonomy.hpp"

namespace py = pybind11;
using namespace provclass;

namespace {

py::dict concept_to_dict(const Concept& c) {
  py::dict d;
  d["id"] = std::string(c.key);
  d["name"] = std::string(c.display_name);
  d["level"] = c.level == ConceptLevel::L1 ? "L1" : c.level == ConceptLevel::L2 ? "L2" : "Derived";
  d["parent"] = c.parent ? py::object(py::str(std::string(concept_key(*c.parent))))
                         : py::object(py::none());
  d["scarce"] = c.scarce;
  return d;
}

py::dict provision_to_dict(const Provision& p) {
  py::dict d;
  d["provision_id"] = p.provision_id;
  d["doc_id"] = p.doc_id;
  d["index"] = p.index;
  d["paragraph"] = p.paragraph;
  d["text"] = p.text;
  d["prefix"] = p.prefix;
  d["prefix_applied"] = p.prefix_applied;
  return d;
}

OverallMode mode_from_string(const std::string& mode) { return parse_overall_mode(mode); }

}  // namespace

PYBIND11_MODULE(_provclass, m) {
  m.doc() = "Classification and statistical evaluation of food-safety regulation provisions";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  m.def("registry", [] {
    py::list out;
    for (const Concept& c : registry()) out.append(concept_to_dict(c));
    return out;
  });

  m.def(
      "close_labels",
      [](const std::vector<std::string>& labels, const std::string& mode) {
        return close(labels, mode_from_string(mode)).to_keys();
      },
      py::arg("labels"), py::arg("mode") = "derived");

  m.def(
      "segment",
      [](const std::string& text, const std::string& doc_id) {
        SourceDocument doc;
        doc.doc_id = doc_id;
        doc.body = text;
        py::list out;
        for (const Provision& p : segment(doc, SegmenterConfig{})) {
          out.append(provision_to_dict(p));
        }
        return out;
      },
      py::arg("text"), py::arg("doc_id") = "doc");

  m.def("split_sentences",
        [](const std::string& text) { return split_sentences(text, SegmenterConfig{}); });

  m.def("detect_list_items", [](const std::string& block) {
    py::list out;
    for (const ListItem& item : detect_list_items(block, SegmenterConfig{})) {
      out.append(py::make_tuple(item.marker, item.text));
    }
    return out;
  });

  m.def(
      "classify_keywords",
      [](const std::string& text, const std::vector<std::pair<std::string, std::string>>& table) {
        KeywordTable kt;
        for (const auto& [concept_id, phrase] : table) {
          kt.entries.emplace_back(parse_concept(concept_id), phrase);
        }
        return kt.matcher().match(text).to_keys();
      },
      py::arg("text"), py::arg("table"));

  m.def("parse_model_output", [](const std::string& raw) {
    py::list out;
    for (const ParsedSentence& s : parse_model_output(raw)) {
      out.append(py::make_tuple(s.text, s.labels));
    }
    return out;
  });

  m.def(
      "render_labelled_sentences",
      [](const std::vector<std::pair<std::string, std::vector<std::string>>>& sentences) {
        std::vector<LabelledSentence> out;
        for (const auto& [text, labels] : sentences) {
          out.push_back({text, LabelSet::from_keys(labels)});
        }
        return render_labelled_sentences(out);
      });

  m.def(
      "mock_classify",
      [](const std::string& paragraph,
         const std::vector<std::pair<std::string, std::string>>& rules) {
        std::vector<std::pair<ConceptId, std::string>> parsed;
        for (const auto& [concept_id, phrase] : rules) {
          parsed.emplace_back(parse_concept(concept_id), phrase);
        }
        MockBackend backend(std::move(parsed), "mock:python");
        return backend.complete({{Role::User, paragraph}});
      },
      py::arg("paragraph"), py::arg("rules"));

  m.def("precision_recall_f1", [](long tp, long fp, long tn, long fn) {
    ConfusionCounts counts;
    counts.tp = tp;
    counts.fp = fp;
    counts.tn = tn;
    counts.fn = fn;
    const PrfResult r = precision_recall_f1(counts);
    py::dict d;
    d["precision"] = r.precision ? py::object(py::float_(*r.precision)) : py::object(py::none());
    d["recall"] = r.recall ? py::object(py::float_(*r.recall)) : py::object(py::none());
    d["f1"] = r.f1 ? py::object(py::float_(*r.f1)) : py::object(py::none());
    return d;
  });

  m.def("cohen_kappa", [](const std::vector<bool>& a, const std::vector<bool>& b) {
    return cohen_kappa(a, b);
  });

  m.def("wilcoxon_rank_sum", [](const std::vector<double>& a, const std::vector<double>& b) {
    const WilcoxonResult r = wilcoxon_rank_sum(a, b);
    py::dict d;
    d["u"] = r.u;
    d["p_value"] = r.p_value;
    d["exact"] = r.exact;
    return d;
  });

  m.def("vargha_delaney_a12", [](const std::vector<double>& a, const std::vector<double>& b) {
    const A12Result r = vargha_delaney_a12(a, b);
    return py::make_tuple(r.a12, std::string(to_string(r.band)));
  });

  m.def("summarize_runs", [](const std::vector<double>& values) {
    const BoxplotSummary s = summarize_runs(values);
    py::dict d;
    d["min"] = s.min;
    d["q1"] = s.q1;
    d["median"] = s.median;
    d["q3"] = s.q3;
    d["max"] = s.max;
    d["mean"] = s.mean;
    d["sd"] = s.sd;
    return d;
  });

  m.def(
      "make_annotation_batches",
      [](const std::vector<std::string>& ids, int annotators, double overlap, unsigned seed) {
        const AnnotationBatches b = make_annotation_batches(ids, annotators, overlap, seed);
        py::dict d;
        d["shared"] = b.shared;
        d["per_annotator"] = b.per_annotator;
        return d;
      },
      py::arg("ids"), py::arg("annotators") = 2, py::arg("overlap") = 0.10, py::arg("seed") = 0);

  m.def("load_corpus", [](const std::string& path) {
    const Corpus corpus = load_corpus(path);
    py::list records;
    for (const CorpusRecord& r : corpus.records) {
      py::dict d;
      d["provision_id"] = r.provision_id;
      d["doc_id"] = r.doc_id;
      d["jurisdiction"] = std::string(to_string(r.jurisdiction));
      d["split"] = std::string(to_string(r.split));
      d["text"] = r.text;
      d["gold"] = r.gold.to_keys();
      records.append(d);
    }
    return records;
  });
}
