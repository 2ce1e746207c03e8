#include "provclass/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "nlohmann/json.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

using ordered_json = nlohmann::ordered_json;

struct ParagraphGroup {
  std::string paragraph_text;
  std::vector<Provision> provisions;
  std::size_t first_index = 0;  // position of the first provision in the input
};

// Contiguous provisions sharing (doc_id, paragraph) form one backend call.
std::vector<ParagraphGroup> group_paragraphs(const std::vector<Provision>& provisions) {
  std::vector<ParagraphGroup> groups;
  for (std::size_t i = 0; i < provisions.size(); ++i) {
    const Provision& p = provisions[i];
    const bool start_new = groups.empty() ||
                           groups.back().provisions.back().doc_id != p.doc_id ||
                           groups.back().provisions.back().paragraph != p.paragraph;
    if (start_new) {
      ParagraphGroup g;
      g.first_index = i;
      groups.push_back(std::move(g));
    }
    ParagraphGroup& g = groups.back();
    if (!g.paragraph_text.empty()) g.paragraph_text += " ";
    g.paragraph_text += p.text;
    g.provisions.push_back(p);
  }
  return groups;
}

std::string now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct MergedLabels {
  LabelSet predicted;
  std::map<ConceptId, Provenance> sources;
};

MergedLabels merge_labels(LabelSet llm, const LabelSet& keyword, OverallMode mode) {
  if (mode == OverallMode::Derived) llm.erase(ConceptId::Overall);

  MergedLabels out;
  const LabelSet direct = llm.united(keyword);
  out.predicted = close(direct, mode);

  // Provenance of closure-added concepts is inherited from the concepts that
  // imply them.
  auto flags_for = [&](ConceptId id) {
    bool from_llm = llm.contains(id);
    bool from_keyword = keyword.contains(id);
    return std::pair<bool, bool>{from_llm, from_keyword};
  };
  for (ConceptId id : out.predicted.to_vector()) {
    auto [from_llm, from_keyword] = flags_for(id);
    if (!from_llm && !from_keyword) {
      for (const Concept& c : registry()) {
        const bool implies_parent = c.parent && *c.parent == id && direct.contains(c.id);
        const bool implies_overall = id == ConceptId::Overall && c.id != ConceptId::Overall &&
                                     direct.contains(c.id);
        if (implies_parent || implies_overall) {
          auto [cl, ck] = flags_for(c.id);
          from_llm = from_llm || cl;
          from_keyword = from_keyword || ck;
        }
      }
    }
    out.sources[id] = from_llm && from_keyword ? Provenance::Both
                      : from_llm               ? Provenance::Llm
                                               : Provenance::Keyword;
  }
  return out;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Llm:
      return "llm";
    case Provenance::Keyword:
      return "keyword";
    case Provenance::Both:
      return "both";
  }
  return "";
}

std::vector<AnnotatedProvision> predict(const std::vector<Provision>& provisions,
                                        ChatBackend& backend, const PromptTemplate& tpl,
                                        const KeywordTable& keywords,
                                        const PredictOptions& options) {
  const PhraseMatcher matcher = keywords.matcher();
  const std::vector<ParagraphGroup> groups = group_paragraphs(provisions);

  struct GroupResult {
    ClassifyOutcome outcome;
    std::string error;
    bool failed = false;
  };
  std::vector<GroupResult> results(groups.size());

  const int parallel = std::max(1, backend.max_parallel());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t g = next.fetch_add(1);
      if (g >= groups.size()) return;
      try {
        results[g].outcome =
            classify_paragraph(backend, tpl, groups[g].paragraph_text, groups[g].provisions);
      } catch (const Error& ex) {
        results[g].failed = true;
        results[g].error = ex.what();
      }
    }
  };
  if (parallel <= 1 || groups.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    const int n_threads = std::min<std::size_t>(parallel, groups.size());
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  std::vector<AnnotatedProvision> annotations(provisions.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const ParagraphGroup& group = groups[g];
    const GroupResult& result = results[g];
    for (std::size_t k = 0; k < group.provisions.size(); ++k) {
      AnnotatedProvision& ann = annotations[group.first_index + k];
      ann.provision = group.provisions[k];
      ann.raw_keyword = matcher.match(ann.provision.text);
      if (result.failed) {
        // Keyword labels are deterministic and still audited, but a failed
        // paragraph yields no prediction at all.
        ann.failed = true;
        ann.error = result.error;
        continue;
      }
      ann.raw_llm = result.outcome.labels[k].second;
      MergedLabels merged = merge_labels(ann.raw_llm, ann.raw_keyword, options.overall_mode);
      ann.predicted = merged.predicted;
      ann.sources = std::move(merged.sources);
    }
  }
  return annotations;
}

std::vector<RunResult> run_many(const std::vector<Provision>& provisions, ChatBackend& backend,
                                const PromptTemplate& tpl, const KeywordTable& keywords,
                                const RunOptions& options) {
  if (options.n < 1) throw ValidationError("run count must be at least 1");

  auto run_once = [&](int run) {
    PromptTemplate run_tpl = tpl;
    if (options.sample_shots > 0 && tpl.mode == PromptMode::Fewshot &&
        static_cast<std::size_t>(options.sample_shots) < tpl.shots.size()) {
      std::mt19937_64 gen(options.seed + static_cast<unsigned>(run));
      std::vector<Shot> pool = tpl.shots;
      std::vector<Shot> chosen;
      for (int k = 0; k < options.sample_shots; ++k) {
        const std::size_t pick = gen() % pool.size();
        chosen.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<long>(pick));
      }
      run_tpl.shots = std::move(chosen);
    }
    RunResult result;
    result.run_index = run;
    result.annotations = predict(provisions, backend, run_tpl, keywords, options.predict);
    result.backend_identity = backend.identity();
    result.timestamp = now_iso8601();
    return result;
  };

  std::vector<RunResult> runs;
  runs.reserve(options.n);
  if (options.parallel_runs && options.n > 1) {
    std::vector<std::future<RunResult>> futures;
    futures.reserve(options.n);
    for (int run = 0; run < options.n; ++run) {
      futures.push_back(std::async(std::launch::async, run_once, run));
    }
    for (auto& future : futures) runs.push_back(future.get());
  } else {
    for (int run = 0; run < options.n; ++run) runs.push_back(run_once(run));
  }
  return runs;
}

void attach_gold(std::vector<AnnotatedProvision>& annotations,
                 const std::map<std::string, LabelSet>& gold) {
  for (AnnotatedProvision& ann : annotations) {
    auto it = gold.find(ann.provision.provision_id);
    if (it != gold.end()) ann.gold = it->second;
  }
}

std::string annotations_to_jsonl(const std::vector<AnnotatedProvision>& annotations,
                                 int run_index) {
  std::ostringstream os;
  for (const AnnotatedProvision& ann : annotations) {
    ordered_json record;
    record["provision_id"] = ann.provision.provision_id;
    record["doc_id"] = ann.provision.doc_id;
    record["text"] = ann.provision.text;
    if (ann.failed) {
      record["failed"] = true;
      record["error"] = ann.error;
    } else {
      record["predicted"] = ann.predicted.to_keys();
      ordered_json sources = ordered_json::object();
      for (const auto& [concept_id, origin] : ann.sources) {
        sources[std::string(concept_key(concept_id))] = std::string(to_string(origin));
      }
      record["sources"] = std::move(sources);
    }
    if (ann.gold) record["gold"] = ann.gold->to_keys();
    record["run_index"] = run_index;
    os << record.dump() << "\n";
  }
  return os.str();
}

std::vector<AnnotatedProvision> annotations_from_jsonl(const std::string& content,
                                                       const std::string& source_name) {
  std::vector<AnnotatedProvision> annotations;
  std::istringstream in(content);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(source_name + ":" + std::to_string(line_number) + ": " + ex.what());
    }
    try {
      AnnotatedProvision ann;
      ann.provision.provision_id = record.at("provision_id").get<std::string>();
      ann.provision.doc_id = record.value("doc_id", "");
      ann.provision.text = record.value("text", "");
      ann.failed = record.value("failed", false);
      ann.error = record.value("error", "");
      if (record.contains("predicted")) {
        ann.predicted = LabelSet::from_keys(record["predicted"].get<std::vector<std::string>>());
      }
      if (record.contains("sources")) {
        for (const auto& [key, value] : record["sources"].items()) {
          const std::string origin = value.get<std::string>();
          ann.sources[parse_concept(key)] = origin == "llm"       ? Provenance::Llm
                                            : origin == "keyword" ? Provenance::Keyword
                                                                  : Provenance::Both;
        }
      }
      if (record.contains("gold")) {
        ann.gold = LabelSet::from_keys(record["gold"].get<std::vector<std::string>>());
      }
      annotations.push_back(std::move(ann));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(source_name + ":" + std::to_string(line_number) + ": " + ex.what());
    }
  }
  return annotations;
}

std::vector<AnnotatedProvision> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return annotations_from_jsonl(buffer.str(), path);
}

void scored_maps(const std::vector<AnnotatedProvision>& annotations,
                 std::map<std::string, LabelSet>& predictions,
                 std::map<std::string, LabelSet>& gold) {
  for (const AnnotatedProvision& ann : annotations) {
    if (ann.failed || !ann.gold) continue;
    predictions[ann.provision.provision_id] = ann.predicted;
    gold[ann.provision.provision_id] = *ann.gold;
  }
}

}  // namespace provclass
