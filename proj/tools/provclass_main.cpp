#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "provclass/backend.hpp"
#include "provclass/config.hpp"
#include "provclass/corpus.hpp"
#include "provclass/errors.hpp"
#include "provclass/evalstat.hpp"
#include "provclass/jsonl.hpp"
#include "provclass/pipeline.hpp"
#include "provclass/taxonomy.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace provclass;

namespace {

struct GlobalOptions {
  std::string config_path;
  AppConfig config;

  // Flag-level overrides shared by backend-using subcommands.
  std::string backend_kind = "mock";  // mock | http
  std::string mock_rules;
  std::string endpoint;
  std::string model;
  std::optional<double> temperature;
  std::string keywords_path;
  std::string mode = "finetune_infer";  // finetune_infer | fewshot
  std::string template_path;
  std::string user_template_path;
  std::string shots_path;
  std::string overall_mode;
};

void load_config_if_given(GlobalOptions& g) {
  if (!g.config_path.empty()) g.config = AppConfig::load(g.config_path);
}

std::unique_ptr<ChatBackend> make_backend(const GlobalOptions& g) {
  if (g.backend_kind == "mock") {
    const std::string rules = !g.mock_rules.empty() ? g.mock_rules : g.config.mock_rules_path;
    if (rules.empty()) {
      throw ValidationError("mock backend requires --mock-rules (or mock_rules in the config)");
    }
    return std::make_unique<MockBackend>(MockBackend::from_rules_file(rules));
  }
  if (g.backend_kind == "http") {
    BackendConfig cfg = g.config.backend;
    if (!g.endpoint.empty()) cfg.endpoint = g.endpoint;
    if (!g.model.empty()) cfg.model = g.model;
    if (g.temperature) cfg.temperature = *g.temperature;
    if (cfg.endpoint.empty()) {
      throw ValidationError("http backend requires --endpoint (or backend.endpoint in config)");
    }
    return std::make_unique<HttpBackend>(cfg);
  }
  throw ValidationError("unknown backend \"" + g.backend_kind + "\" (expected mock or http)");
}

PromptTemplate make_template(const GlobalOptions& g) {
  const std::string tpl_path = !g.template_path.empty() ? g.template_path
                               : g.mode == "fewshot"    ? g.config.fewshot_template_path
                                                        : g.config.finetune_infer_template_path;
  const std::string user_tpl_path =
      !g.user_template_path.empty() ? g.user_template_path : g.config.user_template_path;
  PromptTemplate tpl;
  if (g.mode == "fewshot") {
    const std::string shots_path =
        !g.shots_path.empty() ? g.shots_path : g.config.shots_path;
    if (shots_path.empty()) throw ValidationError("few-shot mode requires --shots");
    tpl = PromptTemplate::fewshot_default(load_shots(shots_path));
    if (!tpl_path.empty()) {
      tpl.system_instruction =
          PromptTemplate::from_file(tpl_path, PromptMode::Fewshot).system_instruction;
    }
  } else if (g.mode == "finetune_infer") {
    tpl = !tpl_path.empty() ? PromptTemplate::from_file(tpl_path, PromptMode::FinetuneInfer)
                            : PromptTemplate::finetune_infer_default();
  } else {
    throw ValidationError("unknown mode \"" + g.mode +
                          "\" (expected finetune_infer or fewshot)");
  }
  if (!user_tpl_path.empty()) tpl.user_template = load_user_template(user_tpl_path);
  tpl.validate();
  return tpl;
}

KeywordTable make_keywords(const GlobalOptions& g) {
  const std::string path =
      !g.keywords_path.empty() ? g.keywords_path : g.config.keyword_table_path;
  if (path.empty()) return KeywordTable{};  // empty table: keyword step is a no-op
  return KeywordTable::load(path);
}

OverallMode resolve_overall_mode(const GlobalOptions& g) {
  if (!g.overall_mode.empty()) return parse_overall_mode(g.overall_mode);
  return g.config.overall_mode;
}

struct LoadedProvisions {
  std::vector<Provision> provisions;
  std::map<std::string, LabelSet> gold;  // empty unless a corpus was given
};

LoadedProvisions load_inputs(const std::string& in_path, const std::string& corpus_path) {
  if (!in_path.empty() && !corpus_path.empty()) {
    throw ValidationError("give either --in or --corpus, not both");
  }
  LoadedProvisions out;
  if (!corpus_path.empty()) {
    const Corpus corpus = load_corpus(corpus_path);
    out.provisions = corpus_provisions(corpus);
    out.gold = corpus_gold(corpus);
  } else if (!in_path.empty()) {
    out.provisions = load_provisions(in_path);
  } else {
    throw ValidationError("an input is required: --in provisions.jsonl or --corpus corpus.jsonl");
  }
  return out;
}

std::string csv_cell(const std::optional<double>& value) {
  if (!value) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *value);
  return buf;
}

std::vector<fs::path> run_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a run directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("run_", 0) == 0 &&
        entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no run_*.jsonl files in " + dir);
  return files;
}

std::vector<RunMetrics> metrics_from_dir(const std::string& dir) {
  std::vector<RunMetrics> runs;
  int index = 0;
  for (const fs::path& file : run_files(dir)) {
    std::map<std::string, LabelSet> predictions, gold;
    scored_maps(load_annotations(file.string()), predictions, gold);
    if (gold.empty()) {
      throw ValidationError(file.string() + " carries no gold labels; evaluation needs them");
    }
    runs.push_back(compute_run_metrics(predictions, gold, index++));
  }
  return runs;
}

// ---------------------------------------------------------------- taxonomy

void cmd_taxonomy_show(const std::string& format, const std::string& out_path) {
  const std::string text =
      format == "tsv" ? render_taxonomy_tsv() : render_taxonomy_table();
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

// ----------------------------------------------------------------- segment

void cmd_segment(const GlobalOptions& g, const std::string& in_path, const std::string& out_path,
                 std::string doc_id, const std::string& jurisdiction,
                 const std::string& abbreviations_path) {
  SourceDocument doc;
  doc.body = read_text_file(in_path);
  doc.doc_id = doc_id.empty() ? fs::path(in_path).stem().string() : std::move(doc_id);
  doc.jurisdiction = parse_jurisdiction(jurisdiction);

  SegmenterConfig cfg = g.config.segmenter;
  if (!abbreviations_path.empty()) cfg.abbreviations = load_abbreviations(abbreviations_path);

  const std::string jsonl = provisions_to_jsonl(segment(doc, cfg));
  if (out_path.empty() || out_path == "-") {
    std::cout << jsonl;
  } else {
    write_text_file(out_path, jsonl);
  }
}

// ---------------------------------------------------------------- keywords

void cmd_keywords_lint(const std::string& path) {
  const KeywordTable table = KeywordTable::load(path);
  std::map<ConceptId, int> counts;
  for (const auto& [concept_id, phrase] : table.entries) ++counts[concept_id];
  std::cout << path << ": " << table.entries.size() << " phrases\n";
  for (const auto& [concept_id, count] : counts) {
    std::cout << "  " << concept_key(concept_id) << ": " << count << "\n";
  }
}

// ---------------------------------------------------------------- classify

void cmd_classify(const GlobalOptions& g, const std::string& in_path,
                  const std::string& corpus_path, const std::string& out_path) {
  const LoadedProvisions input = load_inputs(in_path, corpus_path);
  auto backend = make_backend(g);
  const PromptTemplate tpl = make_template(g);

  std::ostringstream os;
  std::size_t i = 0;
  while (i < input.provisions.size()) {
    std::size_t j = i;
    std::string paragraph;
    while (j < input.provisions.size() &&
           input.provisions[j].doc_id == input.provisions[i].doc_id &&
           input.provisions[j].paragraph == input.provisions[i].paragraph) {
      if (!paragraph.empty()) paragraph += " ";
      paragraph += input.provisions[j].text;
      ++j;
    }
    const std::vector<Provision> group(input.provisions.begin() + static_cast<long>(i),
                                       input.provisions.begin() + static_cast<long>(j));
    const ClassifyOutcome outcome = classify_paragraph(*backend, tpl, paragraph, group);
    for (const auto& [provision_id, labels] : outcome.labels) {
      ordered_json record;
      record["provision_id"] = provision_id;
      record["labels"] = labels.to_keys();
      os << record.dump() << "\n";
    }
    for (const std::string& warning : outcome.warnings) {
      std::cerr << "warning: " << warning << "\n";
    }
    i = j;
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << os.str();
  } else {
    write_text_file(out_path, os.str());
  }
}

// ----------------------------------------------------------------- predict

void cmd_predict(const GlobalOptions& g, const std::string& in_path,
                 const std::string& corpus_path, const std::string& out_path) {
  LoadedProvisions input = load_inputs(in_path, corpus_path);
  auto backend = make_backend(g);
  const PromptTemplate tpl = make_template(g);
  const KeywordTable keywords = make_keywords(g);
  PredictOptions options;
  options.overall_mode = resolve_overall_mode(g);

  std::vector<AnnotatedProvision> annotations =
      predict(input.provisions, *backend, tpl, keywords, options);
  attach_gold(annotations, input.gold);

  int failed = 0;
  for (const AnnotatedProvision& ann : annotations) {
    if (ann.failed) ++failed;
  }
  if (failed > 0) std::cerr << "warning: " << failed << " provisions failed\n";

  const std::string jsonl = annotations_to_jsonl(annotations, 0);
  if (out_path.empty() || out_path == "-") {
    std::cout << jsonl;
  } else {
    write_text_file(out_path, jsonl);
  }
}

// --------------------------------------------------------------------- run

void cmd_run(const GlobalOptions& g, const std::string& corpus_path, const std::string& out_dir,
             std::optional<int> n_flag, std::optional<unsigned> seed_flag, int sample_shots,
             bool parallel_runs) {
  const Corpus corpus = load_corpus(corpus_path);
  auto backend = make_backend(g);
  const PromptTemplate tpl = make_template(g);
  const KeywordTable keywords = make_keywords(g);

  RunOptions options;
  options.n = n_flag.value_or(g.config.run_count);
  options.seed = seed_flag.value_or(g.config.seed);
  options.predict.overall_mode = resolve_overall_mode(g);
  options.sample_shots = sample_shots;
  options.parallel_runs = parallel_runs;

  const std::vector<Provision> provisions = corpus_provisions(corpus);
  const std::map<std::string, LabelSet> gold = corpus_gold(corpus);
  std::vector<RunResult> runs = run_many(provisions, *backend, tpl, keywords, options);

  fs::create_directories(out_dir);
  for (RunResult& run : runs) {
    attach_gold(run.annotations, gold);
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03d.jsonl", run.run_index);
    write_text_file((fs::path(out_dir) / name).string(),
                    annotations_to_jsonl(run.annotations, run.run_index));
  }

  ordered_json manifest;
  manifest["backend"] = backend->identity();
  manifest["runs"] = options.n;
  manifest["seed"] = options.seed;
  manifest["overall_mode"] = std::string(to_string(options.predict.overall_mode));
  manifest["corpus"] = corpus_path;
  write_text_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cerr << options.n << " runs written to " << out_dir << "\n";
}

// ---------------------------------------------------------------- evaluate

void cmd_evaluate(const std::string& runs_dir, const std::string& out_dir,
                  const std::string& export_values) {
  const std::vector<RunMetrics> runs = metrics_from_dir(runs_dir);

  std::ostringstream per_run;
  per_run << "run_index,concept,tp,fp,tn,fn,precision,recall,f1\n";
  for (const RunMetrics& run : runs) {
    for (const Concept& c : registry()) {
      const ConfusionCounts& counts = run.counts.at(c.id);
      const PrfResult& prf = run.metrics.at(c.id);
      per_run << run.run_index << "," << c.key << "," << counts.tp << "," << counts.fp << ","
              << counts.tn << "," << counts.fn << "," << csv_cell(prf.precision) << ","
              << csv_cell(prf.recall) << "," << csv_cell(prf.f1) << "\n";
    }
  }

  std::ostringstream summary_csv;
  std::ostringstream summary_text;
  summary_csv << "concept,metric,defined,undefined,min,q1,median,q3,max,mean,sd\n";
  summary_text << "concept          metric     runs  undef    mean      sd     min  median     "
                  "max\n";
  for (const Concept& c : registry()) {
    for (const char* metric : {"precision", "recall", "f1"}) {
      std::vector<double> values;
      int undefined = 0;
      for (const RunMetrics& run : runs) {
        const PrfResult& prf = run.metrics.at(c.id);
        const std::optional<double>& v = std::string_view(metric) == "precision" ? prf.precision
                                         : std::string_view(metric) == "recall"  ? prf.recall
                                                                                 : prf.f1;
        if (v) {
          values.push_back(*v);
        } else {
          ++undefined;
        }
      }
      if (values.empty()) {
        summary_csv << c.key << "," << metric << ",0," << undefined << ",,,,,,,\n";
        continue;
      }
      const BoxplotSummary s = summarize_runs(values);
      summary_csv << c.key << "," << metric << "," << values.size() << "," << undefined;
      char buf[160];
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", s.min, s.q1,
                    s.median, s.q3, s.max, s.mean, s.sd);
      summary_csv << buf;

      std::string key(c.key);
      key.resize(15, ' ');
      char line[200];
      std::snprintf(line, sizeof(line), "%s  %-9s  %4zu  %5d  %6.3f  %6.3f  %6.3f  %6.3f  %6.3f\n",
                    key.c_str(), metric, values.size(), undefined, s.mean, s.sd, s.min, s.median,
                    s.max);
      summary_text << line;
    }
  }

  if (!export_values.empty()) {
    std::ostringstream values_csv;
    values_csv << "concept,metric,run_index,value\n";
    for (const RunMetrics& run : runs) {
      for (const Concept& c : registry()) {
        const PrfResult& prf = run.metrics.at(c.id);
        if (prf.precision) {
          values_csv << c.key << ",precision," << run.run_index << ","
                     << csv_cell(prf.precision) << "\n";
        }
        if (prf.recall) {
          values_csv << c.key << ",recall," << run.run_index << "," << csv_cell(prf.recall)
                     << "\n";
        }
      }
    }
    write_text_file(export_values, values_csv.str());
  }

  if (out_dir.empty()) {
    std::cout << summary_text.str();
  } else {
    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "metrics.csv").string(), per_run.str());
    write_text_file((fs::path(out_dir) / "summary.csv").string(), summary_csv.str());
    std::cerr << "metrics written to " << out_dir << "\n";
  }
}

// ----------------------------------------------------------------- compare

void cmd_compare(const std::string& dir_a, const std::string& dir_b, const std::string& metric,
                 const std::vector<std::string>& concept_keys, const std::string& out_path,
                 const std::string& format) {
  const std::vector<RunMetrics> runs_a = metrics_from_dir(dir_a);
  const std::vector<RunMetrics> runs_b = metrics_from_dir(dir_b);

  std::vector<ConceptId> concepts;
  if (concept_keys.empty()) {
    for (const Concept& c : registry()) concepts.push_back(c.id);
  } else {
    for (const std::string& key : concept_keys) concepts.push_back(parse_concept(key));
  }

  const std::vector<ComparisonReport> reports =
      compare_models(runs_a, runs_b, parse_metric(metric), concepts);

  std::ostringstream os;
  if (format == "csv") {
    os << "concept,metric,n_a,n_b,undefined_a,undefined_b,p_value,a12,band,direction,"
          "significant\n";
    for (const ComparisonReport& r : reports) {
      if (!r.valid) {
        os << concept_key(r.concept_id) << "," << metric << ",0,0," << r.undefined_a << ","
           << r.undefined_b << ",,,,,\n";
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6g,%.6f", r.p_value, r.a12);
      os << concept_key(r.concept_id) << "," << metric << "," << r.samples_a.size() << ","
         << r.samples_b.size() << "," << r.undefined_a << "," << r.undefined_b << "," << buf
         << "," << to_string(r.band) << "," << r.direction << ","
         << (r.significant ? "yes" : "no") << "\n";
    }
  } else {
    os << "concept          metric       p-value     a12  band  direction  significant\n";
    for (const ComparisonReport& r : reports) {
      std::string key(concept_key(r.concept_id));
      key.resize(15, ' ');
      if (!r.valid) {
        os << key << "  " << metric << "  (no defined values)\n";
        continue;
      }
      char line[160];
      std::snprintf(line, sizeof(line), "%s  %-9s  %10.4g  %6.3f  %4s  %-9s  %s\n", key.c_str(),
                    metric.c_str(), r.p_value, r.a12, std::string(to_string(r.band)).c_str(),
                    r.direction.c_str(), r.significant ? "yes" : "no");
      os << line;
    }
  }

  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_text_file(out_path, os.str());
  }
}

// ------------------------------------------------------------------- kappa

void cmd_kappa(const std::string& corpus_path, const std::string& annotator_a,
               const std::string& annotator_b, const std::string& concept_filter) {
  const Corpus corpus = load_corpus(corpus_path);
  std::vector<const CorpusRecord*> shared;
  for (const CorpusRecord& r : corpus.records) {
    if (r.gold_by_annotator.count(annotator_a) && r.gold_by_annotator.count(annotator_b)) {
      shared.push_back(&r);
    }
  }
  if (shared.empty()) {
    throw ValidationError("no records annotated by both \"" + annotator_a + "\" and \"" +
                          annotator_b + "\"");
  }
  std::cout << shared.size() << " provisions annotated by both\n";
  std::cout << "concept          kappa\n";
  for (const Concept& c : registry()) {
    if (!concept_filter.empty() && concept_filter != c.key) continue;
    std::vector<bool> a, b;
    for (const CorpusRecord* r : shared) {
      a.push_back(r->gold_by_annotator.at(annotator_a).contains(c.id));
      b.push_back(r->gold_by_annotator.at(annotator_b).contains(c.id));
    }
    std::string key(c.key);
    key.resize(15, ' ');
    char line[64];
    std::snprintf(line, sizeof(line), "%s  %.4f\n", key.c_str(), cohen_kappa(a, b));
    std::cout << line;
  }
}

// ------------------------------------------------------------------ corpus

void cmd_corpus_stats(const std::string& corpus_path, const std::string& funnel_path) {
  const Corpus corpus = load_corpus(corpus_path);
  std::cout << render_distribution(distribution(corpus));
  if (!corpus.normalized.empty()) {
    std::cout << "(" << corpus.normalized.size() << " records closure-normalized on load)\n";
  }
  if (!funnel_path.empty()) {
    const ordered_json funnel = ordered_json::parse(read_text_file(funnel_path));
    std::cout << "\nsource funnel: " << funnel.value("initial_sentences", 0L) << " initial, "
              << funnel.value("selected_sentences", 0L) << " selected, "
              << funnel.value("coded_sentences", 0L) << " coded\n";
  }
}

void cmd_corpus_lint(const std::string& corpus_path) {
  const Corpus corpus = load_corpus(corpus_path);
  std::cout << corpus.records.size() << " records valid\n";
  for (const NormalizationChange& change : corpus.normalized) {
    std::cout << "normalized " << change.provision_id << ": added";
    for (const std::string& key : change.added) std::cout << " " << key;
    std::cout << "\n";
  }
}

void cmd_corpus_batches(const std::string& corpus_path, const std::string& ids_path,
                        int annotators, double overlap, unsigned seed,
                        const std::string& out_dir) {
  std::vector<std::string> ids;
  if (!corpus_path.empty()) {
    for (const CorpusRecord& r : load_corpus(corpus_path).records) {
      ids.push_back(r.provision_id);
    }
  } else if (!ids_path.empty()) {
    std::istringstream in(read_text_file(ids_path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) ids.push_back(line);
    }
  } else {
    throw ValidationError("corpus batches requires --corpus or --ids");
  }

  const AnnotationBatches batches = make_annotation_batches(ids, annotators, overlap, seed);
  const std::size_t distinct =
      batches.per_annotator.empty() ? 0
                                    : batches.per_annotator[0].size() - batches.shared.size();
  std::cout << ids.size() << " ids, " << annotators << " annotators, shared "
            << batches.shared.size() << ", distinct " << distinct << " each\n";

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto write_list = [&](const std::string& name, const std::vector<std::string>& list) {
      std::ostringstream os;
      for (const std::string& id : list) os << id << "\n";
      write_text_file((fs::path(out_dir) / name).string(), os.str());
    };
    write_list("shared.txt", batches.shared);
    for (std::size_t a = 0; a < batches.per_annotator.size(); ++a) {
      write_list("annotator_" + std::to_string(a + 1) + ".txt", batches.per_annotator[a]);
    }
    std::cerr << "batches written to " << out_dir << "\n";
  }
}

// --------------------------------------------------------- export-finetune

void cmd_export_finetune(const GlobalOptions& g, const std::string& corpus_path,
                         const std::string& out_path, const std::string& split_filter) {
  const Corpus corpus = load_corpus(corpus_path);
  PromptTemplate tpl = PromptTemplate::finetune_train_default();
  if (!g.template_path.empty()) {
    tpl = PromptTemplate::from_file(g.template_path, PromptMode::FinetuneTrain);
  } else if (!g.config.finetune_train_template_path.empty()) {
    tpl = PromptTemplate::from_file(g.config.finetune_train_template_path,
                                    PromptMode::FinetuneTrain);
  }
  const OverallMode mode = resolve_overall_mode(g);

  std::vector<const CorpusRecord*> records;
  for (const CorpusRecord& r : corpus.records) {
    if (split_filter == "all" || std::string(to_string(r.split)) == split_filter) {
      records.push_back(&r);
    }
  }
  if (records.empty()) throw ValidationError("no corpus records in split " + split_filter);

  std::ostringstream os;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    std::string paragraph;
    std::vector<LabelledSentence> annotated;
    while (j < records.size() && records[j]->doc_id == records[i]->doc_id) {
      if (!paragraph.empty()) paragraph += " ";
      paragraph += records[j]->text;
      LabelSet labels = records[j]->gold;
      // In derived mode Overall is recomputed downstream, so training data
      // teaches only the substantive concepts.
      if (mode == OverallMode::Derived) labels.erase(ConceptId::Overall);
      annotated.push_back({records[j]->text, labels});
      ++j;
    }
    const std::vector<ChatMessage> messages = build_finetune_record(tpl, paragraph, annotated);
    ordered_json array = ordered_json::array();
    for (const ChatMessage& m : messages) {
      array.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    }
    os << array.dump() << "\n";
    i = j;
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << os.str();
  } else {
    write_text_file(out_path, os.str());
  }
}

void add_backend_flags(CLI::App* cmd, GlobalOptions& g) {
  cmd->add_option("--backend", g.backend_kind, "Backend: mock or http")
      ->check(CLI::IsMember({"mock", "http"}));
  cmd->add_option("--mock-rules", g.mock_rules, "Mock backend rule table (TSV)");
  cmd->add_option("--endpoint", g.endpoint, "Chat-completion endpoint URL");
  cmd->add_option("--model", g.model, "Model name");
  double temp = 0.2;
  cmd->add_option("--temperature", temp, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0))
      ->each([&g, &temp](const std::string&) { g.temperature = temp; });
  cmd->add_option("--mode", g.mode, "Prompt mode: finetune_infer or fewshot");
  cmd->add_option("--template", g.template_path, "Instruction template file");
  cmd->add_option("--user-template", g.user_template_path,
                  "User message template with {{paragraph}}");
  cmd->add_option("--shots", g.shots_path, "Few-shot examples (JSONL)");
  cmd->add_option("--keywords", g.keywords_path, "Keyword table (TSV)");
  cmd->add_option("--overall-mode", g.overall_mode, "Overall label: derived or independent")
      ->check(CLI::IsMember({"derived", "independent"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classification and evaluation of requirements-related provisions in "
               "food-safety regulations"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Config file (JSON)")->envname("PROVCLASS_CONFIG");

  // taxonomy show
  auto* taxonomy = app.add_subcommand("taxonomy", "Concept registry utilities");
  taxonomy->require_subcommand(1);
  auto* taxonomy_show = taxonomy->add_subcommand("show", "Print the concept registry");
  std::string tax_format = "table", tax_out;
  taxonomy_show->add_option("--format", tax_format, "table or tsv")
      ->check(CLI::IsMember({"table", "tsv"}));
  taxonomy_show->add_option("--out", tax_out, "Write to file instead of stdout");

  // segment
  auto* segment_cmd = app.add_subcommand("segment", "Split a document into provisions");
  std::string seg_in, seg_out, seg_doc_id, seg_jurisdiction = "CA", seg_abbr;
  segment_cmd->add_option("--in", seg_in, "Plain-text document")->required();
  segment_cmd->add_option("--out", seg_out, "Provisions JSONL ('-' for stdout)");
  segment_cmd->add_option("--doc-id", seg_doc_id, "Document id (default: file stem)");
  segment_cmd->add_option("--jurisdiction", seg_jurisdiction, "CA or US")
      ->check(CLI::IsMember({"CA", "US"}));
  segment_cmd->add_option("--abbreviations", seg_abbr, "Abbreviation list file");

  // keywords lint
  auto* keywords_cmd = app.add_subcommand("keywords", "Keyword table utilities");
  keywords_cmd->require_subcommand(1);
  auto* keywords_lint = keywords_cmd->add_subcommand("lint", "Validate a keyword table");
  std::string kw_file;
  keywords_lint->add_option("file", kw_file, "Keyword table (TSV)")->required();

  // classify
  auto* classify_cmd =
      app.add_subcommand("classify", "Backend labels only (step 2, no closure)");
  std::string cls_in, cls_corpus, cls_out;
  classify_cmd->add_option("--in", cls_in, "Provisions JSONL");
  classify_cmd->add_option("--corpus", cls_corpus, "Corpus JSONL");
  classify_cmd->add_option("--out", cls_out, "Labels JSONL ('-' for stdout)");
  add_backend_flags(classify_cmd, g);

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "Full pipeline: backend + keywords + closure");
  std::string pred_in, pred_corpus, pred_out;
  predict_cmd->add_option("--in", pred_in, "Provisions JSONL");
  predict_cmd->add_option("--corpus", pred_corpus, "Corpus JSONL");
  predict_cmd->add_option("--out", pred_out, "Annotations JSONL ('-' for stdout)");
  add_backend_flags(predict_cmd, g);

  // run
  auto* run_cmd = app.add_subcommand("run", "Repeated stochastic runs over a corpus");
  std::string run_corpus, run_out;
  std::optional<int> run_n;
  std::optional<unsigned> run_seed;
  int run_sample_shots = 0;
  bool run_parallel = false;
  run_cmd->add_option("--corpus", run_corpus, "Corpus JSONL with gold labels")->required();
  run_cmd->add_option("--out", run_out, "Output directory for run_*.jsonl")->required();
  run_cmd->add_option("--n", run_n, "Run count (default from config, 20)");
  run_cmd->add_option("--seed", run_seed, "Seed for artifact-side sampling");
  run_cmd->add_option("--sample-shots", run_sample_shots,
                      "Sample this many shots per run from the shots file");
  run_cmd->add_flag("--parallel-runs", run_parallel, "Execute runs concurrently");
  add_backend_flags(run_cmd, g);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-concept metrics over a run directory");
  std::string eval_runs, eval_out, eval_values;
  evaluate_cmd->add_option("--runs", eval_runs, "Run directory")->required();
  evaluate_cmd->add_option("--out", eval_out, "Write metrics.csv and summary.csv here");
  evaluate_cmd->add_option("--export-values", eval_values,
                           "Per-run metric vectors CSV (boxplot data)");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Statistical comparison of two run sets");
  std::string cmp_a, cmp_b, cmp_metric = "recall", cmp_out, cmp_format = "text";
  std::vector<std::string> cmp_concepts;
  compare_cmd->add_option("runs_a", cmp_a, "First run directory")->required();
  compare_cmd->add_option("runs_b", cmp_b, "Second run directory")->required();
  compare_cmd->add_option("--metric", cmp_metric, "precision or recall")
      ->check(CLI::IsMember({"precision", "recall"}));
  compare_cmd->add_option("--concepts", cmp_concepts, "Concept ids (default: all)")
      ->delimiter(',');
  compare_cmd->add_option("--out", cmp_out, "Write report to file");
  compare_cmd->add_option("--format", cmp_format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));

  // kappa
  auto* kappa_cmd = app.add_subcommand("kappa", "Inter-annotator agreement per concept");
  std::string kappa_corpus, kappa_concept;
  std::vector<std::string> kappa_annotators;
  kappa_cmd->add_option("--corpus", kappa_corpus, "Corpus with gold_by_annotator fields")
      ->required();
  kappa_cmd->add_option("--annotators", kappa_annotators, "Two annotator ids")
      ->delimiter(',')
      ->expected(2)
      ->required();
  kappa_cmd->add_option("--concept", kappa_concept, "Restrict to one concept id");

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Dataset utilities");
  corpus_cmd->require_subcommand(1);
  auto* corpus_stats = corpus_cmd->add_subcommand("stats", "Label distribution by split");
  std::string stats_corpus, stats_funnel;
  corpus_stats->add_option("--corpus", stats_corpus, "Corpus JSONL")->required();
  corpus_stats->add_option("--funnel", stats_funnel, "Source funnel metadata JSON");
  auto* corpus_lint = corpus_cmd->add_subcommand("lint", "Validate a corpus file");
  std::string lint_corpus;
  corpus_lint->add_option("--corpus", lint_corpus, "Corpus JSONL")->required();
  auto* corpus_batches = corpus_cmd->add_subcommand("batches", "Annotation batches with overlap");
  std::string batches_corpus, batches_ids, batches_out;
  int batches_annotators = 2;
  double batches_overlap = 0.10;
  unsigned batches_seed = 0;
  corpus_batches->add_option("--corpus", batches_corpus, "Corpus JSONL (ids from records)");
  corpus_batches->add_option("--ids", batches_ids, "Plain file, one id per line");
  corpus_batches->add_option("--annotators", batches_annotators, "Annotator count");
  corpus_batches->add_option("--overlap", batches_overlap, "Shared fraction, e.g. 0.10");
  corpus_batches->add_option("--seed", batches_seed, "Shuffle seed");
  corpus_batches->add_option("--out", batches_out, "Write id lists to this directory");

  // export-finetune
  auto* export_cmd =
      app.add_subcommand("export-finetune", "Conversational fine-tuning records (JSONL)");
  std::string exp_corpus, exp_out, exp_split = "F";
  export_cmd->add_option("--corpus", exp_corpus, "Corpus JSONL")->required();
  export_cmd->add_option("--out", exp_out, "Output JSONL ('-' for stdout)");
  export_cmd->add_option("--split", exp_split, "F, T or all")
      ->check(CLI::IsMember({"F", "T", "all"}));
  export_cmd->add_option("--template", g.template_path, "Training instruction template");
  export_cmd->add_option("--overall-mode", g.overall_mode, "derived strips Overall from exports")
      ->check(CLI::IsMember({"derived", "independent"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    load_config_if_given(g);
    if (taxonomy_show->parsed()) cmd_taxonomy_show(tax_format, tax_out);
    if (segment_cmd->parsed()) {
      cmd_segment(g, seg_in, seg_out, seg_doc_id, seg_jurisdiction, seg_abbr);
    }
    if (keywords_lint->parsed()) cmd_keywords_lint(kw_file);
    if (classify_cmd->parsed()) cmd_classify(g, cls_in, cls_corpus, cls_out);
    if (predict_cmd->parsed()) cmd_predict(g, pred_in, pred_corpus, pred_out);
    if (run_cmd->parsed()) {
      cmd_run(g, run_corpus, run_out, run_n, run_seed, run_sample_shots, run_parallel);
    }
    if (evaluate_cmd->parsed()) cmd_evaluate(eval_runs, eval_out, eval_values);
    if (compare_cmd->parsed()) {
      cmd_compare(cmp_a, cmp_b, cmp_metric, cmp_concepts, cmp_out, cmp_format);
    }
    if (kappa_cmd->parsed()) {
      cmd_kappa(kappa_corpus, kappa_annotators[0], kappa_annotators[1], kappa_concept);
    }
    if (corpus_stats->parsed()) cmd_corpus_stats(stats_corpus, stats_funnel);
    if (corpus_lint->parsed()) cmd_corpus_lint(lint_corpus);
    if (corpus_batches->parsed()) {
      cmd_corpus_batches(batches_corpus, batches_ids, batches_annotators, batches_overlap,
                         batches_seed, batches_out);
    }
    if (export_cmd->parsed()) cmd_export_finetune(g, exp_corpus, exp_out, exp_split);
  } catch (const ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
