#include "provclass/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "nlohmann/json.hpp"
#include "provclass/errors.hpp"

namespace provclass {
namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

Split parse_split(std::string_view text) {
  if (text == "F") return Split::F;
  if (text == "T") return Split::T;
  throw ValidationError("unknown split: \"" + std::string(text) + "\" (expected F or T)");
}

std::string_view to_string(Split split) { return split == Split::F ? "F" : "T"; }

Corpus parse_corpus(const std::string& content, const std::string& source_name) {
  Corpus corpus;
  std::set<std::string> seen_ids;
  std::istringstream in(content);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source_name + ":" + std::to_string(line_number);
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(where + ": invalid JSON: " + ex.what());
    }
    CorpusRecord r;
    try {
      r.provision_id = record.at("provision_id").get<std::string>();
      r.doc_id = record.at("doc_id").get<std::string>();
      r.jurisdiction = parse_jurisdiction(record.at("jurisdiction").get<std::string>());
      r.split = parse_split(record.at("split").get<std::string>());
      r.text = record.at("text").get<std::string>();
      const auto gold_keys = record.value("gold", std::vector<std::string>{});
      r.gold = LabelSet::from_keys(gold_keys);
      if (record.contains("annotators")) {
        r.annotators = record["annotators"].get<std::vector<std::string>>();
      }
      if (record.contains("gold_by_annotator")) {
        for (const auto& [annotator, labels] : record["gold_by_annotator"].items()) {
          r.gold_by_annotator[annotator] =
              LabelSet::from_keys(labels.get<std::vector<std::string>>());
        }
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(where + ": schema violation: " + ex.what());
    } catch (const ValidationError& ex) {
      throw ValidationError(where + ": " + ex.what());
    }
    if (r.text.empty()) throw ValidationError(where + ": empty text");
    if (!seen_ids.insert(r.provision_id).second) {
      throw ValidationError(where + ": duplicate provision_id \"" + r.provision_id + "\"");
    }

    const LabelSet closed = close(r.gold);
    if (closed != r.gold) {
      NormalizationChange change;
      change.provision_id = r.provision_id;
      for (ConceptId id : closed.to_vector()) {
        if (!r.gold.contains(id)) change.added.emplace_back(concept_key(id));
      }
      corpus.normalized.push_back(std::move(change));
      r.gold = closed;
    }
    corpus.records.push_back(std::move(r));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), path);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream os;
  for (const CorpusRecord& r : corpus.records) {
    ordered_json record;
    record["provision_id"] = r.provision_id;
    record["doc_id"] = r.doc_id;
    record["jurisdiction"] = std::string(to_string(r.jurisdiction));
    record["split"] = std::string(to_string(r.split));
    record["text"] = r.text;
    record["gold"] = r.gold.to_keys();
    if (!r.annotators.empty()) record["annotators"] = r.annotators;
    if (!r.gold_by_annotator.empty()) {
      ordered_json by = ordered_json::object();
      for (const auto& [annotator, labels] : r.gold_by_annotator) {
        by[annotator] = labels.to_keys();
      }
      record["gold_by_annotator"] = std::move(by);
    }
    os << record.dump() << "\n";
  }
  return os.str();
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus: " + path);
  out << corpus_to_jsonl(corpus);
}

LabelDistribution distribution(const Corpus& corpus) {
  if (corpus.records.empty()) throw ValidationError("distribution over an empty corpus");
  LabelDistribution dist;
  for (const CorpusRecord& r : corpus.records) {
    const std::size_t column =
        r.split == Split::F ? 0 : (r.jurisdiction == Jurisdiction::CA ? 1 : 2);
    ++dist.totals[column];
    for (ConceptId id : r.gold.to_vector()) {
      ++dist.counts[static_cast<std::size_t>(id)][column];
    }
  }
  return dist;
}

std::string render_distribution(const LabelDistribution& dist) {
  std::ostringstream os;
  os << "label            level        F    T-CA    T-US\n";
  os << "---------------  -------  -----  ------  ------\n";
  auto row = [&](std::string name, std::string_view level, long f, long ca, long us) {
    name.resize(15, ' ');
    std::string lvl(level);
    lvl.resize(7, ' ');
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%5ld  %6ld  %6ld", f, ca, us);
    os << name << "  " << lvl << "  " << buf << "\n";
  };
  for (const Concept& c : registry()) {
    std::string_view level = c.level == ConceptLevel::L1        ? "L1"
                             : c.level == ConceptLevel::L2      ? "L2"
                                                                : "Derived";
    row(std::string(c.display_name), level, dist.f(c.id), dist.t_ca(c.id), dist.t_us(c.id));
  }
  row("(records)", "", dist.totals[0], dist.totals[1], dist.totals[2]);
  return os.str();
}

std::vector<Provision> corpus_provisions(const Corpus& corpus) {
  std::vector<Provision> provisions;
  provisions.reserve(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const CorpusRecord& r = corpus.records[i];
    Provision p;
    p.provision_id = r.provision_id;
    p.doc_id = r.doc_id;
    p.index = static_cast<int>(i);
    p.paragraph = static_cast<int>(i);  // classify corpus records one by one
    p.text = r.text;
    provisions.push_back(std::move(p));
  }
  return provisions;
}

std::map<std::string, LabelSet> corpus_gold(const Corpus& corpus) {
  std::map<std::string, LabelSet> gold;
  for (const CorpusRecord& r : corpus.records) gold[r.provision_id] = r.gold;
  return gold;
}

AnnotationBatches make_annotation_batches(std::vector<std::string> ids, int annotators,
                                          double overlap_fraction, unsigned seed) {
  const std::size_t n = ids.size();
  if (annotators < 2) throw ValidationError("at least two annotators required");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0) {
    throw ValidationError("overlap fraction must lie in [0, 1)");
  }
  const auto k = static_cast<std::size_t>(annotators);
  if (n < k) throw ValidationError("too few ids for the requested annotator count");

  // ceil(overlap*n/k) with a guard against floating-point fuzz, then bumped
  // so the distinct remainder splits evenly.
  std::size_t shared =
      static_cast<std::size_t>(std::ceil(overlap_fraction * static_cast<double>(n) /
                                             static_cast<double>(k) -
                                         1e-9));
  if (shared > 0) shared += (n - shared) % k;
  if (shared > n) throw ValidationError("too few ids for the requested overlap");

  // Hand-rolled Fisher-Yates keeps batch assignment stable across platforms.
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = gen() % i;
    std::swap(ids[i - 1], ids[j]);
  }

  AnnotationBatches batches;
  batches.shared.assign(ids.begin(), ids.begin() + static_cast<long>(shared));
  batches.per_annotator.resize(k);
  const std::size_t distinct = n - shared;
  const std::size_t base = distinct / k;
  std::size_t remainder = distinct % k;  // zero unless overlap is zero
  std::size_t cursor = shared;
  for (std::size_t a = 0; a < k; ++a) {
    std::size_t take = base + (remainder > 0 ? 1 : 0);
    if (remainder > 0) --remainder;
    auto& batch = batches.per_annotator[a];
    batch.assign(ids.begin() + static_cast<long>(cursor),
                 ids.begin() + static_cast<long>(cursor + take));
    cursor += take;
    batch.insert(batch.end(), batches.shared.begin(), batches.shared.end());
  }
  return batches;
}

}  // namespace provclass
