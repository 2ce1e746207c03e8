#include "provclass/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "provclass/errors.hpp"

namespace provclass {
namespace {

std::string lowered(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<Concept> build_registry() {
  using enum ConceptId;
  return {
      {Data, "data", "Data", ConceptLevel::L1, std::nullopt, false},
      {LabelData, "label_data", "Label Data", ConceptLevel::L2, Data, false},
      {NonLabelData, "non_label_data", "Non-label Data", ConceptLevel::L2, Data, false},
      {Measurement, "measurement", "Measurement", ConceptLevel::L1, std::nullopt, false},
      {Colour, "colour", "Colour", ConceptLevel::L2, Measurement, true},
      {Firmness, "firmness", "Firmness", ConceptLevel::L2, Measurement, true},
      {Mass, "mass", "Mass", ConceptLevel::L2, Measurement, false},
      {Pathogen, "pathogen", "Pathogen", ConceptLevel::L2, Measurement, true},
      {Size, "size", "Size", ConceptLevel::L2, Measurement, false},
      {Temperature, "temperature", "Temperature", ConceptLevel::L2, Measurement, false},
      {WaterContent, "water_content", "Water Content", ConceptLevel::L2, Measurement, true},
      {TimeConstraint, "time_constraint", "Time Constraint", ConceptLevel::L1, std::nullopt, false},
      {Overall, "overall", "Overall", ConceptLevel::Derived, std::nullopt, false},
  };
}

std::string_view level_name(ConceptLevel level) {
  switch (level) {
    case ConceptLevel::L1:
      return "L1";
    case ConceptLevel::L2:
      return "L2";
    case ConceptLevel::Derived:
      return "Derived";
  }
  return "";
}

}  // namespace

const std::vector<Concept>& registry() {
  static const std::vector<Concept> reg = build_registry();
  return reg;
}

const Concept& concept_info(ConceptId id) {
  return registry()[static_cast<std::size_t>(id)];
}

std::optional<ConceptId> concept_from_key(std::string_view key) {
  for (const Concept& c : registry()) {
    if (c.key == key) return c.id;
  }
  return std::nullopt;
}

std::optional<ConceptId> concept_from_display_name(std::string_view name) {
  const std::string needle = lowered(name);
  for (const Concept& c : registry()) {
    if (lowered(c.display_name) == needle) return c.id;
  }
  return std::nullopt;
}

ConceptId parse_concept(std::string_view text) {
  if (auto id = concept_from_key(text)) return *id;
  if (auto id = concept_from_display_name(text)) return *id;
  throw ValidationError("unknown concept id: \"" + std::string(text) + "\"");
}

std::string_view concept_key(ConceptId id) { return concept_info(id).key; }
std::string_view concept_display_name(ConceptId id) { return concept_info(id).display_name; }

OverallMode parse_overall_mode(std::string_view text) {
  if (text == "derived") return OverallMode::Derived;
  if (text == "independent") return OverallMode::Independent;
  throw ValidationError("unknown overall mode: \"" + std::string(text) +
                        "\" (expected derived or independent)");
}

std::string_view to_string(OverallMode mode) {
  return mode == OverallMode::Derived ? "derived" : "independent";
}

int LabelSet::size() const {
  int n = 0;
  for (std::uint16_t b = bits_; b != 0; b &= static_cast<std::uint16_t>(b - 1)) ++n;
  return n;
}

std::vector<ConceptId> LabelSet::to_vector() const {
  std::vector<ConceptId> out;
  for (int i = 0; i < kConceptCount; ++i) {
    auto id = static_cast<ConceptId>(i);
    if (contains(id)) out.push_back(id);
  }
  return out;
}

std::vector<std::string> LabelSet::to_keys() const {
  std::vector<std::string> out;
  for (ConceptId id : to_vector()) out.emplace_back(concept_key(id));
  return out;
}

LabelSet LabelSet::from_keys(const std::vector<std::string>& keys) {
  LabelSet out;
  for (const std::string& key : keys) out.insert(parse_concept(key));
  return out;
}

LabelSet close(const LabelSet& labels, OverallMode mode) {
  LabelSet out = labels;
  for (const Concept& c : registry()) {
    if (c.parent && out.contains(c.id)) out.insert(*c.parent);
  }
  LabelSet non_overall = out;
  non_overall.erase(ConceptId::Overall);
  if (!non_overall.empty()) {
    out.insert(ConceptId::Overall);
  } else if (mode == OverallMode::Derived) {
    // Derived mode recomputes Overall from the rest; a bare Overall with no
    // supporting concept is dropped.
    out.erase(ConceptId::Overall);
  }
  return out;
}

LabelSet close(const std::vector<std::string>& keys, OverallMode mode) {
  return close(LabelSet::from_keys(keys), mode);
}

std::string render_taxonomy_table() {
  std::ostringstream os;
  os << "id               name             level    parent       scarce\n";
  os << "---------------  ---------------  -------  -----------  ------\n";
  for (const Concept& c : registry()) {
    std::string id(c.key);
    std::string name(c.display_name);
    std::string level(level_name(c.level));
    std::string parent = c.parent ? std::string(concept_key(*c.parent)) : "-";
    id.resize(15, ' ');
    name.resize(15, ' ');
    level.resize(7, ' ');
    parent.resize(11, ' ');
    os << id << "  " << name << "  " << level << "  " << parent << "  "
       << (c.scarce ? "yes" : "no") << "\n";
  }
  return os.str();
}

std::string render_taxonomy_tsv() {
  std::ostringstream os;
  os << "id\tname\tlevel\tparent\tscarce\n";
  for (const Concept& c : registry()) {
    os << c.key << "\t" << c.display_name << "\t" << level_name(c.level) << "\t"
       << (c.parent ? concept_key(*c.parent) : "") << "\t" << (c.scarce ? "true" : "false")
       << "\n";
  }
  return os.str();
}

}  // namespace provclass
