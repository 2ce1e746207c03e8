#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace provclass {

// The concept registry is fixed: three top-level concepts, nine children,
// plus the derived Overall label. Enumerator order is registry order and is
// the canonical order for label listings everywhere (prompts, JSONL, tables).
enum class ConceptId : std::uint8_t {
  Data = 0,
  LabelData,
  NonLabelData,
  Measurement,
  Colour,
  Firmness,
  Mass,
  Pathogen,
  Size,
  Temperature,
  WaterContent,
  TimeConstraint,
  Overall,
};

inline constexpr int kConceptCount = 13;

enum class ConceptLevel : std::uint8_t { L1, L2, Derived };

struct Concept {
  ConceptId id;
  std::string_view key;           // stable snake_case identifier
  std::string_view display_name;  // human-readable name used in prompts and tables
  ConceptLevel level;
  std::optional<ConceptId> parent;  // set exactly for L2 concepts
  bool scarce;                      // classified by keyword lookup, not by an LLM
};

/// The full registry in registry order. Immutable; safe for concurrent reads.
const std::vector<Concept>& registry();

const Concept& concept_info(ConceptId id);

/// Lookup by snake_case key ("water_content"). Nullopt when unknown.
std::optional<ConceptId> concept_from_key(std::string_view key);

/// Lookup by display name ("Water Content"), case-insensitive. Nullopt when unknown.
std::optional<ConceptId> concept_from_display_name(std::string_view name);

/// Accepts either form; throws ValidationError naming the id when unknown.
ConceptId parse_concept(std::string_view text);

std::string_view concept_key(ConceptId id);
std::string_view concept_display_name(ConceptId id);

/// Controls how the derived Overall label is produced (see close()).
enum class OverallMode { Derived, Independent };

OverallMode parse_overall_mode(std::string_view text);
std::string_view to_string(OverallMode mode);

/// A set of concepts attached to one provision. Small fixed universe, so the
/// representation is a bitmask; iteration yields registry order.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<ConceptId> ids) {
    for (ConceptId id : ids) insert(id);
  }

  bool contains(ConceptId id) const { return (bits_ & bit(id)) != 0; }
  void insert(ConceptId id) { bits_ |= bit(id); }
  void erase(ConceptId id) { bits_ &= static_cast<std::uint16_t>(~bit(id)); }

  bool empty() const { return bits_ == 0; }
  int size() const;

  LabelSet united(const LabelSet& other) const {
    LabelSet out;
    out.bits_ = static_cast<std::uint16_t>(bits_ | other.bits_);
    return out;
  }
  bool is_subset_of(const LabelSet& other) const { return (bits_ & ~other.bits_) == 0; }

  /// Members in registry order.
  std::vector<ConceptId> to_vector() const;
  /// Snake_case keys in registry order.
  std::vector<std::string> to_keys() const;

  static LabelSet from_keys(const std::vector<std::string>& keys);

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  static std::uint16_t bit(ConceptId id) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(id));
  }
  std::uint16_t bits_ = 0;
};

/// Hierarchy closure. Adds the L1 parent of every L2 member. In Derived mode
/// Overall is recomputed: present iff any other concept is present. In
/// Independent mode a pre-existing Overall is kept as-is and added when any
/// other concept is present. Idempotent in both modes.
LabelSet close(const LabelSet& labels, OverallMode mode = OverallMode::Derived);

/// String-facing variant; throws ValidationError naming the first unknown id.
LabelSet close(const std::vector<std::string>& keys, OverallMode mode = OverallMode::Derived);

/// One record per concept: id, name, level, parent, scarce. Used by
/// `taxonomy show` and serialized into docs.
std::string render_taxonomy_table();
std::string render_taxonomy_tsv();

}  // namespace provclass
