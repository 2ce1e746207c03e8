#pragma once

#include <string>
#include <vector>

namespace provclass {

enum class Jurisdiction { CA, US };

Jurisdiction parse_jurisdiction(std::string_view text);
std::string_view to_string(Jurisdiction j);

struct SourceDocument {
  std::string doc_id;
  Jurisdiction jurisdiction = Jurisdiction::CA;
  std::string title;
  std::string body;  // plain UTF-8 text; HTML/PDF extraction is a pre-step
};

/// One sentence-level unit of analysis. `prefix` is the replicated list
/// header (possibly composed across nesting levels); it is retained so the
/// expansion stays auditable and reversible.
struct Provision {
  std::string provision_id;
  std::string doc_id;
  int index = 0;      // contiguous from 0 within the document
  int paragraph = 0;  // source block ordinal; provisions sharing it came from one block
  std::string text;
  std::string prefix;
  bool prefix_applied = false;
};

struct SegmenterConfig {
  // Lowercase tokens (including their trailing period) that never end a
  // sentence. Single-letter initials are always guarded.
  std::vector<std::string> abbreviations;

  // Marker grammar toggles.
  bool paren_letter = true;  // (a) (b) ... (aa)
  bool paren_roman = true;   // (i) (ii) (iv)
  bool paren_number = true;  // (1) (2)
  bool number_dot = true;    // 1. 2.  (line start only)
  bool bullet = true;        // "•" and "-" (line start only)

  SegmenterConfig();
};

std::vector<std::string> default_abbreviations();
/// One abbreviation per line, '#' comments, blank lines ignored.
std::vector<std::string> load_abbreviations(const std::string& path);

struct ListItem {
  std::string marker;  // as it appeared: "(a)", "1.", "•"
  std::string text;    // marker stripped; trailing ";" or "," preserved
};

/// Top-level enumeration detection. Markers are recognized at line starts
/// and, for parenthesized forms, inline after ";" (with an optional
/// "and"/"or" connector) or after the header ":". Nested lists of a
/// different marker style stay embedded in the item text; segment() recurses
/// into them. Non-list text yields an empty result.
std::vector<ListItem> detect_list_items(const std::string& block, const SegmenterConfig& cfg = {});

/// Rule-based sentence splitting: a sentence ends at ".", "?" or "!"
/// followed by whitespace and an uppercase letter or "(", unless the token
/// ending at the period is a guarded abbreviation. A trailing fragment
/// without terminal punctuation is returned as a final piece.
std::vector<std::string> split_sentences(const std::string& text, const SegmenterConfig& cfg = {});

/// Splits a document into provisions: blocks at blank lines, sentences
/// within blocks, and enumerated items expanded one-per-provision with the
/// list header joined in front by a single space (nested headers compose
/// outermost first). Provision text is whitespace-normalized but otherwise
/// verbatim. Throws ValidationError on an empty body.
std::vector<Provision> segment(const SourceDocument& doc, const SegmenterConfig& cfg = {});

}  // namespace provclass
