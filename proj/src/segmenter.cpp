#include "provclass/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>

#include "provclass/errors.hpp"

namespace provclass {
namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

// Collapse whitespace runs to single spaces; provision text stays otherwise
// verbatim.
std::string normalize_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_ws(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Strict canonical roman numerals (lowercase), value 1..3999; 0 when invalid.
int parse_roman(std::string_view s) {
  if (s.empty()) return 0;
  std::size_t i = 0;
  int value = 0;
  auto take = [&](std::string_view tok, int v, int max_repeat) {
    int n = 0;
    while (n < max_repeat && s.compare(i, tok.size(), tok) == 0) {
      i += tok.size();
      value += v;
      ++n;
    }
    return n;
  };
  take("m", 1000, 3);
  if (!take("cm", 900, 1) && !take("cd", 400, 1)) {
    take("d", 500, 1);
    take("c", 100, 3);
  }
  if (!take("xc", 90, 1) && !take("xl", 40, 1)) {
    take("l", 50, 1);
    take("x", 10, 3);
  }
  if (!take("ix", 9, 1) && !take("iv", 4, 1)) {
    take("v", 5, 1);
    take("i", 1, 3);
  }
  return i == s.size() ? value : 0;
}

enum class MarkerStyle { ParenLetter, ParenRoman, ParenNumber, NumberDot, Bullet, Dash };

struct MarkerToken {
  std::size_t end = 0;  // one past the marker token
  std::string token;
  std::string content;  // inside the parens / the digits; empty for bullets
  bool paren = false;
  bool is_number_dot = false;
  bool is_bullet = false;
  bool is_dash = false;
};

// Matches a marker token starting exactly at `p`; requires trailing
// whitespace plus at least one character of item text.
std::optional<MarkerToken> match_token(const std::string& t, std::size_t p) {
  MarkerToken tok;
  std::size_t end = 0;
  if (t[p] == '(') {
    std::size_t q = p + 1;
    while (q < t.size() && std::isalnum(static_cast<unsigned char>(t[q]))) ++q;
    if (q >= t.size() || t[q] != ')' || q == p + 1 || q - p - 1 > 4) return std::nullopt;
    tok.paren = true;
    tok.content = t.substr(p + 1, q - p - 1);
    end = q + 1;
  } else if (is_digit(t[p])) {
    std::size_t q = p;
    while (q < t.size() && is_digit(t[q])) ++q;
    if (q >= t.size() || t[q] != '.' || q - p > 3) return std::nullopt;
    tok.is_number_dot = true;
    tok.content = t.substr(p, q - p);
    end = q + 1;
  } else if (t.compare(p, 3, "\xE2\x80\xA2") == 0) {
    tok.is_bullet = true;
    end = p + 3;
  } else if (t[p] == '-') {
    tok.is_dash = true;
    end = p + 1;
  } else {
    return std::nullopt;
  }
  if (end >= t.size() || !is_ws(t[end])) return std::nullopt;
  std::size_t text_begin = end;
  while (text_begin < t.size() && is_ws(t[text_begin])) ++text_begin;
  if (text_begin >= t.size()) return std::nullopt;
  tok.end = end;
  tok.token = t.substr(p, end - p);
  return tok;
}

bool fits_style(const MarkerToken& tok, MarkerStyle style) {
  const std::string low = lowered(tok.content);
  switch (style) {
    case MarkerStyle::ParenLetter:
      return tok.paren && tok.content.size() <= 2 &&
             std::all_of(tok.content.begin(), tok.content.end(),
                         [](char c) { return is_alpha(c); });
    case MarkerStyle::ParenRoman:
      return tok.paren && parse_roman(low) > 0;
    case MarkerStyle::ParenNumber:
      return tok.paren && std::all_of(tok.content.begin(), tok.content.end(), is_digit);
    case MarkerStyle::NumberDot:
      return tok.is_number_dot;
    case MarkerStyle::Bullet:
      return tok.is_bullet;
    case MarkerStyle::Dash:
      return tok.is_dash;
  }
  return false;
}

bool style_enabled(MarkerStyle style, const SegmenterConfig& cfg) {
  switch (style) {
    case MarkerStyle::ParenLetter:
      return cfg.paren_letter;
    case MarkerStyle::ParenRoman:
      return cfg.paren_roman;
    case MarkerStyle::ParenNumber:
      return cfg.paren_number;
    case MarkerStyle::NumberDot:
      return cfg.number_dot;
    case MarkerStyle::Bullet:
    case MarkerStyle::Dash:
      return cfg.bullet;
  }
  return false;
}

bool inline_anchors_allowed(MarkerStyle style) {
  // Number-dot, bullet and dash markers are line-start only; inline "2." or
  // "-" would collide with decimals, abbreviations and hyphens.
  return style == MarkerStyle::ParenLetter || style == MarkerStyle::ParenRoman ||
         style == MarkerStyle::ParenNumber;
}

struct Anchor {
  bool ok = false;
  std::size_t prev_end = 0;  // preceding text (header or previous item) ends here
};

// A marker is anchored at a line start, at the block start, after ";" (with
// an optional "and"/"or" connector), or -- for the first marker only --
// after the header ":".
Anchor check_anchor(const std::string& t, std::size_t p, bool is_first, bool allow_inline) {
  std::size_t b = p;
  while (b > 0 && (t[b - 1] == ' ' || t[b - 1] == '\t')) --b;
  if (b == 0) return {true, 0};
  if (t[b - 1] == '\n') return {true, b - 1};
  if (!allow_inline) return {false, 0};
  char c = t[b - 1];
  if (c == ';') return {true, b};
  if (c == ':' && is_first) return {true, b};
  if (is_alpha(c)) {
    std::size_t w = b;
    while (w > 0 && is_alpha(t[w - 1])) --w;
    const std::string word = lowered(std::string_view(t).substr(w, b - w));
    if (word == "and" || word == "or") {
      std::size_t b2 = w;
      while (b2 > 0 && (t[b2 - 1] == ' ' || t[b2 - 1] == '\t')) --b2;
      if (b2 > 0 && t[b2 - 1] == ';') return {true, b2};
    }
  }
  return {false, 0};
}

struct MarkerHit {
  std::size_t prev_end = 0;
  std::size_t begin = 0;
  std::size_t text_begin = 0;
  MarkerStyle style = MarkerStyle::ParenLetter;
  std::string token;
  std::string content;
};

bool could_start_marker(char c) {
  return c == '(' || is_digit(c) || c == '-' || c == '\xE2';
}

std::optional<MarkerHit> find_marker(const std::string& t, std::size_t from, bool is_first,
                                     std::optional<MarkerStyle> required,
                                     const SegmenterConfig& cfg) {
  for (std::size_t p = from; p < t.size(); ++p) {
    if (!could_start_marker(t[p])) continue;
    auto tok = match_token(t, p);
    if (!tok) continue;

    std::optional<MarkerStyle> style;
    if (required) {
      if (fits_style(*tok, *required)) style = *required;
    } else {
      for (MarkerStyle s : {MarkerStyle::ParenNumber, MarkerStyle::ParenRoman,
                            MarkerStyle::ParenLetter, MarkerStyle::NumberDot,
                            MarkerStyle::Bullet, MarkerStyle::Dash}) {
        if (style_enabled(s, cfg) && fits_style(*tok, s)) {
          style = s;
          break;
        }
      }
    }
    if (!style || !style_enabled(*style, cfg)) continue;

    Anchor a = check_anchor(t, p, is_first, inline_anchors_allowed(*style));
    if (!a.ok) continue;

    MarkerHit hit;
    hit.prev_end = a.prev_end;
    hit.begin = p;
    hit.text_begin = tok->end;
    while (hit.text_begin < t.size() && is_ws(t[hit.text_begin])) ++hit.text_begin;
    hit.style = *style;
    hit.token = tok->token;
    hit.content = tok->content;
    return hit;
  }
  return std::nullopt;
}

// "(i)" is a letter when it continues an alphabetic run and a roman numeral
// when "(ii)" follows; with no context we look ahead for "(ii)".
MarkerStyle disambiguate_first(const MarkerHit& hit, const std::string& t,
                               const SegmenterConfig& cfg) {
  if (hit.style != MarkerStyle::ParenRoman && hit.style != MarkerStyle::ParenLetter)
    return hit.style;
  const std::string low = lowered(hit.content);
  if (!cfg.paren_letter) return hit.style;
  if (!cfg.paren_roman) return MarkerStyle::ParenLetter;
  if (parse_roman(low) == 0) return MarkerStyle::ParenLetter;
  if (low == "i") {
    auto next = find_marker(t, hit.text_begin, false, MarkerStyle::ParenRoman, cfg);
    if (next && lowered(next->content) == "ii") return MarkerStyle::ParenRoman;
    return MarkerStyle::ParenLetter;
  }
  if (low.size() == 1) return MarkerStyle::ParenLetter;  // lone (v), (x), ...
  return MarkerStyle::ParenRoman;
}

struct TopList {
  std::size_t header_end = 0;
  std::vector<MarkerHit> hits;
};

std::optional<TopList> detect_top_list(const std::string& t, const SegmenterConfig& cfg) {
  auto first = find_marker(t, 0, true, std::nullopt, cfg);
  if (!first) return std::nullopt;
  first->style = disambiguate_first(*first, t, cfg);

  TopList list;
  list.header_end = first->prev_end;
  list.hits.push_back(*first);
  std::size_t from = first->text_begin;
  while (true) {
    auto next = find_marker(t, from, false, first->style, cfg);
    if (!next) break;
    list.hits.push_back(*next);
    from = next->text_begin;
  }
  return list;
}

std::string item_text(const std::string& t, const TopList& list, std::size_t k) {
  const std::size_t begin = list.hits[k].text_begin;
  const std::size_t end = k + 1 < list.hits.size() ? list.hits[k + 1].prev_end : t.size();
  if (end <= begin) return "";
  return std::string(trimmed(std::string_view(t).substr(begin, end - begin)));
}

bool guarded_abbreviation(const std::string& t, std::size_t dot,
                          const std::vector<std::string>& abbreviations) {
  std::size_t b = dot;
  while (b > 0 && !is_ws(t[b - 1])) --b;
  const std::string token = lowered(std::string_view(t).substr(b, dot + 1 - b));
  if (token.size() == 2 && is_alpha(token[0])) return true;  // single-letter initial
  return std::find(abbreviations.begin(), abbreviations.end(), token) != abbreviations.end();
}

struct SentencePieces {
  std::vector<std::string> pieces;  // trimmed, original spacing inside
  bool last_terminated = false;     // final piece ends with ".", "?" or "!"
};

SentencePieces split_pieces(const std::string& text, const SegmenterConfig& cfg) {
  SentencePieces out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (c == '.' && guarded_abbreviation(text, i, cfg.abbreviations)) continue;
    std::size_t j = i + 1;
    if (j < text.size() && (text[j] == ')' || text[j] == '"' || text[j] == '\'')) ++j;
    if (j >= text.size() || !is_ws(text[j])) continue;
    std::size_t k = j;
    while (k < text.size() && is_ws(text[k])) ++k;
    if (k >= text.size() || !(is_upper(text[k]) || text[k] == '(')) continue;
    auto piece = trimmed(std::string_view(text).substr(start, j - start));
    if (!piece.empty()) out.pieces.emplace_back(piece);
    start = k;
    i = k - 1;
  }
  auto tail = trimmed(std::string_view(text).substr(start));
  if (!tail.empty()) {
    out.pieces.emplace_back(tail);
    std::string_view last = tail;
    if (last.size() > 1 && (last.back() == ')' || last.back() == '"' || last.back() == '\''))
      last.remove_suffix(1);
    out.last_terminated =
        !last.empty() && (last.back() == '.' || last.back() == '?' || last.back() == '!');
  } else {
    out.last_terminated = true;
  }
  return out;
}

std::string compose_prefix(const std::string& outer, const std::string& header) {
  if (outer.empty()) return header;
  if (header.empty()) return outer;
  return outer + " " + header;
}

using Sink = std::function<void(std::string text, std::string prefix, bool applied)>;

void emit(const std::string& sentence, const std::string& prefix, const Sink& sink) {
  const std::string body = normalize_ws(sentence);
  if (body.empty()) return;
  if (prefix.empty()) {
    sink(body, "", false);
  } else {
    sink(prefix + " " + body, prefix, true);
  }
}

void process(const std::string& text, const std::string& prefix, const SegmenterConfig& cfg,
             const Sink& sink) {
  if (trimmed(text).empty()) return;
  auto list = detect_top_list(text, cfg);
  if (list) {
    const std::string pre = text.substr(0, list->header_end);
    SentencePieces pieces = split_pieces(pre, cfg);
    std::string header;
    if (!pieces.pieces.empty() && !pieces.last_terminated) {
      header = normalize_ws(pieces.pieces.back());
      pieces.pieces.pop_back();
    }
    for (const std::string& sentence : pieces.pieces) emit(sentence, prefix, sink);
    const std::string child_prefix = compose_prefix(prefix, header);
    for (std::size_t k = 0; k < list->hits.size(); ++k) {
      process(item_text(text, *list, k), child_prefix, cfg, sink);
    }
    return;
  }
  SentencePieces pieces = split_pieces(text, cfg);
  if (pieces.pieces.size() <= 1) {
    if (!pieces.pieces.empty()) emit(pieces.pieces.front(), prefix, sink);
    return;
  }
  // Pieces can expose list markers that were not anchored in the larger run
  // (a list sentence following a period), so each piece is reprocessed.
  for (const std::string& piece : pieces.pieces) process(piece, prefix, cfg, sink);
}

std::vector<std::string> split_blocks(const std::string& body) {
  std::vector<std::string> blocks;
  std::string current;
  std::size_t line_start = 0;
  auto flush = [&] {
    if (!trimmed(current).empty()) blocks.push_back(current);
    current.clear();
  };
  while (line_start <= body.size()) {
    std::size_t nl = body.find('\n', line_start);
    const std::string line =
        body.substr(line_start, nl == std::string::npos ? std::string::npos : nl - line_start);
    if (trimmed(line).empty()) {
      flush();
    } else {
      if (!current.empty()) current.push_back('\n');
      current += line;
    }
    if (nl == std::string::npos) break;
    line_start = nl + 1;
  }
  flush();
  return blocks;
}

}  // namespace

Jurisdiction parse_jurisdiction(std::string_view text) {
  if (text == "CA") return Jurisdiction::CA;
  if (text == "US") return Jurisdiction::US;
  throw ValidationError("unknown jurisdiction: \"" + std::string(text) + "\" (expected CA or US)");
}

std::string_view to_string(Jurisdiction j) { return j == Jurisdiction::CA ? "CA" : "US"; }

SegmenterConfig::SegmenterConfig() : abbreviations(default_abbreviations()) {}

std::vector<std::string> default_abbreviations() {
  return {"no.", "e.g.", "i.e.", "inc.", "s.", "subs.", "ss.", "etc.", "cf.", "vs."};
}

std::vector<std::string> load_abbreviations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open abbreviation list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trimmed(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(lowered(t));
  }
  return out;
}

std::vector<ListItem> detect_list_items(const std::string& block, const SegmenterConfig& cfg) {
  auto list = detect_top_list(block, cfg);
  if (!list) return {};
  std::vector<ListItem> items;
  items.reserve(list->hits.size());
  for (std::size_t k = 0; k < list->hits.size(); ++k) {
    items.push_back({list->hits[k].token, item_text(block, *list, k)});
  }
  return items;
}

std::vector<std::string> split_sentences(const std::string& text, const SegmenterConfig& cfg) {
  return split_pieces(text, cfg).pieces;
}

std::vector<Provision> segment(const SourceDocument& doc, const SegmenterConfig& cfg) {
  if (trimmed(doc.body).empty()) {
    throw ValidationError("document \"" + doc.doc_id + "\" has an empty body");
  }
  std::vector<Provision> provisions;
  const std::vector<std::string> blocks = split_blocks(doc.body);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Sink sink = [&](std::string text, std::string prefix, bool applied) {
      Provision p;
      p.index = static_cast<int>(provisions.size());
      char id[32];
      std::snprintf(id, sizeof(id), "#%04d", p.index);
      p.provision_id = doc.doc_id + id;
      p.doc_id = doc.doc_id;
      p.paragraph = static_cast<int>(b);
      p.text = std::move(text);
      p.prefix = std::move(prefix);
      p.prefix_applied = applied;
      provisions.push_back(std::move(p));
    };
    process(blocks[b], "", cfg, sink);
  }
  return provisions;
}

}  // namespace provclass
