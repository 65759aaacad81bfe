#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hyperdist {

// Coarse POS codes are single letters: "n", "v", "a"; anything else maps to
// the empty string and is treated as out of vocabulary.
struct Token {
  std::string lemma;   // lowercased
  std::string pos;     // "n" | "v" | "a" | ""
  int head = 0;        // 1-based index of the parent token, 0 = root
  std::string deprel;  // lowercased
};

struct Sentence {
  std::vector<Token> tokens;
};

// 0-based column positions within a CoNLL-style TSV line.
struct ColumnMap {
  int index = 0;
  int surface = 1;
  int lemma = 2;
  int pos = 3;
  int head = 6;
  int deprel = 7;

  int required_fields() const;
};

// Maps raw corpus POS tags (case-insensitive) to coarse codes. The default
// table covers UD-style category names, bare letter codes and the Penn
// Treebank noun/verb/adjective tags.
class PosMap {
 public:
  PosMap();
  // coarse must be "n", "v", "a" or "" (other).
  void set(std::string raw, std::string coarse);
  std::string map(std::string_view raw) const;

 private:
  std::unordered_map<std::string, std::string> table_;
};

struct ConllStats {
  std::uint64_t sentences = 0;  // well-formed sentences yielded
  std::uint64_t skipped = 0;    // malformed sentences dropped
};

// Streams blank-line-separated CoNLL-style sentences. Lines starting with
// '#' are ignored. A sentence is skipped (and counted) when a token line has
// too few fields, indices are not contiguous from 1, a head is out of range
// or self-referential, or the head links contain a cycle.
class ConllReader {
 public:
  explicit ConllReader(std::istream& in, ColumnMap columns = {},
                       const PosMap* pos_map = nullptr);

  bool next(Sentence& out);
  const ConllStats& stats() const { return stats_; }

 private:
  bool read_block(std::vector<std::string>& lines);

  std::istream& in_;
  ColumnMap columns_;
  const PosMap* pos_map_;
  PosMap default_pos_map_;
  ConllStats stats_;
  bool eof_ = false;
};

// Lemma-POS items ("cat-n") interned with dense ids assigned in
// lexicographic order of the item string.
class Vocabulary {
 public:
  Vocabulary() = default;

  // counts: item -> corpus frequency. Keeps items with frequency >= min_freq
  // whose POS letter (text after the final '-') is in allowed_pos.
  static Vocabulary from_counts(
      const std::unordered_map<std::string, std::uint64_t>& counts,
      std::uint64_t min_freq, std::string_view allowed_pos = "nva");

  std::optional<std::uint32_t> id(std::string_view item) const;
  bool contains(std::string_view item) const { return id(item).has_value(); }
  const std::string& item(std::uint32_t id) const { return items_[id]; }
  std::uint64_t frequency(std::uint32_t id) const { return freqs_[id]; }
  std::size_t size() const { return items_.size(); }
  const std::vector<std::string>& items() const { return items_; }

  bool operator==(const Vocabulary& other) const;

 private:
  std::vector<std::string> items_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Accumulates lemma-POS frequencies over a corpus pass.
class VocabCounter {
 public:
  void add(const Sentence& s);
  const std::unordered_map<std::string, std::uint64_t>& counts() const {
    return counts_;
  }
  Vocabulary build(std::uint64_t min_freq,
                   std::string_view allowed_pos = "nva") const {
    return Vocabulary::from_counts(counts_, min_freq, allowed_pos);
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

enum class ContextKind { window, dep, joint };

struct ContextSpec {
  ContextKind kind = ContextKind::window;
  int window_size = 2;       // window only
  bool directional = false;  // window only

  // win2, win2d, win5, win5d, dep and joint are the canonical
  // configurations; other window sizes are accepted but flagged.
  bool canonical() const;
  std::string name() const;
  static ContextSpec parse(std::string_view text);  // throws FormatError
};

struct CoocEvent {
  std::uint32_t target;
  std::string context;
};

// Window contexts: out-of-vocabulary tokens are removed first, then each
// in-vocabulary token receives its k nearest remaining neighbours per side.
// Directional mode appends "/l" or "/r". Events are emitted per target in
// sentence order, left neighbours (left to right) before right neighbours.
void extract_window_contexts(const Sentence& s, const ContextSpec& spec,
                             const Vocabulary& v, std::vector<CoocEvent>& out);

// Dependency contexts: the parent as "lemma-pos:deprel" (the target's own
// relation), then each daughter as "lemma-pos:deprel⁻¹" in token order.
// Contexts whose word is out of vocabulary are dropped.
void extract_dep_contexts(const Sentence& s, const Vocabulary& v,
                          std::vector<CoocEvent>& out);

// Joint contexts: one "parent#sister" string per sister of the target, both
// sides bare lemma-pos items; skipped when either word is out of vocabulary.
void extract_joint_contexts(const Sentence& s, const Vocabulary& v,
                            std::vector<CoocEvent>& out);

void extract_contexts(const Sentence& s, const ContextSpec& spec,
                      const Vocabulary& v, std::vector<CoocEvent>& out);

// Key-value ingestion config. Recognized keys: col.index, col.surface,
// col.lemma, col.pos, col.head, col.deprel (0-based), pos.<raw-tag> with
// value n|v|a|other, min_freq, context. '#' starts a comment.
struct IngestConfig {
  ColumnMap columns;
  PosMap pos_map;
  std::uint64_t min_freq = 100;
  std::optional<ContextSpec> context;

  static IngestConfig parse(std::istream& in);       // throws FormatError
  static IngestConfig load(const std::string& path);  // throws IoError
};

}  // namespace hyperdist
