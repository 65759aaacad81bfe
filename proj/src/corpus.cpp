#include "hyperdist/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "hyperdist/errors.hpp"

namespace hyperdist {

namespace {

// UTF-8 superscript "⁻¹" used to mark inverse dependency relations.
constexpr const char* kInverseMark = "\xE2\x81\xBB\xC2\xB9";

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, int& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc{} && r.ptr == e;
}

void split_tabs(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string token_item(const Token& t) { return t.lemma + "-" + t.pos; }

}  // namespace

int ColumnMap::required_fields() const {
  return std::max({index, surface, lemma, pos, head, deprel}) + 1;
}

PosMap::PosMap() {
  const struct {
    const char* raw;
    const char* coarse;
  } defaults[] = {
      {"noun", "n"}, {"verb", "v"}, {"adj", "a"},  {"adjective", "a"},
      {"n", "n"},    {"v", "v"},    {"a", "a"},    {"nn", "n"},
      {"nns", "n"},  {"nnp", "n"},  {"nnps", "n"}, {"vb", "v"},
      {"vbd", "v"},  {"vbg", "v"},  {"vbn", "v"},  {"vbp", "v"},
      {"vbz", "v"},  {"jj", "a"},   {"jjr", "a"},  {"jjs", "a"},
  };
  for (const auto& d : defaults) table_[d.raw] = d.coarse;
}

void PosMap::set(std::string raw, std::string coarse) {
  table_[lowercase(raw)] = std::move(coarse);
}

std::string PosMap::map(std::string_view raw) const {
  auto it = table_.find(lowercase(raw));
  return it == table_.end() ? std::string() : it->second;
}

ConllReader::ConllReader(std::istream& in, ColumnMap columns,
                         const PosMap* pos_map)
    : in_(in), columns_(columns), pos_map_(pos_map ? pos_map : &default_pos_map_) {}

bool ConllReader::read_block(std::vector<std::string>& lines) {
  lines.clear();
  std::string line;
  while (std::getline(in_, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!lines.empty()) return true;
      continue;  // stray blank line
    }
    if (line[0] == '#') continue;
    lines.push_back(line);
  }
  if (in_.bad()) throw IoError("error reading corpus stream");
  eof_ = true;
  return !lines.empty();
}

bool ConllReader::next(Sentence& out) {
  std::vector<std::string> lines;
  std::vector<std::string_view> fields;
  while (!eof_) {
    if (!read_block(lines)) return false;
    const int need = columns_.required_fields();
    const int n = static_cast<int>(lines.size());
    out.tokens.clear();
    out.tokens.reserve(lines.size());
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      split_tabs(lines[i], fields);
      if (static_cast<int>(fields.size()) < need) {
        ok = false;
        break;
      }
      int index = 0;
      if (!parse_int(fields[columns_.index], index) || index != i + 1) {
        ok = false;
        break;
      }
      int head = 0;
      if (!parse_int(fields[columns_.head], head) || head < 0 || head > n ||
          head == i + 1) {
        ok = false;
        break;
      }
      Token t;
      t.lemma = lowercase(fields[columns_.lemma]);
      t.pos = pos_map_->map(fields[columns_.pos]);
      t.head = head;
      t.deprel = lowercase(fields[columns_.deprel]);
      out.tokens.push_back(std::move(t));
    }
    if (ok) {
      // Head links must form a forest.
      std::vector<int> state(out.tokens.size(), 0);
      std::vector<int> path;
      for (int i = 0; i < n && ok; ++i) {
        if (state[i] != 0) continue;
        path.clear();
        int j = i;
        while (j >= 0 && state[j] == 0) {
          state[j] = 1;
          path.push_back(j);
          j = out.tokens[j].head - 1;
        }
        if (j >= 0 && state[j] == 1) ok = false;
        for (int p : path) state[p] = 2;
      }
    }
    if (!ok) {
      ++stats_.skipped;
      continue;
    }
    ++stats_.sentences;
    return true;
  }
  return false;
}

Vocabulary Vocabulary::from_counts(
    const std::unordered_map<std::string, std::uint64_t>& counts,
    std::uint64_t min_freq, std::string_view allowed_pos) {
  Vocabulary v;
  for (const auto& [item, freq] : counts) {
    if (freq < min_freq) continue;
    std::size_t dash = item.rfind('-');
    if (dash == std::string::npos || dash + 2 != item.size()) continue;
    if (allowed_pos.find(item[dash + 1]) == std::string_view::npos) continue;
    v.items_.push_back(item);
  }
  std::sort(v.items_.begin(), v.items_.end());
  v.freqs_.reserve(v.items_.size());
  v.index_.reserve(v.items_.size());
  for (std::uint32_t id = 0; id < v.items_.size(); ++id) {
    v.freqs_.push_back(counts.at(v.items_[id]));
    v.index_.emplace(v.items_[id], id);
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view item) const {
  auto it = index_.find(std::string(item));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  return items_ == other.items_ && freqs_ == other.freqs_;
}

void VocabCounter::add(const Sentence& s) {
  for (const Token& t : s.tokens) {
    if (t.pos.empty()) continue;
    ++counts_[token_item(t)];
  }
}

bool ContextSpec::canonical() const {
  if (kind != ContextKind::window) return true;
  return window_size == 2 || window_size == 5;
}

std::string ContextSpec::name() const {
  switch (kind) {
    case ContextKind::dep:
      return "dep";
    case ContextKind::joint:
      return "joint";
    case ContextKind::window:
      break;
  }
  std::string n = "win" + std::to_string(window_size);
  if (directional) n += "d";
  return n;
}

ContextSpec ContextSpec::parse(std::string_view text) {
  ContextSpec spec;
  if (text == "dep") {
    spec.kind = ContextKind::dep;
    return spec;
  }
  if (text == "joint") {
    spec.kind = ContextKind::joint;
    return spec;
  }
  if (text.substr(0, 3) == "win" && text.size() > 3) {
    std::string_view rest = text.substr(3);
    spec.kind = ContextKind::window;
    spec.directional = rest.back() == 'd';
    if (spec.directional) rest.remove_suffix(1);
    if (parse_int(rest, spec.window_size) && spec.window_size >= 1) return spec;
  }
  throw FormatError("unknown context spec: '" + std::string(text) + "'");
}

void extract_window_contexts(const Sentence& s, const ContextSpec& spec,
                             const Vocabulary& v,
                             std::vector<CoocEvent>& out) {
  const int k = spec.window_size;
  std::vector<std::uint32_t> ids;
  std::vector<std::string> items;
  for (const Token& t : s.tokens) {
    if (t.pos.empty()) continue;
    std::string item = token_item(t);
    if (auto id = v.id(item)) {
      ids.push_back(*id);
      items.push_back(std::move(item));
    }
  }
  const int n = static_cast<int>(ids.size());
  for (int p = 0; p < n; ++p) {
    for (int q = std::max(0, p - k); q < p; ++q) {
      std::string ctx = items[q];
      if (spec.directional) ctx += "/l";
      out.push_back({ids[p], std::move(ctx)});
    }
    for (int q = p + 1; q <= std::min(n - 1, p + k); ++q) {
      std::string ctx = items[q];
      if (spec.directional) ctx += "/r";
      out.push_back({ids[p], std::move(ctx)});
    }
  }
}

void extract_dep_contexts(const Sentence& s, const Vocabulary& v,
                          std::vector<CoocEvent>& out) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.pos.empty()) continue;
    auto target = v.id(token_item(t));
    if (!target) continue;
    if (t.head >= 1) {
      const Token& parent = s.tokens[t.head - 1];
      if (!parent.pos.empty() && v.contains(token_item(parent)))
        out.push_back({*target, token_item(parent) + ":" + t.deprel});
    }
    for (int j = 0; j < n; ++j) {
      const Token& d = s.tokens[j];
      if (d.head != i + 1 || d.pos.empty()) continue;
      if (v.contains(token_item(d)))
        out.push_back(
            {*target, token_item(d) + ":" + d.deprel + kInverseMark});
    }
  }
}

void extract_joint_contexts(const Sentence& s, const Vocabulary& v,
                            std::vector<CoocEvent>& out) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.pos.empty() || t.head < 1) continue;
    auto target = v.id(token_item(t));
    if (!target) continue;
    const Token& parent = s.tokens[t.head - 1];
    if (parent.pos.empty() || !v.contains(token_item(parent))) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Token& sister = s.tokens[j];
      if (sister.head != t.head || sister.pos.empty()) continue;
      if (v.contains(token_item(sister)))
        out.push_back({*target, token_item(parent) + "#" + token_item(sister)});
    }
  }
}

void extract_contexts(const Sentence& s, const ContextSpec& spec,
                      const Vocabulary& v, std::vector<CoocEvent>& out) {
  switch (spec.kind) {
    case ContextKind::window:
      extract_window_contexts(s, spec, v, out);
      return;
    case ContextKind::dep:
      extract_dep_contexts(s, v, out);
      return;
    case ContextKind::joint:
      extract_joint_contexts(s, v, out);
      return;
  }
}

IngestConfig IngestConfig::parse(std::istream& in) {
  IngestConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    std::string key(trim(sv.substr(0, eq)));
    std::string value(trim(sv.substr(eq + 1)));
    auto bad = [&](const std::string& why) {
      return FormatError("config line " + std::to_string(lineno) + ": " + why);
    };
    if (key.rfind("col.", 0) == 0) {
      int col = 0;
      if (!parse_int(value, col) || col < 0)
        throw bad("column index must be a nonnegative integer");
      std::string which = key.substr(4);
      if (which == "index")
        cfg.columns.index = col;
      else if (which == "surface")
        cfg.columns.surface = col;
      else if (which == "lemma")
        cfg.columns.lemma = col;
      else if (which == "pos")
        cfg.columns.pos = col;
      else if (which == "head")
        cfg.columns.head = col;
      else if (which == "deprel")
        cfg.columns.deprel = col;
      else
        throw bad("unknown column '" + which + "'");
    } else if (key.rfind("pos.", 0) == 0) {
      if (value != "n" && value != "v" && value != "a" && value != "other")
        throw bad("POS value must be n, v, a or other");
      cfg.pos_map.set(key.substr(4), value == "other" ? "" : value);
    } else if (key == "min_freq") {
      int mf = 0;
      if (!parse_int(value, mf) || mf < 1)
        throw bad("min_freq must be a positive integer");
      cfg.min_freq = static_cast<std::uint64_t>(mf);
    } else if (key == "context") {
      try {
        cfg.context = ContextSpec::parse(value);
      } catch (const FormatError& e) {
        throw bad(e.what());
      }
    } else {
      throw bad("unknown key '" + key + "'");
    }
  }
  return cfg;
}

IngestConfig IngestConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse(in);
}

}  // namespace hyperdist
