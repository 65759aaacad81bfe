#include "hyperdist/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "hyperdist/errors.hpp"
#include "hyperdist/parallel.hpp"
#include "hyperdist/rng.hpp"
#include "json.hpp"

namespace hyperdist {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
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

std::string pair_key(std::string_view x, std::string_view y) {
  std::string k(x);
  k += '\t';
  k += y;
  return k;
}

}  // namespace

bool is_hypernym_label(std::string_view label) {
  std::string l = lowercase(label);
  return l == "hyper" || l == "hypernym";
}

std::vector<RelationPair> load_dataset(std::istream& in) {
  std::vector<RelationPair> out;
  std::vector<std::string_view> fields;
  std::string line;
  std::uint64_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    split_tabs(line, fields);
    if (fields.size() < 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty())
      throw FormatError("dataset line " + std::to_string(no) +
                        ": expected 3 tab-separated columns (x, y, relation)");
    out.push_back({std::string(fields[0]), std::string(fields[1]),
                   std::string(fields[2])});
  }
  if (in.bad()) throw IoError("error reading dataset stream");
  return out;
}

std::vector<RelationPair> load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);
  return load_dataset(in);
}

LabelMap parse_label_map(std::istream& in) {
  LabelMap map;
  std::vector<std::string_view> fields;
  std::string line;
  std::uint64_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    split_tabs(line, fields);
    if (fields.size() < 2 || fields[0].empty())
      throw FormatError("label map line " + std::to_string(no) +
                        ": expected original TAB canonical");
    map[std::string(fields[0])] = std::string(fields[1]);
  }
  return map;
}

LabelMap load_label_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label map: " + path);
  return parse_label_map(in);
}

std::vector<RelationPair> apply_label_map(
    const std::vector<RelationPair>& pairs, const LabelMap& map) {
  std::vector<RelationPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto it = map.find(p.relation);
    if (it == map.end()) {
      out.push_back(p);
      continue;
    }
    if (it->second.empty() || it->second == "-") continue;  // dropped
    out.push_back({p.x, p.y, it->second});
  }
  return out;
}

std::vector<RelationPair> pos_augment(const std::vector<RelationPair>& pairs,
                                      const Vocabulary& vocab,
                                      std::uint64_t* dropped) {
  std::vector<RelationPair> out;
  std::uint64_t drops = 0;
  for (const auto& p : pairs) {
    bool any = false;
    for (const char* pos : {"n", "a", "v"}) {
      std::string xa = p.x + "-" + pos;
      std::string ya = p.y + "-" + pos;
      if (vocab.contains(xa) && vocab.contains(ya)) {
        out.push_back({std::move(xa), std::move(ya), p.relation});
        any = true;
      }
    }
    if (!any) ++drops;
  }
  if (dropped) *dropped = drops;
  return out;
}

std::vector<RelationPair> conflate_multilabel(
    const std::vector<RelationPair>& pairs) {
  std::unordered_set<std::string> has_hyper;
  for (const auto& p : pairs)
    if (is_hypernym_label(p.relation)) has_hyper.insert(pair_key(p.x, p.y));
  std::vector<RelationPair> out;
  std::unordered_set<std::string> seen_triple, hyper_done;
  for (const auto& p : pairs) {
    std::string key = pair_key(p.x, p.y);
    std::string triple = key + '\t' + p.relation;
    if (!seen_triple.insert(triple).second) continue;
    if (has_hyper.count(key)) {
      if (!is_hypernym_label(p.relation)) continue;
      if (!hyper_done.insert(key).second) continue;
    }
    out.push_back(p);
  }
  return out;
}

DatasetSplit split_random(const std::vector<RelationPair>& pairs,
                          std::uint64_t seed) {
  DatasetSplit split;
  split.seed = seed;
  std::vector<RelationPair> shuffled = pairs;
  std::mt19937_64 rng(seed);
  deterministic_shuffle(shuffled, rng);
  const std::size_t n = shuffled.size();
  const std::size_t test_n = (9 * n + 9) / 10;  // ⌈0.9·n⌉
  split.test.assign(shuffled.begin(), shuffled.begin() + test_n);
  split.validation.assign(shuffled.begin() + test_n, shuffled.end());
  return split;
}

DatasetSplit split_lexical(const std::vector<RelationPair>& pairs,
                           std::uint64_t seed) {
  DatasetSplit split;
  split.seed = seed;
  std::vector<RelationPair> shuffled = pairs;
  std::mt19937_64 rng(seed);
  deterministic_shuffle(shuffled, rng);
  std::unordered_map<std::string, int> pool;  // word → 0 test, 1 validation
  std::uint64_t kept[2] = {0, 0};
  std::uint64_t discarded = 0;
  for (auto& p : shuffled) {
    auto px = pool.find(p.x);
    auto py = pool.find(p.y);
    int side;
    if (px == pool.end() && py == pool.end()) {
      // Give the pair to the pool lagging behind its target share.
      side = (9 * kept[1] < kept[0]) ? 1 : 0;
      pool.emplace(p.x, side);
      pool.emplace(p.y, side);
    } else if (px != pool.end() && py != pool.end()) {
      if (px->second != py->second) {
        ++discarded;
        continue;
      }
      side = px->second;
    } else {
      side = px != pool.end() ? px->second : py->second;
      pool.emplace(px != pool.end() ? p.y : p.x, side);
    }
    ++kept[side];
    (side == 0 ? split.test : split.validation).push_back(std::move(p));
  }
  split.discard_fraction =
      pairs.empty() ? 0.0
                    : static_cast<double>(discarded) /
                          static_cast<double>(pairs.size());
  return split;
}

double average_precision_at_k(
    const std::vector<std::pair<double, bool>>& ranked, std::size_t k) {
  std::uint64_t total_pos = 0;
  for (const auto& [score, pos] : ranked)
    if (pos) ++total_pos;
  if (total_pos == 0)
    throw UndefinedApError("ranking contains no positive pairs");
  const std::size_t limit = std::min(k, ranked.size());
  std::uint64_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 1; r <= limit; ++r) {
    if (!ranked[r - 1].second) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r);
  }
  const double norm = static_cast<double>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(k), total_pos));
  return sum / norm;
}

EvaluationReport evaluate(const std::vector<ScoredRow>& rows,
                          std::string_view target_relation,
                          const std::vector<std::size_t>& ks) {
  struct Item {
    const ScoredRow* r;
    bool positive;
  };
  std::vector<Item> scored, scoreless;
  EvaluationReport rep;
  rep.target_relation = std::string(target_relation);
  for (const auto& row : rows) {
    const bool pos = is_hypernym_label(row.relation);
    const bool include =
        pos || target_relation == "all" || row.relation == target_relation;
    if (!include) continue;
    (row.defined ? scored : scoreless).push_back({&row, pos});
    if (pos)
      ++rep.positives;
    else
      ++rep.negatives;
    if (!row.defined) ++rep.scoreless;
  }
  auto key_less = [](const Item& a, const Item& b) {
    if (a.r->x != b.r->x) return a.r->x < b.r->x;
    if (a.r->y != b.r->y) return a.r->y < b.r->y;
    return a.r->relation < b.r->relation;
  };
  std::sort(scored.begin(), scored.end(), [&](const Item& a, const Item& b) {
    if (a.r->score != b.r->score) return a.r->score > b.r->score;
    return key_less(a, b);
  });
  std::sort(scoreless.begin(), scoreless.end(), key_less);

  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(scored.size() + scoreless.size());
  for (const auto& it : scored) ranked.emplace_back(it.r->score, it.positive);
  for (const auto& it : scoreless)
    ranked.emplace_back(it.r->score, it.positive);

  for (std::size_t k : ks) {
    std::string key = k == kAllRanks ? "all" : std::to_string(k);
    rep.ap.emplace_back(std::move(key), average_precision_at_k(ranked, k));
  }
  return rep;
}

std::string EvaluationReport::to_json_line() const {
  nlohmann::json j;
  j["dataset"] = dataset;
  j["target_relation"] = target_relation;
  j["measure"] = measure;
  j["context"] = context;
  j["weighting"] = weighting;
  j["hyperparams"] = hyperparams;
  nlohmann::json ap_obj = nlohmann::json::object();
  for (const auto& [k, v] : ap) ap_obj[k] = v;
  j["ap"] = ap_obj;
  j["positives"] = positives;
  j["negatives"] = negatives;
  j["scoreless"] = scoreless;
  return j.dump();
}

std::string EvaluationReport::markdown_header() {
  return "| measure | context | weighting | hyper-parameters | AP@100 | "
         "AP@all |\n| --- | --- | --- | --- | --- | --- |";
}

std::string EvaluationReport::markdown_row() const {
  auto cell = [&](const char* key) -> std::string {
    for (const auto& [k, v] : ap) {
      if (k == key) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.5f", v);
        return buf;
      }
    }
    return "-";
  };
  return "| " + measure + " | " + context + " | " + weighting + " | " +
         hyperparams + " | " + cell("100") + " | " + cell("all") + " |";
}

std::vector<ScoredRow> score_pairs(const WeightedSpace& space,
                                   const MeasureConfig& config,
                                   const std::vector<RelationPair>& pairs,
                                   const AuxPmiTable* aux, unsigned jobs) {
  Scorer scorer(space, config, aux);
  const Vocabulary& vocab = space.base().vocabulary();
  std::vector<std::uint32_t> ids;
  ids.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    if (auto i = vocab.id(p.x)) ids.push_back(*i);
    if (auto i = vocab.id(p.y)) ids.push_back(*i);
  }
  scorer.prepare(ids, jobs);
  std::vector<ScoredRow> rows(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    ScoreResult res = scorer.score(pairs[i].x, pairs[i].y);
    rows[i] = {pairs[i].x,
               pairs[i].y,
               pairs[i].relation,
               res.defined() ? res.score : 0.0,
               res.defined(),
               std::string(status_reason(res.status))};
  });
  return rows;
}

TuneResult tune(const WeightedSpace& space, Measure measure,
                const std::vector<RelationPair>& validation,
                std::string_view target_relation, const AuxPmiTable* aux,
                unsigned jobs, bool normalized_entropy,
                bool apinc_hyponym_norm) {
  MeasureConfig base;
  base.measure = measure;
  base.normalized_entropy = normalized_entropy;
  base.apinc_hyponym_norm = apinc_hyponym_norm;

  // Grid iteration order doubles as the tie-break order.
  std::vector<MeasureConfig> grid;
  if (measure == Measure::apsyn || measure == Measure::rctc) {
    for (int n : {100, 500, 1000}) {
      MeasureConfig c = base;
      c.top_n = n;
      grid.push_back(c);
    }
  } else if (measure == Measure::slqs || measure == Measure::slqs_sub) {
    for (int n : {50, 70, 100})
      for (Aggregate agg : {Aggregate::median, Aggregate::average})
        for (Weighting sw : {Weighting::ppmi, Weighting::plmi}) {
          MeasureConfig c = base;
          c.top_n = n;
          c.aggregate = agg;
          c.sort_weighting = sw;
          grid.push_back(c);
        }
  } else {
    grid.push_back(base);
  }

  TuneResult best;
  bool first = true;
  for (const MeasureConfig& cfg : grid) {
    auto rows = score_pairs(space, cfg, validation, aux, jobs);
    EvaluationReport rep = evaluate(rows, target_relation, {100});
    const double ap = rep.ap.front().second;
    if (first || ap > best.ap100) {
      best.config = cfg;
      best.ap100 = ap;
      first = false;
    }
  }
  return best;
}

std::vector<RelationPair> switched_pairs(
    const std::vector<RelationPair>& dataset, std::uint64_t seed) {
  std::unordered_set<std::string> pair_set;
  std::vector<const RelationPair*> hypers;
  std::vector<std::string> ys;
  {
    std::unordered_set<std::string> seen_y;
    for (const auto& p : dataset) {
      pair_set.insert(pair_key(p.x, p.y));
      if (is_hypernym_label(p.relation)) {
        hypers.push_back(&p);
        if (seen_y.insert(p.y).second) ys.push_back(p.y);
      }
    }
  }
  std::sort(ys.begin(), ys.end());

  std::mt19937_64 rng(seed);
  std::unordered_set<std::string> emitted;
  std::vector<RelationPair> out;
  std::vector<std::uint32_t> idx(ys.size());
  for (const RelationPair* h : hypers) {
    std::iota(idx.begin(), idx.end(), 0);
    // Sample candidate hypernyms without replacement until one is valid.
    for (std::size_t t = 0; t < idx.size(); ++t) {
      std::size_t j = t + bounded_uniform(rng, idx.size() - t);
      std::swap(idx[t], idx[j]);
      const std::string& y2 = ys[idx[t]];
      std::string key = pair_key(h->x, y2);
      if (pair_set.count(key) || emitted.count(key)) continue;
      emitted.insert(std::move(key));
      out.push_back({h->x, y2, "random-switched"});
      break;
    }
  }
  return out;
}

}  // namespace hyperdist
