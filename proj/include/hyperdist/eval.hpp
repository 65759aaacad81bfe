#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hyperdist/measures.hpp"
#include "hyperdist/space.hpp"

namespace hyperdist {

struct RelationPair {
  std::string x, y, relation;
  bool operator==(const RelationPair&) const = default;
};

// Both "hyper" (BLESS-style) and "hypernym" mark positives,
// case-insensitively.
bool is_hypernym_label(std::string_view label);

// TSV: x TAB y TAB relation. '#' lines and blank lines are skipped; a line
// with fewer than three columns raises FormatError naming the line.
std::vector<RelationPair> load_dataset(std::istream& in);
std::vector<RelationPair> load_dataset_file(const std::string& path);

// original-label TAB canonical-label; an empty or "-" canonical label drops
// pairs carrying the original label.
using LabelMap = std::map<std::string, std::string>;
LabelMap parse_label_map(std::istream& in);
LabelMap load_label_map(const std::string& path);
std::vector<RelationPair> apply_label_map(
    const std::vector<RelationPair>& pairs, const LabelMap& map);

// Expands untagged pairs (x, y) to (x-p, y-p) for p in {n, a, v} when both
// tagged forms are in the vocabulary; pairs with no surviving variant are
// dropped and counted.
std::vector<RelationPair> pos_augment(const std::vector<RelationPair>& pairs,
                                      const Vocabulary& vocab,
                                      std::uint64_t* dropped = nullptr);

// For an (x, y) that carries a hypernym label plus others, only one hypernym
// record survives; exact duplicate records are removed. Order is the input
// order of the surviving records.
std::vector<RelationPair> conflate_multilabel(
    const std::vector<RelationPair>& pairs);

struct DatasetSplit {
  std::vector<RelationPair> test, validation;
  std::uint64_t seed = 0;
  double discard_fraction = 0.0;  // split_lexical only
};

// Deterministic shuffle under seed; first ⌈0.9·n⌉ pairs become the test set.
DatasetSplit split_random(const std::vector<RelationPair>& pairs,
                          std::uint64_t seed);

// Greedy two-pool vocabulary split targeting a 90/10 pair ratio; pairs whose
// words land in different pools are discarded and reported as a fraction.
DatasetSplit split_lexical(const std::vector<RelationPair>& pairs,
                           std::uint64_t seed);

inline constexpr std::size_t kAllRanks = static_cast<std::size_t>(-1);

// ranked must already be sorted best-first under the deterministic
// tie-break. AP@k = Σ_{r≤k} P(r)·1[positive at r] / min(k, total positives).
// Throws UndefinedApError when the list contains no positive.
double average_precision_at_k(
    const std::vector<std::pair<double, bool>>& ranked, std::size_t k);

struct ScoredRow {
  std::string x, y, relation;
  double score = 0.0;
  bool defined = false;
  std::string reason;  // "ok" when defined, else the degeneracy reason
};

struct EvaluationReport {
  std::string dataset;
  std::string target_relation;
  std::string measure, context, weighting, hyperparams;
  std::vector<std::pair<std::string, double>> ap;  // key "100", "all", ...
  std::uint64_t positives = 0, negatives = 0, scoreless = 0;

  std::string to_json_line() const;
  static std::string markdown_header();
  std::string markdown_row() const;
};

// Ranks hypernym pairs (positives) against pairs of target_relation ("all" =
// every non-hypernym relation); scoreless pairs sort below all scored pairs.
// Fills relation, ap and the counts; provenance fields are the caller's.
EvaluationReport evaluate(const std::vector<ScoredRow>& rows,
                          std::string_view target_relation,
                          const std::vector<std::size_t>& ks);

// Scores every pair with the configured measure; row order = input order.
std::vector<ScoredRow> score_pairs(const WeightedSpace& space,
                                   const MeasureConfig& config,
                                   const std::vector<RelationPair>& pairs,
                                   const AuxPmiTable* aux = nullptr,
                                   unsigned jobs = 1);

struct TuneResult {
  MeasureConfig config;
  double ap100 = 0.0;
};

// Exhaustive grid search by AP@100 on the validation pairs. Grids: N ∈
// {100, 500, 1000} for apsyn/rctc; N ∈ {50, 70, 100} × {median, average} ×
// {ppmi, plmi} for slqs/slqs_sub; single default config otherwise. Ties
// break toward smaller N, then median, then ppmi.
TuneResult tune(const WeightedSpace& space, Measure measure,
                const std::vector<RelationPair>& validation,
                std::string_view target_relation,
                const AuxPmiTable* aux = nullptr, unsigned jobs = 1,
                bool normalized_entropy = false,
                bool apinc_hyponym_norm = false);

// For each hypernym pair (x1, y1), samples a hypernym y2 from another pair
// such that (x1, y2) is not in the dataset (and not already emitted),
// without replacement per x1; emits (x1, y2, "random-switched").
std::vector<RelationPair> switched_pairs(
    const std::vector<RelationPair>& dataset, std::uint64_t seed);

}  // namespace hyperdist
