#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperdist/space.hpp"

namespace hyperdist {

enum class Measure {
  cosine,
  lin,
  apsyn,
  weeds_prec,
  cos_weeds,
  clarke_de,
  ap_inc,
  bal_ap_inc,
  inv_cl,
  slqs,
  slqs_sub,
  slqs_row,
  slqs_row_sub,
  rctc,
  rev_weeds,
  rev_clarke_de,
};

inline constexpr Measure kAllMeasures[] = {
    Measure::cosine,       Measure::lin,      Measure::apsyn,
    Measure::weeds_prec,   Measure::cos_weeds, Measure::clarke_de,
    Measure::ap_inc,       Measure::bal_ap_inc, Measure::inv_cl,
    Measure::slqs,         Measure::slqs_sub, Measure::slqs_row,
    Measure::slqs_row_sub, Measure::rctc,     Measure::rev_weeds,
    Measure::rev_clarke_de,
};

Measure parse_measure(std::string_view name);  // throws FormatError
std::string_view measure_name(Measure m);

enum class Aggregate { median, average };
Aggregate parse_aggregate(std::string_view name);  // throws FormatError
std::string_view aggregate_name(Aggregate a);

struct MeasureConfig {
  Measure measure = Measure::cosine;
  // 0 selects the measure default: 100 for apsyn/rctc, 50 for slqs/slqs_sub.
  int top_n = 0;
  Aggregate aggregate = Aggregate::median;   // slqs, slqs_sub
  Weighting sort_weighting = Weighting::ppmi;  // slqs, slqs_sub
  bool normalized_entropy = false;           // slqs family
  bool apinc_hyponym_norm = false;  // compatibility: normalize by x's size

  int effective_n() const;
  bool uses_n() const;
  bool uses_entropy_params() const;  // aggregate + sort weighting
  // Canonical "k=v,k=v" string of the hyper-parameters relevant to the
  // measure; "-" when there are none.
  std::string hyper_string() const;
};

enum class ScoreStatus { ok, oov, empty_row, degenerate_entropy };
std::string_view status_reason(ScoreStatus s);

struct ScoreResult {
  double score = 0.0;
  ScoreStatus status = ScoreStatus::ok;
  bool defined() const { return status == ScoreStatus::ok; }
};

// Individual measures. All throw EmptyRowError when either target's weighted
// row is empty. slqs/slqs_row throw DegenerateEntropyError when the
// denominator entropy is zero. rctc requires the auxiliary word-word PMI
// table. Scores of x → y ("is y a hypernym of x?").
double cosine(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double lin(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double apsyn(const WeightedSpace& s, std::uint32_t x, std::uint32_t y, int n);
double weeds_prec(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double cos_weeds(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double clarke_de(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double ap_inc(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
              bool hyponym_norm = false);
double bal_ap_inc(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                  bool hyponym_norm = false);
double inv_cl(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double slqs(const WeightedSpace& s, std::uint32_t x, std::uint32_t y, int n,
            Aggregate aggregate, Weighting sort_weighting,
            bool normalized_entropy = false);
double slqs_sub(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                int n, Aggregate aggregate, Weighting sort_weighting,
                bool normalized_entropy = false);
double slqs_row(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                bool normalized_entropy = false);
double slqs_row_sub(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                    bool normalized_entropy = false);
double rctc(const WeightedSpace& s, std::uint32_t x, std::uint32_t y, int n,
            const AuxPmiTable& aux);
double rev_weeds(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);
double rev_clarke_de(const WeightedSpace& s, std::uint32_t x, std::uint32_t y);

// Extracts the bare lemma-POS words mentioned by a context string (window,
// dep or joint form), resolved against the vocabulary; unique sorted ids.
std::vector<std::uint32_t> context_words(const std::string& context,
                                         const Vocabulary& vocab);

// Configured scoring engine with per-target caches. prepare() precomputes
// deterministic caches for a set of targets so pairs can then be scored from
// any number of threads; unprepared targets are computed on the fly.
class Scorer {
 public:
  Scorer(const WeightedSpace& space, MeasureConfig config,
         const AuxPmiTable* aux = nullptr);

  void prepare(const std::vector<std::uint32_t>& targets, unsigned jobs = 1);
  ScoreResult score(std::string_view x, std::string_view y) const;
  ScoreResult score_ids(std::uint32_t x, std::uint32_t y) const;
  const MeasureConfig& config() const { return config_; }

 private:
  struct TargetCache {
    std::vector<std::uint32_t> ranked;               // full, by space values
    std::unordered_map<std::uint32_t, std::uint32_t> rank;  // 1-based
    bool has_entropy = false;
    double entropy = 0.0;             // slqs aggregate or row entropy
    std::vector<std::uint32_t> topn;  // rctc: top-N context ids
  };

  TargetCache build_cache(std::uint32_t t) const;
  const TargetCache* cached(std::uint32_t t) const;
  double compute(std::uint32_t x, std::uint32_t y, const TargetCache& cx,
                 const TargetCache& cy) const;

  const WeightedSpace& space_;
  MeasureConfig config_;
  const AuxPmiTable* aux_;
  std::unordered_map<std::uint32_t, TargetCache> cache_;
};

}  // namespace hyperdist
