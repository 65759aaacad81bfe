#include "hyperdist/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hyperdist/errors.hpp"
#include "hyperdist/kernels.hpp"
#include "hyperdist/parallel.hpp"

namespace hyperdist {

namespace {

struct MeasureName {
  Measure m;
  const char* name;
};

constexpr MeasureName kMeasureNames[] = {
    {Measure::cosine, "cosine"},
    {Measure::lin, "lin"},
    {Measure::apsyn, "apsyn"},
    {Measure::weeds_prec, "weeds_prec"},
    {Measure::cos_weeds, "cos_weeds"},
    {Measure::clarke_de, "clarke_de"},
    {Measure::ap_inc, "ap_inc"},
    {Measure::bal_ap_inc, "bal_ap_inc"},
    {Measure::inv_cl, "inv_cl"},
    {Measure::slqs, "slqs"},
    {Measure::slqs_sub, "slqs_sub"},
    {Measure::slqs_row, "slqs_row"},
    {Measure::slqs_row_sub, "slqs_row_sub"},
    {Measure::rctc, "rctc"},
    {Measure::rev_weeds, "rev_weeds"},
    {Measure::rev_clarke_de, "rev_clarke_de"},
};

}  // namespace

Measure parse_measure(std::string_view name) {
  for (const auto& e : kMeasureNames)
    if (name == e.name) return e.m;
  throw FormatError("unknown measure: '" + std::string(name) + "'");
}

std::string_view measure_name(Measure m) {
  for (const auto& e : kMeasureNames)
    if (e.m == m) return e.name;
  return "?";
}

Aggregate parse_aggregate(std::string_view name) {
  if (name == "median") return Aggregate::median;
  if (name == "average") return Aggregate::average;
  throw FormatError("unknown aggregate: '" + std::string(name) + "'");
}

std::string_view aggregate_name(Aggregate a) {
  return a == Aggregate::median ? "median" : "average";
}

bool MeasureConfig::uses_n() const {
  return measure == Measure::apsyn || measure == Measure::rctc ||
         measure == Measure::slqs || measure == Measure::slqs_sub;
}

bool MeasureConfig::uses_entropy_params() const {
  return measure == Measure::slqs || measure == Measure::slqs_sub;
}

int MeasureConfig::effective_n() const {
  if (top_n > 0) return top_n;
  if (measure == Measure::apsyn || measure == Measure::rctc) return 100;
  if (measure == Measure::slqs || measure == Measure::slqs_sub) return 50;
  return 0;
}

std::string MeasureConfig::hyper_string() const {
  std::string s;
  if (uses_n()) s += "N=" + std::to_string(effective_n());
  if (uses_entropy_params()) {
    s += ",agg=" + std::string(aggregate_name(aggregate));
    s += ",sortw=" + std::string(weighting_name(sort_weighting));
  }
  if (normalized_entropy &&
      (uses_entropy_params() || measure == Measure::slqs_row ||
       measure == Measure::slqs_row_sub)) {
    if (!s.empty()) s += ",";
    s += "normH=true";
  }
  if (apinc_hyponym_norm &&
      (measure == Measure::ap_inc || measure == Measure::bal_ap_inc)) {
    if (!s.empty()) s += ",";
    s += "norm=hyponym";
  }
  return s.empty() ? "-" : s;
}

std::string_view status_reason(ScoreStatus s) {
  switch (s) {
    case ScoreStatus::ok:
      return "ok";
    case ScoreStatus::oov:
      return "oov";
    case ScoreStatus::empty_row:
      return "empty_row";
    case ScoreStatus::degenerate_entropy:
      return "degenerate_entropy";
  }
  return "?";
}

namespace {

void check_rows(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  for (std::uint32_t t : {x, y}) {
    if (t >= s.base().num_targets())
      throw EmptyRowError("target id out of range: " + std::to_string(t));
    if (s.row_size(t) == 0)
      throw EmptyRowError("target '" + s.base().vocabulary().item(t) +
                          "' has no contexts in the weighted space");
  }
}

// Values of the shared contexts of x and y, aligned, in ascending context-id
// order (the rows' own order).
struct SharedPack {
  std::vector<double> xs, ys;
};

SharedPack pack_shared(const WeightedSpace& s, std::uint32_t x,
                       std::uint32_t y) {
  SharedPack p;
  auto xi = s.row_contexts(x);
  auto yi = s.row_contexts(y);
  auto xv = s.row_values(x);
  auto yv = s.row_values(y);
  std::size_t i = 0, j = 0;
  while (i < xi.size() && j < yi.size()) {
    if (xi[i] < yi[j]) {
      ++i;
    } else if (yi[j] < xi[i]) {
      ++j;
    } else {
      p.xs.push_back(xv[i]);
      p.ys.push_back(yv[j]);
      ++i;
      ++j;
    }
  }
  return p;
}

struct Ranking {
  std::vector<std::uint32_t> ranked;                      // full row ranking
  std::unordered_map<std::uint32_t, std::uint32_t> rank;  // 1-based
};

Ranking make_ranking(const WeightedSpace& s, std::uint32_t t) {
  Ranking r;
  r.ranked = s.ranked_contexts(t);
  r.rank.reserve(r.ranked.size());
  for (std::uint32_t i = 0; i < r.ranked.size(); ++i)
    r.rank.emplace(r.ranked[i], i + 1);
  return r;
}

double cosine_impl(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  SharedPack p = pack_shared(s, x, y);
  const auto& k = kernels::active();
  const double num = k.dot(p.xs.data(), p.ys.data(), p.xs.size());
  return num / std::sqrt(s.row_sumsq(x) * s.row_sumsq(y));
}

double lin_impl(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  SharedPack p = pack_shared(s, x, y);
  const auto& k = kernels::active();
  const double shared = k.sum(p.xs.data(), p.xs.size()) +
                        k.sum(p.ys.data(), p.ys.size());
  return shared / (s.row_value_sum(x) + s.row_value_sum(y));
}

double weeds_prec_impl(const WeightedSpace& s, std::uint32_t x,
                       std::uint32_t y) {
  SharedPack p = pack_shared(s, x, y);
  const auto& k = kernels::active();
  return k.sum(p.xs.data(), p.xs.size()) / s.row_value_sum(x);
}

double clarke_de_impl(const WeightedSpace& s, std::uint32_t x,
                      std::uint32_t y) {
  SharedPack p = pack_shared(s, x, y);
  const auto& k = kernels::active();
  return k.min_sum(p.xs.data(), p.ys.data(), p.xs.size()) /
         s.row_value_sum(x);
}

double apsyn_impl(const std::vector<std::uint32_t>& ranked_x,
                  const std::vector<std::uint32_t>& ranked_y, std::size_t n) {
  const std::size_t nx = std::min(n, ranked_x.size());
  const std::size_t ny = std::min(n, ranked_y.size());
  std::unordered_map<std::uint32_t, std::uint32_t> top_x;
  top_x.reserve(nx);
  for (std::uint32_t i = 0; i < nx; ++i) top_x.emplace(ranked_x[i], i + 1);
  double sum = 0.0;
  for (std::uint32_t j = 0; j < ny; ++j) {
    auto it = top_x.find(ranked_y[j]);
    if (it == top_x.end()) continue;
    sum += 1.0 / ((static_cast<double>(it->second) + (j + 1)) / 2.0);
  }
  return sum;
}

double ap_inc_impl(
    const std::vector<std::uint32_t>& ranked_x,
    const std::unordered_map<std::uint32_t, std::uint32_t>& rank_y,
    bool hyponym_norm) {
  const std::size_t nx = ranked_x.size();
  const std::size_t ny = rank_y.size();
  const std::size_t limit = hyponym_norm ? nx : std::min(nx, ny);
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 1; r <= limit; ++r) {
    auto it = rank_y.find(ranked_x[r - 1]);
    if (it == rank_y.end()) continue;
    ++hits;
    const double rel =
        1.0 - static_cast<double>(it->second) / static_cast<double>(ny + 1);
    sum += (static_cast<double>(hits) / static_cast<double>(r)) * rel;
  }
  return sum / static_cast<double>(hyponym_norm ? nx : ny);
}

double aggregate_values(std::vector<double> vals, Aggregate agg) {
  const auto& k = kernels::active();
  if (agg == Aggregate::average)
    return k.sum(vals.data(), vals.size()) / static_cast<double>(vals.size());
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  if (n % 2 == 1) return vals[n / 2];
  return (vals[n / 2 - 1] + vals[n / 2]) / 2.0;
}

double slqs_entropy(const WeightedSpace& s, std::uint32_t t, int n,
                    Aggregate agg, Weighting sortw, bool normalized) {
  auto top = s.top_contexts(t, static_cast<std::size_t>(n), sortw);
  std::vector<double> ents;
  ents.reserve(top.size());
  for (std::uint32_t c : top)
    ents.push_back(s.base().context_entropy(c, normalized));
  return aggregate_values(std::move(ents), agg);
}

// Median pairwise PMI over a word set; nullopt when fewer than two words or
// no pair has an entry in the table.
std::optional<double> topic_coherence(const std::vector<std::uint32_t>& words,
                                      const AuxPmiTable& aux) {
  if (words.size() < 2) return std::nullopt;
  std::vector<double> pmis;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j)
      if (auto p = aux.pmi(words[i], words[j])) pmis.push_back(*p);
  if (pmis.empty()) return std::nullopt;
  return aggregate_values(std::move(pmis), Aggregate::median);
}

// Per-word change ratio TC(top)/TC(top minus other). Undefined or
// nonpositive coherence on either side neutralizes the ratio to 1 so the
// score stays positive and swapping the arguments inverts it exactly.
double coherence_ratio(const std::vector<std::uint32_t>& top_words,
                       const std::vector<std::uint32_t>& minus_words,
                       const AuxPmiTable& aux) {
  auto num = topic_coherence(top_words, aux);
  auto den = topic_coherence(minus_words, aux);
  if (!num || !den || *num <= 0.0 || *den <= 0.0) return 1.0;
  return *num / *den;
}

std::vector<std::uint32_t> words_of_contexts(
    const WeightedSpace& s, const std::vector<std::uint32_t>& ctxs) {
  std::vector<std::uint32_t> words;
  for (std::uint32_t c : ctxs) {
    auto w = context_words(s.base().context(c), s.base().vocabulary());
    words.insert(words.end(), w.begin(), w.end());
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

double rctc_impl(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                 const std::vector<std::uint32_t>& top_x,
                 const std::vector<std::uint32_t>& top_y,
                 const AuxPmiTable& aux) {
  std::vector<std::uint32_t> x_minus, y_minus;
  for (std::uint32_t c : top_x)
    if (!s.has_context(y, c)) x_minus.push_back(c);
  for (std::uint32_t c : top_y)
    if (!s.has_context(x, c)) y_minus.push_back(c);
  const double rx = coherence_ratio(words_of_contexts(s, top_x),
                                    words_of_contexts(s, x_minus), aux);
  const double ry = coherence_ratio(words_of_contexts(s, top_y),
                                    words_of_contexts(s, y_minus), aux);
  return rx / ry;
}

}  // namespace

std::vector<std::uint32_t> context_words(const std::string& context,
                                         const Vocabulary& vocab) {
  std::vector<std::uint32_t> out;
  std::size_t start = 0;
  while (start <= context.size()) {
    std::size_t hash = context.find('#', start);
    std::string part = context.substr(
        start, hash == std::string::npos ? std::string::npos : hash - start);
    std::size_t colon = part.find(':');
    if (colon != std::string::npos) part.erase(colon);
    if (part.size() > 2 && (part.ends_with("/l") || part.ends_with("/r")))
      part.erase(part.size() - 2);
    if (auto id = vocab.id(part)) out.push_back(*id);
    if (hash == std::string::npos) break;
    start = hash + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double cosine(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return cosine_impl(s, x, y);
}

double lin(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return lin_impl(s, x, y);
}

double apsyn(const WeightedSpace& s, std::uint32_t x, std::uint32_t y, int n) {
  check_rows(s, x, y);
  Ranking rx = make_ranking(s, x), ry = make_ranking(s, y);
  return apsyn_impl(rx.ranked, ry.ranked, static_cast<std::size_t>(n));
}

double weeds_prec(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return weeds_prec_impl(s, x, y);
}

double cos_weeds(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return std::sqrt(cosine_impl(s, x, y) * weeds_prec_impl(s, x, y));
}

double clarke_de(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return clarke_de_impl(s, x, y);
}

double ap_inc(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
              bool hyponym_norm) {
  check_rows(s, x, y);
  Ranking rx = make_ranking(s, x), ry = make_ranking(s, y);
  return ap_inc_impl(rx.ranked, ry.rank, hyponym_norm);
}

double bal_ap_inc(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                  bool hyponym_norm) {
  check_rows(s, x, y);
  Ranking rx = make_ranking(s, x), ry = make_ranking(s, y);
  return std::sqrt(lin_impl(s, x, y) *
                   ap_inc_impl(rx.ranked, ry.rank, hyponym_norm));
}

double inv_cl(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return std::sqrt(clarke_de_impl(s, x, y) *
                   (1.0 - clarke_de_impl(s, y, x)));
}

double slqs(const WeightedSpace& s, std::uint32_t x, std::uint32_t y, int n,
            Aggregate aggregate, Weighting sort_weighting,
            bool normalized_entropy) {
  check_rows(s, x, y);
  const double ex =
      slqs_entropy(s, x, n, aggregate, sort_weighting, normalized_entropy);
  const double ey =
      slqs_entropy(s, y, n, aggregate, sort_weighting, normalized_entropy);
  if (ey == 0.0)
    throw DegenerateEntropyError("zero top-context entropy for target '" +
                                 s.base().vocabulary().item(y) + "'");
  return 1.0 - ex / ey;
}

double slqs_sub(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                int n, Aggregate aggregate, Weighting sort_weighting,
                bool normalized_entropy) {
  check_rows(s, x, y);
  return slqs_entropy(s, y, n, aggregate, sort_weighting,
                      normalized_entropy) -
         slqs_entropy(s, x, n, aggregate, sort_weighting, normalized_entropy);
}

double slqs_row(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                bool normalized_entropy) {
  check_rows(s, x, y);
  const double ex = s.base().row_entropy(x, normalized_entropy);
  const double ey = s.base().row_entropy(y, normalized_entropy);
  if (ey == 0.0)
    throw DegenerateEntropyError("zero row entropy for target '" +
                                 s.base().vocabulary().item(y) + "'");
  return 1.0 - ex / ey;
}

double slqs_row_sub(const WeightedSpace& s, std::uint32_t x, std::uint32_t y,
                    bool normalized_entropy) {
  check_rows(s, x, y);
  return s.base().row_entropy(y, normalized_entropy) -
         s.base().row_entropy(x, normalized_entropy);
}

double rctc(const WeightedSpace& s, std::uint32_t x, std::uint32_t y, int n,
            const AuxPmiTable& aux) {
  check_rows(s, x, y);
  Ranking rx = make_ranking(s, x), ry = make_ranking(s, y);
  std::vector<std::uint32_t> top_x(
      rx.ranked.begin(),
      rx.ranked.begin() + std::min<std::size_t>(n, rx.ranked.size()));
  std::vector<std::uint32_t> top_y(
      ry.ranked.begin(),
      ry.ranked.begin() + std::min<std::size_t>(n, ry.ranked.size()));
  return rctc_impl(s, x, y, top_x, top_y, aux);
}

double rev_weeds(const WeightedSpace& s, std::uint32_t x, std::uint32_t y) {
  check_rows(s, x, y);
  return weeds_prec_impl(s, y, x);
}

double rev_clarke_de(const WeightedSpace& s, std::uint32_t x,
                     std::uint32_t y) {
  check_rows(s, x, y);
  return clarke_de_impl(s, y, x);
}

Scorer::Scorer(const WeightedSpace& space, MeasureConfig config,
               const AuxPmiTable* aux)
    : space_(space), config_(config), aux_(aux) {
  if (config_.measure == Measure::rctc && aux_ == nullptr)
    throw MissingAuxiliaryError(
        "rctc requires the auxiliary word-word PMI table");
}

Scorer::TargetCache Scorer::build_cache(std::uint32_t t) const {
  TargetCache c;
  if (space_.row_size(t) == 0) return c;
  switch (config_.measure) {
    case Measure::apsyn:
    case Measure::ap_inc:
    case Measure::bal_ap_inc: {
      Ranking r = make_ranking(space_, t);
      c.ranked = std::move(r.ranked);
      c.rank = std::move(r.rank);
      break;
    }
    case Measure::rctc: {
      Ranking r = make_ranking(space_, t);
      const std::size_t n =
          std::min<std::size_t>(config_.effective_n(), r.ranked.size());
      c.topn.assign(r.ranked.begin(), r.ranked.begin() + n);
      break;
    }
    case Measure::slqs:
    case Measure::slqs_sub:
      c.entropy = slqs_entropy(space_, t, config_.effective_n(),
                               config_.aggregate, config_.sort_weighting,
                               config_.normalized_entropy);
      c.has_entropy = true;
      break;
    default:
      break;
  }
  return c;
}

void Scorer::prepare(const std::vector<std::uint32_t>& targets,
                     unsigned jobs) {
  std::vector<std::uint32_t> unique = targets;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<TargetCache> built(unique.size());
  parallel_for(unique.size(), jobs,
               [&](std::size_t i) { built[i] = build_cache(unique[i]); });
  for (std::size_t i = 0; i < unique.size(); ++i)
    cache_[unique[i]] = std::move(built[i]);
}

const Scorer::TargetCache* Scorer::cached(std::uint32_t t) const {
  auto it = cache_.find(t);
  return it == cache_.end() ? nullptr : &it->second;
}

double Scorer::compute(std::uint32_t x, std::uint32_t y, const TargetCache& cx,
                       const TargetCache& cy) const {
  const WeightedSpace& s = space_;
  switch (config_.measure) {
    case Measure::cosine:
      return cosine_impl(s, x, y);
    case Measure::lin:
      return lin_impl(s, x, y);
    case Measure::apsyn:
      return apsyn_impl(cx.ranked, cy.ranked,
                        static_cast<std::size_t>(config_.effective_n()));
    case Measure::weeds_prec:
      return weeds_prec_impl(s, x, y);
    case Measure::cos_weeds:
      return std::sqrt(cosine_impl(s, x, y) * weeds_prec_impl(s, x, y));
    case Measure::clarke_de:
      return clarke_de_impl(s, x, y);
    case Measure::ap_inc:
      return ap_inc_impl(cx.ranked, cy.rank, config_.apinc_hyponym_norm);
    case Measure::bal_ap_inc:
      return std::sqrt(
          lin_impl(s, x, y) *
          ap_inc_impl(cx.ranked, cy.rank, config_.apinc_hyponym_norm));
    case Measure::inv_cl:
      return std::sqrt(clarke_de_impl(s, x, y) *
                       (1.0 - clarke_de_impl(s, y, x)));
    case Measure::slqs:
      if (cy.entropy == 0.0)
        throw DegenerateEntropyError("zero top-context entropy for target '" +
                                     s.base().vocabulary().item(y) + "'");
      return 1.0 - cx.entropy / cy.entropy;
    case Measure::slqs_sub:
      return cy.entropy - cx.entropy;
    case Measure::slqs_row:
      return slqs_row(s, x, y, config_.normalized_entropy);
    case Measure::slqs_row_sub:
      return slqs_row_sub(s, x, y, config_.normalized_entropy);
    case Measure::rctc:
      return rctc_impl(s, x, y, cx.topn, cy.topn, *aux_);
    case Measure::rev_weeds:
      return weeds_prec_impl(s, y, x);
    case Measure::rev_clarke_de:
      return clarke_de_impl(s, y, x);
  }
  throw Error("unhandled measure");
}

ScoreResult Scorer::score_ids(std::uint32_t x, std::uint32_t y) const {
  if (x >= space_.base().num_targets() || y >= space_.base().num_targets())
    return {0.0, ScoreStatus::oov};
  if (space_.row_size(x) == 0 || space_.row_size(y) == 0)
    return {0.0, ScoreStatus::empty_row};
  TargetCache local_x, local_y;
  const TargetCache* cx = cached(x);
  const TargetCache* cy = cached(y);
  if (!cx) {
    local_x = build_cache(x);
    cx = &local_x;
  }
  if (!cy) {
    local_y = build_cache(y);
    cy = &local_y;
  }
  try {
    return {compute(x, y, *cx, *cy), ScoreStatus::ok};
  } catch (const DegenerateEntropyError&) {
    return {0.0, ScoreStatus::degenerate_entropy};
  } catch (const EmptyRowError&) {
    return {0.0, ScoreStatus::empty_row};
  }
}

ScoreResult Scorer::score(std::string_view x, std::string_view y) const {
  auto ix = space_.base().vocabulary().id(x);
  auto iy = space_.base().vocabulary().id(y);
  if (!ix || !iy) return {0.0, ScoreStatus::oov};
  return score_ids(*ix, *iy);
}

}  // namespace hyperdist
