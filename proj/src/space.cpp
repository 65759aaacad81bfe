#include "hyperdist/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperdist/errors.hpp"
#include "hyperdist/kernels.hpp"
#include "hyperdist/parallel.hpp"

namespace hyperdist {

Weighting parse_weighting(std::string_view text) {
  if (text == "freq") return Weighting::freq;
  if (text == "ppmi") return Weighting::ppmi;
  if (text == "plmi") return Weighting::plmi;
  throw FormatError("unknown weighting: '" + std::string(text) + "'");
}

std::string_view weighting_name(Weighting w) {
  switch (w) {
    case Weighting::freq:
      return "freq";
    case Weighting::ppmi:
      return "ppmi";
    case Weighting::plmi:
      return "plmi";
  }
  return "?";
}

CooccurrenceMatrix CooccurrenceMatrix::from_parts(
    Vocabulary vocab, std::vector<std::string> contexts,
    std::vector<std::uint64_t> row_ptr, std::vector<std::uint32_t> col_ids,
    std::vector<std::uint64_t> counts) {
  CooccurrenceMatrix m;
  m.vocab_ = std::move(vocab);
  m.contexts_ = std::move(contexts);
  m.row_ptr_ = std::move(row_ptr);
  m.col_ids_ = std::move(col_ids);
  m.counts_ = std::move(counts);

  const std::size_t rows = m.vocab_.size();
  const std::size_t cols = m.contexts_.size();
  if (m.row_ptr_.size() != rows + 1 || m.row_ptr_.front() != 0 ||
      m.row_ptr_.back() != m.col_ids_.size() ||
      m.col_ids_.size() != m.counts_.size())
    throw CorruptSpaceError("inconsistent matrix structure");

  m.context_index_.reserve(cols);
  for (std::uint32_t c = 0; c < cols; ++c) {
    if (!m.context_index_.emplace(m.contexts_[c], c).second)
      throw CorruptSpaceError("duplicate context string");
  }

  m.row_sums_.assign(rows, 0);
  m.col_sums_.assign(cols, 0);
  m.col_support_.assign(cols, 0);
  m.total_ = 0;
  for (std::size_t t = 0; t < rows; ++t) {
    if (m.row_ptr_[t] > m.row_ptr_[t + 1])
      throw CorruptSpaceError("row pointers not monotone");
    std::uint32_t prev = 0;
    bool first = true;
    for (std::uint64_t i = m.row_ptr_[t]; i < m.row_ptr_[t + 1]; ++i) {
      std::uint32_t c = m.col_ids_[i];
      if (c >= cols || (!first && c <= prev))
        throw CorruptSpaceError("row context ids not sorted or out of range");
      if (m.counts_[i] == 0) throw CorruptSpaceError("zero count stored");
      prev = c;
      first = false;
      m.row_sums_[t] += m.counts_[i];
      m.col_sums_[c] += m.counts_[i];
      m.col_support_[c] += 1;
      m.total_ += m.counts_[i];
    }
  }

  // Entropy caches: Σ count·log2(count) per row and per column. The log2s
  // are computed row-wise in bulk.
  const auto& k = kernels::active();
  m.row_xlogx_.assign(rows, 0.0);
  m.col_xlogx_.assign(cols, 0.0);
  std::vector<double> buf, logs;
  for (std::size_t t = 0; t < rows; ++t) {
    const std::uint64_t b = m.row_ptr_[t], e = m.row_ptr_[t + 1];
    const std::size_t n = e - b;
    if (n == 0) continue;
    buf.resize(n);
    logs.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      buf[i] = static_cast<double>(m.counts_[b + i]);
    k.log2_array(buf.data(), logs.data(), n);
    double row_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double term = buf[i] * logs[i];
      row_acc += term;
      m.col_xlogx_[m.col_ids_[b + i]] += term;
    }
    m.row_xlogx_[t] = row_acc;
  }
  return m;
}

std::optional<std::uint32_t> CooccurrenceMatrix::context_id(
    std::string_view ctx) const {
  auto it = context_index_.find(std::string(ctx));
  if (it == context_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> CooccurrenceMatrix::row_contexts(
    std::uint32_t t) const {
  return {col_ids_.data() + row_ptr_[t], col_ids_.data() + row_ptr_[t + 1]};
}

std::span<const std::uint64_t> CooccurrenceMatrix::row_counts(
    std::uint32_t t) const {
  return {counts_.data() + row_ptr_[t], counts_.data() + row_ptr_[t + 1]};
}

std::uint64_t CooccurrenceMatrix::count(std::uint32_t t,
                                        std::uint32_t c) const {
  auto ids = row_contexts(t);
  auto it = std::lower_bound(ids.begin(), ids.end(), c);
  if (it == ids.end() || *it != c) return 0;
  return counts_[row_ptr_[t] + (it - ids.begin())];
}

std::size_t CooccurrenceMatrix::row_size(std::uint32_t t) const {
  return row_ptr_[t + 1] - row_ptr_[t];
}

namespace {

// H = log2(S) − xlogx/S for a marginal S and support size; normalization
// divides by log2(support). Single-cell or empty distributions have H = 0.
double entropy_from_cache(std::uint64_t marginal, double xlogx,
                          std::uint64_t support, bool normalized) {
  if (marginal == 0 || support <= 1) return 0.0;
  const double s = static_cast<double>(marginal);
  double h = std::log2(s) - xlogx / s;
  if (h < 0.0) h = 0.0;  // guard against tiny negative rounding residue
  if (normalized) h /= std::log2(static_cast<double>(support));
  return h;
}

}  // namespace

double CooccurrenceMatrix::context_entropy(std::uint32_t c,
                                           bool normalized) const {
  if (c >= contexts_.size())
    throw UnknownContextError("context id out of range: " + std::to_string(c));
  return entropy_from_cache(col_sums_[c], col_xlogx_[c], col_support_[c],
                            normalized);
}

double CooccurrenceMatrix::context_entropy(std::string_view ctx,
                                           bool normalized) const {
  auto id = context_id(ctx);
  if (!id)
    throw UnknownContextError("unseen context: '" + std::string(ctx) + "'");
  return context_entropy(*id, normalized);
}

double CooccurrenceMatrix::row_entropy(std::uint32_t t,
                                       bool normalized) const {
  if (t >= vocab_.size())
    throw UnknownContextError("target id out of range: " + std::to_string(t));
  return entropy_from_cache(row_sums_[t], row_xlogx_[t], row_size(t),
                            normalized);
}

bool CooccurrenceMatrix::operator==(const CooccurrenceMatrix& other) const {
  return vocab_ == other.vocab_ && contexts_ == other.contexts_ &&
         row_ptr_ == other.row_ptr_ && col_ids_ == other.col_ids_ &&
         counts_ == other.counts_ && row_sums_ == other.row_sums_ &&
         col_sums_ == other.col_sums_ && total_ == other.total_;
}

CoocAccumulator::CoocAccumulator(Vocabulary vocab) : vocab_(std::move(vocab)) {
  rows_.resize(vocab_.size());
}

std::uint32_t CoocAccumulator::intern(const std::string& ctx) {
  auto it = ctx_index_.find(ctx);
  if (it != ctx_index_.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(ctx_strings_.size());
  ctx_strings_.push_back(ctx);
  ctx_index_.emplace(ctx, id);
  return id;
}

void CoocAccumulator::add(const CoocEvent& event) {
  rows_[event.target][intern(event.context)] += 1;
  ++total_;
}

void CoocAccumulator::add(const std::vector<CoocEvent>& events) {
  for (const auto& e : events) add(e);
}

void CoocAccumulator::merge(CoocAccumulator&& other) {
  std::vector<std::uint32_t> remap(other.ctx_strings_.size());
  for (std::uint32_t old = 0; old < other.ctx_strings_.size(); ++old)
    remap[old] = intern(other.ctx_strings_[old]);
  for (std::size_t t = 0; t < other.rows_.size(); ++t)
    for (const auto& [old, cnt] : other.rows_[t]) rows_[t][remap[old]] += cnt;
  total_ += other.total_;
  other.rows_.clear();
  other.ctx_strings_.clear();
  other.ctx_index_.clear();
  other.total_ = 0;
}

CooccurrenceMatrix CoocAccumulator::finalize() && {
  // Canonicalize context ids by sorting the strings, making the result
  // independent of event order and shard structure.
  std::vector<std::uint32_t> order(ctx_strings_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              return ctx_strings_[a] < ctx_strings_[b];
            });
  std::vector<std::uint32_t> remap(ctx_strings_.size());
  std::vector<std::string> sorted;
  sorted.reserve(ctx_strings_.size());
  for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
    remap[order[rank]] = rank;
    sorted.push_back(std::move(ctx_strings_[order[rank]]));
  }

  std::vector<std::uint64_t> row_ptr(rows_.size() + 1, 0);
  std::vector<std::uint32_t> col_ids;
  std::vector<std::uint64_t> counts;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> cells;
  for (std::size_t t = 0; t < rows_.size(); ++t) {
    cells.clear();
    cells.reserve(rows_[t].size());
    for (const auto& [old, cnt] : rows_[t]) cells.emplace_back(remap[old], cnt);
    std::sort(cells.begin(), cells.end());
    for (const auto& [c, cnt] : cells) {
      col_ids.push_back(c);
      counts.push_back(cnt);
    }
    row_ptr[t + 1] = col_ids.size();
  }
  return CooccurrenceMatrix::from_parts(std::move(vocab_), std::move(sorted),
                                        std::move(row_ptr), std::move(col_ids),
                                        std::move(counts));
}

WeightedSpace WeightedSpace::build(CooccurrenceMatrix base, Weighting weighting,
                                   ContextSpec spec, unsigned jobs) {
  if (weighting != Weighting::freq && base.total() == 0)
    throw DegenerateSpaceError("cannot apply " +
                               std::string(weighting_name(weighting)) +
                               " weighting to an empty matrix");
  WeightedSpace s;
  s.base_ = std::move(base);
  s.weighting_ = weighting;
  s.spec_ = spec;

  const std::size_t rows = s.base_.num_targets();
  const auto& bp = s.base_.row_ptr();
  const auto& bc = s.base_.col_ids();
  const auto& bn = s.base_.counts();

  if (weighting == Weighting::freq) {
    s.row_ptr_ = bp;
    s.col_ids_ = bc;
    s.values_.resize(bn.size());
    for (std::size_t i = 0; i < bn.size(); ++i)
      s.values_[i] = static_cast<double>(bn[i]);
  } else {
    const double total = static_cast<double>(s.base_.total());
    const auto& row_sums = s.base_.row_sums();
    const auto& col_sums = s.base_.col_sums();
    std::vector<std::vector<std::uint32_t>> kept_ids(rows);
    std::vector<std::vector<double>> kept_vals(rows);
    parallel_for(rows, jobs, [&](std::size_t t) {
      const auto& k = kernels::active();
      const std::uint64_t b = bp[t], e = bp[t + 1];
      const std::size_t n = e - b;
      if (n == 0) return;
      std::vector<double> ratio(n), logs(n);
      const double rs = static_cast<double>(row_sums[t]);
      for (std::size_t i = 0; i < n; ++i)
        ratio[i] = (static_cast<double>(bn[b + i]) * total) /
                   (rs * static_cast<double>(col_sums[bc[b + i]]));
      k.log2_array(ratio.data(), logs.data(), n);
      auto& ids = kept_ids[t];
      auto& vals = kept_vals[t];
      for (std::size_t i = 0; i < n; ++i) {
        if (logs[i] <= 0.0) continue;
        ids.push_back(bc[b + i]);
        vals.push_back(weighting == Weighting::ppmi
                           ? logs[i]
                           : static_cast<double>(bn[b + i]) * logs[i]);
      }
    });
    s.row_ptr_.assign(rows + 1, 0);
    for (std::size_t t = 0; t < rows; ++t)
      s.row_ptr_[t + 1] = s.row_ptr_[t] + kept_ids[t].size();
    s.col_ids_.resize(s.row_ptr_.back());
    s.values_.resize(s.row_ptr_.back());
    for (std::size_t t = 0; t < rows; ++t) {
      std::copy(kept_ids[t].begin(), kept_ids[t].end(),
                s.col_ids_.begin() + s.row_ptr_[t]);
      std::copy(kept_vals[t].begin(), kept_vals[t].end(),
                s.values_.begin() + s.row_ptr_[t]);
    }
  }
  s.build_row_caches(jobs);
  return s;
}

WeightedSpace WeightedSpace::from_parts(CooccurrenceMatrix base,
                                        Weighting weighting, ContextSpec spec,
                                        std::vector<std::uint64_t> row_ptr,
                                        std::vector<std::uint32_t> col_ids,
                                        std::vector<double> values) {
  WeightedSpace s;
  s.base_ = std::move(base);
  s.weighting_ = weighting;
  s.spec_ = spec;
  s.row_ptr_ = std::move(row_ptr);
  s.col_ids_ = std::move(col_ids);
  s.values_ = std::move(values);
  if (s.row_ptr_.size() != s.base_.num_targets() + 1 ||
      s.row_ptr_.front() != 0 || s.row_ptr_.back() != s.col_ids_.size() ||
      s.col_ids_.size() != s.values_.size())
    throw CorruptSpaceError("inconsistent weighted matrix structure");
  for (std::size_t t = 0; t < s.base_.num_targets(); ++t) {
    std::uint32_t prev = 0;
    bool first = true;
    for (std::uint64_t i = s.row_ptr_[t]; i < s.row_ptr_[t + 1]; ++i) {
      if (s.col_ids_[i] >= s.base_.num_contexts() ||
          (!first && s.col_ids_[i] <= prev))
        throw CorruptSpaceError("weighted row ids not sorted or out of range");
      if (!(s.values_[i] > 0.0) || !std::isfinite(s.values_[i]))
        throw CorruptSpaceError("nonpositive weighted value stored");
      prev = s.col_ids_[i];
      first = false;
    }
  }
  s.build_row_caches(1);
  return s;
}

void WeightedSpace::build_row_caches(unsigned jobs) {
  const std::size_t rows = base_.num_targets();
  row_value_sum_.assign(rows, 0.0);
  row_sumsq_.assign(rows, 0.0);
  parallel_for(rows, jobs, [&](std::size_t t) {
    const auto& k = kernels::active();
    const double* v = values_.data() + row_ptr_[t];
    const std::size_t n = row_ptr_[t + 1] - row_ptr_[t];
    row_value_sum_[t] = k.sum(v, n);
    row_sumsq_[t] = k.dot(v, v, n);
  });
}

std::size_t WeightedSpace::row_size(std::uint32_t t) const {
  return row_ptr_[t + 1] - row_ptr_[t];
}

std::span<const std::uint32_t> WeightedSpace::row_contexts(
    std::uint32_t t) const {
  return {col_ids_.data() + row_ptr_[t], col_ids_.data() + row_ptr_[t + 1]};
}

std::span<const double> WeightedSpace::row_values(std::uint32_t t) const {
  return {values_.data() + row_ptr_[t], values_.data() + row_ptr_[t + 1]};
}

double WeightedSpace::value(std::uint32_t t, std::uint32_t c) const {
  auto ids = row_contexts(t);
  auto it = std::lower_bound(ids.begin(), ids.end(), c);
  if (it == ids.end() || *it != c) return 0.0;
  return values_[row_ptr_[t] + (it - ids.begin())];
}

bool WeightedSpace::has_context(std::uint32_t t, std::uint32_t c) const {
  auto ids = row_contexts(t);
  return std::binary_search(ids.begin(), ids.end(), c);
}

std::vector<std::uint32_t> WeightedSpace::ranked_contexts(
    std::uint32_t t) const {
  auto ids = row_contexts(t);
  auto vals = row_values(t);
  std::vector<std::uint32_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (vals[a] != vals[b]) return vals[a] > vals[b];
    return ids[a] < ids[b];
  });
  std::vector<std::uint32_t> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = ids[order[i]];
  return out;
}

double WeightedSpace::sort_value(std::uint32_t t, std::size_t idx,
                                 Weighting sort_weighting) const {
  if (sort_weighting == weighting_) return values_[row_ptr_[t] + idx];
  const std::uint32_t c = col_ids_[row_ptr_[t] + idx];
  const double cnt = static_cast<double>(base_.count(t, c));
  if (sort_weighting == Weighting::freq) return cnt;
  const double pmi =
      std::log2((cnt * static_cast<double>(base_.total())) /
                (static_cast<double>(base_.row_sums()[t]) *
                 static_cast<double>(base_.col_sums()[c])));
  const double ppmi = pmi > 0.0 ? pmi : 0.0;
  return sort_weighting == Weighting::ppmi ? ppmi : cnt * ppmi;
}

std::vector<std::uint32_t> WeightedSpace::top_contexts(
    std::uint32_t t, std::size_t n, Weighting sort_weighting) const {
  const std::size_t size = row_size(t);
  if (size == 0)
    throw EmptyRowError("target '" + base_.vocabulary().item(t) +
                        "' has no contexts in the weighted space");
  auto ids = row_contexts(t);
  std::vector<double> keys(size);
  for (std::size_t i = 0; i < size; ++i)
    keys[i] = sort_value(t, i, sort_weighting);
  std::vector<std::uint32_t> order(size);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    return ids[a] < ids[b];
  });
  if (n < order.size()) order.resize(n);
  std::vector<std::uint32_t> out(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[i] = ids[order[i]];
  return out;
}

bool WeightedSpace::operator==(const WeightedSpace& other) const {
  return base_ == other.base_ && weighting_ == other.weighting_ &&
         spec_.kind == other.spec_.kind &&
         spec_.window_size == other.spec_.window_size &&
         spec_.directional == other.spec_.directional &&
         row_ptr_ == other.row_ptr_ && col_ids_ == other.col_ids_ &&
         values_ == other.values_;
}

AuxPmiTable AuxPmiTable::build(const CooccurrenceMatrix& word_word) {
  AuxPmiTable t;
  t.vocab_ = word_word.vocabulary();
  const std::size_t rows = t.vocab_.size();
  t.row_ptr_.assign(rows + 1, 0);
  const double total = static_cast<double>(word_word.total());
  for (std::size_t a = 0; a < rows; ++a) {
    auto ctxs = word_word.row_contexts(a);
    auto cnts = word_word.row_counts(a);
    std::vector<std::pair<std::uint32_t, double>> cells;
    cells.reserve(ctxs.size());
    for (std::size_t i = 0; i < ctxs.size(); ++i) {
      auto wid = t.vocab_.id(word_word.context(ctxs[i]));
      if (!wid) continue;  // context string is not a vocabulary item
      const double pmi =
          std::log2((static_cast<double>(cnts[i]) * total) /
                    (static_cast<double>(word_word.row_sums()[a]) *
                     static_cast<double>(word_word.col_sums()[ctxs[i]])));
      cells.emplace_back(*wid, pmi);
    }
    std::sort(cells.begin(), cells.end());
    for (const auto& [w, p] : cells) {
      t.col_ids_.push_back(w);
      t.values_.push_back(p);
    }
    t.row_ptr_[a + 1] = t.col_ids_.size();
  }
  return t;
}

AuxPmiTable AuxPmiTable::from_entries(
    const Vocabulary& vocab,
    const std::vector<std::tuple<std::string, std::string, double>>& entries) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(vocab.size());
  for (const auto& [a, b, p] : entries) {
    auto ia = vocab.id(a), ib = vocab.id(b);
    if (!ia || !ib) throw FormatError("aux entry word not in vocabulary");
    rows[*ia].emplace_back(*ib, p);
    if (*ia != *ib) rows[*ib].emplace_back(*ia, p);
  }
  AuxPmiTable t;
  t.vocab_ = vocab;
  t.row_ptr_.assign(vocab.size() + 1, 0);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    std::sort(rows[a].begin(), rows[a].end());
    for (const auto& [w, p] : rows[a]) {
      t.col_ids_.push_back(w);
      t.values_.push_back(p);
    }
    t.row_ptr_[a + 1] = t.col_ids_.size();
  }
  return t;
}

AuxPmiTable AuxPmiTable::from_parts(Vocabulary vocab,
                                    std::vector<std::uint64_t> row_ptr,
                                    std::vector<std::uint32_t> col_ids,
                                    std::vector<double> values) {
  AuxPmiTable t;
  t.vocab_ = std::move(vocab);
  t.row_ptr_ = std::move(row_ptr);
  t.col_ids_ = std::move(col_ids);
  t.values_ = std::move(values);
  if (t.row_ptr_.size() != t.vocab_.size() + 1 || t.row_ptr_.front() != 0 ||
      t.row_ptr_.back() != t.col_ids_.size() ||
      t.col_ids_.size() != t.values_.size())
    throw CorruptSpaceError("inconsistent auxiliary table structure");
  return t;
}

std::optional<double> AuxPmiTable::pmi(std::uint32_t a, std::uint32_t b) const {
  if (a >= vocab_.size()) return std::nullopt;
  const std::uint32_t* begin = col_ids_.data() + row_ptr_[a];
  const std::uint32_t* end = col_ids_.data() + row_ptr_[a + 1];
  auto it = std::lower_bound(begin, end, b);
  if (it == end || *it != b) return std::nullopt;
  return values_[row_ptr_[a] + (it - begin)];
}

bool AuxPmiTable::operator==(const AuxPmiTable& other) const {
  return vocab_ == other.vocab_ && row_ptr_ == other.row_ptr_ &&
         col_ids_ == other.col_ids_ && values_ == other.values_;
}

}  // namespace hyperdist
