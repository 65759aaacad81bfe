#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperdist/corpus.hpp"

namespace hyperdist {

enum class Weighting { freq, ppmi, plmi };

Weighting parse_weighting(std::string_view text);  // throws FormatError
std::string_view weighting_name(Weighting w);

// Sparse target×context count matrix in CSR form. Rows are vocabulary ids,
// columns are context ids assigned in lexicographic order of the context
// string. All stored counts are positive. Entropies are computed from these
// raw counts in bits, independently of any weighting applied later.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix() = default;

  // Validates structure (sorted rows, positive counts, ids in range) and
  // computes marginals and entropy caches.
  static CooccurrenceMatrix from_parts(Vocabulary vocab,
                                       std::vector<std::string> contexts,
                                       std::vector<std::uint64_t> row_ptr,
                                       std::vector<std::uint32_t> col_ids,
                                       std::vector<std::uint64_t> counts);

  std::size_t num_targets() const { return vocab_.size(); }
  std::size_t num_contexts() const { return contexts_.size(); }
  std::uint64_t total() const { return total_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<std::string>& contexts() const { return contexts_; }
  const std::string& context(std::uint32_t c) const { return contexts_[c]; }
  std::optional<std::uint32_t> context_id(std::string_view ctx) const;

  std::span<const std::uint32_t> row_contexts(std::uint32_t t) const;
  std::span<const std::uint64_t> row_counts(std::uint32_t t) const;
  std::uint64_t count(std::uint32_t t, std::uint32_t c) const;  // 0 if absent
  const std::vector<std::uint64_t>& row_sums() const { return row_sums_; }
  const std::vector<std::uint64_t>& col_sums() const { return col_sums_; }
  const std::vector<std::uint64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_ids() const { return col_ids_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // H(c) over p(w|c), bits. normalized divides by log2 of the column's
  // support size (0 when the support is a single cell). Throws
  // UnknownContextError for an id out of range or an unseen string.
  double context_entropy(std::uint32_t c, bool normalized = false) const;
  double context_entropy(std::string_view ctx, bool normalized = false) const;
  // H(t) over p(c|t), bits; same normalization rule over the row support.
  double row_entropy(std::uint32_t t, bool normalized = false) const;
  std::uint64_t col_support(std::uint32_t c) const { return col_support_[c]; }
  std::size_t row_size(std::uint32_t t) const;

  bool operator==(const CooccurrenceMatrix& other) const;

 private:
  Vocabulary vocab_;
  std::vector<std::string> contexts_;
  std::unordered_map<std::string, std::uint32_t> context_index_;
  std::vector<std::uint64_t> row_ptr_;  // size num_targets()+1
  std::vector<std::uint32_t> col_ids_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> row_sums_, col_sums_;
  std::uint64_t total_ = 0;
  // Σ count·log2(count) per row/column, for entropy queries.
  std::vector<double> row_xlogx_, col_xlogx_;
  std::vector<std::uint64_t> col_support_;
};

// Builds a CooccurrenceMatrix from co-occurrence events. Context ids are
// provisional during accumulation and canonicalized when finalizing, so any
// shard split followed by merge() yields the same matrix as a single pass.
class CoocAccumulator {
 public:
  explicit CoocAccumulator(Vocabulary vocab);

  void add(const CoocEvent& event);
  void add(const std::vector<CoocEvent>& events);
  void merge(CoocAccumulator&& other);
  std::uint64_t total() const { return total_; }

  CooccurrenceMatrix finalize() &&;

 private:
  std::uint32_t intern(const std::string& ctx);

  Vocabulary vocab_;
  std::unordered_map<std::string, std::uint32_t> ctx_index_;
  std::vector<std::string> ctx_strings_;
  std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> rows_;
  std::uint64_t total_ = 0;
};

// A count matrix with a feature weighting applied. PPMI and PLMI drop cells
// whose weighted value is zero, so the weighted sparsity pattern can be a
// strict subset of the base pattern; freq keeps counts as-is.
class WeightedSpace {
 public:
  WeightedSpace() = default;

  // Throws DegenerateSpaceError for ppmi/plmi over an empty matrix.
  static WeightedSpace build(CooccurrenceMatrix base, Weighting weighting,
                             ContextSpec spec, unsigned jobs = 1);

  const CooccurrenceMatrix& base() const { return base_; }
  Weighting weighting() const { return weighting_; }
  const ContextSpec& context_spec() const { return spec_; }

  std::size_t row_size(std::uint32_t t) const;
  std::span<const std::uint32_t> row_contexts(std::uint32_t t) const;
  std::span<const double> row_values(std::uint32_t t) const;
  double value(std::uint32_t t, std::uint32_t c) const;  // 0 if absent
  bool has_context(std::uint32_t t, std::uint32_t c) const;
  double row_value_sum(std::uint32_t t) const { return row_value_sum_[t]; }
  double row_sumsq(std::uint32_t t) const { return row_sumsq_[t]; }
  const std::vector<std::uint64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_ids() const { return col_ids_; }
  const std::vector<double>& values() const { return values_; }

  // Contexts of t sorted by this space's values descending, ties by
  // ascending context id; rank(c) is the 1-based position.
  std::vector<std::uint32_t> ranked_contexts(std::uint32_t t) const;
  // First min(n, row size) contexts ordered by the given sort weighting
  // (computed from raw counts when it differs from this space's weighting).
  // Throws EmptyRowError when the row has no contexts.
  std::vector<std::uint32_t> top_contexts(std::uint32_t t, std::size_t n,
                                          Weighting sort_weighting) const;

  bool operator==(const WeightedSpace& other) const;

  // Used by the serializer; pattern must be row-sorted and value-aligned.
  static WeightedSpace from_parts(CooccurrenceMatrix base, Weighting weighting,
                                  ContextSpec spec,
                                  std::vector<std::uint64_t> row_ptr,
                                  std::vector<std::uint32_t> col_ids,
                                  std::vector<double> values);

 private:
  double sort_value(std::uint32_t t, std::size_t idx,
                    Weighting sort_weighting) const;
  void build_row_caches(unsigned jobs);

  CooccurrenceMatrix base_;
  Weighting weighting_ = Weighting::freq;
  ContextSpec spec_;
  std::vector<std::uint64_t> row_ptr_;
  std::vector<std::uint32_t> col_ids_;
  std::vector<double> values_;
  std::vector<double> row_value_sum_, row_sumsq_;
};

// Word-word PMI lookups for topic coherence. Built from an auxiliary
// indirectional window co-occurrence matrix whose contexts are vocabulary
// items; unobserved pairs have no entry. Values may be negative (real PMI,
// not clamped).
class AuxPmiTable {
 public:
  AuxPmiTable() = default;

  static AuxPmiTable build(const CooccurrenceMatrix& word_word);
  // Test helper: explicit symmetric entries (a, b, pmi) over a vocabulary.
  static AuxPmiTable from_entries(
      const Vocabulary& vocab,
      const std::vector<std::tuple<std::string, std::string, double>>& entries);

  std::optional<double> pmi(std::uint32_t a, std::uint32_t b) const;
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<std::uint64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_ids() const { return col_ids_; }
  const std::vector<double>& values() const { return values_; }

  static AuxPmiTable from_parts(Vocabulary vocab,
                                std::vector<std::uint64_t> row_ptr,
                                std::vector<std::uint32_t> col_ids,
                                std::vector<double> values);

  bool operator==(const AuxPmiTable& other) const;

 private:
  Vocabulary vocab_;
  std::vector<std::uint64_t> row_ptr_;
  std::vector<std::uint32_t> col_ids_;
  std::vector<double> values_;
};

// Versioned, checksummed binary round trip. Loading validates magic bytes,
// format version, checksum and structure; failures throw CorruptSpaceError.
void save_space(const WeightedSpace& space, const std::string& path);
WeightedSpace load_space(const std::string& path);
void save_aux_pmi(const AuxPmiTable& table, const std::string& path);
AuxPmiTable load_aux_pmi(const std::string& path);

// Plain-text export: "target TAB context TAB value", rows by target id then
// context id; freq values print as integers.
void export_text(const WeightedSpace& space, std::ostream& out);

}  // namespace hyperdist
