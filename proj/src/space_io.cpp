#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>

#include "hyperdist/errors.hpp"
#include "hyperdist/space.hpp"

namespace hyperdist {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary format assumes a little-endian host");

constexpr char kSpaceMagic[8] = {'H', 'D', 'S', 'P', 'A', 'C', 'E', '1'};
constexpr char kAuxMagic[8] = {'H', 'D', 'A', 'U', 'X', 'P', 'M', '1'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void i32(std::int32_t v) { raw(&v, 4); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  const std::string& buffer() const { return buf_; }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  void raw(void* p, std::size_t n) {
    if (pos_ + n > data_.size())
      throw CorruptSpaceError("unexpected end of file");
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, 8);
    return v;
  }
  std::int32_t i32() {
    std::int32_t v;
    raw(&v, 4);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    if (pos_ + n > data_.size())
      throw CorruptSpaceError("unexpected end of file");
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_vocab(ByteWriter& w, const Vocabulary& v) {
  w.u64(v.size());
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    w.str(v.item(i));
    w.u64(v.frequency(i));
  }
}

Vocabulary read_vocab(ByteReader& r) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t n = r.u64();
  counts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string item = r.str();
    std::uint64_t freq = r.u64();
    counts[std::move(item)] = freq;
  }
  Vocabulary v = Vocabulary::from_counts(counts, 1);
  if (v.size() != n)
    throw CorruptSpaceError("vocabulary block contains invalid items");
  return v;
}

void write_file(const std::string& path, const ByteWriter& w) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(w.buffer().data(),
            static_cast<std::streamsize>(w.buffer().size()));
  std::uint64_t sum = fnv1a(w.buffer());
  out.write(reinterpret_cast<const char*>(&sum), 8);
  if (!out) throw IoError("write failed: " + path);
}

std::string read_checked(const std::string& path, const char (&magic)[8]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  if (data.size() < 20) throw CorruptSpaceError("file too short: " + path);
  if (std::memcmp(data.data(), magic, 8) != 0)
    throw CorruptSpaceError("bad magic bytes (not the expected file type): " +
                            path);
  std::string_view payload(data.data(), data.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, data.data() + data.size() - 8, 8);
  if (fnv1a(payload) != stored)
    throw CorruptSpaceError("checksum mismatch: " + path);
  return data.substr(0, data.size() - 8);
}

std::uint32_t check_version(ByteReader& r) {
  std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw CorruptSpaceError("unsupported format version " +
                            std::to_string(version));
  return version;
}

void write_spec(ByteWriter& w, const ContextSpec& spec) {
  w.u8(static_cast<std::uint8_t>(spec.kind));
  w.i32(spec.window_size);
  w.u8(spec.directional ? 1 : 0);
}

ContextSpec read_spec(ByteReader& r) {
  ContextSpec spec;
  std::uint8_t kind = r.u8();
  if (kind > 2) throw CorruptSpaceError("invalid context kind");
  spec.kind = static_cast<ContextKind>(kind);
  spec.window_size = r.i32();
  spec.directional = r.u8() != 0;
  return spec;
}

}  // namespace

void save_space(const WeightedSpace& space, const std::string& path) {
  ByteWriter w;
  w.raw(kSpaceMagic, 8);
  w.u32(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(space.weighting()));
  write_spec(w, space.context_spec());
  const CooccurrenceMatrix& base = space.base();
  write_vocab(w, base.vocabulary());
  w.u64(base.num_contexts());
  for (const auto& c : base.contexts()) w.str(c);
  for (std::uint64_t p : base.row_ptr()) w.u64(p);
  for (std::uint32_t c : base.col_ids()) w.u32(c);
  for (std::uint64_t n : base.counts()) w.u64(n);
  for (std::uint64_t p : space.row_ptr()) w.u64(p);
  for (std::uint32_t c : space.col_ids()) w.u32(c);
  for (double v : space.values()) w.f64(v);
  write_file(path, w);
}

WeightedSpace load_space(const std::string& path) {
  std::string data = read_checked(path, kSpaceMagic);
  ByteReader r(std::string_view(data).substr(8));
  check_version(r);
  std::uint8_t wt = r.u8();
  if (wt > 2) throw CorruptSpaceError("invalid weighting code");
  Weighting weighting = static_cast<Weighting>(wt);
  ContextSpec spec = read_spec(r);
  Vocabulary vocab = read_vocab(r);
  std::uint64_t num_ctx = r.u64();
  std::vector<std::string> contexts;
  contexts.reserve(num_ctx);
  for (std::uint64_t i = 0; i < num_ctx; ++i) contexts.push_back(r.str());

  auto read_row_ptr = [&](std::size_t rows) {
    std::vector<std::uint64_t> p(rows + 1);
    for (auto& v : p) v = r.u64();
    return p;
  };
  std::vector<std::uint64_t> base_ptr = read_row_ptr(vocab.size());
  std::uint64_t nnz = base_ptr.empty() ? 0 : base_ptr.back();
  std::vector<std::uint32_t> base_cols(nnz);
  for (auto& v : base_cols) v = r.u32();
  std::vector<std::uint64_t> base_counts(nnz);
  for (auto& v : base_counts) v = r.u64();
  CooccurrenceMatrix base = CooccurrenceMatrix::from_parts(
      std::move(vocab), std::move(contexts), std::move(base_ptr),
      std::move(base_cols), std::move(base_counts));

  std::vector<std::uint64_t> wptr = read_row_ptr(base.num_targets());
  std::uint64_t wnnz = wptr.empty() ? 0 : wptr.back();
  std::vector<std::uint32_t> wcols(wnnz);
  for (auto& v : wcols) v = r.u32();
  std::vector<double> wvals(wnnz);
  for (auto& v : wvals) v = r.f64();
  if (!r.done()) throw CorruptSpaceError("trailing bytes after space data");
  return WeightedSpace::from_parts(std::move(base), weighting, spec,
                                   std::move(wptr), std::move(wcols),
                                   std::move(wvals));
}

void save_aux_pmi(const AuxPmiTable& table, const std::string& path) {
  ByteWriter w;
  w.raw(kAuxMagic, 8);
  w.u32(kFormatVersion);
  write_vocab(w, table.vocabulary());
  for (std::uint64_t p : table.row_ptr()) w.u64(p);
  for (std::uint32_t c : table.col_ids()) w.u32(c);
  for (double v : table.values()) w.f64(v);
  write_file(path, w);
}

AuxPmiTable load_aux_pmi(const std::string& path) {
  std::string data = read_checked(path, kAuxMagic);
  ByteReader r(std::string_view(data).substr(8));
  check_version(r);
  Vocabulary vocab = read_vocab(r);
  std::vector<std::uint64_t> ptr(vocab.size() + 1);
  for (auto& v : ptr) v = r.u64();
  std::uint64_t nnz = ptr.back();
  std::vector<std::uint32_t> cols(nnz);
  for (auto& v : cols) v = r.u32();
  std::vector<double> vals(nnz);
  for (auto& v : vals) v = r.f64();
  if (!r.done())
    throw CorruptSpaceError("trailing bytes after auxiliary table data");
  return AuxPmiTable::from_parts(std::move(vocab), std::move(ptr),
                                 std::move(cols), std::move(vals));
}

void export_text(const WeightedSpace& space, std::ostream& out) {
  const CooccurrenceMatrix& base = space.base();
  char num[64];
  for (std::uint32_t t = 0; t < base.num_targets(); ++t) {
    auto ids = space.row_contexts(t);
    auto vals = space.row_values(t);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (space.weighting() == Weighting::freq)
        std::snprintf(num, sizeof num, "%llu",
                      static_cast<unsigned long long>(vals[i]));
      else
        std::snprintf(num, sizeof num, "%.17g", vals[i]);
      out << base.vocabulary().item(t) << '\t' << base.context(ids[i]) << '\t'
          << num << '\n';
    }
  }
}

}  // namespace hyperdist
