#pragma once

// Shared helpers for the test binaries: fixture lookup, temp dirs, tiny
// file/string utilities and convenient space construction.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperdist/space.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    const char* dir = std::getenv("HYPERDIST_FIXTURES");
    if (dir && *dir) return std::string(dir) + "/" + name;
    // Fallbacks for running a test binary by hand from the repository root
    // or from the build directory.
    for (const char* prefix : {"tests/fixtures/", "../tests/fixtures/"}) {
        std::string candidate = prefix + name;
        if (std::ifstream(candidate).good()) return candidate;
    }
    return std::string("tests/fixtures/") + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Unique scratch directory removed on destruction.
class TempDir {
  public:
    TempDir() {
        namespace fs = std::filesystem;
        const fs::path base = fs::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            fs::path candidate = base / ("hyperdist_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter_++));
            std::error_code ec;
            if (fs::create_directory(candidate, ec)) {
                path_ = candidate.string();
                return;
            }
        }
        path_ = (base / "hyperdist_test_fallback").string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

  private:
    static inline int counter_ = 0;
    std::string path_;
};

// Vocabulary over explicit items (each must end in -n/-v/-a), frequency 1000.
inline hyperdist::Vocabulary make_vocab(const std::vector<std::string>& items,
                                        std::uint64_t freq = 1000) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& item : items) counts[item] = freq;
    return hyperdist::Vocabulary::from_counts(counts, 1);
}

// Builds a CooccurrenceMatrix from (target item, context string, count)
// triples via the accumulator, so ids come out canonicalized.
inline hyperdist::CooccurrenceMatrix make_matrix(
    const std::vector<std::string>& vocab_items,
    const std::vector<std::tuple<std::string, std::string, std::uint64_t>>& cells) {
    hyperdist::Vocabulary vocab = make_vocab(vocab_items);
    hyperdist::CoocAccumulator acc(vocab);
    for (const auto& [target, context, count] : cells) {
        auto id = vocab.id(target);
        for (std::uint64_t i = 0; i < count; ++i) acc.add({*id, context});
    }
    return std::move(acc).finalize();
}

// Weighted space (default: freq weighting so values equal the given counts).
inline hyperdist::WeightedSpace make_space(
    const std::vector<std::string>& vocab_items,
    const std::vector<std::tuple<std::string, std::string, std::uint64_t>>& cells,
    hyperdist::Weighting weighting = hyperdist::Weighting::freq,
    hyperdist::ContextSpec spec = {}) {
    return hyperdist::WeightedSpace::build(make_matrix(vocab_items, cells), weighting, spec);
}

}  // namespace testutil
