#include "hyperdist/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hyperdist::kernels {

namespace {

double scalar_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double scalar_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double scalar_min_sum(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::min(x[i], y[i]);
  return acc;
}

double scalar_xlog2x_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] != 0.0) acc += x[i] * std::log2(x[i]);
  }
  return acc;
}

void scalar_log2_array(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log2(x[i]);
}

const Ops kScalar = {
    "scalar",         scalar_sum,        scalar_dot,
    scalar_min_sum,   scalar_xlog2x_sum, scalar_log2_array,
};

const Ops* pick_default() {
  if (const char* env = std::getenv("HYPERDIST_KERNELS")) {
    std::string_view want(env);
    if (want == "scalar") return &kScalar;
    if (want == "avx2") {
      if (const Ops* a = avx2_ops()) return a;
      throw std::runtime_error("HYPERDIST_KERNELS=avx2 but AVX2 is unavailable");
    }
    if (!want.empty())
      throw std::runtime_error("unknown HYPERDIST_KERNELS backend: " + std::string(want));
  }
  if (const Ops* a = avx2_ops()) return a;
  return &kScalar;
}

const Ops*& active_slot() {
  static const Ops* slot = pick_default();
  return slot;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

bool avx2_available() { return avx2_ops() != nullptr; }

const Ops& active() { return *active_slot(); }

void force_backend(std::string_view name) {
  if (name == "scalar") {
    active_slot() = &kScalar;
    return;
  }
  if (name == "avx2") {
    if (const Ops* a = avx2_ops()) {
      active_slot() = a;
      return;
    }
    throw std::runtime_error("AVX2 backend unavailable on this CPU/build");
  }
  throw std::runtime_error("unknown kernel backend: " + std::string(name));
}

#if !defined(HYPERDIST_HAVE_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif

}  // namespace hyperdist::kernels
