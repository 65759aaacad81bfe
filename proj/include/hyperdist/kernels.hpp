#pragma once

#include <cstddef>
#include <string_view>

namespace hyperdist::kernels {

// Reduction/transform kernels over contiguous double arrays. These are the
// arithmetic inner loops of space weighting, entropy computation and the
// sparse-vector measures. A scalar reference implementation always exists;
// an AVX2 variant is selected at runtime when the CPU supports it.
//
// Within one backend the kernels share the same accumulation structure, so
// identities like min_sum(x, x) == sum(x) and dot(x, x) == sumsq(x) hold
// bit-exactly. Across backends results agree only up to rounding; the
// equivalence tests pin the tolerance.
struct Ops {
  const char* name;
  // sum of x[0..n)
  double (*sum)(const double* x, std::size_t n);
  // inner product of x and y
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum of min(x[i], y[i])
  double (*min_sum)(const double* x, const double* y, std::size_t n);
  // sum of x[i] * log2(x[i]), with the 0 * log2(0) = 0 convention
  double (*xlog2x_sum)(const double* x, std::size_t n);
  // out[i] = log2(x[i]); x and out may alias
  void (*log2_array)(const double* x, double* out, std::size_t n);
};

const Ops& scalar_ops();

// AVX2 variant; nullptr when not compiled in or not supported by this CPU.
const Ops* avx2_ops();
bool avx2_available();

// Backend in use. Defaults to AVX2 when available, scalar otherwise; the
// HYPERDIST_KERNELS environment variable ("scalar" or "avx2") overrides.
const Ops& active();

// Test hook. Not thread safe; call before any spaces are built so cached
// row statistics and later per-call reductions use the same backend.
void force_backend(std::string_view name);

inline double sumsq(const Ops& k, const double* x, std::size_t n) {
  return k.dot(x, x, n);
}

}  // namespace hyperdist::kernels
