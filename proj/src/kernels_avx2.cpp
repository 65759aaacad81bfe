// AVX2 kernel variants. Compiled with -mavx2 -mfma and dispatched at runtime,
// so nothing here may run before avx2_ops() has checked CPU support.

#include "hyperdist/kernels.hpp"

#if defined(HYPERDIST_HAVE_AVX2)

#include <immintrin.h>

#include <cfloat>
#include <cmath>

namespace hyperdist::kernels {

namespace {

inline double hreduce(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

double avx2_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double total = hreduce(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double avx2_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double total = hreduce(acc);
  for (; i < n; ++i) total = std::fma(x[i], y[i], total);
  return total;
}

double avx2_min_sum(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d m = _mm256_min_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, m);
  }
  double total = hreduce(acc);
  for (; i < n; ++i) total += std::min(x[i], y[i]);
  return total;
}

// log2 over strictly positive normal finite lanes. Range reduction to
// m in [sqrt(1/2), sqrt(2)), then the atanh series for log2(m):
//   t = (m-1)/(m+1),  log2(m) = 2/ln2 * t * (1 + t^2/3 + t^4/5 + ...)
// |t| <= 3 - 2*sqrt(2) ~ 0.1716, so terms through t^16/17 put the
// truncation error below 1e-15 relative.
inline __m256d log2_core(__m256d x) {
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256i bits = _mm256_castpd_si256(x);
  __m256i biased = _mm256_srli_epi64(bits, 52);
  // biased exponents are small positive ints; narrow to i32 and convert.
  __m256i packed = _mm256_permutevar8x32_epi32(
      biased, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0));
  __m256d e = _mm256_cvtepi32_pd(_mm256_castsi256_si128(packed));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  __m256d gt = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), gt);
  e = _mm256_add_pd(e, _mm256_and_pd(gt, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d t2 = _mm256_mul_pd(t, t);

  __m256d p = _mm256_set1_pd(1.0 / 17.0);
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(1.0 / 3.0));
  p = _mm256_fmadd_pd(p, t2, one);

  const __m256d two_over_ln2 = _mm256_set1_pd(2.8853900817779268);
  __m256d lt = _mm256_mul_pd(_mm256_mul_pd(two_over_ln2, t), p);
  return _mm256_add_pd(e, lt);
}

// Zero, negative, denormal, inf and NaN lanes fall back to std::log2.
inline __m256d vlog2_checked(__m256d x) {
  __m256d ge = _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MIN), _CMP_GE_OQ);
  __m256d inf = _mm256_cmp_pd(x, _mm256_set1_pd(HUGE_VAL), _CMP_EQ_OQ);
  int okm = _mm256_movemask_pd(ge) & ~_mm256_movemask_pd(inf);
  __m256d r = log2_core(x);
  if (okm != 0xF) {
    alignas(32) double xx[4], rr[4];
    _mm256_store_pd(xx, x);
    _mm256_store_pd(rr, r);
    for (int j = 0; j < 4; ++j)
      if (!(okm & (1 << j))) rr[j] = std::log2(xx[j]);
    r = _mm256_load_pd(rr);
  }
  return r;
}

double avx2_xlog2x_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d term = _mm256_mul_pd(v, vlog2_checked(v));
    __m256d is_zero = _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_EQ_OQ);
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(is_zero, term));
  }
  double total = hreduce(acc);
  for (; i < n; ++i) {
    if (x[i] != 0.0) total += x[i] * std::log2(x[i]);
  }
  return total;
}

void avx2_log2_array(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, vlog2_checked(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = std::log2(x[i]);
}

const Ops kAvx2 = {
    "avx2",       avx2_sum,        avx2_dot,
    avx2_min_sum, avx2_xlog2x_sum, avx2_log2_array,
};

}  // namespace

const Ops* avx2_ops() {
  static const Ops* ops = __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
  return ops;
}

}  // namespace hyperdist::kernels

#endif  // HYPERDIST_HAVE_AVX2
