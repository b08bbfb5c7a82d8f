#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define RELU2_X86 1
#else
#define RELU2_X86 0
#endif

namespace relu2::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_squares_scalar(const double* a, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double weighted_squared_error_scalar(const double* p, const double* y, const double* w,
                                     std::size_t n);
void relu_accumulate_scalar(double a, const double* p, double* acc, std::size_t n);

#if RELU2_X86

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

__attribute__((target("avx2,fma"))) double dot_avx2(const double* a, const double* b,
                                                    std::size_t n) {
  std::size_t i = 0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

__attribute__((target("avx2,fma"))) double sum_squares_avx2(const double* a, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

__attribute__((target("avx2,fma"))) void axpy_avx2(double alpha, const double* x, double* y,
                                                   std::size_t n) {
  std::size_t i = 0;
  const __m256d va = _mm256_set1_pd(alpha);
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2,fma"))) double weighted_squared_error_avx2(const double* p,
                                                                       const double* y,
                                                                       const double* w,
                                                                       std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_sub_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r), r, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = p[i] - y[i];
    s += w[i] * r * r;
  }
  return s;
}

__attribute__((target("avx2,fma"))) void relu_accumulate_avx2(double a, const double* p,
                                                              double* acc, std::size_t n) {
  std::size_t i = 0;
  const __m256d va = _mm256_set1_pd(a);
  const __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_max_pd(_mm256_loadu_pd(p + i), zero);
    __m256d out = _mm256_fmadd_pd(va, v, _mm256_loadu_pd(acc + i));
    _mm256_storeu_pd(acc + i, out);
  }
  for (; i < n; ++i) acc[i] += a * (p[i] > 0.0 ? p[i] : 0.0);
}

#else  // non-x86: route everything to the scalar reference

bool cpu_has_avx2() { return false; }

double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
double sum_squares_avx2(const double* a, std::size_t n) { return sum_squares_scalar(a, n); }
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  axpy_scalar(alpha, x, y, n);
}
double weighted_squared_error_avx2(const double* p, const double* y, const double* w,
                                   std::size_t n) {
  return weighted_squared_error_scalar(p, y, w, n);
}
void relu_accumulate_avx2(double a, const double* p, double* acc, std::size_t n) {
  relu_accumulate_scalar(a, p, acc, n);
}

#endif

}  // namespace relu2::kernels::detail
