#include "chainrg/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace chainrg::kernels {

namespace {

inline void neumaier(double& s, double& c, double x) {
  const double t = s + x;
  if (std::fabs(s) >= std::fabs(x))
    c += (s - t) + x;
  else
    c += (x - t) + s;
  s = t;
}

inline double merge_lanes(const double* s, const double* c) {
  double S = 0.0, C = 0.0;
  for (int l = 0; l < 4; ++l) neumaier(S, C, s[l]);
  for (int l = 0; l < 4; ++l) neumaier(S, C, c[l]);
  return S + C;
}

__attribute__((target("avx2"))) inline void neumaier4(__m256d& s, __m256d& c, __m256d x) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d t = _mm256_add_pd(s, x);
  const __m256d big = _mm256_cmp_pd(_mm256_and_pd(s, absmask), _mm256_and_pd(x, absmask), _CMP_GE_OQ);
  const __m256d d1 = _mm256_add_pd(_mm256_sub_pd(s, t), x);
  const __m256d d2 = _mm256_add_pd(_mm256_sub_pd(x, t), s);
  c = _mm256_add_pd(c, _mm256_blendv_pd(d2, d1, big));
  s = t;
}

Isa g_isa = detected_isa();

}  // namespace

Isa detected_isa() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") ? Isa::Avx2 : Isa::Scalar;
}

Isa active_isa() { return g_isa; }

void set_isa(Isa isa) { g_isa = (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) ? Isa::Scalar : isa; }

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s[4] = {0, 0, 0, 0}, c[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < n; ++j) neumaier(s[j & 3], c[j & 3], a[j] * b[j]);
  return merge_lanes(s, c);
}

__attribute__((target("avx2"))) double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d vs = _mm256_setzero_pd(), vc = _mm256_setzero_pd();
  const std::size_t body = n & ~std::size_t(3);
  for (std::size_t j = 0; j < body; j += 4)
    neumaier4(vs, vc, _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
  alignas(32) double s[4], c[4];
  _mm256_store_pd(s, vs);
  _mm256_store_pd(c, vc);
  for (std::size_t j = body; j < n; ++j) neumaier(s[j & 3], c[j & 3], a[j] * b[j]);
  return merge_lanes(s, c);
}

double dot(const double* a, const double* b, std::size_t n) {
  return g_isa == Isa::Avx2 ? dot_avx2(a, b, n) : dot_scalar(a, b, n);
}

std::complex<double> cdot_scalar(const double* ar, const double* ai, const double* br,
                                 const double* bi, std::size_t n) {
  double sr[4] = {0, 0, 0, 0}, cr[4] = {0, 0, 0, 0};
  double si[4] = {0, 0, 0, 0}, ci[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < n; ++j) {
    const double p = ar[j] * br[j], q = ai[j] * bi[j];
    const double u = ar[j] * bi[j], w = ai[j] * br[j];
    neumaier(sr[j & 3], cr[j & 3], p - q);
    neumaier(si[j & 3], ci[j & 3], u + w);
  }
  return {merge_lanes(sr, cr), merge_lanes(si, ci)};
}

__attribute__((target("avx2"))) std::complex<double> cdot_avx2(const double* ar, const double* ai,
                                                               const double* br, const double* bi,
                                                               std::size_t n) {
  __m256d vsr = _mm256_setzero_pd(), vcr = _mm256_setzero_pd();
  __m256d vsi = _mm256_setzero_pd(), vci = _mm256_setzero_pd();
  const std::size_t body = n & ~std::size_t(3);
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d xr = _mm256_loadu_pd(ar + j), xi = _mm256_loadu_pd(ai + j);
    const __m256d yr = _mm256_loadu_pd(br + j), yi = _mm256_loadu_pd(bi + j);
    const __m256d re = _mm256_sub_pd(_mm256_mul_pd(xr, yr), _mm256_mul_pd(xi, yi));
    const __m256d im = _mm256_add_pd(_mm256_mul_pd(xr, yi), _mm256_mul_pd(xi, yr));
    neumaier4(vsr, vcr, re);
    neumaier4(vsi, vci, im);
  }
  alignas(32) double sr[4], cr[4], si[4], ci[4];
  _mm256_store_pd(sr, vsr);
  _mm256_store_pd(cr, vcr);
  _mm256_store_pd(si, vsi);
  _mm256_store_pd(ci, vci);
  for (std::size_t j = body; j < n; ++j) {
    const double p = ar[j] * br[j], q = ai[j] * bi[j];
    const double u = ar[j] * bi[j], w = ai[j] * br[j];
    neumaier(sr[j & 3], cr[j & 3], p - q);
    neumaier(si[j & 3], ci[j & 3], u + w);
  }
  return {merge_lanes(sr, cr), merge_lanes(si, ci)};
}

std::complex<double> cdot(const double* ar, const double* ai, const double* br, const double* bi,
                          std::size_t n) {
  return g_isa == Isa::Avx2 ? cdot_avx2(ar, ai, br, bi, n) : cdot_scalar(ar, ai, br, bi, n);
}

double sum(const double* a, std::size_t n) {
  double s[4] = {0, 0, 0, 0}, c[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < n; ++j) neumaier(s[j & 3], c[j & 3], a[j]);
  return merge_lanes(s, c);
}

}  // namespace chainrg::kernels
