#include <cmath>
#include <limits>

#include "fairgeo/error.hpp"
#include "fairgeo/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define FAIRGEO_HAVE_X86 1
#include <immintrin.h>
#else
#define FAIRGEO_HAVE_X86 0
#endif

namespace fairgeo::kernels::avx2 {

#if FAIRGEO_HAVE_X86

#define FAIRGEO_AVX2 __attribute__((target("avx2")))

namespace {

// log(x) for x > 0: x = 2^k m with m in [sqrt(2)/2, sqrt(2)), f = m - 1,
// s = f / (2 + f), log(1 + f) = f - hfsq + s (hfsq + R(s^2)) with the classic
// minimax coefficients below. Under 1 ulp over the normal range.
constexpr double kLg1 = 6.666666666666735130e-01;
constexpr double kLg2 = 3.999999999940941908e-01;
constexpr double kLg3 = 2.857142874366239149e-01;
constexpr double kLg4 = 2.222219843214978396e-01;
constexpr double kLg5 = 1.818357216161805012e-01;
constexpr double kLg6 = 1.531383769920937332e-01;
constexpr double kLg7 = 1.479819860511658591e-01;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kSqrt2 = 1.41421356237309504880;

FAIRGEO_AVX2 inline __m256d log_pd(__m256d x) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  // Subnormals: scale into the normal range first.
  const __m256d tiny_mask = _mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::min()), _CMP_LT_OQ);
  const __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1p54)), tiny_mask);
  __m256d k_adj = _mm256_and_pd(tiny_mask, _mm256_set1_pd(-54.0));

  const __m256i bits = _mm256_castpd_si256(xs);
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  // int64 -> double for small non-negative integers via the 2^52 magic constant.
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d exp_d =
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic)), _mm256_set1_pd(0x1p52));
  __m256d k = _mm256_add_pd(_mm256_sub_pd(exp_d, _mm256_set1_pd(1023.0)), k_adj);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  k = _mm256_add_pd(k, _mm256_and_pd(big, one));

  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 = _mm256_mul_pd(
      w, _mm256_add_pd(_mm256_set1_pd(kLg2),
                       _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(kLg4),
                                                      _mm256_mul_pd(w, _mm256_set1_pd(kLg6))))));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_add_pd(
             _mm256_set1_pd(kLg1),
             _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(kLg3),
                                            _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(kLg5),
                                                                           _mm256_mul_pd(w, _mm256_set1_pd(kLg7))))))));
  const __m256d r = _mm256_add_pd(t2, t1);
  const __m256d hfsq = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_mul_pd(f, f));
  // k*ln2_hi - ((hfsq - (s*(hfsq+R) + k*ln2_lo)) - f)
  const __m256d inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)),
                                      _mm256_mul_pd(k, _mm256_set1_pd(kLn2Lo)));
  __m256d result = _mm256_sub_pd(_mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi)),
                                 _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));

  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  result = _mm256_blendv_pd(result, inf, _mm256_cmp_pd(x, inf, _CMP_EQ_OQ));
  result = _mm256_blendv_pd(result, _mm256_sub_pd(zero, inf), _mm256_cmp_pd(x, zero, _CMP_EQ_OQ));
  result = _mm256_blendv_pd(result, nan, _mm256_cmp_pd(x, zero, _CMP_NGE_UQ));
  return result;
}

// j * log(j / denom), zero where j == 0.
FAIRGEO_AVX2 inline __m256d xlog_ratio(__m256d j, __m256d denom) {
  const __m256d positive = _mm256_cmp_pd(j, _mm256_setzero_pd(), _CMP_GT_OQ);
  const __m256d ratio = _mm256_blendv_pd(_mm256_set1_pd(1.0), _mm256_div_pd(j, denom), positive);
  return _mm256_and_pd(positive, _mm256_mul_pd(j, log_pd(ratio)));
}

}  // namespace

FAIRGEO_AVX2 void evaluate_row(const BinaryChannelModel& m, double a, std::span<const double> b_values,
                               std::span<double> objective, std::span<std::uint8_t> feasible) {
  if (objective.size() < b_values.size() || feasible.size() < b_values.size())
    throw DimensionError("evaluate_row: output spans too short");
  const std::size_t ns = m.p_s.size();
  const std::size_t nt = m.p_t.size();
  const std::size_t n = b_values.size();
  const std::size_t full = n - n % 4;

  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d px0 = _mm256_set1_pd(m.px0);
  const __m256d px1 = _mm256_set1_pd(m.px1);
  const __m256d q00 = _mm256_set1_pd(a * m.px0);
  const __m256d q01 = _mm256_set1_pd((1.0 - a) * m.px0);
  const __m256d eps_bound = _mm256_set1_pd(m.eps_sq + m.tol);
  const __m256d rate_bound = _mm256_set1_pd(m.rate + m.tol);
  const bool chi2_measure = m.measure == FairnessMeasure::ChiSquaredPointwise;

  for (std::size_t i = 0; i < full; i += 4) {
    const __m256d b = _mm256_loadu_pd(b_values.data() + i);
    const __m256d q10 = _mm256_mul_pd(b, px1);
    const __m256d q11 = _mm256_mul_pd(_mm256_sub_pd(one, b), px1);
    const __m256d py[2] = {_mm256_add_pd(q00, q10), _mm256_add_pd(q01, q11)};
    const __m256d qx0[2] = {q00, q01};
    const __m256d qx1[2] = {q10, q11};

    __m256d mi_xy = zero, mi_ty = zero, mi_sy = zero;
    __m256d fair = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (int y = 0; y < 2; ++y) {
      mi_xy = _mm256_add_pd(mi_xy, xlog_ratio(qx0[y], _mm256_mul_pd(px0, py[y])));
      mi_xy = _mm256_add_pd(mi_xy, xlog_ratio(qx1[y], _mm256_mul_pd(px1, py[y])));
      for (std::size_t t = 0; t < nt; ++t) {
        const __m256d j = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(m.t_given_x0[t]), qx0[y]),
                                        _mm256_mul_pd(_mm256_set1_pd(m.t_given_x1[t]), qx1[y]));
        mi_ty = _mm256_add_pd(mi_ty, xlog_ratio(j, _mm256_mul_pd(_mm256_set1_pd(m.p_t[t]), py[y])));
      }
      __m256d chi2 = zero;
      for (std::size_t s = 0; s < ns; ++s) {
        const __m256d ps = _mm256_set1_pd(m.p_s[s]);
        const __m256d j = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(m.s_given_x0[s]), qx0[y]),
                                        _mm256_mul_pd(_mm256_set1_pd(m.s_given_x1[s]), qx1[y]));
        mi_sy = _mm256_add_pd(mi_sy, xlog_ratio(j, _mm256_mul_pd(ps, py[y])));
        const __m256d d = _mm256_sub_pd(_mm256_div_pd(j, py[y]), ps);
        chi2 = _mm256_add_pd(chi2, _mm256_div_pd(_mm256_mul_pd(d, d), ps));
      }
      if (chi2_measure) {
        const __m256d ok = _mm256_or_pd(_mm256_cmp_pd(chi2, eps_bound, _CMP_LE_OQ),
                                        _mm256_cmp_pd(py[y], zero, _CMP_EQ_OQ));
        fair = _mm256_and_pd(fair, ok);
      }
    }
    if (!chi2_measure) fair = _mm256_and_pd(fair, _mm256_cmp_pd(mi_sy, eps_bound, _CMP_LE_OQ));
    const __m256d feas = _mm256_and_pd(fair, _mm256_cmp_pd(mi_xy, rate_bound, _CMP_LE_OQ));

    _mm256_storeu_pd(objective.data() + i, _mm256_max_pd(mi_ty, zero));
    const int bitsmask = _mm256_movemask_pd(feas);
    for (int lane = 0; lane < 4; ++lane) feasible[i + lane] = static_cast<std::uint8_t>((bitsmask >> lane) & 1);
  }
  if (full < n)
    scalar::evaluate_row(m, a, b_values.subspan(full), objective.subspan(full), feasible.subspan(full));
}

FAIRGEO_AVX2 void log(std::span<const double> in, std::span<double> out) {
  if (out.size() < in.size()) throw DimensionError("log: output span too short");
  const std::size_t n = in.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, log_pd(_mm256_loadu_pd(in.data() + i)));
  if (i < n) {
    alignas(32) double buf[4] = {1.0, 1.0, 1.0, 1.0};
    for (std::size_t k = i; k < n; ++k) buf[k - i] = in[k];
    alignas(32) double res[4];
    _mm256_store_pd(res, log_pd(_mm256_load_pd(buf)));
    for (std::size_t k = i; k < n; ++k) out[k] = res[k - i];
  }
}

#else  // !FAIRGEO_HAVE_X86

void evaluate_row(const BinaryChannelModel&, double, std::span<const double>, std::span<double>,
                  std::span<std::uint8_t>) {
  throw NumericalError("AVX2 kernels are not available on this architecture");
}

void log(std::span<const double>, std::span<double>) {
  throw NumericalError("AVX2 kernels are not available on this architecture");
}

#endif

}  // namespace fairgeo::kernels::avx2
